//! Rendering of a report as a table, as JSON, or as CSV.
//!
//! CSV flattens the result table only: the first array-of-objects field in
//! the result becomes the rows; with no such field the scalar result fields
//! become a single row. Keys are ordered as serialized, so the CSV carries
//! exactly the numeric content of the JSON result.

use serde_json::Value;

use crate::report::RunReport;

pub fn render(format: &str, report: &RunReport) {
    match format {
        "json" => println!("{}", report.full_json()),
        "csv" => print!("{}", to_csv(&report.result)),
        _ => print!("{}", to_table(report)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// (headers, rows) of the result's tabular part.
pub fn csv_cells(result: &Value) -> (Vec<String>, Vec<Vec<String>>) {
    let obj = match result {
        Value::Object(m) => m,
        other => return (vec!["value".into()], vec![vec![scalar(other)]]),
    };
    for (_key, v) in obj {
        if let Value::Array(items) = v {
            if let Some(Value::Object(first)) = items.first() {
                let headers: Vec<String> = first.keys().cloned().collect();
                let rows = items
                    .iter()
                    .map(|item| {
                        headers
                            .iter()
                            .map(|h| scalar(item.get(h).unwrap_or(&Value::Null)))
                            .collect()
                    })
                    .collect();
                return (headers, rows);
            }
        }
    }
    // no table inside: one row of the scalar fields
    let headers: Vec<String> = obj
        .iter()
        .filter(|(_, v)| !matches!(v, Value::Array(_) | Value::Object(_)))
        .map(|(k, _)| k.clone())
        .collect();
    let row = headers
        .iter()
        .map(|h| scalar(obj.get(h).unwrap_or(&Value::Null)))
        .collect();
    (headers, vec![row])
}

pub fn to_csv(result: &Value) -> String {
    let (headers, rows) = csv_cells(result);
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn to_table(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("command: {}\n", report.command));
    if let Value::Object(m) = &report.result {
        let mut table_field: Option<(&String, &Vec<Value>)> = None;
        for (k, v) in m {
            match v {
                Value::Array(items) if matches!(items.first(), Some(Value::Object(_))) => {
                    if table_field.is_none() {
                        table_field = Some((k, items));
                    }
                }
                Value::Array(items) => {
                    let joined: Vec<String> = items.iter().map(scalar).collect();
                    out.push_str(&format!("{k}: [{}]\n", joined.join(", ")));
                }
                _ => out.push_str(&format!("{k}: {}\n", scalar(v))),
            }
        }
        if let Some((name, items)) = table_field {
            out.push_str(&format!("{name}:\n"));
            if let Some(Value::Object(first)) = items.first() {
                let headers: Vec<String> = first.keys().cloned().collect();
                out.push_str(&format!("  {}\n", headers.join("\t")));
                for item in items {
                    let row: Vec<String> = headers
                        .iter()
                        .map(|h| scalar(item.get(h).unwrap_or(&Value::Null)))
                        .collect();
                    out.push_str(&format!("  {}\n", row.join("\t")));
                }
            }
        }
    } else {
        out.push_str(&format!("result: {}\n", scalar(&report.result)));
    }
    out.push_str(&format!(
        "provenance: algorithm={} unconditional={} cache_hits={} cache_misses={}\n",
        report.provenance.algorithm,
        report.provenance.unconditional,
        report.provenance.cache_hits,
        report.provenance.cache_misses
    ));
    out.push_str(&format!(
        "timing_ms: {:.1} workers: {}\n",
        report.timing_ms, report.workers
    ));
    out
}
