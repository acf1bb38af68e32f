//! On-disk class number tables.
//!
//! Plain text, one `ell,h` record per line in ascending ell, terminated by a
//! line `#complete,<L>`. A file without the terminator is a partial cache:
//! it can be extended but is never treated as a complete sweep.

use std::fs;
use std::path::Path;

use crate::classnum::ClassNumberTable;
use crate::error::{Error, Result};

/// Parse a cache file. Structural problems (descending ell, even h, entries
/// failing the class number bound) surface as integrity errors; anything
/// unreadable surfaces as a parse error with its line number.
pub fn cache_load(path: &Path) -> Result<ClassNumberTable> {
    let text = fs::read_to_string(path)?;
    parse_cache(&text)
}

pub(crate) fn parse_cache(text: &str) -> Result<ClassNumberTable> {
    let mut entries: Vec<(u64, u64)> = Vec::new();
    let mut complete_bound: Option<u64> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if complete_bound.is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "content after the #complete terminator".into(),
            });
        }
        if let Some(rest) = line.strip_prefix('#') {
            let bound = rest
                .strip_prefix("complete,")
                .and_then(|b| b.parse::<u64>().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("unrecognized directive '{line}'"),
                })?;
            complete_bound = Some(bound);
            continue;
        }
        let (l_str, h_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected 'ell,h', got '{line}'"),
        })?;
        let l: u64 = l_str.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad integer '{l_str}'"),
        })?;
        let h: u64 = h_str.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad integer '{h_str}'"),
        })?;
        if let Some(&(prev, _)) = entries.last() {
            if l <= prev {
                return Err(Error::Integrity(format!(
                    "line {lineno}: ell {l} does not ascend past {prev}"
                )));
            }
        }
        entries.push((l, h));
    }
    let table = match complete_bound {
        Some(bound) => ClassNumberTable::new(bound, true, entries),
        None => {
            let bound = entries.last().map_or(0, |&(l, _)| l);
            ClassNumberTable::new(bound, false, entries)
        }
    };
    table.validate()?;
    Ok(table)
}

/// Write a table; complete tables get the terminator line.
pub fn cache_store(path: &Path, table: &ClassNumberTable) -> Result<()> {
    let mut out = String::new();
    for &(l, h) in table.entries() {
        out.push_str(&format!("{l},{h}\n"));
    }
    if table.is_complete() {
        out.push_str(&format!("#complete,{}\n", table.upper_bound()));
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classnum::class_number_sweep_default;

    #[test]
    fn round_trip_identity() {
        let table = class_number_sweep_default(30).unwrap();
        let dir = std::env::temp_dir().join("cmtors-cache-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep30.txt");
        cache_store(&path, &table).unwrap();
        let loaded = cache_load(&path).unwrap();
        assert_eq!(loaded, table);
        assert!(loaded.is_complete());
        assert_eq!(loaded.entries().len(), 4);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn missing_terminator_is_partial() {
        let t = parse_cache("7,1\n11,1\n").unwrap();
        assert!(!t.is_complete());
        assert_eq!(t.upper_bound(), 11);
    }

    #[test]
    fn tampered_parity_detected() {
        let err = parse_cache("7,1\n23,4\n#complete,30\n").unwrap_err();
        assert!(matches!(err, Error::Integrity(_)), "{err}");
    }

    #[test]
    fn descending_entries_detected() {
        let err = parse_cache("11,1\n7,1\n").unwrap_err();
        assert!(matches!(err, Error::Integrity(_)), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_cache("7,1\nnot a record\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn incomplete_claim_detected() {
        // claims completeness to 30 but 19 is missing
        let err = parse_cache("7,1\n11,1\n23,3\n#complete,30\n").unwrap_err();
        assert!(matches!(err, Error::Integrity(_)), "{err}");
    }

    #[test]
    fn trailing_garbage_after_terminator() {
        let err = parse_cache("7,1\n#complete,7\n11,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
