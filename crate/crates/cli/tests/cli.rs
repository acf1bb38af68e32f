//! CLI surface tests: golden payloads, format consistency, cache behavior,
//! exit codes, and worker-count determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cmtors_cli::run_for_report;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, payload: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("CMTORS_REGEN_GOLDEN").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, payload).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {name}; set CMTORS_REGEN_GOLDEN=1"));
    assert_eq!(payload, expected, "payload drift against {name}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmtors"))
}

#[test]
fn golden_olson_count_1000() {
    let report = run_for_report(&["cmtors", "olson", "count", "1000"], 2).unwrap();
    check_golden("olson_count_1000.json", &report.payload_json());
}

#[test]
fn golden_lambda_5() {
    let report = run_for_report(&["cmtors", "lambda", "5"], 2).unwrap();
    check_golden("lambda_5.json", &report.payload_json());
}

#[test]
fn golden_classnum_sweep_30() {
    let report = run_for_report(&["cmtors", "classnum", "sweep", "30"], 2).unwrap();
    check_golden("classnum_sweep_30.json", &report.payload_json());
}

#[test]
fn golden_olson_check_23() {
    let report = run_for_report(&["cmtors", "olson", "check", "23"], 2).unwrap();
    check_golden("olson_check_23.json", &report.payload_json());
    assert_eq!(report.result["olson"], serde_json::json!(true));
    assert!(report.result["witness"].is_null());
}

#[test]
fn golden_tcm_lb_4() {
    let report = run_for_report(&["cmtors", "tcm", "lb", "4"], 2).unwrap();
    check_golden("tcm_lb_4.json", &report.payload_json());
    assert_eq!(report.result["lower_bound"], serde_json::json!(13));
}

#[test]
fn golden_primepower_check_11_2() {
    let report = run_for_report(&["cmtors", "primepower", "check", "11", "2"], 2).unwrap();
    check_golden("primepower_check_11_2.json", &report.payload_json());
    assert_eq!(report.result["olson"], serde_json::json!(true));
}

#[test]
fn json_and_csv_carry_identical_numbers() {
    let report = run_for_report(&["cmtors", "classnum", "sweep", "100"], 2).unwrap();
    let entries = report.result["entries"].as_array().unwrap();
    let out = bin()
        .args(["--format", "csv", "classnum", "sweep", "100"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "ell,h");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), entries.len());
    for (row, entry) in rows.iter().zip(entries) {
        let (ell, h) = row.split_once(',').unwrap();
        assert_eq!(ell.parse::<u64>().unwrap(), entry["ell"].as_u64().unwrap());
        assert_eq!(h.parse::<u64>().unwrap(), entry["h"].as_u64().unwrap());
    }
}

#[test]
fn payloads_are_identical_across_worker_counts() {
    for args in [
        vec!["cmtors", "olson", "count", "20000"],
        vec!["cmtors", "primepower", "scan", "1000000"],
        vec!["cmtors", "classnum", "sweep", "10000"],
    ] {
        let one = run_for_report(&args, 1).unwrap().payload_json();
        let four = run_for_report(&args, 4).unwrap().payload_json();
        assert_eq!(one, four, "args = {args:?}");
    }
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(bin().arg("--nonsense").status().unwrap().code(), Some(2));
    assert_eq!(
        bin().args(["classnum", "sweep"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        bin().args(["classnum", "notanumber"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        bin()
            .args(["--unconditional-only", "--algorithm", "bsgs", "classnum", "sweep", "30"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    // domain errors
    assert_eq!(
        bin().args(["classnum", "-12"]).status().unwrap().code(),
        Some(4)
    );
    assert_eq!(
        bin().args(["lambda", "1"]).status().unwrap().code(),
        Some(4)
    );
    assert_eq!(
        bin().args(["primepower", "check", "6", "1"]).status().unwrap().code(),
        Some(4)
    );
    // success
    assert_eq!(
        bin().args(["classnum", "-7"]).status().unwrap().code(),
        Some(0)
    );
}

#[test]
fn cache_round_trip_and_reuse() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = run_for_report(
        &["cmtors", "--cache-path", cache, "classnum", "sweep", "200"],
        2,
    )
    .unwrap();
    assert_eq!(first.provenance.cache_hits, 0);
    assert!(first.provenance.cache_misses > 0);
    let file = dir.path().join("classnum-sweep-200.txt");
    assert!(file.exists());
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.trim_end().ends_with("#complete,200"));

    let second = run_for_report(
        &["cmtors", "--cache-path", cache, "classnum", "sweep", "200"],
        2,
    )
    .unwrap();
    assert_eq!(second.provenance.cache_misses, 0);
    assert_eq!(second.provenance.cache_hits, first.provenance.cache_misses);
    assert_eq!(first.result, second.result);
}

#[test]
fn partial_cache_is_extended() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("classnum-sweep-100.txt");
    fs::write(&file, "7,1\n11,1\n19,1\n").unwrap(); // no terminator: partial
    let report = run_for_report(
        &[
            "cmtors",
            "--cache-path",
            dir.path().to_str().unwrap(),
            "classnum",
            "sweep",
            "100",
        ],
        2,
    )
    .unwrap();
    assert_eq!(report.provenance.cache_hits, 3);
    assert!(report.provenance.cache_misses > 0);
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.trim_end().ends_with("#complete,100"));
    // now complete: a rerun is pure hits
    let again = run_for_report(
        &[
            "cmtors",
            "--cache-path",
            dir.path().to_str().unwrap(),
            "classnum",
            "sweep",
            "100",
        ],
        2,
    )
    .unwrap();
    assert_eq!(again.provenance.cache_misses, 0);
    assert_eq!(report.result, again.result);
}

#[test]
fn tampered_cache_is_a_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("classnum-sweep-30.txt");
    fs::write(&file, "7,1\n23,4\n#complete,30\n").unwrap(); // even h: parity breach
    let code = bin()
        .args([
            "--cache-path",
            dir.path().to_str().unwrap(),
            "classnum",
            "sweep",
            "30",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(3));
}

#[test]
fn cache_env_var_with_flag_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env(cmtors_cli::CACHE_ENV_VAR, env_dir.path())
        .args(["classnum", "sweep", "50"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("classnum-sweep-50.txt").exists());

    let out = bin()
        .env(cmtors_cli::CACHE_ENV_VAR, env_dir.path())
        .args([
            "--cache-path",
            flag_dir.path().to_str().unwrap(),
            "classnum",
            "sweep",
            "60",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(flag_dir.path().join("classnum-sweep-60.txt").exists());
    assert!(!env_dir.path().join("classnum-sweep-60.txt").exists());
}

#[test]
fn unconditional_only_is_recorded_in_provenance() {
    let report = run_for_report(
        &["cmtors", "--unconditional-only", "classnum", "sweep", "50"],
        2,
    )
    .unwrap();
    assert!(report.provenance.unconditional);
    let report = run_for_report(
        &["cmtors", "--algorithm", "bsgs", "classnum", "sweep", "50"],
        2,
    )
    .unwrap();
    assert_eq!(report.provenance.algorithm, "bsgs");
    assert!(!report.provenance.unconditional);
}

#[test]
fn forms_backend_selectable_by_name() {
    let charsum = run_for_report(&["cmtors", "classnum", "sweep", "500"], 2).unwrap();
    let forms = run_for_report(
        &["cmtors", "--algorithm", "forms", "classnum", "sweep", "500"],
        2,
    )
    .unwrap();
    assert_eq!(charsum.result["entries"], forms.result["entries"]);
    assert_eq!(forms.provenance.algorithm, "forms");
}
