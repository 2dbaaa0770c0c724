use std::path::Path;
use std::process::{Command, Output};

fn holomat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holomat")).args(args).env("HOLOMAT_THREADS", "2").output().unwrap()
}

fn run_config(dir: &Path, text: &str) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    holomat(&["run", path.to_str().unwrap()])
}

#[test]
fn flat_bianchi_config_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "model = \"flat\"\nchecks = [\"bianchi\"]\nsamples = 2\noutput = \"report.json\"\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["summary"]["pass"], 4);
}

#[test]
fn unknown_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "model = \"flat\"\nchecks = [\"foo\"]\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));
}

#[test]
fn model_table_header_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let text = "checks = [\"metric-compatibility\"]\nkinds = [\"bismut\"]\nsamples = 2\n[model]\nname = \"fubini-study\"\nparams = { m = 1 }\nfd_step = 1e-4\n";
    let out = run_config(dir.path(), text);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS metric-compatibility"));
}

#[test]
fn missing_config_exits_one() {
    assert_eq!(holomat(&["run", "/nonexistent/holomat.toml"]).status.code(), Some(1));
}

#[test]
fn catalog_lists_models_and_checks() {
    let out = holomat(&["catalog"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["hopf-surface", "complex-lie-group-heisenberg", "ricci-su", "bochner-chain"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn single_check_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("check.json");
    let out = holomat(&[
        "check",
        "bianchi",
        "--model",
        "hopf-surface",
        "--kind",
        "gauduchon",
        "--t",
        "0.5",
        "--samples",
        "2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["kind"]["t"], 0.5);
    assert_eq!(report["checks"][0]["status"], "pass");
}

#[test]
fn single_check_argument_errors_exit_one() {
    assert_eq!(holomat(&["check", "bianchi", "--model", "flat"]).status.code(), Some(1));
    assert_eq!(holomat(&["check", "bianchi", "--model", "nowhere", "--kind", "chern"]).status.code(), Some(1));
    assert_eq!(holomat(&["check", "bianchi", "--model", "flat", "--kind", "gauduchon"]).status.code(), Some(1));
    assert_eq!(holomat(&["check", "foo", "--model", "flat", "--kind", "chern"]).status.code(), Some(1));
}

#[test]
fn failing_check_exits_two_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model = \"hopf-surface\"\nchecks = [\"bianchi\"]\nkinds = [\"chern\"]\nsamples = 2\noutput = \"r.json\"\n[tolerances]\nbianchi = 1e-300\n";
    let out = run_config(dir.path(), text);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["exit_code"], 2);
}
