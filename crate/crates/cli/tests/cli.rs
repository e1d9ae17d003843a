use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stringyang")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn corpus(rel: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "corpus", rel].iter().collect();
    path.display().to_string()
}

#[test]
fn eval_prints_normal_forms() {
    for (expr, expected) in [
        ("comm(b[1], b[-1])", "2*b[0] - 1/3*a[0]^3"),
        ("comm(H, b[5])", "5*b[5]"),
        ("comm(a[0], b[7])", "0"),
        ("comm(a[2], a[-2])", "2*a[0]"),
    ] {
        let out = run(&["eval", expr]);
        assert_eq!(out.status.code(), Some(0), "{expr}");
        assert_eq!(stdout(&out).trim(), expected, "{expr}");
    }
    let out = run(&["--param", "eps=2", "eval", "comm(b[1], b[-1])"]);
    assert_eq!(stdout(&out).trim(), "2*b[0] - 4/3*a[0]^3");
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["check", "jacobi", "--window", "2"], 0),
        (&["check", "bialgebra", "--window", "2"], 0),
        (&["check", "casimir", "--window", "3"], 0),
        (&["--profile", "general", "check", "bialgebra", "--window", "2"], 0),
        (&["--profile", "general", "--param", "f=0", "check", "bialgebra", "--window", "2"], 1),
        (&["--profile", "general", "--param", "eps[2]=2", "check", "bialgebra", "--window", "3"], 1),
        (&["derive", "central", "--window", "6"], 0),
        (&["derive", "gamma", "--window", "3"], 0),
        (&["derive", "fg-epsilon", "--e1", "1/2", "--e2", "3", "--window", "10"], 0),
        (&["derive", "delta-prime", "--multiple", "2"], 0),
        (&["derive", "central", "--window", "2"], 2),
        (&["eval", "comm(b[1]"], 2),
        (&["eval", "a[m]"], 2),
        (&["check", "nonsense"], 2),
        (&["--param", "zeta=1", "eval", "H"], 2),
        (&["--param", "eps=0.5", "eval", "H"], 2),
        (&["--jobs", "0", "check", "jacobi"], 2),
        (&["--bogus"], 2),
        (&["--help"], 0),
        (&["--version"], 0),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn parse_reports_positions() {
    let ok = run(&["parse", &corpus("valid/example.lba")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains(": ok"));
    let bad = run(&["parse", &corpus("invalid/decimal_literal.lba")]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("decimal_literal.lba:2:13:"), "{err}");
    let missing = run(&["parse", "/nonexistent/file.lba"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn presentation_files_drive_checks() {
    let out = run(&["--presentation", &corpus("valid/witt.lba"), "check", "jacobi", "--window", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["--presentation", &corpus("invalid/missing_delta.lba"), "check", "jacobi"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_without_timing_is_stable() {
    let args = ["--format", "json", "--no-timing", "check", "bialgebra", "--window", "2"];
    let first = stdout(&run(&args));
    let second = stdout(&run(&["--jobs", "1"].iter().chain(args.iter()).copied().collect::<Vec<_>>()));
    assert_eq!(first, second);
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(doc["check"], "bialgebra");
    assert_eq!(doc["status"], "pass");
    assert!(doc.get("elapsed_ms").is_none());
    let keys: Vec<&str> = first.lines().filter_map(|l| l.strip_prefix("  \"")).map(|l| l.split('"').next().unwrap()).collect();
    assert_eq!(keys, ["check", "window", "status", "cases", "counterexamples"]);

    let timed = stdout(&run(&["--format", "json", "check", "jacobi", "--window", "1"]));
    let doc: serde_json::Value = serde_json::from_str(&timed).unwrap();
    assert!(doc["elapsed_ms"].is_number());
}

#[test]
fn failing_report_lists_counterexamples() {
    let out = run(&["--profile", "general", "--param", "f=0", "--format", "json", "--no-timing", "check", "bialgebra", "--window", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["status"], "fail");
    let first = &doc["counterexamples"][0];
    assert_eq!(first["inputs"], serde_json::json!(["homomorphism", "b[-1]", "b[1]"]));
    assert_eq!(first["residual"], "a[0] (x) a[0]^2 + a[0]^2 (x) a[0]");
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("stringyang-cli-test-{}.txt", std::process::id()));
    let out = run(&["--output", path.to_str().unwrap(), "eval", "comm(H, a[2])"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "2*a[2]");
    let _ = std::fs::remove_file(path);
}
