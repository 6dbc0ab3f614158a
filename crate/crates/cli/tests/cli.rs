use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ctkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctkit")).args(args).output().expect("run ctkit")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn no_cloning_section_exits_zero_with_its_certificate() {
    let out = ctkit(&["--json", "theorems", "--section", "8.3", &fixture("qubit.ctm")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["records"][0]["certificates"][0], "CloningGram");
    assert_eq!(r["summary"]["violations"], 0);
}

#[test]
fn text_reports_name_certificates_verbatim() {
    let out = ctkit(&["theorems", "--section", "8.3", &fixture("qubit.ctm")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certificate CloningGram"));
}

#[test]
fn falsify_prints_its_coverage() {
    let out = ctkit(&["falsify", "--max-states", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("70 model/variable pairs"));
}

#[test]
fn falsify_beyond_the_bound_is_refused() {
    let out = ctkit(&["falsify", "--max-states", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(ctkit(&["teleport"]).status.code(), Some(2));
    assert_eq!(ctkit(&["superinfo", "/nonexistent/model.ctm"]).status.code(), Some(2));
    assert_eq!(ctkit(&["check", "--principle", "XI", &fixture("qubit.ctm")]).status.code(), Some(2));
    let out = ctkit(&["theorems", "--section", "8.9", &fixture("qubit.ctm")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_model_files_exit_two_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ctm");
    std::fs::write(&bad, "[[substrate]]\nname = \"q\"\nkind = quantum\n").unwrap();
    let out = ctkit(&["superinfo", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 8"));

    let src = std::fs::read_to_string(fixture("qubit.ctm")).unwrap();
    let short = dir.path().join("short.ctm");
    std::fs::write(&short, src.replacen("[[1.0, 0.0], [0.0, 0.0]]", "[[0.9, 0.0], [0.0, 0.0]]", 1)).unwrap();
    let out = ctkit(&["superinfo", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Norm"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let qubit = fixture("qubit.ctm");
    let qutrit = fixture("qutrit.ctm");
    let runs: [&[&str]; 4] = [
        &["--json", "--seed", "5", "theorems", &qubit],
        &["--json", "distinguish", &qutrit],
        &["--json", "check", "--principle", "VIII", &qutrit],
        &["--text", "superinfo", &qubit],
    ];
    for args in runs {
        let a = ctkit(args);
        let b = ctkit(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn replaying_a_report_reproduces_it() {
    let first = ctkit(&["--json", "--seed", "3", "clone-check", &fixture("qutrit.ctm")]);
    let report = json(&first);
    let argv: Vec<String> = report["command"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().to_owned())
        .collect();
    let args: Vec<&str> = argv.iter().map(String::as_str).collect();
    let again = ctkit(&args);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(report["seed"], 3);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ctkit(&["--json", "--out", path.to_str().unwrap(), "capacity", &fixture("two_qubit.ctm")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["records"][2]["detail"], 2.0);
}

#[test]
fn timings_appear_only_when_asked_for() {
    let plain = ctkit(&["--json", "observable", &fixture("bit.ctm")]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("wall_ms"));
    let timed = ctkit(&["--json", "--timings", "observable", &fixture("bit.ctm")]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("wall_ms"));
}

#[test]
fn measure_reports_the_measurer_and_its_reach() {
    let out = ctkit(&["--json", "measure", "--variable", "X", "--target", "Z", &fixture("qubit.ctm")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["records"][0]["answer"], "possible");
    assert_eq!(r["records"][1]["answer"], "does not measure it");
}
