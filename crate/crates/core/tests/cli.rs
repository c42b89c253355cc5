use std::process::Command;

use serde_json::Value;

fn logsing(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_logsing")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let (code, text) = logsing(&all);
    (code, serde_json::from_str(&text).expect("valid JSON"))
}

#[test]
fn analyze_reports_the_exponent() {
    let (code, doc) = structured(&["analyze", "-e", "D[t,2](u) = D[t,1](u)^2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["analysis"]["sigma_c"], "0");
    assert_eq!(doc["analysis"]["l"], 0);
    assert_eq!(doc["leading_equation"], "A + 1 = 0");
}

#[test]
fn solve_prints_series_rows() {
    let (code, text) = logsing(&["solve", "-x", "m3-cubic", "-K", "4"]);
    assert_eq!(code, 0);
    assert!(text.contains("a(x) = i"), "{text}");
    assert!(text.contains("log t"), "{text}");
}

#[test]
fn verify_passes_on_examples() {
    for name in ["prototype", "prototype-pde", "m3-l0", "m4-l2", "wave-quadratic", "kdv-laurent"] {
        let (code, doc) = structured(&["verify", "-x", name, "-K", "4"]);
        assert_eq!(code, 0, "{name}: {doc}");
        assert_eq!(doc["verification"]["passed"], true, "{name}");
    }
}

#[test]
fn prescribed_mode_from_flags() {
    let (code, doc) = structured(&[
        "solve",
        "-e",
        "D[t,3](u) = 6*u*D[t,1](u) - D[x1,1](u)",
        "-K",
        "4",
        "--lead",
        "-2=2",
        "--data",
        "2=x1",
        "--data",
        "4=0",
    ]);
    assert_eq!(code, 0, "{doc}");
    let rhos: Vec<&str> = doc["solution"]["resonances"].as_array().unwrap().iter().map(|r| r["rho"].as_str().unwrap()).collect();
    assert_eq!(rhos, ["2", "4"]);
}

#[test]
fn missing_resonance_data_exits_5() {
    let (code, _) = logsing(&["solve", "-e", "D[t,3](u) = 6*u*D[t,1](u) - D[x1,1](u)", "-K", "4", "--lead", "-2=2"]);
    assert_eq!(code, 5);
}

#[test]
fn error_exit_codes() {
    assert_eq!(logsing(&["analyze", "-e", "D[t,2](u) = D[t,1](u"]).0, 2);
    assert_eq!(logsing(&["solve", "-x", "m4-l1"]).0, 3);
    assert_eq!(logsing(&["solve", "-e", "D[t,3](u) = D[t,2](u)*D[t,1](u)", "-K", "4"]).0, 5);
    assert_eq!(logsing(&["solve", "-x", "nope"]).0, 1);
}

#[test]
fn resonance_flag_enables_log_raising() {
    let args = ["solve", "-e", "D[t,3](u) = D[t,2](u)*D[t,1](u)", "-K", "4", "--resonance", "frobenius"];
    let (code, text) = logsing(&args);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("resonance at 2"), "{text}");
}

#[test]
fn majorant_certificate_is_reported() {
    let (code, doc) = structured(&["majorant", "-e", "D[t,2](u) = D[t,1](u)^2 + t", "-K", "6", "--max-deg", "2"]);
    assert_eq!(code, 0, "{doc}");
    let cert = &doc["certificate"];
    assert_eq!(cert["violations"].as_array().unwrap().len(), 0);
    assert_eq!(cert["c"].as_array().unwrap().len(), 6);
}

#[test]
fn structured_output_is_deterministic() {
    let args = ["solve", "-x", "prototype-pde", "-K", "5"];
    let a = logsing(&[&args[..], &["--format", "structured"]].concat());
    let b = logsing(&[&args[..], &["--format", "structured"]].concat());
    assert_eq!(a, b);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("logsing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("examples.txt");
    let (code, stdout) = logsing(&["examples", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("kdv-laurent"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn equation_file_input() {
    let dir = std::env::temp_dir().join(format!("logsing-file-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eq.txt");
    std::fs::write(&path, "D[t,2](u) = D[t,1](u)^2\n").unwrap();
    let (code, text) = logsing(&["solve", path.to_str().unwrap(), "-K", "3"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("a(x) = -1"));
    std::fs::remove_dir_all(&dir).ok();
}
