use std::process::{Command, Output};

fn oswave(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oswave"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("OSWAVE_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn growth_writes_csv_and_summary() {
    let dir = std::env::temp_dir().join(format!("oswave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("growth.csv");
    let out = oswave(&["growth", "--nu", "1e-6", "--method", "miles", "-o", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("alpha_scaled,re_lambda,im_c,re_c\n"));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let argmax = summary["argmax_alpha_scaled"].as_f64().unwrap();
    assert!((argmax - 2.7).abs() <= 0.2, "{argmax}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["marginal", "--nu", "1e-6,1e-7,1e-8", "--method", "miles"];
    let one = oswave(&args, Some("1"));
    let four = oswave(&args, Some("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(String::from_utf8_lossy(&one.stdout).lines().count(), 4);
}

#[test]
fn validation_and_numerical_exit_codes() {
    let bad = oswave(&["eigen", "--alpha", "abc"], None);
    assert_eq!(bad.status.code(), Some(2));
    let bad_env = oswave(&["marginal"], Some("many"));
    assert_eq!(bad_env.status.code(), Some(2));
    let missing = oswave(&["eigen", "--alpha", "0.03", "--profile", "/nonexistent/profile.json"], None);
    assert_eq!(missing.status.code(), Some(2));
    let numerical = oswave(&["marginal", "--nu", "1e-5"], None);
    assert_eq!(numerical.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(numerical.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "numerical");
}

#[test]
fn selfcheck_exits_cleanly() {
    let out = oswave(&["selfcheck"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}
