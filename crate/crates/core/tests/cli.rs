use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curvestat"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn gauss_report() {
    let (code, out, _) = run(&["gauss", "--p", "7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["all_ok"], true);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 6);
    assert!(v["meta"]["duration_ms"].is_u64());
}

#[test]
fn prop21_passes() {
    let (code, out, _) = run(&["prop21", "--part", "a", "--ell", "2", "--m", "3", "--L", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(v["result"]["bound"], 72576.0);
}

#[test]
fn hypothesis_failure_exits_one() {
    let (code, _, err) = run(&[
        "phi", "--p", "10007", "--ell", "2", "--m", "4", "--poly", "1,1,0,1", "--I", "20", "--L", "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("GCD(m,ℓ)=1"), "{err}");
}

#[test]
fn usage_errors_exit_two_and_name_the_field() {
    let (code, _, err) = run(&["walk", "--ell", "2", "--m", "3", "--L", "10", "--trials", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("`seed`"));
    let (code, _, _) = run(&["phi", "--bogus"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["gauss", "--p", "seven"]);
    assert_eq!(code, 2);
    assert!(err.contains("--p"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"p": 11, "format": "json"}"#).unwrap();
    let (code, out, _) = run(&["gauss", "--config", cfg.to_str().unwrap(), "--p", "13"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 12);

    std::fs::write(&cfg, r#"{"p": 11, "prime": 5}"#).unwrap();
    let (code, _, err) = run(&["gauss", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("prime"), "{err}");
}

#[test]
fn csv_histogram_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let (code, _, err) = run(&[
        "phi", "--p", "10007", "--ell", "2", "--m", "3", "--poly", "1,1,0,1", "--I", "20", "--L", "1",
        "--format", "csv", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,count,phi_num,phi_den,phi_dec");
    assert_eq!(lines.len(), 4);
    let total: u64 = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 10007 - 20);
}

#[test]
fn thread_count_does_not_change_reports() {
    let canon = |threads: &str| {
        let (code, out, _) = run(&[
            "walk", "--ell", "3", "--m", "4", "--L", "500", "--trials", "40", "--seed", "9", "--threads", threads,
        ]);
        assert_eq!(code, 0);
        let mut v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v.as_object_mut().unwrap().remove("meta");
        v.to_string()
    };
    assert_eq!(canon("1"), canon("4"));
}

#[test]
fn joint_reports_every_cell() {
    let (code, out, err) = run(&[
        "joint", "--p", "10009", "--ell", "3", "--m", "2", "--poly", "0,1", "--poly", "1,1", "--I", "30",
        "--L", "2", "--record-asymptotic",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["histogram"].as_array().unwrap().len(), 4);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"multiplicative independence"));
}

#[test]
fn verify_subset() {
    let (code, out, err) = run(&["verify", "--criteria", "3,8"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("criterion  3 PASS"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["pass"], true);
}
