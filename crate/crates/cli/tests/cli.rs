use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nodal-lab"));
    c.env_remove("NODAL_LAB_THREADS");
    c
}

#[test]
fn comb_verify_passes() {
    let out = bin().args(["--experiment", "comb-verify", "--no-timing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("kind,n,lambda,samples,mean,stderr,predicted,ratio,z,discards,seconds,seed\n"));
    assert_eq!(stdout.lines().count(), 9);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("PASS comb-verify n=7"));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = bin().args(["--experiment", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_lambda_is_reported() {
    let out = bin().args(["--experiment", "zero-count"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("lambda"));
}

#[test]
fn reruns_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "3"].into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.json"));
        let status = bin()
            .args(["--experiment", "zero-count", "--lambda", "12", "--samples", "200", "--seed", "4"])
            .args(["--format", "json", "--no-timing", "--threads", threads, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"kind": "zero-count", "lambda": 12, "samples": 10}"#).unwrap();
    let out = bin().arg("--config").arg(&cfg).args(["--samples", "25", "--no-timing"]).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "zero-count");
    assert_eq!(row[3], "25");
}

#[test]
fn thread_count_from_the_environment() {
    let args = ["--experiment", "zero-count", "--lambda", "8", "--samples", "20", "--no-timing"];
    let out = bin().args(args).env("NODAL_LAB_THREADS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().args(args).env("NODAL_LAB_THREADS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mesh_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("surface.obj");
    let status = bin()
        .args(["--experiment", "euler-3d", "--lambda", "2", "--samples", "2", "--grid", "24", "--no-timing"])
        .arg("--mesh-dump")
        .arg(&obj)
        .output()
        .unwrap()
        .status;
    assert!(status.code() == Some(0) || status.code() == Some(1));
    assert!(std::fs::read_to_string(&obj).unwrap().starts_with("v "));

    let csv = dir.path().join("lines.csv");
    bin()
        .args(["--experiment", "nodal-length", "--lambda", "3", "--samples", "2", "--no-timing"])
        .arg("--mesh-dump")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x0,y0,x1,y1,length\n"));
}
