use std::process::{Command, Output};

fn brjuno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brjuno"))
        .args(args)
        .env_remove("BRJUNO_PRECISION_BITS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn phi_at_one_half_is_log_two() {
    let o = brjuno(&["phi", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("log 2"), "{s}");
    assert!(s.contains("0.693147180559945309417"), "{s}");
}

#[test]
fn psi_at_zero_is_zero() {
    let o = brjuno(&["psi", "0", "--tol", "1e-9", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["psi"]["lo"], "0");
    assert_eq!(v["psi"]["hi"], "0");
}

#[test]
fn decimals_are_parsed_exactly() {
    let o = brjuno(&["phi", "0.6180339887", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["point"], "6180339887/10000000000");
}

#[test]
fn negative_increments_are_accepted() {
    let o = brjuno(&["psi-inc", "1/2", "-1e-3", "--format", "json"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["increment"]["hi"].as_str().unwrap().starts_with('-'));
}

#[test]
fn rational_asymptotics_emit_csv() {
    let o = brjuno(&[
        "verify",
        "rational-asym",
        "--r",
        "1/2",
        "--decades",
        "2:6",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(
        lines.next(),
        Some("label,index,h,measured,bound,certified,pass")
    );
    assert_eq!(s.lines().count(), 1 + 10 + 1);
    assert!(s.contains("r=1/2 stability"));
}

#[test]
fn cells_and_flanks() {
    let o = brjuno(&[
        "cell",
        "containing",
        "golden",
        "--depth",
        "5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["endpoints"], serde_json::json!(["8/13", "5/8"]));
    let o = brjuno(&["cell", "2,3,1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["length"], "1/144");
    let o = brjuno(&["flank", "3/7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["inclusion_holds"], true);
    assert_eq!(v["radius"], "2/147");
    assert_eq!(
        brjuno(&["cell", "containing", "1/3"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let o = brjuno(&["bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(brjuno(&["phi", "1/2", "--nope"]).status.code(), Some(1));
    assert_eq!(brjuno(&["phi", "3/2"]).status.code(), Some(1));
    assert_eq!(brjuno(&["phi", "periodic:[1;"]).status.code(), Some(1));
    assert_eq!(
        brjuno(&["verify", "cremer", "--periodic", ""])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(brjuno(&["psi", "1/2", "--tol", "0"]).status.code(), Some(1));
    assert_eq!(brjuno(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_flag_beats_environment() {
    let bin = env!("CARGO_BIN_EXE_brjuno");
    let low = Command::new(bin)
        .args(["phi", "1/3"])
        .env("BRJUNO_PRECISION_BITS", "32")
        .output()
        .unwrap();
    assert_eq!(low.status.code(), Some(1));
    let ok = Command::new(bin)
        .args(["phi", "1/3", "--precision", "96"])
        .env("BRJUNO_PRECISION_BITS", "32")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let wide = Command::new(bin)
        .args(["phi", "golden", "--format", "json"])
        .env("BRJUNO_PRECISION_BITS", "256")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&wide)).unwrap();
    assert!(v["lo"].as_str().unwrap().len() > 60);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "verify",
        "inequalities",
        "--samples",
        "40",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let a = brjuno(&args);
    let b = brjuno(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reports_are_written_under_hashed_names() {
    let dir = std::env::temp_dir().join(format!("brjuno-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = brjuno(&[
        "verify",
        "cremer",
        "--kmax",
        "4",
        "--seed",
        "5",
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 1);
    assert!(
        names[0].starts_with("cremer-5-") && names[0].ends_with(".csv"),
        "{names:?}"
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
