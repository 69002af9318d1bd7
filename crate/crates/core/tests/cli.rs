use staircase_kvol::cli::run;

fn kvol(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kvol").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = kvol(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn at_i_is_three() {
    let v = json(&["at", "--s", "2", "--x", "0", "--y", "1"]);
    assert!((v["value"].as_f64().unwrap() - 3.0).abs() < 1e-10);
    assert_eq!(v["exact"]["j_1"], "1/2");
}

#[test]
fn at_near_the_minimum() {
    let v = json(&["at", "--s", "2", "--x", "9/14", "--y", "0.85412568"]);
    assert!((v["value"].as_f64().unwrap() - 2.98955).abs() < 2e-4);
}

#[test]
fn at_rejects_lower_half_plane() {
    assert_eq!(kvol(&["at", "--s", "2", "--x", "0", "--y", "-1"]).0, 2);
    assert_eq!(kvol(&["at", "--x", "zero", "--y", "1"]).0, 2);
    assert_eq!(kvol(&["at", "--s", "1", "--x", "0", "--y", "1"]).0, 2);
}

#[test]
fn exit_codes_by_error_kind() {
    use staircase_kvol::cli::{Failure, EXIT_FAILURE, EXIT_INPUT, EXIT_UNSTABLE};
    use staircase_kvol::Error;
    assert_eq!(Failure::from(Error::Unstable("x".into())).code, EXIT_UNSTABLE);
    assert_eq!(Failure::from(Error::NonConvergence("x".into())).code, EXIT_UNSTABLE);
    assert_eq!(Failure::from(Error::Parse("x".into())).code, EXIT_INPUT);
    assert_eq!(Failure::from(Error::Invariant("x".into())).code, EXIT_FAILURE);
    // stability needs fewer rounds than the cap
    assert_eq!(
        kvol(&["at", "--x", "0", "--y", "1", "--rounds", "4", "--max-rounds", "2"]).0,
        EXIT_INPUT
    );
}

#[test]
fn scan_csv_contract() {
    let (code, out, _) = kvol(&[
        "scan", "--x-min", "0", "--x-max", "1", "--y-min", "1", "--y-max", "2", "--step", "0.5",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,y,kvol,witness_kind,r,rp,K");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("0,1,3,"));
    // determinism
    let (_, again, _) = kvol(&[
        "scan", "--x-min", "0", "--x-max", "1", "--y-min", "1", "--y-max", "2", "--step", "0.5",
    ]);
    assert_eq!(out, again);
}

#[test]
fn scan_rejects_bad_step_and_tolerates_empty_range() {
    assert_eq!(kvol(&["scan", "--step", "0"]).0, 2);
    assert_eq!(kvol(&["scan", "--step", "-0.1"]).0, 2);
    let (code, out, _) = kvol(&["scan", "--x-min", "1", "--x-max", "0", "--step", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn scan_rows_off_the_half_plane_are_error_rows() {
    let (code, out, _) = kvol(&[
        "scan", "--x-min", "0", "--x-max", "0", "--y-min", "-1", "--y-max", "1", "--step", "1",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].contains(",error,"));
    assert!(rows[1].contains(",error,"));
    assert!(rows[2].starts_with("0,1,3,"));
}

#[test]
fn saddles_classes() {
    let classes = |p: &str, q: &str| -> Vec<String> {
        let v = json(&["saddles", "--s", "2", "--p", p, "--q", q]);
        let mut c: Vec<String> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["class"].as_str().unwrap().to_string())
            .collect();
        c.sort();
        c
    };
    assert_eq!(classes("1", "1"), ["e1 + f1", "e2 + f1", "e2 + f2"]);
    assert_eq!(classes("1", "0"), ["e1", "e2", "e2"]);
    assert_eq!(kvol(&["saddles", "--s", "2", "--p", "2", "--q", "4"]).0, 2);
}

#[test]
fn itable_rows() {
    let (code, out, _) = kvol(&["itable", "--s", "2", "--bound", "7"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("r,rp,I,end_z,end_z_group"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.contains(&"3/7,inf,5/7,false,false"));
    assert!(rows.contains(&"0,inf,1,true,true"));
    for row in &rows {
        let f: Vec<&str> = row.split(',').collect();
        let i = staircase_kvol::slope::parse_rational(f[2]).unwrap();
        if f[3] == "false" {
            assert!(i <= staircase_kvol::slope::Rational::new(9, 10), "{row}");
        }
        assert_eq!(f[3], f[4], "{row}");
    }
    assert_eq!(kvol(&["itable", "--bound", "0"]).0, 2);
}

#[test]
fn endz_and_numeric_modes() {
    let v = json(&["endz", "--r", "3/7", "--rp", "inf"]);
    assert_eq!(v["end_z"], false);
    assert_eq!(v["I"], "5/7");
    let v = json(&["endz", "--r", "3/7", "--rp", "inf", "--numeric", "float"]);
    assert_eq!(v["I"], "0.714285714286");
    let v = json(&["endz", "--r", "-1", "--rp", "1"]);
    assert_eq!(v["end_z"], true);
    assert_eq!(kvol(&["endz", "--r", "2", "--rp", "2"]).0, 2);
}

#[test]
fn cover_and_its_exit_code() {
    let v = json(&["cover", "--step", "0.02"]);
    assert_eq!(v["uncovered"].as_array().unwrap().len(), 0);
    assert_eq!(v["k_covered"], false);
    assert_eq!(kvol(&["cover", "--step", "0.02", "--n-max", "12"]).0, 1);
}

#[test]
fn verify_quick_and_fault_injection() {
    let (code, out, _) = kvol(&["verify", "quick"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().filter(|l| l.starts_with("[PASS]")).count() >= 6);
    let (code, out, _) = kvol(&["verify", "quick", "--inject-fault"]);
    assert_ne!(code, 0);
    assert!(out.contains("[FAIL]"));
}

#[test]
fn json_format_applies_everywhere() {
    let (code, out, _) = kvol(&[
        "scan", "--format", "json", "--x-min", "0", "--x-max", "0", "--y-min", "1", "--y-max", "1", "--step", "1",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["K"], 1.0);
    let (_, out, _) = kvol(&["saddles", "--p", "1", "--q", "0", "--format", "csv"]);
    assert!(out.starts_with("p,q,start_square,end_square,class"));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("kvol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("at.csv");
    let (code, out, _) = kvol(&[
        "at",
        "--x",
        "0",
        "--y",
        "1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,y,kvol,witness_kind,r,rp,K\n0,1,3,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn help_and_usage() {
    assert_eq!(kvol(&["--help"]).0, 0);
    assert_eq!(kvol(&["frobnicate"]).0, 2);
}
