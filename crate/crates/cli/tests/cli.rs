use std::process::Command;

use no3il_cli::run_with_env;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_no3il"));
    c.env_remove("NO3IL_MAX_CELLS");
    c
}

fn run_lib(args: &[&str], env: Option<&str>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("no3il").chain(args.iter().copied());
    let code = run_with_env(argv, env, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn tau_text_and_json() {
    let (code, out, _) = run_lib(&["tau", "3", "9"], None);
    assert_eq!(code, 0);
    assert!(
        out.starts_with("T(3x9): tau = 6 (exact, parabola-pair)"),
        "{out}"
    );

    let (code, out, _) = run_lib(&["--format", "json", "tau", "2", "3"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tau"], 2);
    assert_eq!(v["exact"], true);
    assert_eq!(v["provenance"], "gcd-one");
}

#[test]
fn tau_search_cross_checks() {
    let (code, out, _) = run_lib(&["tau", "5", "5", "--search"], None);
    assert_eq!(code, 0);
    assert!(out.contains("tau = 6 (exact, exact-search)"));
    assert!(out.contains("agrees with conic-lift"));
}

#[test]
fn composite_gcd_falls_back_to_search() {
    let (code, out, _) = run_lib(&["tau", "4", "4"], None);
    assert_eq!(code, 0);
    assert!(out.contains("tau = 6 (exact, exact-search)"), "{out}");
}

#[test]
fn json_output_is_reproducible() {
    let strip = |s: String| {
        let mut v: serde_json::Value = serde_json::from_str(&s).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = run_lib(&["--format", "json", "tau", "4", "6", "--search"], None).1;
    let b = run_lib(&["--format", "json", "tau", "4", "6", "--search"], None).1;
    assert_eq!(strip(a), strip(b));
}

#[test]
fn construct_output_feeds_verify() {
    let (code, out, _) = run_lib(&["--format", "json", "construct", "7", "7"], None);
    assert_eq!(code, 0);
    let dir = std::env::temp_dir().join(format!("no3il-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("conic.json");
    std::fs::write(&path, &out).unwrap();
    let (code, out, _) = run_lib(
        &["verify", "7", "7", "--points", path.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("ok: 8 points"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_reports_violation() {
    let dir = std::env::temp_dir().join(format!("no3il-cli-v-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("bad.json");
    std::fs::write(&json, "[[0,0],[1,1],[2,2],[0,1]]").unwrap();
    let (code, out, _) = run_lib(
        &["verify", "3", "3", "--points", json.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "violation: (0,0) (1,1) (2,2) are collinear");

    let csv = dir.join("ok.csv");
    std::fs::write(&csv, "0,0\n0,1\n").unwrap();
    let (code, _, _) = run_lib(
        &[
            "verify",
            "3",
            "3",
            "--csv",
            "--points",
            csv.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code, 0);

    std::fs::write(&json, "[[0,0],[0,0]]").unwrap();
    let (code, _, err) = run_lib(
        &["verify", "3", "3", "--points", json.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 2);
    assert!(err.contains("error:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn collinear_exit_codes() {
    let (code, out, _) = run_lib(&["collinear", "3", "3", "0", "0", "1", "1", "2", "2"], None);
    assert_eq!((code, out.trim()), (0, "collinear"));
    let (code, out, _) = run_lib(&["collinear", "6", "6", "0", "0", "1", "0", "0", "1"], None);
    assert_eq!((code, out.trim()), (1, "not-collinear"));
    let (code, _, _) = run_lib(&["collinear", "3", "3", "0", "0", "0", "0", "1", "1"], None);
    assert_eq!(code, 2);
    let (code, _, _) = run_lib(&["collinear", "3", "3", "0", "0", "1", "1", "3", "3"], None);
    assert_eq!(code, 2);
}

#[test]
fn lines_listing_and_cap() {
    let (code, out, _) = run_lib(&["lines", "2", "2"], None);
    assert_eq!(code, 0);
    assert!(out.starts_with("T(2x2): 6 lines"));
    assert_eq!(out.lines().count(), 7);

    let (code, _, err) = run_lib(&["lines", "3", "3"], Some("8"));
    assert_eq!(code, 2);
    assert!(err.contains("cap"), "{err}");
    let (code, _, _) = run_lib(&["--max-cells", "9", "lines", "3", "3"], Some("8"));
    assert_eq!(code, 0);
    let (code, _, _) = run_lib(&["lines", "3", "3"], Some("lots"));
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run_lib(&["tau", "1", "5"], None).0, 2);
    assert_eq!(run_lib(&["tau", "3"], None).0, 2);
    assert_eq!(run_lib(&["frobnicate"], None).0, 2);
    assert_eq!(
        run_lib(&["tau", "4", "4", "--limits", "nodes=0"], None).0,
        2
    );
    assert_eq!(run_lib(&["--help"], None).0, 0);
}

#[test]
fn binary_exit_codes_and_env() {
    let st = bin()
        .args(["tau", "12", "12", "--limits", "nodes=500"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&st.stderr).contains("lower bound"));

    let st = bin()
        .args(["lines", "4", "4"])
        .env("NO3IL_MAX_CELLS", "10")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().args(["lines", "4", "4"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));

    let st = bin()
        .args(["collinear", "4", "6", "0", "0", "2", "0", "0", "3"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let (code, out, _) = run_lib(&["selftest"], None);
    assert_eq!(code, 0, "{out}");
    assert!(out.trim_end().ends_with("0 failed"));
    let (code, out, _) = run_lib(&["--format", "json", "selftest"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn documented_examples() {
    let (code, out, _) = run_lib(&["collinear", "4", "4", "0", "0", "1", "1", "2", "2"], None);
    assert_eq!((code, out.trim()), (0, "collinear"));

    let dir = std::env::temp_dir().join(format!("no3il-cli-sq-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let square = dir.join("square.json");
    std::fs::write(&square, "[[0,0],[0,1],[1,0],[1,1]]").unwrap();
    let (code, _, _) = run_lib(
        &["verify", "4", "6", "--points", square.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 0);
    std::fs::remove_dir_all(&dir).unwrap();

    let (_, out, _) = run_lib(&["--format", "json", "tau", "3", "9"], None);
    assert_eq!(
        out.trim(),
        r#"{"m":3,"n":9,"tau":6,"exact":true,"provenance":"parabola-pair","witness":[[0,0],[0,1],[1,3],[1,4],[2,3],[2,4]],"nodes":0,"prunes":0,"elapsed_ms":0}"#
    );
}
