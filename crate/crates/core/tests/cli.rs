use std::process::{Command, Output};

use serde_json::Value;

fn charp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charp"))
        .args(args)
        .env_remove("CHARP_PRIME")
        .env_remove("CHARP_CORPUS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(s.lines().count(), 1, "one-line error expected: {s:?}");
    s
}

const EX1: &[&str] = &[
    "--prime",
    "7",
    "--vars",
    "x1,x2,x3,x4",
    "--poly",
    "x1^2+x2^4+x3^5+x4^4",
];

fn with(base: &[&'static str], cmd: &'static str, extra: &[&'static str]) -> Vec<&'static str> {
    let mut v = vec![cmd];
    v.extend_from_slice(base);
    v.extend_from_slice(extra);
    v
}

#[test]
fn fpure_chart_not_fpure() {
    let out = charp(&[
        "fpure",
        "--prime",
        "11",
        "--vars",
        "a,b,c,d",
        "--poly",
        "a^2+b^3*d+c^6*d^4+d^4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"fpure": false}));
}

#[test]
fn fsig_regular_rows() {
    let out = charp(&[
        "fsig", "--prime", "3", "--vars", "x,y", "--poly", "x", "--e-max", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r["s_e"], serde_json::json!({"num": 1, "den": 1}));
        assert_eq!(r["ehk_e"], serde_json::json!({"num": 1, "den": 1}));
    }
}

#[test]
fn hk_csv() {
    let out = charp(&[
        "hk", "--prime", "5", "--vars", "x,y,z", "--poly", "x*y+z^2", "--e-max", "1", "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "e,q,colength_Ie,colength_bracket,s_e_num,s_e_den,ehk_num,ehk_den\n1,5,13,37,13,25,37,25\n"
    );
}

#[test]
fn blowup_second_chart() {
    let out = charp(&with(EX1, "blowup", &["--chart", "2"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["poly"], "a^2 + b^3*c^5 + b^2*d^4 + b^2");
    assert_eq!(v["chart"], 2);
    assert_eq!(v["dropped_power"], 2);
    let all = json(&charp(&with(EX1, "blowup", &[])));
    assert_eq!(all.as_array().unwrap().len(), 4);
}

#[test]
fn sfr_transcript() {
    let out = charp(&with(EX1, "sfr", &["--e-max", "2", "--witness", "x1"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sfr"], "sfr:certified(e=2)");
    let steps = v["outcome"]["transcript"].as_array().unwrap();
    assert_eq!(steps[0]["survives"], false);
    assert_eq!(steps[1]["survives"], true);
}

#[test]
fn classify_and_monotone() {
    let out = charp(&with(EX1, "classify", &["--e-max", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v.is_object());
    let out = charp(&[
        "monotone", "--prime", "5", "--vars", "x,y,z", "--poly", "x*y+z^2", "--e", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["verdict_label"],
        "consistent with strict increase"
    );
}

#[test]
fn at_flag_translates() {
    // x^2 + (y-1)^2 analysed at (0,1) is the same as x^2 + y^2 at the origin
    let a = charp(&[
        "fsig",
        "--prime",
        "5",
        "--vars",
        "x,y",
        "--poly",
        "x^2+y^2-2*y+1",
        "--at",
        "0,1",
        "--e-max",
        "1",
    ]);
    let b = charp(&[
        "fsig", "--prime", "5", "--vars", "x,y", "--poly", "x^2+y^2", "--e-max", "1",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["rows"], json(&b)["rows"]);
}

#[test]
fn corpus_run_passes_and_is_deterministic() {
    let a = charp(&["paper"]);
    let b = charp(&["paper", "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let records = json(&a);
    let statuses: Vec<&str> = records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["status"].as_str().unwrap())
        .collect();
    assert!(!statuses.contains(&"FAIL"));
    assert!(statuses.contains(&"SKIPPED"));
}

#[test]
fn corpus_failure_exit_code() {
    let dir = std::env::temp_dir().join(format!("charp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "entries": [{"name": "wrong", "p": 5, "vars": ["x","y","z"], "poly": "x*y+z^2",
            "caps": {"e_max": 1, "D_max": 5},
            "expected": {"fpure": {"value": false, "provenance": "derived: deliberately wrong"}}}]}"#,
    )
    .unwrap();
    let out = charp(&["paper", "--corpus", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let out = Command::new(env!("CARGO_BIN_EXE_charp"))
        .arg("paper")
        .env("CHARP_CORPUS", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let parse = charp(&["fpure", "--prime", "7", "--vars", "x,y", "--poly", "x^^2"]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(stderr_line(&parse).starts_with("error: ParseError"));

    let unknown = charp(&["fpure", "--prime", "7", "--vars", "x,y", "--poly", "z"]);
    assert_eq!(unknown.status.code(), Some(1));
    stderr_line(&unknown);

    let composite = charp(&["fpure", "--prime", "9", "--vars", "x", "--poly", "x"]);
    assert_eq!(composite.status.code(), Some(1));
    stderr_line(&composite);

    let usage = charp(&["fpure", "--vars", "x"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(stderr_line(&usage).starts_with("error: UsageError"));

    let unit = charp(&["fpure", "--prime", "7", "--vars", "x,y", "--poly", "x+1"]);
    assert_eq!(unit.status.code(), Some(2));
    stderr_line(&unit);

    let chart = charp(&with(EX1, "blowup", &["--chart", "5"]));
    assert_eq!(chart.status.code(), Some(2));
    stderr_line(&chart);

    let smooth = charp(&[
        "monotone", "--prime", "5", "--vars", "x,y", "--poly", "x+y^2", "--e", "1",
    ]);
    assert_eq!(smooth.status.code(), Some(2));
    stderr_line(&smooth);

    let cap = charp(&[
        "fsig",
        "--prime",
        "7",
        "--vars",
        "x,y",
        "--poly",
        "x*y",
        "--e-max",
        "1",
        "--term-cap",
        "3",
    ]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(stderr_line(&cap).starts_with("error: ResourceCapExceeded"));

    let help = charp(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn environment_overrides_and_out_file() {
    let dir = std::env::temp_dir().join(format!("charp-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_charp"))
        .args([
            "fpure",
            "--vars",
            "x,y",
            "--poly",
            "x*y",
            "--out",
            path.to_str().unwrap(),
        ])
        .env("CHARP_PRIME", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["fpure"], true);

    let capped = Command::new(env!("CARGO_BIN_EXE_charp"))
        .args([
            "hk", "--prime", "5", "--vars", "x,y,z", "--poly", "x*y+z^2", "--e-max", "2",
        ])
        .env("CHARP_DIM_CAP", "200")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert_eq!(v["infeasible"], serde_json::json!([2]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dump_matrix_format() {
    let dir = std::env::temp_dir().join(format!("charp-dump-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.txt");
    let out = charp(&[
        "hk",
        "--prime",
        "2",
        "--vars",
        "x",
        "--poly",
        "x",
        "--e-max",
        "1",
        "--dump-matrix",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "2 2 2\n1 0 1\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
