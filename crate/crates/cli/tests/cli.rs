use std::process::{Command, Output};

use serde_json::Value;

fn nearby(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearby"))
        .args(args)
        .env_remove("NEARBY_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = nearby(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn actual(report: &Value, needle: &str) -> String {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().contains(needle))
        .unwrap_or_else(|| panic!("no check matching {needle}"))["actual"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn jacobi_examples() {
    let r = json(&["jacobi", "--p", "5", "--m", "2"]);
    assert_eq!(r["pass"], true);
    assert_eq!(actual(&r, "vs closed form"), "5");
    let r = json(&[
        "jacobi",
        "--p",
        "3",
        "--m",
        "1",
        "--method",
        "convolution,literal",
    ]);
    assert_eq!(actual(&r, "literal vs closed form"), "-1");
    assert_eq!(
        nearby(&["jacobi", "--p", "4", "--m", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn quadric_examples() {
    for (form, n, count) in [
        ("split", "4", "16"),
        ("nonsplit", "4", "10"),
        ("split", "3", "4"),
    ] {
        let r = json(&["quadric", "--p", "3", "--n", n, "--form", form]);
        assert_eq!(actual(&r, "bruteforce vs weil"), count);
    }
    let r = json(&["quadric", "--p", "3", "--form", "1,1,-1,-2", "--k", "2"]);
    assert_eq!(actual(&r, "bruteforce vs weil"), "100");
}

#[test]
fn localmodel_examples() {
    for (n, form, points) in [
        ("3", "split", "13"),
        ("4", "split", "49"),
        ("4", "nonsplit", "31"),
    ] {
        let r = json(&["localmodel", "--p", "3", "--n", n, "--form", form]);
        assert_eq!(actual(&r, "1 + q #Q"), points);
        assert_eq!(actual(&r, "unique singular point"), "1");
        assert_eq!(
            r["artifacts"]["summary"]["points"]
                .as_u64()
                .unwrap()
                .to_string(),
            points
        );
    }
}

#[test]
fn nearby_cycles_examples() {
    let r = json(&["nearby-cycles", "--p", "3", "--n", "5"]);
    assert_eq!(actual(&r, "stalks"), "{0: [+1]}");
    let r = json(&["nearby-cycles", "--p", "3", "--n", "4", "--form", "split"]);
    assert_eq!(actual(&r, "stalks"), "{0: [+1], 3: [+9]}");
    assert_eq!(actual(&r, "trace"), "-8");
    assert_eq!(actual(&r, "Lefschetz"), "40");
    let r = json(&[
        "nearby-cycles",
        "--p",
        "3",
        "--n",
        "6",
        "--form",
        "nonsplit",
    ]);
    assert_eq!(r["artifacts"]["stalks"]["5"][0], -27);
}

#[test]
fn exit_codes() {
    assert_eq!(
        nearby(&["localmodel", "--p", "3", "--n", "5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        nearby(&["quadric", "--p", "9", "--n", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nearby(&[
            "localmodel",
            "--p",
            "3",
            "--n",
            "3",
            "--enumerator",
            "magic"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        nearby(&["quadric", "--p", "3", "--form", "1,x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nearby(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nearby(&["verify", "--suite", "jacobi"]).status.code(),
        Some(0)
    );
}

#[test]
fn report_formats_and_output_dir() {
    let csv = nearby(&["quadric", "--p", "5", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("command,name,expected,actual,provenance,pass,millis"));
    let dir = std::env::temp_dir().join(format!("nearby-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nearby"))
        .args(["verify", "--suite", "jacobi", "--format", "json"])
        .env("NEARBY_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("verify.json")).unwrap()).unwrap();
    assert_eq!(written["pass"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn jobs_do_not_change_the_report() {
    let strip = |mut v: Value| {
        for c in v["checks"].as_array_mut().unwrap() {
            c["millis"] = Value::Null;
        }
        v
    };
    let seq = strip(json(&["verify", "--suite", "localmodel"]));
    let par = strip(json(&["verify", "--suite", "localmodel", "--jobs", "4"]));
    assert_eq!(seq, par);
}
