use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use weighted_entropy::selftest::{self, Scale};
use weighted_entropy::{CgefCase, EntropyFunctional};

fn write(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wentropy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_wentropy"))
        .args(args)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&text).unwrap();
    (out.status.code().unwrap(), text, report)
}

const UNIFORM2: &str = r#"{"n":2,"mu":[0.5,0.5],"cover":[[0,1]]}"#;
const OVERLAP: &str = r#"{"n":3,"mu":[0.3333333333333333,0.3333333333333333,0.3333333333333334],"cover":[[0,1],[1,2]]}"#;

#[test]
fn partition_entropy_of_singletons() {
    let inst = write("uniform2.json", UNIFORM2);
    let (code, _, r) = run(&["partition", inst.to_str().unwrap(), "--blocks", "[[0],[1]]"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["results"]["entropy"].as_f64(), Some(1.0));

    let (_, _, whole) = run(&["partition", inst.to_str().unwrap(), "--blocks", "[[0,1]]"]);
    assert_eq!(whole["results"]["entropy"].as_f64(), Some(0.0));
}

#[test]
fn overlapping_blocks_are_rejected() {
    let inst = write("uniform2-overlap.json", UNIFORM2);
    let (code, _, r) = run(&[
        "partition",
        inst.to_str().unwrap(),
        "--blocks",
        "[[0,1],[1]]",
    ]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "invalid-input");
    assert!(r["diagnostic"].as_str().unwrap().contains("not disjoint"));
}

#[test]
fn cover_in_both_modes() {
    let inst = write("overlap.json", OVERLAP);
    let (code, _, r) = run(&["cover", inst.to_str().unwrap(), "--mode", "both"]);
    assert_eq!(code, 0);
    let res = &r["results"];
    let c = res["classical"]["value"].as_f64().unwrap();
    let w = res["weighted"]["value"].as_f64().unwrap();
    assert!((c - 0.9182958340544896).abs() < 1e-12);
    assert!((w - c).abs() < 1e-9);
    assert_eq!(res["equality_holds"], true);
    assert_eq!(
        res["classical"]["witness"],
        serde_json::json!([[0, 1], [2]])
    );
    assert_eq!(res["sandwich"]["samples"], 1000);
    assert_eq!(res["sandwich"]["violations"], 0);
}

#[test]
fn non_covering_instance_is_infinite() {
    let inst = write("gap.json", r#"{"n":3,"mu":[0.2,0.3,0.5],"cover":[[0,1]]}"#);
    let (code, _, r) = run(&["cover", inst.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(r["status"], "infinite");
    assert_eq!(r["results"]["classical"]["value"], "infinity");
}

#[test]
fn budget_exhaustion_is_its_own_status() {
    let n = 12;
    let all: Vec<usize> = (0..n).collect();
    let text = serde_json::json!({
        "n": n,
        "mu": vec![1.0 / n as f64; n],
        "cover": vec![all; 6],
    })
    .to_string();
    let inst = write("wide.json", &text);
    let (code, _, r) = run(&[
        "cover",
        inst.to_str().unwrap(),
        "--mode",
        "weighted",
        "--budget",
        "1000",
    ]);
    assert_eq!(code, 4);
    assert_eq!(r["status"], "budget-exceeded");
}

#[test]
fn weighted_runs_repeat_byte_for_byte() {
    let inst = write("overlap-repeat.json", OVERLAP);
    let args = [
        "cover",
        inst.to_str().unwrap(),
        "--mode",
        "weighted",
        "--samples",
        "1000",
        "--seed",
        "7",
    ];
    let (_, first, _) = run(&args);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
}

#[test]
fn mixture_of_point_masses_reaches_the_upper_bound() {
    let text = r#"{"n":2,"coefficients":[0.5,0.5],"measures":[[1,0],[0,1]],
        "cover":[[0],[1]],"functional":"tsallis:2"}"#;
    let (code, _, r) = run(&["mixture", write("delta.json", text).to_str().unwrap()]);
    assert_eq!(code, 0);
    let res = &r["results"];
    assert_eq!(res["achieved"].as_f64(), Some(0.5));
    assert_eq!(res["upper"].as_f64(), Some(0.5));
    assert_eq!(res["contained"], true);
}

#[test]
fn mixture_of_equal_measures_reaches_the_lower_bound() {
    let text = r#"{"n":3,"coefficients":[0.3,0.7],"measures":[[0.2,0.3,0.5],[0.2,0.3,0.5]],
        "cover":[[0,1],[2]],"functional":"tsallis:0.5"}"#;
    let (_, _, r) = run(&["mixture", write("equal.json", text).to_str().unwrap()]);
    let res = &r["results"];
    let lower = res["lower"].as_f64().unwrap();
    assert!((res["achieved"].as_f64().unwrap() - lower).abs() < 1e-12);
}

#[test]
fn mixture_coefficients_must_sum_to_one() {
    let text = r#"{"n":2,"coefficients":[0.5,0.6],"measures":[[1,0],[0,1]],
        "cover":[[0],[1]],"functional":"tsallis:2"}"#;
    let (code, _, r) = run(&["mixture", write("bad.json", text).to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "invalid-input");
}

#[test]
fn hlp_and_disjointify_commands() {
    let hlp = write(
        "hlp.json",
        r#"{"x":[0.5,0.3,0.2],"y":[0.7,0.2,0.1],"functional":"shannon"}"#,
    );
    let (code, _, r) = run(&["hlp", hlp.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["shape"], "convex");
    assert_eq!(r["results"]["holds"], true);

    let inst = write("overlap-d.json", OVERLAP);
    let division = write(
        "division.json",
        r#"{"cover_index_rows":[[0.3333333333333333,0.1,0],[0,0.2333333333333333,0.3333333333333334]]}"#,
    );
    let (code, _, r) = run(&[
        "disjointify",
        inst.to_str().unwrap(),
        division.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r}");
    // the heavier second row is taken first
    assert_eq!(r["results"]["order"], serde_json::json!([1, 0]));
    assert_eq!(r["results"]["partition"], serde_json::json!([[1, 2], [0]]));
    assert_eq!(r["results"]["inequality_holds"], true);
}

#[test]
fn out_flag_writes_the_report() {
    let inst = write("uniform2-out.json", UNIFORM2);
    let target = inst.with_file_name("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_wentropy"))
        .args([
            "cover",
            inst.to_str().unwrap(),
            "--out",
            target.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(r["command"], "cover");
    assert_eq!(r["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn quick_selftest_passes() {
    let (code, first, r) = run(&["selftest", "--scale", "quick"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    let (_, second, _) = run(&["selftest", "--scale", "quick"]);
    assert_eq!(first, second);
}

#[test]
fn tampered_functional_is_caught_with_a_counterexample() {
    // increasing outer map filed under the decreasing case
    let tampered = EntropyFunctional::custom(
        "tampered",
        |s| s,
        |t| t * t,
        CgefCase::DecreasingSuperadditiveConvex,
    );
    let report = selftest::run(Scale::Quick, 0, &[tampered], 1_000_000);
    assert!(!report.passed());
    let failed: Vec<_> = report.properties.iter().filter(|p| !p.passed()).collect();
    assert!(failed.iter().any(|p| p.name == "cgef_condition"));
    assert!(failed.iter().all(|p| p.first_counterexample.is_some()));
}
