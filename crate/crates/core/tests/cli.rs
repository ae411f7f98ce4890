use std::process::{Command, Output};

use serde_json::Value;

fn maxprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxprod"))
        .args(args)
        .env("MAXPROD_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_golden_row() {
    let o = maxprod(&["eval", "--f", "ratio", "--n", "8", "--x", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    // V(ratio)(0.6) at n = 8 is attained at k = 5: m_{5,8,4}(0.6) * (5/8)/(13/8) = 9/26
    assert_eq!(
        stdout(&o),
        "func,n,x,value,argmax_k,terms_examined,tail_bound,certified\n\
         ratio,8,5.9999999999999998e-1,3.4615384615384615e-1,5,47,2.5885139323835638e-13,true\n"
    );
    let v: f64 = stdout(&o)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 9.0 / 26.0).abs() < 1e-15);
}

#[test]
fn json_output_parses() {
    let o = maxprod(&[
        "--format",
        "json",
        "verify-bounds",
        "--theorem",
        "5.1",
        "--f",
        "vee1",
        "--n",
        "4,8",
        "--x",
        "0,1",
        "--alpha",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r["verdict"], "pass");
        assert_eq!(r["func"], "vee1");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        maxprod(&["verify-lemmas", "--suite", "4.2"]).status.code(),
        Some(0)
    );
    assert_eq!(maxprod(&["eval", "--f", "ratio"]).status.code(), Some(2));
    assert_eq!(
        maxprod(&["eval", "--f", "nope", "--n", "8", "--x", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        maxprod(&["verify-bounds", "--theorem", "5.1", "--f", "e2"])
            .status
            .code(),
        Some(2)
    );
    let o = maxprod(&["--out", "/nonexistent-dir/report.csv", "info"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
    let o = Command::new(env!("CARGO_BIN_EXE_maxprod"))
        .arg("info")
        .env("MAXPROD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn violations_exit_one() {
    // the higher-power monotonicity conditions have counterexamples
    let o = maxprod(&["verify-lemmas", "--suite", "4.4"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("check,total,violations,max_slack\n4.4.i,"));
    assert!(text.contains("\ncheck,case,lhs,rhs,slack\n"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.csv");
    let args = [
        "envelope", "--n", "4,16", "--x", "0.25,0.6", "--alpha", "2,3",
    ];
    let to_file: Vec<&str> = ["--out", path.to_str().unwrap()]
        .into_iter()
        .chain(args)
        .collect();
    assert_eq!(maxprod(&to_file).status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&maxprod(&args)));
    assert_eq!(written.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn order_and_modulus() {
    let o = maxprod(&["order", "--x", "0.6", "--n-min", "8", "--n-max", "128"]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let slope: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(slope < 0.0 && slope > -1.0);

    let o = maxprod(&[
        "modulus",
        "--f",
        "ratio",
        "--delta",
        "0.5",
        "--domain-max",
        "20",
    ]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("ratio,classical,5.0000000000000000e-1,"));
    let o = maxprod(&[
        "modulus", "--f", "e2", "--delta", "0.5", "--kind", "weighted",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["verify-lemmas", "--suite", "4.3"];
    let one = Command::new(env!("CARGO_BIN_EXE_maxprod"))
        .args(args)
        .env("MAXPROD_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_maxprod"))
        .args(args)
        .env("MAXPROD_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
}
