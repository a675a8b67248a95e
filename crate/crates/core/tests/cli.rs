use std::io::Write;
use std::process::{Command, Output};

use fibconv::BigInt;
use serde_json::Value;

fn fibconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

fn big(v: &Value) -> BigInt {
    v.as_str().expect("numbers are strings").parse().unwrap()
}

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".rec").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn collect_prints_lucas_weights_and_residual() {
    let o = fibconv(&["collect", "--spec", "builtin:fib", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("weights: 1 3 4 7 11"), "{out}");
    assert!(out.contains("shift 6: 5"), "{out}");
}

#[test]
fn verify_table_and_steps() {
    let o = fibconv(&["verify", "--range", "2..6", "--inductive"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("n=6: S=40 (n-1)F=40 PASS"), "{out}");
    assert!(out.contains("step m=5: PASS"), "{out}");
}

#[test]
fn tampered_lucas_exits_one_with_details() {
    let f = spec_file("seq L: L(n) = L(n-1) + L(n-2); L(1) = 1; L(2) = 4\n");
    let o = fibconv(&[
        "verify",
        "--range",
        "2..50",
        "--lucas-spec",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n=3"), "{}", stderr(&o));

    let o = fibconv(&[
        "--format",
        "json",
        "verify",
        "--range",
        "2..50",
        "--lucas-spec",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["results"]["first_failure"]["n"], 3);
}

#[test]
fn json_round_trips_to_exact_values() {
    let o = fibconv(&[
        "--format",
        "json",
        "eval",
        "--spec",
        "builtin:fib",
        "--range",
        "0..300",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let values = v["results"]["values"].as_array().unwrap();
    assert_eq!(values.len(), 301);
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for row in values {
        assert_eq!(big(&row["value"]), a);
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    assert_eq!(v["command"], "eval");
    assert_eq!(v["status"], "pass");

    let o = fibconv(&[
        "--format",
        "json",
        "collect",
        "--spec",
        "builtin:fib",
        "--n",
        "120",
    ]);
    let v = json(&o);
    let weights: Vec<BigInt> = v["results"]["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(big)
        .collect();
    assert_eq!(weights.len(), 119);
    for k in 2..weights.len() {
        assert_eq!(weights[k], &weights[k - 1] + &weights[k - 2]);
    }
    assert_eq!(
        big(&v["results"]["residual"][0]["coefficient"]),
        fibconv::sequences::fib(119).unwrap()
    );
}

#[test]
fn csv_round_trips_to_exact_values() {
    let o = fibconv(&["--format", "csv", "verify", "--range", "2..400"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["kind", "n", "s", "scaled", "status"]
    );
    let mut count = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let n: i64 = rec[1].parse().unwrap();
        let s: BigInt = rec[2].parse().unwrap();
        assert_eq!(s, BigInt::from(n - 1) * fibconv::sequences::fib(n).unwrap());
        assert_eq!(&rec[3], &rec[2]);
        assert_eq!(&rec[4], "PASS");
        count += 1;
    }
    assert_eq!(count, 399);
}

#[test]
fn jobs_do_not_change_output_bytes() {
    for format in ["plain", "json", "csv"] {
        let base = fibconv(&[
            "--format",
            format,
            "verify",
            "--range",
            "2..300",
            "--inductive",
        ]);
        for jobs in ["1", "3", "8"] {
            let o = fibconv(&[
                "--format",
                format,
                "--jobs",
                jobs,
                "verify",
                "--range",
                "2..300",
                "--inductive",
            ]);
            assert_eq!(o.stdout, base.stdout, "format {format}, jobs {jobs}");
            assert_eq!(o.status.code(), base.status.code());
        }
    }
    let base = fibconv(&[
        "--format",
        "json",
        "conjecture",
        "--spec",
        "builtin:trib",
        "--probe-n",
        "30",
        "--verify-to",
        "120",
    ]);
    let o = fibconv(&[
        "--format",
        "json",
        "--jobs",
        "2",
        "conjecture",
        "--spec",
        "builtin:trib",
        "--probe-n",
        "30",
        "--verify-to",
        "120",
    ]);
    assert_eq!(o.stdout, base.stdout);
}

#[test]
fn malformed_spec_file_exits_two_with_position() {
    let f = spec_file("seq F: F(n) = F(n-1) +\n  F(n-2) $ 3; F(1)=1; F(2)=1\n");
    let o = fibconv(&["eval", "--spec", f.path().to_str().unwrap(), "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("2:10"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["collect", "--spec", "builtin:fib"][..],
        &["verify", "--range", "6..2"],
        &["verify", "--range", "1..5"],
        &["eval", "--spec", "builtin:nope", "--n", "3"],
        &["eval", "--spec", "/no/such/file.rec", "--n", "3"],
        &["--jobs", "0", "verify", "--range", "2..5"],
        &["frobnicate"],
    ] {
        let o = fibconv(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn conjecture_for_generalized_seeds() {
    let f = spec_file("seq G: G(n) = G(n-1) + G(n-2); G(1) = 2; G(2) = 5\n");
    let path = f.path().to_str().unwrap();
    let o = fibconv(&[
        "--format",
        "json",
        "conjecture",
        "--spec",
        path,
        "--probe-n",
        "30",
        "--verify-to",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["results"]["status"], "verified");
    assert_eq!(v["results"]["residual"][0]["offset"], 0);
    assert_eq!(v["results"]["verified_range"], serde_json::json!([2, 200]));

    let o = fibconv(&[
        "conjecture",
        "--spec",
        "builtin:trib",
        "--probe-n",
        "30",
        "--verify-to",
        "100",
        "--max-order",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn quiet_suppresses_stdout_only() {
    let o = fibconv(&["--quiet", "verify", "--range", "2..20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn expand_and_negative_eval() {
    let o = fibconv(&["expand", "--spec", "builtin:fib", "--depth", "3"]);
    assert_eq!(stdout(&o).trim(), "E(3): F(n) = 3*F(n-3) + 2*F(n-4)");
    let o = fibconv(&["eval", "--spec", "builtin:fib", "--n", "-5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('5'));
}
