//! The binary: exit codes, output formats and determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treecochain")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_etilde_examples() {
    let o = run(&["eval", "--q", "3", "--edge", "(2;0;+)", "etilde"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "closed=-5 fourier=-5 diff=0\n");
    let o = run(&["eval", "--q", "3", "--edge", "(0;0;+)"]);
    assert_eq!(stdout(&o), "closed=3 fourier=3 diff=0\n");
    let o = run(&["eval", "--q", "3", "--edge", "(2;0;+", "etilde"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "--q", "3", "--depth", "1", "--edge", "(6;0;+)"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn eval_eisenstein_json() {
    let o = run(&[
        "eval", "--q", "3", "--level", "T,T+1", "--eps", "(-1,-1)", "--edge", "(3; pi; -)", "--format", "json", "eisenstein",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["diff"], "0");
    assert_eq!(v["closed"], v["fourier"]);
}

#[test]
fn verify_examples() {
    let o = run(&["verify", "hecke-eigen", "--q", "3", "--level", "T,T+1", "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["suite"], "hecke-eigen");
    assert!(v["checks"][0]["statement"].is_string());

    let o = run(&["verify", "theorem-orders", "--q", "3", "--level", "T,T+1", "--ell", "2", "--r", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let eh = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "E^(-1,-1)").unwrap();
    assert_eq!(eh["details"]["order"], 4);

    let o = run(&["verify", "exponent-rho", "--q", "2", "--level", "T"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"][0]["details"]["rho"], "1");

    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "pharm", "--level", "T,T"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "hecke-eigen", "--depth", "1"]).status.code(), Some(3));
}

#[test]
fn sweep_table_and_guards() {
    let args = ["sweep", "--qs", "2,3", "--primes", "2", "--degs", "1", "--format", "csv"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q,n,s,elementary_divisors,eps,N,nu,d_eps_order,sandwich_ok,rho,exponent_ok"));
    for line in lines {
        assert!(line.contains(",true,"), "{line}");
    }
    // byte-identical reruns
    assert_eq!(stdout(&run(&args)), text);

    let e = run(&["sweep", "--qs", "", "--format", "csv"]);
    assert_eq!(e.status.code(), Some(0));
    assert_eq!(stdout(&e).lines().count(), 1);
    assert_eq!(run(&["sweep", "--qs", "11"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--qs", "3", "--level", "T,T"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--qs", "3", "--ell", "5", "--r", "4"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "pairing", "--q", "3", "--level", "T", "--samples", "20", "--seed", "7", "--depth", "4"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
}
