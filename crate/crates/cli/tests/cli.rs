//! End-to-end runs of the compiled binary: each test shells out to the
//! real executable and checks exit codes and output shape, not exact text.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn satlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn satlab_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_satlab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_reports_shape_and_digest() {
    let out = satlab(&["validate", "--kernel", "const:2.0"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("kernel ok: 1 type(s), 2 blocks"), "got: {text}");
    assert!(text.contains("digest:"), "got: {text}");
}

#[test]
fn validate_rejects_negative_entries() {
    let out = satlab(&["validate", "--kernel", "abc:1,-2,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn spectrum_prints_rho_star_and_prediction() {
    let out = satlab(&["spectrum", "--kernel", "abc:2,0,2"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("rho_star = 1"), "got: {text}");
    assert!(text.contains("prediction:"), "got: {text}");
}

#[test]
fn decompose_lists_blocks_and_components() {
    let out = satlab(&["decompose", "--kernel", "const:1.5"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("blocks:"), "got: {text}");
    assert!(text.contains("contradictory"), "got: {text}");
}

#[test]
fn sample_then_solve_round_trips_as_satisfiable() {
    // A sign-preserving kernel only ever produces mixed-sign clauses, so the
    // all-true assignment works at any density: the pipeline must exit 10.
    let dir = std::env::temp_dir().join("satlab-cli-pipe");
    std::fs::create_dir_all(&dir).unwrap();
    let cnf = dir.join("pipe.cnf");
    let out = satlab(&[
        "sample",
        "--kernel",
        "abc:0,3,0",
        "--n",
        "40",
        "--scale",
        "2.0",
        "--seed",
        "9",
        "--out",
        cnf.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&cnf).unwrap();
    assert!(text.starts_with("c seed=9 trial=0 n=40 scale=2"), "got: {text}");
    assert!(text.contains("p cnf 40 "), "got: {text}");

    let solved = satlab(&["solve", cnf.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(10));
    let verdict = stdout_of(&solved);
    assert!(verdict.contains("s SATISFIABLE"), "got: {verdict}");
    assert!(verdict.contains("v "), "got: {verdict}");
}

#[test]
fn sample_is_reproducible_for_a_fixed_seed() {
    let args = [
        "sample", "--kernel", "const:1.0", "--n", "30", "--scale", "0.9", "--seed", "4",
        "--trial", "2",
    ];
    let first = satlab(&args);
    let second = satlab(&args);
    assert!(first.status.success());
    assert_eq!(stdout_of(&first), stdout_of(&second));
}

#[test]
fn solve_rejects_a_contradiction_with_exit_20() {
    let out = satlab_stdin(&["solve"], "p cnf 1 2\n1 1 0\n-1 -1 0\n");
    assert_eq!(out.status.code(), Some(20));
    let text = stdout_of(&out);
    assert!(text.contains("s UNSATISFIABLE"), "got: {text}");
    assert!(text.contains("w "), "witness line missing: {text}");
}

#[test]
fn count_structures_finds_the_bicycle_in_a_full_contradiction() {
    let out = satlab_stdin(
        &["count-structures"],
        "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n",
    );
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("bicycle: found"), "got: {text}");
    assert!(text.contains("2 2 1 8"), "exact (2,2,1) count missing: {text}");
}

#[test]
fn sweep_emits_the_csv_header_on_stdout() {
    let out = satlab(&[
        "sweep", "--kernel", "const:1.0", "--n", "60", "--scale", "0.5", "--trials", "10",
        "--seed", "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(
        text.starts_with("scale,n,trials,sat,frac,lo95,hi95"),
        "got: {text}"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho_star"));
}

#[test]
fn threshold_reports_an_infinite_threshold_for_sign_preserving_kernels() {
    let out = satlab(&[
        "threshold", "--kernel", "abc:0,3,0", "--n", "50", "--trials", "10", "--probes", "2",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("infinite"), "got: {text}");
}

#[test]
fn marginal_test_accepts_negative_literals_and_passes() {
    let out = satlab(&[
        "marginal-test", "--kernel", "const:2.0", "--n", "20", "--trials", "2000", "--seed",
        "6", "--arc", "-1,2",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("chi-square"), "got: {text}");
    assert!(text.contains("~x0 -> x1"), "got: {text}");
}
