//! End-to-end tests of the `qnlwe` binary: every subcommand is exercised on
//! the bundled fixtures, reports are checked line by line, and exit codes
//! follow the documented 0/1/2 scheme. Determinism is checked byte for byte
//! (modulo the `elapsed-ms` field for timed commands).

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnlwe"))
        .args(args)
        .output()
        .expect("failed to spawn the binary")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout(output),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn assert_line(output: &Output, line: &str) {
    let text = stdout(output);
    assert!(
        text.lines().any(|l| l == line),
        "missing line {line:?} in:\n{text}"
    );
}

/// Drops the timing field, the only line allowed to differ between runs.
fn without_elapsed(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("elapsed-ms:"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn verify_process_accepts_afbw() {
    let output = run(&["verify-process", fixture("afbw.proc").to_str().unwrap()]);
    assert_exit(&output, 0);
    assert_line(&output, "classical-process: true");
    assert_line(&output, "no-global-past: true");
    assert_line(&output, "signaling-matrix: 011;101;110");
}

#[test]
fn verify_process_flags_causally_ordered_tables() {
    let dir = tempfile::tempdir().unwrap();
    let constant = write_temp(&dir, "constant.proc", "process n=1\n0 1\n1 1\n");
    let output = run(&["verify-process", constant.to_str().unwrap()]);
    assert_exit(&output, 1);
    assert_line(&output, "classical-process: true");
    assert_line(&output, "no-global-past: false");

    // Self-signaling counts once the flag is set, but the identity still
    // fails the unique-fixed-point condition.
    let identity = write_temp(&dir, "identity.proc", "process n=1\n0 0\n1 1\n");
    let output = run(&[
        "verify-process",
        identity.to_str().unwrap(),
        "--allow-self-signaling",
    ]);
    assert_exit(&output, 1);
    assert_line(&output, "classical-process: false");
    assert_line(&output, "violating-intervention: id");
    assert_line(&output, "violating-fixed-points: 0,1");
    assert_line(&output, "no-global-past: true");
}

#[test]
fn verify_process_rejects_malformed_files_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.proc", "process n=1\n0 0\n1 2\n");
    let output = run(&["verify-process", bad.to_str().unwrap()]);
    assert_exit(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn build_ensemble_emits_the_shift_basis() {
    let output = run(&["build-ensemble", fixture("afbw.proc").to_str().unwrap()]);
    assert_exit(&output, 0);
    let ensemble = qnlwe::Ensemble::from_ens_str(&stdout(&output)).unwrap();
    assert!(ensemble.set_eq(&qnlwe::Ensemble::shift()));
}

#[test]
fn build_ensemble_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shift.ens");
    let output = run(&[
        "build-ensemble",
        fixture("afbw.proc").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "rows: 8");
    let written = std::fs::read_to_string(&out).unwrap();
    let ensemble = qnlwe::Ensemble::from_ens_str(&written).unwrap();
    assert!(ensemble.set_eq(&qnlwe::Ensemble::shift()));
}

#[test]
fn check_ensemble_accepts_shift_and_reports_the_obstruction() {
    let output = run(&["check-ensemble", fixture("shift.ens").to_str().unwrap()]);
    assert_exit(&output, 0);
    assert_line(&output, "orthonormal: true");
    assert_line(&output, "local-obstruction: 111");
    assert_line(&output, "obstruction-all-true: true");
}

#[test]
fn check_ensemble_names_the_offending_pair() {
    // One '+' turned into '0': the label keeps its x bits but drops out of
    // the Hadamard basis, so it is no longer orthogonal to its partner.
    let dir = tempfile::tempdir().unwrap();
    let typo = write_temp(
        &dir,
        "typo.ens",
        "ensemble n=3\n000\n001\n01+\n01-\n1+0\n-01\n1-0\n111\n",
    );
    let output = run(&["check-ensemble", typo.to_str().unwrap()]);
    assert_exit(&output, 1);
    assert_line(&output, "orthonormal: false");
    assert_line(&output, "non-orthogonal-pair: 001,-01");
}

#[test]
fn invert_ensemble_recovers_afbw() {
    let output = run(&["invert-ensemble", fixture("shift.ens").to_str().unwrap()]);
    assert_exit(&output, 0);
    let omega = qnlwe::ProcessTable::from_proc_str(&stdout(&output)).unwrap();
    assert_eq!(omega, qnlwe::ProcessTable::afbw());
}

#[test]
fn invert_ensemble_rejects_colliding_x_bits() {
    let dir = tempfile::tempdir().unwrap();
    // "+1" and "01" share the x bits 01.
    let dup = write_temp(&dir, "dup.ens", "ensemble n=2\n00\n01\n+1\n11\n");
    let output = run(&["invert-ensemble", dup.to_str().unwrap()]);
    assert_exit(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    assert!(stderr.contains("01") && stderr.contains("+1"), "{stderr}");
}

#[test]
fn measure_prints_the_halved_distribution() {
    let output = run(&[
        "measure",
        fixture("afbw.proc").to_str().unwrap(),
        "--state",
        "001",
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "basis=100 outcome=001 label=+01 p=0.500000000000");
    assert_line(&output, "basis=100 outcome=101 label=-01 p=0.500000000000");
    assert_line(&output, "basis=000 outcome=000 label=000 p=0.000000000000");
}

#[test]
fn measure_point_masses_on_members() {
    let output = run(&[
        "measure",
        fixture("afbw.proc").to_str().unwrap(),
        "--state",
        "01+",
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "basis=001 outcome=010 label=01+ p=1.000000000000");

    let output = run(&[
        "measure",
        fixture("afbw.proc").to_str().unwrap(),
        "--state",
        "000",
    ]);
    assert_line(&output, "basis=000 outcome=000 label=000 p=1.000000000000");
}

#[test]
fn measure_samples_are_reproducible() {
    let afbw = fixture("afbw.proc");
    let args = [
        "measure",
        afbw.to_str().unwrap(),
        "--state",
        "001",
        "--samples",
        "5",
        "--seed",
        "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_exit(&first, 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let samples: Vec<&str> = text.lines().filter(|l| l.starts_with("sample=")).collect();
    assert_eq!(samples.len(), 5);
    for line in samples {
        assert!(
            line.contains("label=+01") || line.contains("label=-01"),
            "{line}"
        );
    }
}

#[test]
fn measure_refuses_non_orthonormal_tables_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let identity = write_temp(
        &dir,
        "identity2.proc",
        "process n=2\n00 00\n01 01\n10 10\n11 11\n",
    );
    let output = run(&[
        "measure",
        identity.to_str().unwrap(),
        "--state",
        "00",
    ]);
    assert_exit(&output, 1);
    assert_line(&output, "orthonormal: false");

    let output = run(&[
        "measure",
        identity.to_str().unwrap(),
        "--state",
        "00",
        "--force-nonorthonormal",
    ]);
    assert_exit(&output, 0);
    let text = stdout(&output);
    assert!(text.contains("weight-sum:"), "{text}");
}

#[test]
fn channel_reproduces_the_table_row() {
    let output = run(&[
        "channel",
        fixture("afbw.proc").to_str().unwrap(),
        "--input",
        "001",
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "input=001 -> output=100 p=1.000000000000");
}

#[test]
fn channel_check_declares_afbw_faithful() {
    let output = run(&["channel", fixture("afbw.proc").to_str().unwrap(), "--check"]);
    assert_exit(&output, 0);
    assert_line(&output, "faithful: true");
    assert_line(&output, "input=000 -> output=000 p=1.000000000000");
    assert_line(&output, "input=111 -> output=000 p=1.000000000000");
}

#[test]
fn channel_check_detects_unfaithful_processes() {
    // The four-party process behind svetlichny4.ens verifies as a noncausal
    // classical process yet does not reproduce its channel deterministically.
    let dir = tempfile::tempdir().unwrap();
    let proc_path = dir.path().join("svetlichny4.proc");
    let output = run(&[
        "invert-ensemble",
        fixture("svetlichny4.ens").to_str().unwrap(),
        "--out",
        proc_path.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);

    let output = run(&["verify-process", proc_path.to_str().unwrap()]);
    assert_exit(&output, 0);

    let output = run(&["channel", proc_path.to_str().unwrap(), "--check"]);
    assert_exit(&output, 1);
    assert_line(&output, "faithful: false");
}

#[test]
fn channel_samples_carry_labels() {
    let output = run(&[
        "channel",
        fixture("afbw.proc").to_str().unwrap(),
        "--input",
        "001",
        "--samples",
        "4",
        "--seed",
        "3",
    ]);
    assert_exit(&output, 0);
    let text = stdout(&output);
    let samples: Vec<&str> = text.lines().filter(|l| l.starts_with("sample=")).collect();
    assert_eq!(samples.len(), 4);
    for line in samples {
        assert!(line.ends_with("output=100"), "{line}");
    }
}

#[test]
fn discriminate_tallies_perfectly_on_afbw() {
    let output = run(&[
        "discriminate",
        fixture("afbw.proc").to_str().unwrap(),
        "--trials",
        "50",
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "perfect: true");
    let text = stdout(&output);
    assert_eq!(
        text.lines()
            .filter(|l| l.ends_with("trials=50 success=50"))
            .count(),
        8
    );
}

#[test]
fn discriminate_single_secret() {
    let output = run(&[
        "discriminate",
        fixture("afbw.proc").to_str().unwrap(),
        "--trials",
        "20",
        "--secret",
        "2",
    ]);
    assert_exit(&output, 0);
    assert_line(&output, "state=01+ trials=20 success=20");
}

#[test]
fn enumerate_reports_the_small_party_censuses() {
    let output = run(&["enumerate", "--n", "1"]);
    assert_exit(&output, 0);
    assert_line(&output, "total-candidates: 4");
    assert_line(&output, "classical-processes: 2");
    assert_line(&output, "no-global-past: 0");

    let output = run(&["enumerate", "--n", "2"]);
    assert_exit(&output, 0);
    assert_line(&output, "total-candidates: 256");
    assert_line(&output, "classical-processes: 12");
    assert_line(&output, "no-global-past: 0");
    assert_line(&output, "canonical-classes: 0");
}

#[test]
fn enumerate_rejects_large_party_counts() {
    let output = run(&["enumerate", "--n", "4"]);
    assert_exit(&output, 2);
}

#[test]
fn enumerate_output_is_deterministic_across_runs_and_workers() {
    let first = run(&["enumerate", "--n", "2", "--jobs", "1"]);
    let second = run(&["enumerate", "--n", "2", "--jobs", "1"]);
    assert_eq!(
        without_elapsed(&stdout(&first)),
        without_elapsed(&stdout(&second))
    );

    let parallel = run(&["enumerate", "--n", "2", "--jobs", "4"]);
    let serial_lines = without_elapsed(&stdout(&first));
    let parallel_lines = without_elapsed(&stdout(&parallel));
    // Everything but the echoed jobs field and the timing must agree.
    let strip_jobs = |text: &str| {
        text.lines()
            .filter(|l| !l.starts_with("jobs:"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip_jobs(&serial_lines), strip_jobs(&parallel_lines));
}

#[test]
fn enumerate_writes_a_canonical_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.d");
    let output = run(&[
        "enumerate",
        "--n",
        "2",
        "--filter",
        "classical",
        "--canonical",
        "--out",
        corpus.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);

    // Canonical class count of the 12 two-party processes, derived
    // independently through the library.
    let expected: std::collections::BTreeSet<qnlwe::ProcessTable> =
        qnlwe::search::enumerate_classical_processes(2)
            .unwrap()
            .map(|t| qnlwe::search::canonicalize(&t))
            .collect();
    assert_line(&output, &format!("written: {}", expected.len()));

    let mut parsed = std::collections::BTreeSet::new();
    for entry in std::fs::read_dir(&corpus).unwrap() {
        let path = entry.unwrap().path();
        assert_eq!(path.extension().unwrap(), "proc");
        let text = std::fs::read_to_string(&path).unwrap();
        parsed.insert(qnlwe::ProcessTable::from_proc_str(&text).unwrap());
    }
    assert_eq!(parsed, expected);
}

#[test]
fn sample_reports_are_reproducible() {
    let args = ["sample", "--n", "3", "--count", "5000", "--seed", "11"];
    let first = run(&args);
    let second = run(&args);
    assert_exit(&first, 0);
    assert_eq!(
        without_elapsed(&stdout(&first)),
        without_elapsed(&stdout(&second))
    );
    assert_line(&first, "examined: 5000");
}

#[test]
fn reports_echo_their_configuration() {
    let output = run(&[
        "measure",
        fixture("afbw.proc").to_str().unwrap(),
        "--state",
        "000",
        "--seed",
        "9",
    ]);
    assert_line(&output, "command: measure");
    assert_line(&output, "state: 000");
    assert_line(&output, "seed: 9");
    assert_line(&output, "samples: 0");
    assert_line(&output, "force-nonorthonormal: false");
}
