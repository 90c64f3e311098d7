//! End-to-end tests of the `liftkit` binary: exit codes, output stability,
//! and consistency between subcommands.

use std::collections::HashMap;
use std::process::{Command, Output};

use liftkit::mm::{write_matrix_str, MmField, MmFormat};
use liftkit::{eig_all, left_nullpair, make_2x2, nearest_eigenpair, CMatrix, CVector, Complex64};

fn liftkit_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liftkit"))
}

fn run(args: &[&str]) -> Output {
    liftkit_bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Parses `key = value` lines into a map.
fn parse_kv(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn demo2x2_reaches_machine_precision_at_the_defective_point() {
    let out = run(&[
        "demo2x2", "--epsilon", "0", "--beta", "1", "--trials", "1000", "--seed", "42",
    ]);
    assert!(out.status.success());
    let kv = parse_kv(&stdout_of(&out));
    let mean_error: f64 = kv["mean_error"].parse().unwrap();
    assert!(mean_error <= 1e-12, "mean_error = {mean_error:e}");
}

#[test]
fn identical_flags_give_byte_identical_output() {
    let args = [
        "demo2x2", "--epsilon", "1e-10", "--beta", "0.5", "--trials", "25", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn one_cell_sweep_matches_demo2x2() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("cell.csv");
    let sweep_out = run(&[
        "sweep",
        "--problem",
        "small",
        "--epsilons",
        "1e-10",
        "--betas",
        "1",
        "--trials",
        "50",
        "--seed",
        "42",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(sweep_out.status.success());
    let records = liftkit::csv::parse_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(records.len(), 1);

    let demo_out = run(&[
        "demo2x2", "--epsilon", "1e-10", "--beta", "1", "--trials", "50", "--seed", "42",
    ]);
    let kv = parse_kv(&stdout_of(&demo_out));
    let demo_mean: f64 = kv["mean_error"].parse().unwrap();
    let demo_rms: f64 = kv["rms_error"].parse().unwrap();
    assert_eq!(records[0].mean_error.to_bits(), demo_mean.to_bits());
    assert_eq!(records[0].rms_error.to_bits(), demo_rms.to_bits());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["demo2x2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn missing_matrix_file_is_a_file_error() {
    let out = run(&["lift", "--matrix", "/nonexistent/m.mtx", "--mu", "0"]);
    assert_eq!(out.status.code(), Some(74));
}

#[test]
fn malformed_matrix_file_is_a_file_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix array real general\n2 2\n1.0\n").unwrap();
    let out = run(&["lift", "--matrix", path.to_str().unwrap(), "--mu", "0"]);
    assert_eq!(out.status.code(), Some(74));
}

#[test]
fn gen_then_lift_recovers_the_nullvector() {
    let dir = tempfile::tempdir().unwrap();
    let matrix_path = dir.path().join("m2x2.mtx");
    let gen_out = run(&[
        "gen",
        "--family",
        "m2x2",
        "--epsilon",
        "1e-6",
        "--out",
        matrix_path.to_str().unwrap(),
    ]);
    assert!(gen_out.status.success());
    // gen prints the shift target to use
    let kv = parse_kv(&stdout_of(&gen_out));
    let mu_parts: Vec<&str> = kv["mu_plus"].split_whitespace().collect();
    let mu_arg = format!("{},{}", mu_parts[0], mu_parts[1]);

    let null_path = dir.path().join("null.mtx");
    let lift_out = run(&[
        "lift",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--mu",
        &mu_arg,
        "--beta",
        "1",
        "--gamma",
        "1",
        "--seed",
        "42",
        "--out",
        null_path.to_str().unwrap(),
    ]);
    assert_eq!(lift_out.status.code(), Some(0), "{}", stdout_of(&lift_out));

    // recovered nullvector ratio matches the analytic one
    let v = liftkit::mm::read_vector(&null_path).unwrap();
    let fam = make_2x2(1e-6);
    let ratio = v[1] / v[0];
    assert!(
        (ratio - fam.ratio_plus).norm() <= 1e-10,
        "ratio {ratio} vs {}",
        fam.ratio_plus
    );
}

#[test]
fn pathological_vector_file_exits_with_condition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let fam = make_2x2(0.0);
    let matrix_path = dir.path().join("m.mtx");
    std::fs::write(
        &matrix_path,
        write_matrix_str(&fam.m, MmFormat::Array, MmField::Real),
    )
    .unwrap();

    // v = (phi, -1), omega = w^T phi against the computed nullvectors
    let mut a = fam.m.clone();
    a[(0, 0)] -= fam.mu_plus;
    a[(1, 1)] -= fam.mu_plus;
    let zero = Complex64::new(0.0, 0.0);
    let pairs = eig_all(&a).unwrap();
    let (_, phi) = nearest_eigenpair(&pairs, zero).unwrap();
    let (_, _psi) = left_nullpair(&a, zero).unwrap();
    let w = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]);
    let omega = w.dot(&phi);
    let mut vw = CMatrix::zeros(3, 2);
    vw[(0, 0)] = phi[0];
    vw[(1, 0)] = phi[1];
    vw[(2, 0)] = Complex64::new(-1.0, 0.0);
    vw[(0, 1)] = w[0];
    vw[(1, 1)] = w[1];
    vw[(2, 1)] = omega;
    let vectors_path = dir.path().join("vw.mtx");
    std::fs::write(
        &vectors_path,
        write_matrix_str(&vw, MmFormat::Array, MmField::Complex),
    )
    .unwrap();

    let mu = format!("{:e}", std::f64::consts::FRAC_PI_2);
    let out = run(&[
        "lift",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--mu",
        &mu,
        "--vectors",
        vectors_path.to_str().unwrap(),
        "--out",
        dir.path().join("null.mtx").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(
        text.lines().any(|l| l.starts_with("cond_lifted_inner = FAIL")),
        "guard flag missing in:\n{text}"
    );
}

#[test]
fn custom_vector_file_built_from_nullvectors_lifts_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let fam = make_2x2(0.0);
    let matrix_path = dir.path().join("m.mtx");
    std::fs::write(
        &matrix_path,
        write_matrix_str(&fam.m, MmFormat::Array, MmField::Real),
    )
    .unwrap();

    // v = (psi, 1), w = (phi, 1): the nonorthogonality conditions hold by
    // construction
    let mut a = fam.m.clone();
    a[(0, 0)] -= fam.mu_plus;
    a[(1, 1)] -= fam.mu_plus;
    let zero = Complex64::new(0.0, 0.0);
    let pairs = eig_all(&a).unwrap();
    let (_, phi) = nearest_eigenpair(&pairs, zero).unwrap();
    let (_, psi) = left_nullpair(&a, zero).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let mut vw = CMatrix::zeros(3, 2);
    vw[(0, 0)] = psi[0];
    vw[(1, 0)] = psi[1];
    vw[(2, 0)] = one;
    vw[(0, 1)] = phi[0];
    vw[(1, 1)] = phi[1];
    vw[(2, 1)] = one;
    let vectors_path = dir.path().join("vw.mtx");
    std::fs::write(
        &vectors_path,
        write_matrix_str(&vw, MmFormat::Array, MmField::Complex),
    )
    .unwrap();

    let null_path = dir.path().join("null.mtx");
    let mu = format!("{:e}", std::f64::consts::FRAC_PI_2);
    let out = run(&[
        "lift",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--mu",
        &mu,
        "--vectors",
        vectors_path.to_str().unwrap(),
        "--out",
        null_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let v = liftkit::mm::read_vector(&null_path).unwrap();
    let ratio = v[1] / v[0];
    assert!(
        (ratio - fam.ratio_plus).norm() <= 1e-12,
        "ratio {ratio} vs {}",
        fam.ratio_plus
    );
}

#[test]
fn demo_n_runs_at_small_scale() {
    let out = run(&[
        "demoN",
        "--n",
        "12",
        "--epsilon",
        "1e-12",
        "--beta",
        "1",
        "--trials",
        "5",
        "--seed",
        "42",
    ]);
    assert!(out.status.success(), "{}", stdout_of(&out));
    let kv = parse_kv(&stdout_of(&out));
    let mean_error: f64 = kv["mean_error"].parse().unwrap();
    let baseline: f64 = kv["baseline_error"].parse().unwrap();
    assert!(mean_error < baseline);
}

#[test]
fn gen_poisson_writes_a_readable_coordinate_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.mtx");
    let out = run(&[
        "gen",
        "--family",
        "poisson",
        "--m-count",
        "9",
        "--format",
        "coordinate",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let m = liftkit::mm::read_matrix(&path).unwrap();
    assert_eq!(m.nrows(), 9);
    assert_eq!(m, liftkit::poisson_block(9));
}

#[test]
fn sweep_reports_the_optimal_beta() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--problem",
        "small",
        "--epsilons",
        "1e-10",
        "--betas",
        "1e-3,1",
        "--trials",
        "30",
        "--seed",
        "42",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("optimal beta = 1e0"), "{text}");
    let records = liftkit::csv::parse_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(records.len(), 2);
}

#[test]
fn lift_rejects_matrix_vector_size_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let fam = make_2x2(0.0);
    let matrix_path = dir.path().join("m.mtx");
    std::fs::write(
        &matrix_path,
        write_matrix_str(&fam.m, MmFormat::Array, MmField::Real),
    )
    .unwrap();
    let vectors_path = dir.path().join("vw.mtx");
    std::fs::write(
        &vectors_path,
        write_matrix_str(&CMatrix::zeros(5, 2), MmFormat::Array, MmField::Real),
    )
    .unwrap();
    let out = run(&[
        "lift",
        "--matrix",
        matrix_path.to_str().unwrap(),
        "--mu",
        "0",
        "--vectors",
        vectors_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
