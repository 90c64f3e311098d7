//! Browser bindings for the interactive lifting demo.
//!
//! Three operations back the demo page: a beta sweep of the mean lifting
//! error on the 2x2 problem, the matching condition-number curve for one
//! seeded lift, and a full readout of a single lift. Results are returned as
//! JSON strings so the page needs no framework, just `JSON.parse`.

use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use liftkit::lift::build_lift_with_nullvectors;
use liftkit::{
    aggregate, condition_s0, eig_all, error_2x2, left_nullpair, make_2x2, nearest_eigenpair,
    random_lift_vectors, run_trials, solve_nullpair, trial_seed, verify_alpha, CMatrix, CVector,
    Complex64, Problem,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn beta_grid(log10_min: f64, log10_max: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            10f64.powf(log10_min + t * (log10_max - log10_min))
        })
        .collect()
}

/// The shifted 2x2 problem with its computed nullvector references.
fn shifted_problem(epsilon: f64) -> (CMatrix, CVector, CVector, liftkit::TwoByTwoFamily) {
    let fam = make_2x2(epsilon);
    let mut a = fam.m.clone();
    a[(0, 0)] -= fam.mu_plus;
    a[(1, 1)] -= fam.mu_plus;
    let pairs = eig_all(&a).expect("2x2 eigensolve");
    let (_, phi) = nearest_eigenpair(&pairs, ZERO).expect("nullvector");
    let (_, psi) = left_nullpair(&a, ZERO).expect("left nullvector");
    (a, phi, psi, fam)
}

fn error_curve_json(
    epsilon: f64,
    log10_beta_min: f64,
    log10_beta_max: f64,
    n_beta: usize,
    trials: usize,
    seed: u64,
) -> String {
    let betas = beta_grid(log10_beta_min, log10_beta_max, n_beta);
    let problem = Problem::Small { epsilon };
    let mut mean_error = Vec::with_capacity(betas.len());
    let mut rms_error = Vec::with_capacity(betas.len());
    let mut lambda0 = Vec::with_capacity(betas.len());
    let mut flagged = Vec::with_capacity(betas.len());
    let mut baseline = f64::NAN;
    for &beta in &betas {
        let outcomes = run_trials(&problem, beta, trials, seed).expect("trials");
        let rec = aggregate(epsilon, beta, &outcomes);
        mean_error.push(rec.mean_error);
        rms_error.push(rec.rms_error);
        lambda0.push(rec.mean_lambda0_abs);
        flagged.push(rec.n_flagged);
        baseline = rec.baseline_error;
    }
    json!({
        "epsilon": epsilon,
        "trials": trials,
        "betas": betas,
        "mean_error": mean_error,
        "rms_error": rms_error,
        "mean_lambda0_abs": lambda0,
        "n_flagged": flagged,
        "baseline_error": baseline,
    })
    .to_string()
}

fn condition_curve_json(
    epsilon: f64,
    log10_beta_min: f64,
    log10_beta_max: f64,
    n_beta: usize,
    seed: u64,
) -> String {
    let betas = beta_grid(log10_beta_min, log10_beta_max, n_beta);
    let (a, phi, psi, _) = shifted_problem(epsilon);
    // one seeded pair of unit direction vectors, rescaled per beta
    let lift_seed = trial_seed(seed, 0);
    let mut cond = Vec::with_capacity(betas.len());
    for &beta in &betas {
        let lift = random_lift_vectors(2, beta, beta, lift_seed);
        let sys = build_lift_with_nullvectors(&a, lift, &phi, &psi).expect("build");
        let value = match solve_nullpair(&sys) {
            Ok(pair) => 1.0 / condition_s0(&pair),
            Err(_) => f64::NAN,
        };
        cond.push(value);
    }
    json!({
        "epsilon": epsilon,
        "betas": betas,
        "condition_number": cond,
    })
    .to_string()
}

fn complex_pair(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn lift_detail_json(epsilon: f64, beta: f64, seed: u64) -> String {
    let (a, phi, psi, fam) = shifted_problem(epsilon);
    let lift = random_lift_vectors(2, beta, beta, trial_seed(seed, 0));
    let sys = build_lift_with_nullvectors(&a, lift, &phi, &psi).expect("build");
    let checks = &sys.checks;
    let l_entries: Vec<serde_json::Value> = (0..3)
        .map(|i| json!((0..3).map(|j| complex_pair(sys.l[(i, j)])).collect::<Vec<_>>()))
        .collect();
    let conditions = json!({
        "w_dot_phi": checks.w_dot_phi.norm(),
        "psi_dot_v": checks.psi_dot_v.norm(),
        "eta_omega": checks.eta_omega.norm(),
        "lifted_inner": checks.lifted_inner.norm(),
        "all_passed": checks.all_passed(),
    });
    match solve_nullpair(&sys) {
        Ok(pair) => {
            let error = error_2x2(&fam, &pair).unwrap_or(f64::NAN);
            let baseline =
                liftkit::baseline_no_lift(&fam.m, fam.mu_plus, fam.ratio_plus, None)
                    .unwrap_or(f64::NAN);
            json!({
                "epsilon": epsilon,
                "beta": beta,
                "mu_plus": complex_pair(fam.mu_plus),
                "lifted_matrix": l_entries,
                "conditions": conditions,
                "lambda0": complex_pair(pair.lambda0),
                "phi": pair.phi_lifted.iter().map(|&z| complex_pair(z)).collect::<Vec<_>>(),
                "xi": complex_pair(pair.xi),
                "zeta": complex_pair(pair.zeta),
                "alpha_abs": verify_alpha(&sys, &pair).norm(),
                "s0": condition_s0(&pair),
                "lift_error": error,
                "baseline_error": baseline,
                "degenerate": false,
            })
            .to_string()
        }
        Err(e) => json!({
            "epsilon": epsilon,
            "beta": beta,
            "lifted_matrix": l_entries,
            "conditions": conditions,
            "degenerate": true,
            "message": e.to_string(),
        })
        .to_string(),
    }
}

/// Mean lifting error over random trials as a function of beta (JSON).
#[wasm_bindgen]
pub fn error_curve(
    epsilon: f64,
    log10_beta_min: f64,
    log10_beta_max: f64,
    n_beta: usize,
    trials: usize,
    seed: u32,
) -> String {
    error_curve_json(
        epsilon,
        log10_beta_min,
        log10_beta_max,
        n_beta,
        trials,
        seed as u64,
    )
}

/// Condition number of the lifted zero eigenvalue for one seeded lift (JSON).
#[wasm_bindgen]
pub fn condition_curve(
    epsilon: f64,
    log10_beta_min: f64,
    log10_beta_max: f64,
    n_beta: usize,
    seed: u32,
) -> String {
    condition_curve_json(epsilon, log10_beta_min, log10_beta_max, n_beta, seed as u64)
}

/// Full readout of a single lift: matrix, guards, nullpair, error (JSON).
#[wasm_bindgen]
pub fn lift_detail(epsilon: f64, beta: f64, seed: u32) -> String {
    lift_detail_json(epsilon, beta, seed as u64)
}
