//! Error metrics, condition numbers, baselines, and the seeded sweep harness
//! over `(epsilon, beta)` grids of random lift trials.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use crate::eig::{eig_all, left_nullpair, nearest_eigenpair};
use crate::lift::{build_lift_with_nullvectors, solve_nullpair};
use crate::matgen::{make_2x2, make_large, random_lift_vectors, LargeTestMatrix, TwoByTwoFamily};
use crate::{CMatrix, CVector, Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const PI: f64 = std::f64::consts::PI;

/// Outcome of one random-lift trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    /// Nullvector ratio error against the analytic reference.
    pub error: f64,
    /// Magnitude of the "zero" eigenvalue of the lifted matrix.
    pub lambda0_abs: f64,
    /// `s(0) = |Psi^H Phi|`; the condition number is its reciprocal.
    pub cond_recip: f64,
    /// Ratio error of the direct (no-lift) eigensolve, same for every trial.
    pub baseline_error: f64,
    /// The derived stream seed this trial drew its lift vectors from.
    pub seed: u64,
}

/// A trial either completes or is flagged as degenerate and excluded from
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialOutcome {
    Completed(TrialResult),
    Degenerate { seed: u64 },
}

/// Aggregated statistics for one `(epsilon, beta)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub beta: f64,
    pub n_trials: usize,
    pub n_flagged: usize,
    pub mean_error: f64,
    /// Root-mean-square about the mean (standard-deviation form).
    pub rms_error: f64,
    pub mean_lambda0_abs: f64,
    pub mean_cond_recip: f64,
    pub baseline_error: f64,
}

/// The test problem a trial set runs on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Small { epsilon: f64 },
    Large { n: usize, epsilon: f64, matrix_seed: u64 },
}

/// Problem family for sweeps; epsilon is supplied per grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemFamily {
    Small,
    Large { n: usize, matrix_seed: u64 },
}

impl ProblemFamily {
    fn at(self, epsilon: f64) -> Problem {
        match self {
            ProblemFamily::Small => Problem::Small { epsilon },
            ProblemFamily::Large { n, matrix_seed } => Problem::Large {
                n,
                epsilon,
                matrix_seed,
            },
        }
    }
}

/// The `(epsilon, beta)` grid of a sweep.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub epsilons: Vec<f64>,
    pub betas: Vec<f64>,
}

/// Stream seed for trial `t` of a master seed (splitmix64 step).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add((trial.wrapping_add(1)).wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn checked_ratio(num: Complex64, den: Complex64, scale: f64) -> Result<Complex64> {
    if den.norm() < f64::EPSILON * scale {
        return Err(Error::DivisionDegenerate);
    }
    Ok(num / den)
}

/// Lifting error of the 2x2 problem: `|Phi_2/Phi_1 - (mu_plus - pi)|` from
/// the first two components of the lifted nullvector.
pub fn error_2x2(family: &TwoByTwoFamily, pair: &crate::lift::NullPair) -> Result<f64> {
    let phi = &pair.phi_lifted;
    let ratio = checked_ratio(phi[1], phi[0], phi.norm())?;
    Ok((ratio - family.ratio_plus).norm())
}

/// Lifting error of the large problem: the projection is mapped back through
/// the stored transform before the ratio is taken.
pub fn error_large(tm: &LargeTestMatrix, pair: &crate::lift::NullPair) -> Result<f64> {
    let x = pair.phi_lifted.rows(0, tm.n).into_owned();
    let u = &tm.q * x;
    let ratio = checked_ratio(u[1], u[0], u.norm())?;
    Ok((ratio - (tm.mu_plus - Complex64::new(PI, 0.0))).norm())
}

/// Ratio error of the direct eigensolve on the unshifted matrix: the
/// eigenvector nearest `mu_plus` is taken straight from the backend, passed
/// through the optional transform, and compared to `ratio_ref`.
pub fn baseline_no_lift(
    m: &CMatrix,
    mu_plus: Complex64,
    ratio_ref: Complex64,
    transform: Option<&CMatrix>,
) -> Result<f64> {
    let pairs = eig_all(m)?;
    let (_, x) = nearest_eigenpair(&pairs, mu_plus)?;
    let u = match transform {
        Some(t) => t * x,
        None => x,
    };
    let ratio = checked_ratio(u[1], u[0], u.norm())?;
    Ok((ratio - ratio_ref).norm())
}

/// `s(0) = |Psi^H Phi|` for the unit nullpair (conjugate inner product); the
/// condition number of the zero singular value is `1 / s(0)`.
pub fn condition_s0(pair: &crate::lift::NullPair) -> f64 {
    pair.psi_lifted.dotc(&pair.phi_lifted).norm()
}

struct ProblemContext {
    a: CMatrix,
    phi: CVector,
    psi: CVector,
    baseline: f64,
    dim: usize,
    small: Option<TwoByTwoFamily>,
    large: Option<LargeTestMatrix>,
}

fn prepare(problem: &Problem) -> Result<ProblemContext> {
    match *problem {
        Problem::Small { epsilon } => {
            let fam = make_2x2(epsilon);
            let mut a = fam.m.clone();
            a[(0, 0)] -= fam.mu_plus;
            a[(1, 1)] -= fam.mu_plus;
            let pairs = eig_all(&a)?;
            let (_, phi) = nearest_eigenpair(&pairs, ZERO)?;
            let (_, psi) = left_nullpair(&a, ZERO)?;
            let baseline = baseline_no_lift(&fam.m, fam.mu_plus, fam.ratio_plus, None)?;
            Ok(ProblemContext {
                a,
                phi,
                psi,
                baseline,
                dim: 2,
                small: Some(fam),
                large: None,
            })
        }
        Problem::Large {
            n,
            epsilon,
            matrix_seed,
        } => {
            let tm = make_large(n, epsilon, matrix_seed)?;
            let pairs = eig_all(&tm.a)?;
            let (_, phi) = nearest_eigenpair(&pairs, ZERO)?;
            let (_, psi) = left_nullpair(&tm.a, ZERO)?;
            let mut unshifted = tm.a.clone();
            for i in 0..n {
                unshifted[(i, i)] += tm.mu_plus;
            }
            let ratio_ref = tm.mu_plus - Complex64::new(PI, 0.0);
            let baseline =
                baseline_no_lift(&unshifted, tm.mu_plus, ratio_ref, Some(&tm.q))?;
            Ok(ProblemContext {
                a: tm.a.clone(),
                phi,
                psi,
                baseline,
                dim: n,
                small: None,
                large: Some(tm),
            })
        }
    }
}

fn run_one(ctx: &ProblemContext, beta: f64, seed: u64) -> Result<TrialOutcome> {
    let lift = random_lift_vectors(ctx.dim, beta, beta, seed);
    let sys = build_lift_with_nullvectors(&ctx.a, lift, &ctx.phi, &ctx.psi)?;
    let pair = match solve_nullpair(&sys) {
        Ok(p) => p,
        Err(Error::DegenerateLift { .. }) => return Ok(TrialOutcome::Degenerate { seed }),
        Err(e) => return Err(e),
    };
    let error = match &ctx.small {
        Some(fam) => error_2x2(fam, &pair),
        None => error_large(ctx.large.as_ref().unwrap(), &pair),
    };
    let error = match error {
        Ok(e) => e,
        // a vanishing ratio denominator is flagged like a degenerate lift
        Err(Error::DivisionDegenerate) => return Ok(TrialOutcome::Degenerate { seed }),
        Err(e) => return Err(e),
    };
    Ok(TrialOutcome::Completed(TrialResult {
        error,
        lambda0_abs: pair.lambda0.norm(),
        cond_recip: condition_s0(&pair),
        baseline_error: ctx.baseline,
        seed,
    }))
}

/// Runs `n_trials` random-lift trials; trial `t` draws its lift vectors from
/// the stream seed `trial_seed(seed, t)`, so the result is a pure function of
/// the arguments.
pub fn run_trials(
    problem: &Problem,
    beta: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    let ctx = prepare(problem)?;
    let mut out = Vec::with_capacity(n_trials);
    for t in 0..n_trials {
        out.push(run_one(&ctx, beta, trial_seed(seed, t as u64))?);
    }
    Ok(out)
}

/// Aggregates trial outcomes into a sweep record. Degenerate trials are
/// counted in `n_flagged` and excluded from the statistics; the rms is taken
/// about the mean.
pub fn aggregate(epsilon: f64, beta: f64, outcomes: &[TrialOutcome]) -> SweepRecord {
    let mut errors = Vec::with_capacity(outcomes.len());
    let mut sum_l0 = 0.0;
    let mut sum_s0 = 0.0;
    let mut baseline = f64::NAN;
    let mut n_flagged = 0;
    for outcome in outcomes {
        match outcome {
            TrialOutcome::Completed(t) => {
                errors.push(t.error);
                sum_l0 += t.lambda0_abs;
                sum_s0 += t.cond_recip;
                baseline = t.baseline_error;
            }
            TrialOutcome::Degenerate { .. } => n_flagged += 1,
        }
    }
    let n_ok = errors.len();
    let (mean, rms) = if n_ok > 0 {
        let mean = errors.iter().sum::<f64>() / n_ok as f64;
        let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n_ok as f64;
        (mean, var.sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    SweepRecord {
        epsilon,
        beta,
        n_trials: outcomes.len(),
        n_flagged,
        mean_error: mean,
        rms_error: rms,
        mean_lambda0_abs: if n_ok > 0 { sum_l0 / n_ok as f64 } else { f64::NAN },
        mean_cond_recip: if n_ok > 0 { sum_s0 / n_ok as f64 } else { f64::NAN },
        baseline_error: baseline,
    }
}

fn sweep_cell(
    family: ProblemFamily,
    epsilon: f64,
    beta: f64,
    n_trials: usize,
    seed: u64,
) -> Result<SweepRecord> {
    let outcomes = run_trials(&family.at(epsilon), beta, n_trials, seed)?;
    Ok(aggregate(epsilon, beta, &outcomes))
}

/// Runs one [`sweep_cell`] per `(epsilon, beta)` grid point, rows ordered
/// with epsilon outer and beta inner. Every cell reuses the same master seed,
/// so a 1x1 grid reproduces a direct `run_trials` + `aggregate` call and the
/// same random vectors are compared across cells.
///
/// `threads` caps worker concurrency; 0 means one worker per available core.
/// Cell results are independent of scheduling.
pub fn sweep(
    grid: &SweepGrid,
    family: ProblemFamily,
    n_trials: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<SweepRecord>> {
    let cells: Vec<(f64, f64)> = grid
        .epsilons
        .iter()
        .flat_map(|&e| grid.betas.iter().map(move |&b| (e, b)))
        .collect();
    let threads = if threads == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        threads
    }
    .min(cells.len().max(1));

    if threads <= 1 {
        return cells
            .iter()
            .map(|&(e, b)| sweep_cell(family, e, b, n_trials, seed))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<SweepRecord>)>();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let tx = tx.clone();
            let next = &next;
            let cells = &cells;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (e, b) = cells[i];
                let rec = sweep_cell(family, e, b, n_trials, seed);
                if tx.send((i, rec)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);

    let mut slots: Vec<Option<SweepRecord>> = vec![None; cells.len()];
    for (i, rec) in rx {
        slots[i] = Some(rec?);
    }
    Ok(slots.into_iter().map(|s| s.expect("cell computed")).collect())
}
