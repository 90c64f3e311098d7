//! Test-problem generators: the 2x2 epsilon-family with known eigenstructure,
//! a large similarity-transformed matrix with an embedded discrete Laplacian,
//! and the seeded random lift vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eig::random_orthogonal;
use crate::lift::{LiftStrategy, LiftVectors};
use crate::{CMatrix, CVector, Complex64, Error, Result};

const PI: f64 = std::f64::consts::PI;

/// The 2x2 family `M = [[pi, 1], [-pi^2/4, eps]]`, defective at `eps = 0`,
/// with its analytic eigenvalues and eigenvector ratio.
#[derive(Debug, Clone)]
pub struct TwoByTwoFamily {
    pub epsilon: f64,
    pub m: CMatrix,
    pub mu_plus: Complex64,
    pub mu_minus: Complex64,
    /// `phi_2 / phi_1 = mu_plus - pi` for the eigenvector at `mu_plus`.
    pub ratio_plus: Complex64,
}

/// Builds the 2x2 family at the given `epsilon`.
///
/// The eigenvalues `mu = [pi + eps +- sqrt(eps^2 - 2 pi eps)] / 2` are
/// evaluated in complex arithmetic; the discriminant is negative for
/// `0 < eps < 2 pi` so the pair is complex there.
pub fn make_2x2(epsilon: f64) -> TwoByTwoFamily {
    let c = |re: f64| Complex64::new(re, 0.0);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[c(PI), c(1.0), c(-PI * PI / 4.0), c(epsilon)],
    );
    let disc = Complex64::new(epsilon * epsilon - 2.0 * PI * epsilon, 0.0).sqrt();
    let mu_plus = (c(PI + epsilon) + disc) / c(2.0);
    let mu_minus = (c(PI + epsilon) - disc) / c(2.0);
    TwoByTwoFamily {
        epsilon,
        m,
        mu_plus,
        mu_minus,
        ratio_plus: mu_plus - c(PI),
    }
}

enum PoissonShape {
    /// 1-D second-difference matrix of the given size.
    OneD(usize),
    /// 2-D five-point stencil on a `p x q` grid with Dirichlet boundaries.
    Grid(usize, usize),
}

/// Largest factor pair `p * q = m` with `1 < p <= q`, `p` nearest `sqrt(m)`.
fn grid_factor(m: usize) -> Option<(usize, usize)> {
    if m < 4 {
        return None;
    }
    let mut p = (m as f64).sqrt().floor() as usize;
    while p > 1 {
        if m.is_multiple_of(p) {
            return Some((p, m / p));
        }
        p -= 1;
    }
    None
}

fn poisson_shape(m_count: usize) -> PoissonShape {
    match grid_factor(m_count) {
        Some((p, q)) => PoissonShape::Grid(p, q),
        None => PoissonShape::OneD(m_count),
    }
}

fn poisson_matrix(shape: &PoissonShape) -> CMatrix {
    let c = |re: f64| Complex64::new(re, 0.0);
    match *shape {
        PoissonShape::OneD(m) => CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                c(2.0)
            } else if i.abs_diff(j) == 1 {
                c(-1.0)
            } else {
                c(0.0)
            }
        }),
        PoissonShape::Grid(p, q) => {
            let m = p * q;
            let mut a = CMatrix::zeros(m, m);
            for gi in 0..p {
                for gj in 0..q {
                    let k = gi * q + gj;
                    a[(k, k)] = c(4.0);
                    if gj + 1 < q {
                        a[(k, k + 1)] = c(-1.0);
                        a[(k + 1, k)] = c(-1.0);
                    }
                    if gi + 1 < p {
                        a[(k, k + q)] = c(-1.0);
                        a[(k + q, k)] = c(-1.0);
                    }
                }
            }
            a
        }
    }
}

fn poisson_spectrum(shape: &PoissonShape) -> Vec<f64> {
    match *shape {
        PoissonShape::OneD(m) => (1..=m)
            .map(|k| 2.0 - 2.0 * (k as f64 * PI / (m as f64 + 1.0)).cos())
            .collect(),
        PoissonShape::Grid(p, q) => {
            let mut out = Vec::with_capacity(p * q);
            for a in 1..=p {
                for b in 1..=q {
                    out.push(
                        4.0 - 2.0 * (a as f64 * PI / (p as f64 + 1.0)).cos()
                            - 2.0 * (b as f64 * PI / (q as f64 + 1.0)).cos(),
                    );
                }
            }
            out
        }
    }
}

/// Discrete Dirichlet Laplacian of the given size.
///
/// When `m_count` factors as `p * q` with `p, q > 1` this is the
/// block-tridiagonal five-point stencil on the near-square `p x q` grid
/// (diagonal 4, off-diagonals -1); otherwise the 1-D second-difference
/// matrix (diagonal 2, off-diagonals -1).
pub fn poisson_block(m_count: usize) -> CMatrix {
    poisson_matrix(&poisson_shape(m_count))
}

/// Analytic eigenvalues of [`poisson_block`], used for the spectral
/// separation guard in [`make_large`].
pub fn poisson_eigenvalues(m_count: usize) -> Vec<f64> {
    poisson_spectrum(&poisson_shape(m_count))
}

/// The large test problem: `M(eps)` in the top-left block, a discrete
/// Laplacian in the bottom-right, shifted by `mu_plus` and hidden behind a
/// random orthogonal similarity transform.
#[derive(Debug, Clone)]
pub struct LargeTestMatrix {
    pub n: usize,
    pub epsilon: f64,
    /// `Q^T (blockdiag(M(eps), P) - mu_plus I) Q`, already shifted.
    pub a: CMatrix,
    /// The similarity transform `Q`; `Q u` maps a vector of `a` back to the
    /// block-diagonal basis.
    pub q: CMatrix,
    pub mu_plus: Complex64,
    pub seed: u64,
}

const SPECTRAL_GUARD: f64 = 1e-3;

/// Builds the `n x n` large test matrix.
///
/// The embedded Laplacian must keep its spectrum at least `1e-3` away from
/// `mu_plus` so that nearest-eigenvalue selection stays well-posed; if the
/// grid variant violates this the 1-D variant is tried, and
/// [`Error::SpectralCollision`] is returned when both fail.
pub fn make_large(n: usize, epsilon: f64, seed: u64) -> Result<LargeTestMatrix> {
    if n < 3 {
        return Err(Error::InvalidArgument {
            context: "large test matrix needs n >= 3",
        });
    }
    let fam = make_2x2(epsilon);
    let m_count = n - 2;

    let min_gap = |shape: &PoissonShape| {
        poisson_spectrum(shape)
            .iter()
            .map(|&lam| (Complex64::new(lam, 0.0) - fam.mu_plus).norm())
            .fold(f64::INFINITY, f64::min)
    };

    let mut shape = poisson_shape(m_count);
    let mut gap = min_gap(&shape);
    if gap <= SPECTRAL_GUARD {
        if let PoissonShape::Grid(_, _) = shape {
            shape = PoissonShape::OneD(m_count);
            gap = min_gap(&shape);
        }
        if gap <= SPECTRAL_GUARD {
            return Err(Error::SpectralCollision { min_gap: gap });
        }
    }

    let p = poisson_matrix(&shape);
    let mut block = CMatrix::zeros(n, n);
    block.view_mut((0, 0), (2, 2)).copy_from(&fam.m);
    block.view_mut((2, 2), (m_count, m_count)).copy_from(&p);
    for i in 0..n {
        block[(i, i)] -= fam.mu_plus;
    }

    let q = random_orthogonal(n, seed);
    let a = q.transpose() * &block * &q;

    Ok(LargeTestMatrix {
        n,
        epsilon,
        a,
        q,
        mu_plus: fam.mu_plus,
        seed,
    })
}

fn unit_uniform_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    // componentwise uniform on [-1, 1], then normalized to a unit vector
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return CVector::from_iterator(n, raw.iter().map(|&x| Complex64::new(x / norm, 0.0)));
        }
    }
}

/// Seeded random lift vectors `v = beta v_r`, `w = gamma w_r` with unit
/// random direction vectors and `eta = omega = 1`.
pub fn random_lift_vectors(n: usize, beta: f64, gamma: f64, seed: u64) -> LiftVectors {
    let one = Complex64::new(1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v_r = unit_uniform_vector(n, &mut rng);
    let w_r = unit_uniform_vector(n, &mut rng);
    LiftVectors {
        v: v_r * Complex64::new(beta, 0.0),
        eta: one,
        w: w_r * Complex64::new(gamma, 0.0),
        omega: one,
        beta,
        gamma,
        strategy: LiftStrategy::Random { seed },
    }
}

/// Lift vectors built from the nullvectors themselves: `v = beta psi`,
/// `w = beta phi`, so the nonorthogonality conditions hold by construction.
pub fn adjoint_lift_vectors(phi: &CVector, psi: &CVector, beta: f64) -> LiftVectors {
    let one = Complex64::new(1.0, 0.0);
    let b = Complex64::new(beta, 0.0);
    LiftVectors {
        v: psi * b,
        eta: one,
        w: phi * b,
        omega: one,
        beta,
        gamma: beta,
        strategy: LiftStrategy::AdjointNullvectors,
    }
}
