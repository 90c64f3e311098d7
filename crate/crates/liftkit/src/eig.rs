//! Dense complex eigendecomposition backend and eigenpair selection.
//!
//! The decomposition itself is delegated to a Schur factorization
//! `M = Q T Q^H` (unitary `Q`, upper-triangular `T`); eigenvectors are then
//! recovered by back substitution on `T` and mapped through `Q`. Everything
//! is computed over complex scalars even for real inputs so that there is a
//! single code path for the complex-shift case.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{CMatrix, CVector, Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// All eigenvalues of a matrix with matching unit right eigenvectors.
///
/// Column `i` of `right_vectors` pairs with `values[i]`. Every vector has
/// Euclidean norm 1 and satisfies the residual contract
/// `|| M v - lambda v || <= 100 n ||M||_F eps`.
#[derive(Debug, Clone)]
pub struct EigenPairSet {
    pub values: Vec<Complex64>,
    pub right_vectors: CMatrix,
    pub machine_eps: f64,
}

impl EigenPairSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The unit right eigenvector paired with `values[i]`.
    pub fn vector(&self, i: usize) -> CVector {
        self.right_vectors.column(i).into_owned()
    }
}

fn ensure_square_finite(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Computes all eigenvalues and unit right eigenvectors of a square matrix.
pub fn eig_all(m: &CMatrix) -> Result<EigenPairSet> {
    let n = ensure_square_finite(m)?;
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 0)
        .ok_or(Error::BackendFailure)?;
    let (q, t) = schur.unpack();

    let t_norm = t.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    // Guard for near-coincident diagonal entries, as in triangular
    // eigenvector solvers: a denominator smaller than this is replaced by it.
    let smin = f64::EPSILON * t_norm.max(f64::MIN_POSITIVE);

    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut z = CVector::zeros(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        values.push(lambda);

        // Solve (T - lambda I) z = 0 with z[k] = 1 by back substitution.
        z.fill(ZERO);
        z[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += t[(i, j)] * z[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            z[i] = -s / d;
            // Rescale if a chain of small denominators is blowing up.
            let zi = z[i].norm();
            if zi > 1e250 {
                for zj in z.iter_mut().take(k + 1).skip(i) {
                    *zj /= Complex64::new(zi, 0.0);
                }
            }
        }

        let mut v = &q * &z;
        let nv = v.norm();
        if nv == 0.0 || !nv.is_finite() {
            return Err(Error::BackendFailure);
        }
        v /= Complex64::new(nv, 0.0);
        vectors.set_column(k, &v);
    }

    Ok(EigenPairSet {
        values,
        right_vectors: vectors,
        machine_eps: f64::EPSILON,
    })
}

/// Selects the eigenpair whose value is closest to `target` in modulus.
///
/// Ties are broken by the lowest index; the returned vector is
/// phase-normalized so the selection is reproducible across backends.
pub fn nearest_eigenpair(pairs: &EigenPairSet, target: Complex64) -> Result<(Complex64, CVector)> {
    if pairs.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let mut best = 0;
    let mut best_dist = (pairs.values[0] - target).norm();
    for (i, v) in pairs.values.iter().enumerate().skip(1) {
        let d = (v - target).norm();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    Ok((pairs.values[best], phase_normalize(&pairs.vector(best))?))
}

/// The eigenpair of the plain transpose `M^T` nearest `target`.
///
/// The returned vector `y` satisfies `y^T M ~= lambda y^T`; the plain
/// transpose (bilinear form) is used, not the conjugate transpose.
pub fn left_nullpair(m: &CMatrix, target: Complex64) -> Result<(Complex64, CVector)> {
    let pairs = eig_all(&m.transpose())?;
    nearest_eigenpair(&pairs, target)
}

/// One step of inverse iteration at a fixed shift.
///
/// Solves `(M - value I) y = vector` and returns the normalized `y`. For a
/// simple, well-conditioned eigenvalue this polishes the eigenvector to full
/// backward stability; if the solve fails the input is returned unchanged.
pub fn refine_eigenvector(m: &CMatrix, value: Complex64, vector: &CVector) -> CVector {
    let n = m.nrows();
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= value;
    }
    match shifted.full_piv_lu().solve(vector) {
        Some(mut y) => {
            let ny = y.norm();
            if ny.is_finite() && ny > 0.0 {
                y /= Complex64::new(ny, 0.0);
                y
            } else {
                vector.clone()
            }
        }
        None => vector.clone(),
    }
}

/// Scales `v` to unit norm and rotates its largest-modulus component to be
/// real and positive. Idempotent: a vector already in canonical form is
/// returned unchanged.
pub fn phase_normalize(v: &CVector) -> Result<CVector> {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut k = 0;
    let mut max_mod = 0.0_f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > max_mod {
            max_mod = m;
            k = i;
        }
    }
    // Already canonical: dominant entry real-positive and unit norm up to
    // the rounding of the norm recomputation itself. The short circuit is
    // what makes the operation exactly idempotent.
    let norm_tol = 4.0 * f64::EPSILON * (v.len() as f64 + 1.0);
    if v[k].im == 0.0 && v[k].re > 0.0 && (norm - 1.0).abs() <= norm_tol {
        return Ok(v.clone());
    }
    let phase = Complex64::new(v[k].re / max_mod, v[k].im / max_mod);
    let mut w = v * phase.conj();
    let wn = w.norm();
    w /= Complex64::new(wn, 0.0);
    // The rotation makes the dominant entry real by construction; pin the
    // rounding residue so the canonical form is exact.
    w[k] = Complex64::new(w[k].re.abs(), 0.0);
    Ok(w)
}

/// Deterministic random real orthogonal matrix.
///
/// A seeded standard-Gaussian matrix is orthonormalized by QR, with column
/// signs fixed so the triangular factor has a positive diagonal. Returned in
/// the complex carrier with zero imaginary parts.
pub fn random_orthogonal(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| Complex64::new(q[(i, j)], 0.0))
}
