//! Gaussian measure of simplicial cones: representation conversions, Monte
//! Carlo estimation, the analytic upper bound, the squared-L1 inequality,
//! and well-behaved column-subset selection.
//!
//! A cone is carried as the gram matrix of its halfspace normals plus the
//! sum-norm l with l^2 = sum of all gram entries. The central quantitative
//! fact, tested rather than assumed: the Gaussian measure of the cone is at
//! most (e/(2 pi k))^{k/2} * l^k / sqrt(det A).

use crate::stream::substream_indexed;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("{0}")]
    BadParams(String),
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} is {value}, expected 1")]
    BadDiagonal { i: usize, value: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig})")]
    NotPsd { min_eig: f64 },
    #[error("entry sum {sum} is negative, no valid sum-norm")]
    NegativeSum { sum: f64 },
    #[error("singular normal matrix (condition estimate {cond:.3e})")]
    Singular { cond: f64 },
    #[error("residue matrix entry ({i},{j}) = {value} is negative beyond tolerance")]
    ResidueNegative { i: usize, j: usize, value: f64 },
    #[error("x lies outside the column space (relative residual {residual:.3e})")]
    OutsideColspace { residual: f64 },
    #[error("numerical cross-check failed: {0}")]
    CheckFailed(String),
}

/// A simplicial cone via the gram matrix of its normals. Construction
/// verifies symmetry, unit diagonal, positive semidefiniteness (definite
/// cones are the interesting case, but measure-zero degenerate grams arise
/// from real vector solutions and are admitted) and a nonnegative entry sum.
#[derive(Debug, Clone)]
pub struct GramCone {
    k: usize,
    a: DMatrix<f64>,
    sum_norm: f64,
    min_eig: f64,
}

impl GramCone {
    pub fn new(a: DMatrix<f64>) -> Result<Self, ConeError> {
        let k = a.nrows();
        if k == 0 || a.ncols() != k {
            return Err(ConeError::BadParams(format!(
                "need a nonempty square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        for i in 0..k {
            for j in i + 1..k {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-9 {
                    return Err(ConeError::NotSymmetric { i, j });
                }
            }
        }
        for i in 0..k {
            if (a[(i, i)] - 1.0).abs() > 1e-9 {
                return Err(ConeError::BadDiagonal {
                    i,
                    value: a[(i, i)],
                });
            }
        }
        let sym = (&a + a.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-8 {
            return Err(ConeError::NotPsd { min_eig });
        }
        let sum: f64 = sym.iter().sum();
        if sum < -1e-9 {
            return Err(ConeError::NegativeSum { sum });
        }
        Ok(Self {
            k,
            a: sym,
            sum_norm: sum.max(0.0).sqrt(),
            min_eig,
        })
    }

    /// Like [`GramCone::new`] but first rescales rows and columns to a unit
    /// diagonal, for grams of approximately-unit vectors.
    pub fn normalized(a: DMatrix<f64>) -> Result<Self, ConeError> {
        let k = a.nrows();
        let mut scaled = a;
        let diag: Vec<f64> = (0..k).map(|i| scaled[(i, i)].max(1e-300).sqrt()).collect();
        for i in 0..k {
            for j in 0..k {
                scaled[(i, j)] /= diag[i] * diag[j];
            }
        }
        for i in 0..k {
            scaled[(i, i)] = 1.0;
        }
        Self::new(scaled)
    }

    /// The cone of an edge in a strong relaxation: off-diagonal entries all
    /// -1/(k+l-1), entry sum k*l/(k+l-1).
    pub fn strong(k: usize, l: usize) -> Result<Self, ConeError> {
        if k < 2 {
            return Err(ConeError::BadParams(format!("need k >= 2, got {k}")));
        }
        let alpha = 1.0 / (k as f64 + l as f64 - 1.0);
        let a = DMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { -alpha });
        Self::new(a)
    }

    /// The symmetric cone with all off-diagonal entries equal, chosen so the
    /// sum-norm is exactly the given l. Requires 0 < l^2 < k^2.
    pub fn symmetric(k: usize, l: f64) -> Result<Self, ConeError> {
        if k < 2 || !(l > 0.0) || l * l >= (k * k) as f64 {
            return Err(ConeError::BadParams(format!(
                "need k >= 2 and 0 < l < k, got k = {k}, l = {l}"
            )));
        }
        let rho = (l * l - k as f64) / (k as f64 * (k as f64 - 1.0));
        let a = DMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { rho });
        Self::new(a)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn sum_norm(&self) -> f64 {
        self.sum_norm
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }

    /// Log determinant via eigenvalues; `None` when the gram is singular.
    pub fn log_det(&self) -> Option<f64> {
        let eig = self.a.clone().symmetric_eigen();
        let mut acc = 0.0;
        for &l in eig.eigenvalues.iter() {
            if l <= 0.0 {
                return None;
            }
            acc += l.ln();
        }
        Some(acc)
    }
}

/// A Monte Carlo estimate with its binomial standard error. `jitter` records
/// the diagonal boost that was needed to factor a degenerate gram.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub jitter: Option<f64>,
}

/// Estimates the Gaussian measure of the cone: the probability that a
/// standard Gaussian vector has nonnegative inner product with every normal.
/// Sampling uses the gram matrix only: correlated coordinates come from the
/// Cholesky factor, and each sample is rejected at the first negative
/// coordinate, so cheap samples dominate when the measure is small.
/// Deterministic for a fixed seed, chunked into independent substreams.
pub fn gaussian_measure_mc(cone: &GramCone, samples: u64, seed: u64) -> Result<McEstimate, ConeError> {
    let k = cone.k();
    let (chol, jitter) = match cone.a.clone().cholesky() {
        Some(c) => (c, None),
        None => {
            let mut boosted = cone.a.clone();
            for i in 0..k {
                boosted[(i, i)] += 1e-10;
            }
            match boosted.cholesky() {
                Some(c) => (c, Some(1e-10)),
                None => {
                    return Err(ConeError::NotPsd {
                        min_eig: cone.min_eig,
                    })
                }
            }
        }
    };
    let l = chol.l();
    const CHUNK: u64 = 1 << 16;
    let mut hits = 0u64;
    let mut done = 0u64;
    let mut chunk_idx = 0u64;
    let mut z = vec![0.0f64; k];
    while done < samples {
        let in_chunk = CHUNK.min(samples - done);
        let mut rng = substream_indexed(seed, "cone-mc", chunk_idx);
        for _ in 0..in_chunk {
            let mut drawn = 0;
            let mut inside = true;
            for i in 0..k {
                while drawn <= i {
                    z[drawn] = rng.sample(StandardNormal);
                    drawn += 1;
                }
                let mut acc = 0.0;
                for j in 0..=i {
                    acc += l[(i, j)] * z[j];
                }
                if acc < 0.0 {
                    inside = false;
                    break;
                }
            }
            if inside {
                hits += 1;
            }
        }
        done += in_chunk;
        chunk_idx += 1;
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
        jitter,
    })
}

/// The analytic measure bound (e/(2 pi k))^{k/2} * l^k / sqrt(det A),
/// evaluated in log-space. May exceed 1 for badly behaved cones; that is the
/// bound being vacuous, not an error.
pub fn measure_upper_bound(cone: &GramCone) -> Result<f64, ConeError> {
    let k = cone.k() as f64;
    let log_det = cone.log_det().ok_or(ConeError::NotPsd {
        min_eig: cone.min_eig,
    })?;
    let l = cone.sum_norm();
    if l == 0.0 {
        return Ok(0.0);
    }
    let log_bound = 0.5 * k * (1.0 - (2.0 * std::f64::consts::PI * k).ln()) + k * l.ln()
        - 0.5 * log_det;
    Ok(log_bound.exp())
}

/// Asymptotic Gaussian measure of the symmetric cone whose normals pairwise
/// subtend the same angle as the strong cone at l = 1:
/// e^{k/2-1} / (sqrt(2)^{k+1} * sqrt(k)^{k-1} * sqrt(pi)^k), log-space.
/// The suppressed (1 + o(1)) factor means this is an approximation whose
/// quality improves with k, not a bound.
pub fn symmetric_cone_asymptotic(k: usize) -> f64 {
    assert!(k >= 2, "asymptotic needs k >= 2");
    let kf = k as f64;
    let log_val = (0.5 * kf - 1.0)
        - 0.5 * (kf + 1.0) * std::f64::consts::LN_2
        - 0.5 * (kf - 1.0) * kf.ln()
        - 0.5 * kf * std::f64::consts::PI.ln();
    log_val.exp()
}

/// Converts halfspace normals (columns of `u`) to the cone's simplicial
/// generators: V = U^{-T} D with D > 0 diagonal chosen so V has unit
/// columns. V's gram is then the rescaled inverse of U's gram, which is
/// verified numerically before returning.
pub fn normals_to_simplicial(u: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>), ConeError> {
    let k = u.nrows();
    if k == 0 || u.ncols() != k {
        return Err(ConeError::BadParams(format!(
            "need square normals, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let svd = u.clone().svd(false, false);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let inv_t = match u.transpose().try_inverse() {
        Some(m) if cond < 1e12 => m,
        _ => return Err(ConeError::Singular { cond }),
    };
    let mut v = inv_t;
    let mut d = DVector::zeros(k);
    for j in 0..k {
        let norm = v.column(j).norm();
        if norm < 1e-300 {
            return Err(ConeError::Singular { cond });
        }
        d[j] = 1.0 / norm;
        let scaled = v.column(j) / norm;
        v.set_column(j, &scaled);
    }
    // Cross-check the cofactor relation: V's gram must match the entrywise
    // normalized inverse of U's gram.
    let a_u = u.transpose() * u;
    if let Some(inv_a) = a_u.try_inverse() {
        let a_v = v.transpose() * &v;
        for i in 0..k {
            for j in 0..k {
                let want = inv_a[(i, j)] / (inv_a[(i, i)] * inv_a[(j, j)]).sqrt();
                if (a_v[(i, j)] - want).abs() > 1e-6 {
                    return Err(ConeError::CheckFailed(format!(
                        "simplicial gram entry ({i},{j}): {} vs {}",
                        a_v[(i, j)],
                        want
                    )));
                }
            }
        }
    }
    Ok((v, d))
}

/// Both sides of the squared-L1 inequality x^T A^+ x >= |x|_1^2 / sum(A)
/// for entrywise-nonnegative x in the column space of a PSD matrix.
#[derive(Debug, Clone, Copy)]
pub struct L1Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn l1_bound_check(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<L1Check, ConeError> {
    let k = a.nrows();
    if a.ncols() != k || x.len() != k {
        return Err(ConeError::BadParams(format!(
            "dimension mismatch: {}x{} matrix, length-{} vector",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    if x.iter().any(|&v| v < -1e-12) {
        return Err(ConeError::BadParams(
            "x must be entrywise nonnegative".into(),
        ));
    }
    let total: f64 = a.iter().sum();
    if total <= 0.0 {
        return Err(ConeError::NegativeSum { sum: total });
    }
    let eig = a.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let rank_tol = lmax.max(1.0) * 1e-10;
    // Pseudo-inverse quadratic form and colspace residual from the same
    // eigendecomposition; the residual is formed as an explicit vector to
    // avoid cancellation between nearly equal squared norms.
    let mut lhs = 0.0;
    let mut proj = DVector::zeros(k);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > rank_tol {
            let coeff = eig.eigenvectors.column(idx).dot(x);
            lhs += coeff * coeff / lambda;
            proj += eig.eigenvectors.column(idx) * coeff;
        }
    }
    let residual = (x - proj).norm() / x.norm().max(1e-300);
    if residual > 1e-8 {
        return Err(ConeError::OutsideColspace { residual });
    }
    let l1: f64 = x.iter().sum();
    let rhs = l1 * l1 / total;
    Ok(L1Check {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
    })
}

/// Tuning for [`select_well_behaved`]. `delta = None` derives the exponent
/// from l via delta = 1/2 + ln(l/c)/(2 ln k), clamped to [1/2, 1).
#[derive(Debug, Clone, Copy)]
pub struct SelectionParams {
    pub c: f64,
    pub delta: Option<f64>,
    /// How negative a residue entry may be before the input is rejected as
    /// violating the rainbow inner-product constraint.
    pub neg_tol: f64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            c: 1.0 / 20.0,
            delta: None,
            neg_tol: 1e-9,
        }
    }
}

/// The kept column subset and everything the analysis says about it.
#[derive(Debug, Clone)]
pub struct SubsetSelection {
    pub indices: Vec<usize>,
    pub ktilde: usize,
    pub a_s: DMatrix<f64>,
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
    /// Total residue mass s = sum(E).
    pub residue_total: f64,
    /// Averaging cap s/(c k^delta) every kept column sum respects.
    pub colsum_cap: f64,
    pub max_kept_colsum: f64,
    /// Exact smallest eigenvalue of the skeleton restricted to the subset.
    pub skeleton_lambda_min: f64,
    /// The claimed restricted entry-sum bound c k^delta + s, reported
    /// together with the actual sum; the claim does not always hold at small
    /// k, so it is surfaced rather than enforced.
    pub sumnorm_bound: f64,
    pub sumnorm_actual: f64,
    pub sumnorm_holds: bool,
}

/// Splits a rainbow-feasible edge gram A = B + E into the ideal simplex
/// skeleton B = (1+beta)I - beta 11^T and a nonnegative residue E, then
/// drops the ceil(c k^delta) columns with the largest residue sums. The
/// kept columns all have residue column sums at most s/(c k^delta), which
/// bounds how far the restricted gram's spectrum can fall below the
/// skeleton's.
pub fn select_well_behaved(
    a_u: &DMatrix<f64>,
    l: usize,
    params: SelectionParams,
) -> Result<SubsetSelection, ConeError> {
    let k = a_u.nrows();
    if a_u.ncols() != k || k < 2 {
        return Err(ConeError::BadParams(format!(
            "need a square gram of size >= 2, got {}x{}",
            a_u.nrows(),
            a_u.ncols()
        )));
    }
    if l + 1 >= k {
        return Err(ConeError::BadParams(format!(
            "need l < k-1 for a positive skeleton, got l = {l}, k = {k}"
        )));
    }
    if !(params.c > 0.0) {
        return Err(ConeError::BadParams("c must be positive".into()));
    }
    for i in 0..k {
        if (a_u[(i, i)] - 1.0).abs() > 1e-6 {
            return Err(ConeError::BadDiagonal {
                i,
                value: a_u[(i, i)],
            });
        }
    }
    let beta = 1.0 / (k as f64 - l as f64 - 1.0);
    let kf = k as f64;
    let delta = match params.delta {
        Some(d) => d,
        None => {
            if l == 0 {
                0.5
            } else {
                (0.5 + (l as f64 / params.c).ln() / (2.0 * kf.ln())).clamp(0.5, 1.0 - 1e-9)
            }
        }
    };
    // Residue E = A - B; the rainbow constraint makes it nonnegative.
    let mut e = a_u.clone();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                e[(i, j)] = 0.0;
            } else {
                e[(i, j)] += beta;
                if e[(i, j)] < -params.neg_tol {
                    return Err(ConeError::ResidueNegative {
                        i,
                        j,
                        value: e[(i, j)],
                    });
                }
            }
        }
    }
    let s: f64 = e.iter().sum();
    let drop = (params.c * kf.powf(delta)).ceil() as usize;
    let drop = drop.max(1);
    if drop >= k {
        return Err(ConeError::BadParams(format!(
            "would drop {drop} of {k} columns"
        )));
    }
    let ktilde = k - drop;
    let mut order: Vec<usize> = (0..k).collect();
    let colsum = |j: usize| e.column(j).iter().sum::<f64>();
    order.sort_by(|&a, &b| colsum(a).partial_cmp(&colsum(b)).unwrap().then(a.cmp(&b)));
    let mut indices: Vec<usize> = order[..ktilde].to_vec();
    indices.sort_unstable();
    let a_s = DMatrix::from_fn(ktilde, ktilde, |i, j| a_u[(indices[i], indices[j])]);
    let cap = s / (params.c * kf.powf(delta));
    let max_kept = indices.iter().map(|&j| colsum(j)).fold(0.0f64, f64::max);
    assert!(
        max_kept <= cap + 1e-9,
        "averaging guarantee failed: {max_kept} > {cap}"
    );
    let skeleton_lambda_min = 1.0 + beta - ktilde as f64 * beta;
    let sumnorm_actual: f64 = a_s.iter().sum();
    let sumnorm_bound = params.c * kf.powf(delta) + s;
    Ok(SubsetSelection {
        indices,
        ktilde,
        a_s,
        beta,
        c: params.c,
        delta,
        residue_total: s,
        colsum_cap: cap,
        max_kept_colsum: max_kept,
        skeleton_lambda_min,
        sumnorm_bound,
        sumnorm_actual,
        sumnorm_holds: sumnorm_actual <= sumnorm_bound + 1e-9,
    })
}
