//! Independent numerical ground truth built on the SVD.
//!
//! Nothing in here touches the closed-form modules; only the shared matrix
//! and subspace types are used.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{Entry, RMat};
use crate::subspace::SubspaceBasis;

/// Subspace equality / containment threshold on principal angles.
pub const ANGLE_TOL: f64 = 1e-8;

/// Environment variable overriding the rank-tolerance multiplier.
pub const TOL_ENV: &str = "GRAPHUOS_TOL_REL";

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("SVD did not converge on a {rows}x{cols} matrix")]
    SvdNoConvergence { rows: usize, cols: usize },
}

/// Singular values at or below
/// `max(max(rows, cols) * eps * sigma_max * multiplier, abs_floor)` count as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankPolicy {
    pub multiplier: f64,
    pub abs_floor: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            multiplier: 64.0,
            abs_floor: 0.0,
        }
    }
}

impl RankPolicy {
    pub fn with_multiplier(multiplier: f64) -> Self {
        Self {
            multiplier,
            ..Self::default()
        }
    }

    /// Default policy, with the multiplier taken from `GRAPHUOS_TOL_REL` when set.
    pub fn from_env() -> Self {
        match std::env::var(TOL_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
        {
            Some(m) if m > 0.0 && m.is_finite() => Self::with_multiplier(m),
            _ => Self::default(),
        }
    }

    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        let rel = rows.max(cols) as f64 * f64::EPSILON * sigma_max * self.multiplier;
        rel.max(self.abs_floor)
    }
}

struct Decomposition<T: Entry> {
    u: DMatrix<T>,
    v_t: DMatrix<T>,
    sigma: Vec<f64>,
    threshold: f64,
}

impl<T: Entry> Decomposition<T> {
    fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.threshold).count()
    }
}

fn decompose<T: Entry>(
    m: &DMatrix<T>,
    rows: usize,
    cols: usize,
    policy: &RankPolicy,
) -> Result<Decomposition<T>, OracleError> {
    let (u, sigma, v) = T::svd_factors(m).ok_or(OracleError::SvdNoConvergence { rows, cols })?;
    let smax = sigma.iter().fold(0.0f64, |a, &s| a.max(s));
    Ok(Decomposition {
        u,
        v_t: v.adjoint(),
        sigma,
        threshold: policy.threshold(rows, cols, smax),
    })
}

/// Moore–Penrose pseudoinverse by truncated SVD.
pub fn svd_pinv<T: Entry>(m: &DMatrix<T>, policy: &RankPolicy) -> Result<DMatrix<T>, OracleError> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(DMatrix::from_element(c, r, T::zero()));
    }
    let d = decompose(m, r, c, policy)?;
    let mut out = DMatrix::from_element(c, r, T::zero());
    for (k, &s) in d.sigma.iter().enumerate() {
        if s > d.threshold {
            let v = d.v_t.row(k).adjoint();
            let u = d.u.column(k).adjoint();
            out += (v * u).map(|x| x.unscale(s));
        }
    }
    Ok(out)
}

pub fn numeric_rank<T: Entry>(m: &DMatrix<T>, policy: &RankPolicy) -> Result<usize, OracleError> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(0);
    }
    Ok(decompose(m, r, c, policy)?.rank())
}

/// Orthonormal basis of the column space.
pub fn orthonormal_basis<T: Entry>(
    m: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<DMatrix<T>, OracleError> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(DMatrix::from_element(r, 0, T::zero()));
    }
    let d = decompose(m, r, c, policy)?;
    let keep: Vec<usize> = (0..d.sigma.len())
        .filter(|&k| d.sigma[k] > d.threshold)
        .collect();
    Ok(DMatrix::from_fn(r, keep.len(), |i, j| d.u[(i, keep[j])]))
}

/// Orthonormal basis of the right nullspace.
pub fn nullspace<T: Entry>(
    m: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<SubspaceBasis<T>, OracleError> {
    let (r, c) = m.shape();
    if c == 0 {
        return Ok(SubspaceBasis::plain(
            DMatrix::from_element(0, 0, T::zero()),
            0,
        ));
    }
    if r == 0 {
        return Ok(SubspaceBasis::plain(DMatrix::identity(c, c), c));
    }
    // Zero-pad wide matrices so the SVD returns a full set of right vectors.
    let padded = if r < c {
        let mut p = DMatrix::from_element(c, c, T::zero());
        p.rows_mut(0, r).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = decompose(&padded, r, c, policy)?;
    let null: Vec<usize> = (0..d.sigma.len())
        .filter(|&k| d.sigma[k] <= d.threshold)
        .collect();
    let basis = DMatrix::from_fn(c, null.len(), |i, j| d.v_t[(null[j], i)].conjugate());
    let dim = null.len();
    Ok(SubspaceBasis::plain(basis, dim))
}

fn singular_values<T: Entry>(m: &DMatrix<T>) -> Result<Vec<f64>, OracleError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let (_, sigma, _) = T::svd_factors(m).ok_or(OracleError::SvdNoConvergence {
        rows: m.nrows(),
        cols: m.ncols(),
    })?;
    Ok(sigma)
}

/// Principal angles between the column spans of `a` and `b`, ascending.
///
/// Small angles come from the sines of the residual, large ones from the
/// cosines, so both ends stay accurate.
pub fn principal_angles<T: Entry>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<Vec<f64>, OracleError> {
    let qa = orthonormal_basis(a, policy)?;
    let qb = orthonormal_basis(b, policy)?;
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return Ok(Vec::new());
    }
    let (big, small) = if qa.ncols() >= qb.ncols() {
        (qa, qb)
    } else {
        (qb, qa)
    };
    let cross = big.adjoint() * &small;
    let mut cosines = singular_values(&cross)?;
    cosines.sort_by(|x, y| y.total_cmp(x));
    let residual = &small - &big * cross;
    let mut sines = singular_values(&residual)?;
    sines.sort_by(|x, y| x.total_cmp(y));
    let angles = cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| {
            if c * c < 0.5 {
                c.min(1.0).acos()
            } else {
                s.min(1.0).asin()
            }
        })
        .collect();
    Ok(angles)
}

/// Largest angle between span(a) and span(b) seen from `a`; π/2 when
/// span(a) has larger dimension. Zero iff span(a) ⊆ span(b).
pub fn containment_angle<T: Entry>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<f64, OracleError> {
    let qa = orthonormal_basis(a, policy)?;
    if qa.ncols() == 0 {
        return Ok(0.0);
    }
    let qb = orthonormal_basis(b, policy)?;
    if qa.ncols() > qb.ncols() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let residual = &qa - &qb * (qb.adjoint() * &qa);
    let s = singular_values(&residual)?
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(s.min(1.0).asin())
}

pub fn is_contained<T: Entry>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<bool, OracleError> {
    Ok(containment_angle(a, b, policy)? < ANGLE_TOL)
}

pub fn same_span<T: Entry>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<bool, OracleError> {
    if numeric_rank(a, policy)? != numeric_rank(b, policy)? {
        return Ok(false);
    }
    Ok(containment_angle(a, b, policy)? < ANGLE_TOL)
}

/// Solvability test: `y` orthogonal (within 1e-9·‖y‖) to the left nullspace of `op`.
pub fn fredholm_check<T: Entry>(
    op: &DMatrix<T>,
    y: &DMatrix<T>,
    policy: &RankPolicy,
) -> Result<bool, OracleError> {
    let left = nullspace(&op.adjoint(), policy)?;
    let tol = 1e-9 * y.norm();
    Ok(left
        .basis
        .column_iter()
        .all(|n| n.dotc(&y.column(0)).modulus() <= tol))
}

/// Eigenvalues of the circulant with first row `row`, by a direct DFT sum.
pub fn dft_circulant_eigenvalues(row: &[Complex64]) -> Vec<Complex64> {
    let n = row.len();
    (0..n)
        .map(|k| {
            row.iter()
                .enumerate()
                .map(|(j, &c)| {
                    let theta = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                    c * Complex64::from_polar(1.0, theta)
                })
                .sum()
        })
        .collect()
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &RMat) -> Vec<f64> {
    let fm = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let mut ev = fm
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("symmetric eigensolver converges");
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}
