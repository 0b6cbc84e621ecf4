//! Closed-form Green's matrices ((pseudo)inverses) of the cycle operators
//! and their extensions to circulant graphs through the banded factors.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::circulant::{
    decompose_generalized, decompose_laplacian, CirculantError, GeneralizedLaplacianSpec,
};
use crate::graph::{build_circulant, incidence, CirculantSpec, Graph, GraphError};
use crate::matrix::{max_abs, to_complex, CMat, Entry, RMat};
use crate::oracle::RankPolicy;

/// Distance to the frequency lattice below which `alpha` counts as on it.
pub const LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GreensError {
    #[error("closed form needs n >= 3, got {0}")]
    TooSmall(usize),
    #[error("alpha = {alpha} lies on the lattice point 2*pi*{k}/{n}")]
    AlphaOnLattice { alpha: f64, n: usize, k: usize },
    #[error("unsupported alpha: {0}")]
    UnsupportedAlpha(String),
    #[error("P_alpha is not positive definite at alpha = 2*pi*{k}/{n}")]
    PAlphaSingular { n: usize, k: usize },
    #[error("graph is not connected")]
    NotConnected,
    #[error("dense factorization of the {0} factor failed")]
    Factorization(&'static str),
    #[error(transparent)]
    Circulant(#[from] CirculantError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreensKind {
    Inverse,
    Pseudoinverse,
}

/// Which construction produced a Green's matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreensSource {
    CycleLaplacian,
    CycleIncidence,
    CycleGeneralizedInverse,
    CycleGeneralizedPinv,
    CirculantLaplacian,
    CirculantIncidence,
    CirculantGeneralizedInverse,
    CirculantGeneralizedPinv,
    GraphLaplacian,
}

#[derive(Clone, Debug)]
pub struct GreensMatrix<T: Entry> {
    pub matrix: DMatrix<T>,
    pub kind: GreensKind,
    pub source: GreensSource,
    pub alpha: Option<f64>,
}

/// Where a real frequency sits relative to the lattice `2 pi k / n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaRoute {
    OffLattice,
    Zero,
    Pi,
    Lattice(usize),
}

impl AlphaRoute {
    pub fn classify(n: usize, alpha: f64) -> Self {
        let x = alpha * n as f64 / (2.0 * PI);
        let nearest = x.round();
        let route = if (x - nearest).abs() >= LATTICE_TOL {
            AlphaRoute::OffLattice
        } else {
            let k = (nearest as i64).rem_euclid(n as i64) as usize;
            match k {
                0 => AlphaRoute::Zero,
                k if 2 * k == n => AlphaRoute::Pi,
                k => AlphaRoute::Lattice(k),
            }
        };
        log::debug!("alpha {alpha} at n = {n} routed to {route:?}");
        route
    }
}

pub fn lattice_alpha(n: usize, k: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

fn cycle_pinv_entry(n: usize, i: usize, j: usize) -> f64 {
    let nf = n as f64;
    let d = j as f64 - i as f64;
    (nf - 1.0) * (nf + 1.0) / (12.0 * nf) - d.abs() / 2.0 + d * d / (2.0 * nf)
}

/// Pseudoinverse of the simple-cycle Laplacian.
pub fn lcycle_pinv_closed(n: usize) -> Result<GreensMatrix<f64>, GreensError> {
    if n < 3 {
        return Err(GreensError::TooSmall(n));
    }
    Ok(GreensMatrix {
        matrix: RMat::from_fn(n, n, |i, j| cycle_pinv_entry(n, i, j)),
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CycleLaplacian,
        alpha: None,
    })
}

/// Cycle incidence in circulant form: row `k` is `e_k - e_{k+1 mod n}`.
pub fn scycle_incidence(n: usize) -> RMat {
    let mut s = RMat::zeros(n, n);
    for k in 0..n {
        s[(k, k)] = 1.0;
        s[(k, (k + 1) % n)] = -1.0;
    }
    s
}

/// Pseudoinverse of [`scycle_incidence`].
pub fn scycle_pinv_closed(n: usize) -> Result<GreensMatrix<f64>, GreensError> {
    if n < 3 {
        return Err(GreensError::TooSmall(n));
    }
    let nf = n as f64;
    let entry = |i: usize, j: usize| {
        let (fi, fj) = (i as f64, j as f64);
        if j == n - 1 {
            -(nf - 1.0) / (2.0 * nf) + fi / nf
        } else if i <= j {
            (nf - 1.0) / (2.0 * nf) - (fj - fi) / nf
        } else if i == j + 1 {
            (1.0 - nf) / (2.0 * nf)
        } else {
            -(nf + 1.0) / (2.0 * nf) - (fj - fi) / nf
        }
    };
    Ok(GreensMatrix {
        matrix: RMat::from_fn(n, n, entry),
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CycleIncidence,
        alpha: None,
    })
}

/// The two exponential weights of the off-lattice cycle inverse.
pub fn inverse_coefficients(n: usize, alpha: f64) -> (Complex64, Complex64) {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let nf = n as f64;
    let c1 = ((e(alpha) - e(-alpha)) * (e(alpha * nf) - 1.0)).inv();
    let c2 = ((e(-alpha) - e(alpha)) * (e(-alpha * nf) - 1.0)).inv();
    (c1, c2)
}

/// Inverse of the cycle `L_{C,alpha}` for `alpha` off the lattice.
pub fn lalpha_cycle_inverse_closed(
    n: usize,
    alpha: f64,
) -> Result<GreensMatrix<Complex64>, GreensError> {
    if n < 3 {
        return Err(GreensError::TooSmall(n));
    }
    match AlphaRoute::classify(n, alpha) {
        AlphaRoute::OffLattice => {}
        AlphaRoute::Zero => return Err(GreensError::AlphaOnLattice { alpha, n, k: 0 }),
        AlphaRoute::Pi => return Err(GreensError::AlphaOnLattice { alpha, n, k: n / 2 }),
        AlphaRoute::Lattice(k) => return Err(GreensError::AlphaOnLattice { alpha, n, k }),
    }
    let (c1, c2) = inverse_coefficients(n, alpha);
    let matrix = CMat::from_fn(n, n, |m, p| {
        let d = m.abs_diff(p) as f64;
        c1 * Complex64::from_polar(1.0, alpha * d) + c2 * Complex64::from_polar(1.0, -alpha * d)
    });
    Ok(GreensMatrix {
        matrix,
        kind: GreensKind::Inverse,
        source: GreensSource::CycleGeneralizedInverse,
        alpha: Some(alpha),
    })
}

fn lattice_pinv_term(n: usize, alpha: f64, d: usize) -> Complex64 {
    let nf = n as f64;
    let df = d as f64;
    let e1 = Complex64::from_polar(1.0, alpha);
    let e2 = Complex64::from_polar(1.0, 2.0 * alpha);
    let num = (e2 - 1.0) * (2.0 * df) + (nf - 1.0) - e2 * (nf + 1.0);
    let den = (e2 - 1.0) * (e2 - 1.0);
    e1 / (2.0 * nf) * num / den * Complex64::from_polar(1.0, alpha * df)
}

/// Pseudoinverse of the cycle `L_{C,alpha}` at `alpha = 2 pi k / n`
/// (the `alpha = pi` point uses the sign-alternated cycle Green's matrix).
pub fn lalpha_cycle_pinv_closed(
    n: usize,
    k: usize,
) -> Result<GreensMatrix<Complex64>, GreensError> {
    if n < 3 {
        return Err(GreensError::TooSmall(n));
    }
    let k = k % n;
    if k == 0 {
        return Err(GreensError::UnsupportedAlpha(
            "alpha = 0: use the cycle Laplacian pseudoinverse".into(),
        ));
    }
    let alpha = lattice_alpha(n, k);
    let matrix = if 2 * k == n {
        CMat::from_fn(n, n, |m, p| {
            let sign = if m.abs_diff(p) % 2 == 0 { -1.0 } else { 1.0 };
            Complex64::new(sign * cycle_pinv_entry(n, m, p), 0.0)
        })
    } else {
        CMat::from_fn(n, n, |m, p| {
            let d = m.abs_diff(p);
            lattice_pinv_term(n, alpha, d) + lattice_pinv_term(n, -alpha, d)
        })
    };
    Ok(GreensMatrix {
        matrix,
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CycleGeneralizedPinv,
        alpha: Some(alpha),
    })
}

fn spd_inverse(m: RMat, what: &'static str) -> Result<RMat, GreensError> {
    let n = m.nrows();
    let inv = m
        .clone()
        .cholesky()
        .ok_or(GreensError::Factorization(what))?
        .inverse();
    let residual = (&m * &inv - RMat::identity(n, n)).amax();
    if residual > 1e-9 {
        return Err(GreensError::Factorization(what));
    }
    Ok(inv)
}

fn general_inverse(m: CMat, what: &'static str) -> Result<CMat, GreensError> {
    let n = m.nrows();
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(GreensError::Factorization(what))?;
    let residual = max_abs(&(&m * &inv - CMat::identity(n, n)));
    if residual > 1e-9 {
        return Err(GreensError::Factorization(what));
    }
    Ok(inv)
}

/// Inverse of the banded Laplacian factor, by dense Cholesky.
pub fn pgs_inverse(spec: &CirculantSpec) -> Result<RMat, GreensError> {
    spd_inverse(decompose_laplacian(spec)?.realize_real()?, "P_GS")
}

/// Circulant Laplacian pseudoinverse as `P^-1 * L_C^+`.
pub fn lap_pinv(spec: &CirculantSpec) -> Result<GreensMatrix<f64>, GreensError> {
    let p_inv = pgs_inverse(spec)?;
    let lc = lcycle_pinv_closed(spec.n())?.matrix;
    Ok(GreensMatrix {
        matrix: p_inv * lc,
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CirculantLaplacian,
        alpha: None,
    })
}

/// Circulant incidence pseudoinverse `L^+ S^T` (canonical edge order).
pub fn inc_pinv(spec: &CirculantSpec) -> Result<GreensMatrix<f64>, GreensError> {
    let l_pinv = lap_pinv(spec)?.matrix;
    let s = incidence(&build_circulant(spec));
    Ok(GreensMatrix {
        matrix: l_pinv * s.transpose(),
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CirculantIncidence,
        alpha: None,
    })
}

/// Inverse of `P_alpha` for real `alpha`; Cholesky when definite, LU otherwise.
pub fn palpha_inverse(
    spec: &CirculantSpec,
    alpha: f64,
    policy: &RankPolicy,
) -> Result<(RMat, bool), GreensError> {
    let f = decompose_generalized(&GeneralizedLaplacianSpec::real(spec.clone(), alpha), policy)?;
    let p = f.p_alpha.realize_real()?;
    let inv = if f.positive_definite {
        spd_inverse(p, "P_alpha")?
    } else {
        general_inverse(to_complex(&p), "P_alpha")?.map(|z| z.re)
    };
    Ok((inv, f.positive_definite))
}

/// `L_alpha^+ = L_{C,alpha}^+ P_alpha^-1` at `alpha = 2 pi k / n`.
pub fn lalpha_pinv(
    spec: &CirculantSpec,
    k: usize,
    policy: &RankPolicy,
) -> Result<GreensMatrix<Complex64>, GreensError> {
    spec.require_connected()?;
    let n = spec.n();
    let cycle = lalpha_cycle_pinv_closed(n, k)?;
    let alpha = lattice_alpha(n, k % n);
    let f = decompose_generalized(&GeneralizedLaplacianSpec::real(spec.clone(), alpha), policy)?;
    if !f.positive_definite {
        return Err(GreensError::PAlphaSingular { n, k: k % n });
    }
    let p_inv = spd_inverse(f.p_alpha.realize_real()?, "P_alpha")?;
    Ok(GreensMatrix {
        matrix: cycle.matrix * to_complex(&p_inv),
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::CirculantGeneralizedPinv,
        alpha: Some(alpha),
    })
}

/// `L_alpha^-1 = L_{C,alpha}^-1 P_alpha^-1` for `alpha` off the lattice.
pub fn lalpha_inverse(
    spec: &CirculantSpec,
    alpha: f64,
    policy: &RankPolicy,
) -> Result<GreensMatrix<Complex64>, GreensError> {
    spec.require_connected()?;
    let cycle = lalpha_cycle_inverse_closed(spec.n(), alpha)?;
    let (p_inv, _) = palpha_inverse(spec, alpha, policy)?;
    Ok(GreensMatrix {
        matrix: cycle.matrix * to_complex(&p_inv),
        kind: GreensKind::Inverse,
        source: GreensSource::CirculantGeneralizedInverse,
        alpha: Some(alpha),
    })
}

/// Laplacian pseudoinverse of an arbitrary graph, per component as
/// `(L_k + J/N_k)^-1 - J/N_k`.
pub fn graph_laplacian_pinv(g: &Graph) -> Result<GreensMatrix<f64>, GreensError> {
    let l = g.laplacian();
    let mut out = RMat::zeros(g.n(), g.n());
    for comp in g.components() {
        let m = comp.len();
        let shift = 1.0 / m as f64;
        let block = RMat::from_fn(m, m, |a, b| l[(comp[a], comp[b])] + shift);
        let inv = spd_inverse(block, "component Laplacian")?;
        for a in 0..m {
            for b in 0..m {
                out[(comp[a], comp[b])] = inv[(a, b)] - shift;
            }
        }
    }
    Ok(GreensMatrix {
        matrix: out,
        kind: GreensKind::Pseudoinverse,
        source: GreensSource::GraphLaplacian,
        alpha: None,
    })
}

/// `E_alpha(m, p) = 2 cos(alpha |p - m|)`.
pub fn e_alpha(n: usize, alpha: f64) -> RMat {
    RMat::from_fn(n, n, |m, p| 2.0 * (alpha * m.abs_diff(p) as f64).cos())
}

/// Operators whose range projector `Op Op^+` has a closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RangeOperator {
    Connected { n: usize },
    Components(Vec<Vec<usize>>),
    Lattice { n: usize, k: usize },
}

pub fn range_projector(op: &RangeOperator) -> RMat {
    match op {
        RangeOperator::Connected { n } => {
            RMat::identity(*n, *n) - RMat::from_element(*n, *n, 1.0 / *n as f64)
        }
        RangeOperator::Components(comps) => {
            let n: usize = comps.iter().map(Vec::len).sum();
            let mut p = RMat::identity(n, n);
            for c in comps {
                let w = 1.0 / c.len() as f64;
                for &a in c {
                    for &b in c {
                        p[(a, b)] -= w;
                    }
                }
            }
            p
        }
        RangeOperator::Lattice { n, k } => {
            let n = *n;
            let k = k % n;
            // At 0 and pi both exponentials coincide, so E has rank one.
            let scale = if k == 0 || 2 * k == n {
                2.0 * n as f64
            } else {
                n as f64
            };
            RMat::identity(n, n) - e_alpha(n, lattice_alpha(n, k)) / scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::{cycle_generalized_poly, generalized_laplacian_real};
    use crate::matrix::{real_part, rel_max_diff};
    use crate::oracle::svd_pinv;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pol() -> RankPolicy {
        RankPolicy::default()
    }

    fn cycle_l(n: usize) -> RMat {
        crate::graph::laplacian(&build_circulant(&CirculantSpec::cycle(n).unwrap()))
    }

    fn cycle_la(n: usize, alpha: f64) -> RMat {
        cycle_generalized_poly(n, Complex64::new(alpha, 0.0))
            .realize_real()
            .unwrap()
    }

    #[test]
    fn lcycle_values_n4() {
        let m = lcycle_pinv_closed(4).unwrap().matrix;
        let expected = [0.3125, -0.0625, -0.1875, -0.0625];
        for (j, e) in expected.iter().enumerate() {
            assert_relative_eq!(m[(0, j)], e, epsilon = 1e-15);
        }
        let oracle = svd_pinv(&cycle_l(4), &pol()).unwrap();
        assert!((m - oracle).amax() < 1e-12);
    }

    #[test]
    fn lcycle_rows_sum_to_zero_and_project() {
        for n in [3, 7, 64] {
            let m = lcycle_pinv_closed(n).unwrap().matrix;
            assert!(m.column_sum().amax() < 1e-12);
            let proj = cycle_l(n) * &m;
            assert!((proj - range_projector(&RangeOperator::Connected { n })).amax() < 1e-10);
        }
        assert!(lcycle_pinv_closed(2).is_err());
    }

    #[test]
    fn scycle_row_and_identities() {
        let m = scycle_pinv_closed(4).unwrap().matrix;
        let row: Vec<f64> = m.row(0).iter().copied().collect();
        for (a, b) in row.iter().zip([0.375, 0.125, -0.125, -0.375]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        for n in [4, 9, 16] {
            let sp = scycle_pinv_closed(n).unwrap().matrix;
            let s = scycle_incidence(n);
            assert!(sp.row_sum().amax() < 1e-13, "columns of S^+ sum to zero");
            let proj = &sp * &s;
            assert!((proj - range_projector(&RangeOperator::Connected { n })).amax() < 1e-12);
            // Column j equals the difference of cycle Green's columns j and j+1.
            let l = lcycle_pinv_closed(n).unwrap().matrix;
            for j in 0..n {
                for i in 0..n {
                    assert_relative_eq!(
                        sp[(i, j)],
                        l[(i, j)] - l[(i, (j + 1) % n)],
                        epsilon = 1e-13
                    );
                }
            }
        }
    }

    #[test]
    fn scycle_row_difference_piecewise_constant() {
        let n = 8;
        let m = scycle_pinv_closed(n).unwrap().matrix;
        let diff: Vec<f64> = (0..n).map(|j| m[(0, j)] - m[(2, j)]).collect();
        for (j, d) in diff.iter().enumerate() {
            let expected = if j <= 1 { 0.75 } else { -0.25 };
            assert_relative_eq!(*d, expected, epsilon = 1e-14);
        }
        assert!(diff.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn row_difference_rule_general() {
        for n in [5, 8, 11] {
            let m = scycle_pinv_closed(n).unwrap().matrix;
            for i1 in 0..n {
                for i2 in (i1 + 1)..n {
                    let shift = (i1 as f64 - i2 as f64) / n as f64;
                    for j in 0..n {
                        let inside = j >= i1 && j < i2;
                        let expected = if inside { 1.0 + shift } else { shift };
                        assert_relative_eq!(m[(i1, j)] - m[(i2, j)], expected, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn column_difference_rule() {
        // Differences of Green's columns are linear between the two knots.
        for n in [6, 9, 16] {
            let l = lcycle_pinv_closed(n).unwrap().matrix;
            let nf = n as f64;
            for j1 in 0..n {
                for j2 in 0..j1 {
                    for i in 0..n {
                        let (fi, a, b) = (i as f64, j1 as f64, j2 as f64);
                        let base = ((a * a - b * b) - 2.0 * fi * (a - b)) / (2.0 * nf);
                        let case = if i <= j2 {
                            (b - a) / 2.0
                        } else if i <= j1 {
                            fi - (a + b) / 2.0
                        } else {
                            -(b - a) / 2.0
                        };
                        assert_relative_eq!(l[(i, j1)] - l[(i, j2)], base + case, epsilon = 1e-12);
                    }
                }
            }
            for i in 0..n {
                let expected = -(nf - 1.0) / (2.0 * nf) + i as f64 / nf;
                assert_relative_eq!(l[(i, n - 1)] - l[(i, 0)], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inverse_small_case() {
        let n = 4;
        let a = PI / 3.0;
        let inv = lalpha_cycle_inverse_closed(n, a).unwrap().matrix;
        assert!(inv.iter().all(|z| z.im.abs() < 1e-12));
        let prod = cycle_la(n, a) * real_part(&inv);
        assert!((prod - RMat::identity(n, n)).amax() < 1e-10);
    }

    #[test]
    fn inverse_coefficients_conjugate() {
        for &a in &[0.21, 1.3, 2.9, -0.4] {
            let (c1, c2) = inverse_coefficients(17, a);
            assert!((c1 - c2.conj()).norm() < 1e-12 * c1.norm());
        }
    }

    #[test]
    fn inverse_column_matches_trig_form() {
        let (n, a) = (64usize, 0.21f64);
        let inv = lalpha_cycle_inverse_closed(n, a).unwrap().matrix;
        let nf = n as f64;
        for i in 0..n {
            let t = ((i + n - 30) % n) as f64;
            let expected = -(1.0 / (2.0 * a.sin()))
                * ((1.0 / (a * nf / 2.0).tan()) * (a * t).cos() + (a * t).sin());
            assert!((inv[(i, 30)].re - expected).abs() < 1e-10 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn inverse_rejects_lattice() {
        assert!(matches!(
            lalpha_cycle_inverse_closed(8, PI / 4.0),
            Err(GreensError::AlphaOnLattice { k: 1, .. })
        ));
        assert!(matches!(
            lalpha_cycle_inverse_closed(8, 0.0),
            Err(GreensError::AlphaOnLattice { k: 0, .. })
        ));
    }

    #[test]
    fn lattice_pinv_matches_oracle() {
        let n = 8;
        let p = lalpha_cycle_pinv_closed(n, 1).unwrap().matrix;
        let oracle = svd_pinv(&cycle_la(n, PI / 4.0), &pol()).unwrap();
        assert!(p.iter().all(|z| z.im.abs() < 1e-12));
        assert!(rel_max_diff(&real_part(&p), &oracle) < 1e-10);
    }

    #[test]
    fn pi_branch() {
        let n = 8;
        let p = lalpha_cycle_pinv_closed(n, 4).unwrap().matrix;
        let l = lcycle_pinv_closed(n).unwrap().matrix;
        assert_relative_eq!(p[(0, 1)].re, l[(0, 1)], epsilon = 1e-15);
        assert_relative_eq!(p[(0, 2)].re, -l[(0, 2)], epsilon = 1e-15);
        let oracle = svd_pinv(&cycle_la(n, PI), &pol()).unwrap();
        assert!(rel_max_diff(&real_part(&p), &oracle) < 1e-10);
        let proj = cycle_la(n, PI) * real_part(&p);
        assert!((proj - range_projector(&RangeOperator::Lattice { n, k: 4 })).amax() < 1e-10);
    }

    #[test]
    fn constrained_lattice_column() {
        let n = 64;
        let a = 4.0 * PI / n as f64;
        let p = real_part(&lalpha_cycle_pinv_closed(n, 2).unwrap().matrix);
        let col = p * cycle_la(n, a).column(30);
        for i in 0..n {
            let t = ((i + n - 30) % n) as f64;
            let expected = if i == 30 { 1.0 } else { 0.0 } - 2.0 * (a * t).cos() / n as f64;
            assert!((col[i] - expected).abs() < 1e-10);
        }
        assert!(matches!(
            lalpha_cycle_pinv_closed(n, 0),
            Err(GreensError::UnsupportedAlpha(_))
        ));
    }

    #[test]
    fn lattice_pinv_kills_exponentials() {
        let n = 16;
        for k in [1, 3, 5, 8] {
            let a = lattice_alpha(n, k);
            let p = lalpha_cycle_pinv_closed(n, k).unwrap().matrix;
            let ea = e_alpha(n, a);
            assert!((real_part(&p) * ea).amax() < 1e-10);
            let proj = cycle_la(n, a) * real_part(&p);
            assert!((proj - range_projector(&RangeOperator::Lattice { n, k })).amax() < 1e-10);
        }
    }

    #[test]
    fn lap_pinv_cases() {
        let cyc = lap_pinv(&CirculantSpec::cycle(12).unwrap()).unwrap().matrix;
        assert!((cyc - lcycle_pinv_closed(12).unwrap().matrix).amax() < 1e-13);
        for n in [5, 8] {
            let spec = CirculantSpec::complete(n).unwrap();
            let l = crate::graph::laplacian(&build_circulant(&spec));
            let lp = lap_pinv(&spec).unwrap().matrix;
            assert!((lp - &l / (n * n) as f64).amax() < 1e-12);
            let sp = inc_pinv(&spec).unwrap().matrix;
            let s = incidence(&build_circulant(&spec));
            assert!((sp - s.transpose() / n as f64).amax() < 1e-12);
        }
        let spec = CirculantSpec::unweighted(64, &[1, 2, 3]).unwrap();
        let l = crate::graph::laplacian(&build_circulant(&spec));
        let lp = lap_pinv(&spec).unwrap().matrix;
        assert!(rel_max_diff(&lp, &svd_pinv(&l, &pol()).unwrap()) < 1e-9);
        let sp = inc_pinv(&spec).unwrap().matrix;
        let s = incidence(&build_circulant(&spec));
        assert!(rel_max_diff(&sp, &svd_pinv(&s, &pol()).unwrap()) < 1e-9);
        assert!((&sp * &s - range_projector(&RangeOperator::Connected { n: 64 })).amax() < 1e-9);
        assert!((&l * &sp - s.transpose()).amax() < 1e-9);
    }

    #[test]
    fn inc_pinv_on_cycle_is_permuted_closed_form() {
        let n = 8;
        let ours = inc_pinv(&CirculantSpec::cycle(n).unwrap()).unwrap().matrix;
        let closed = scycle_pinv_closed(n).unwrap().matrix;
        // Canonical edges (0,1),(0,7),(1,2),..,(6,7); circulant edge k = (k,k+1), edge 7 = (7,0).
        let g = build_circulant(&CirculantSpec::cycle(n).unwrap());
        for (c, e) in g.edges().iter().enumerate() {
            let (k, sign) = if e.j == e.i + 1 {
                (e.i, 1.0)
            } else {
                (n - 1, -1.0)
            };
            for i in 0..n {
                assert_relative_eq!(ours[(i, c)], sign * closed[(i, k)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lalpha_pinv_cases() {
        let n = 16;
        let single = lalpha_pinv(&CirculantSpec::cycle(n).unwrap(), 3, &pol())
            .unwrap()
            .matrix;
        assert!(max_abs(&(single - lalpha_cycle_pinv_closed(n, 3).unwrap().matrix)) < 1e-12);
        let spec = CirculantSpec::unweighted(64, &[1, 2, 3]).unwrap();
        let ours = real_part(&lalpha_pinv(&spec, 2, &pol()).unwrap().matrix);
        let la = generalized_laplacian_real(&spec, lattice_alpha(64, 2));
        assert!(rel_max_diff(&ours, &svd_pinv(&la, &pol()).unwrap()) < 1e-9);
        for sign in [1.0, -1.0] {
            let x = CMat::from_fn(64, 1, |t, _| {
                Complex64::from_polar(1.0, sign * lattice_alpha(64, 2) * t as f64)
            });
            let y = lalpha_pinv(&spec, 2, &pol()).unwrap().matrix * x;
            assert!(max_abs(&y) < 1e-9);
        }
    }

    #[test]
    fn lalpha_pinv_refuses_indefinite_factor() {
        let spec = CirculantSpec::unweighted(64, &[1, 2, 3]).unwrap();
        assert!(matches!(
            lalpha_pinv(&spec, 32, &pol()),
            Err(GreensError::PAlphaSingular { .. })
        ));
    }

    #[test]
    fn lalpha_inverse_matches_dense() {
        let spec = CirculantSpec::unweighted(32, &[1, 3]).unwrap();
        let a = 0.21;
        let inv = real_part(&lalpha_inverse(&spec, a, &pol()).unwrap().matrix);
        let la = generalized_laplacian_real(&spec, a);
        assert!((la * inv - RMat::identity(32, 32)).amax() < 1e-9);
    }

    #[test]
    fn projectors() {
        let p4 = range_projector(&RangeOperator::Connected { n: 4 });
        assert_relative_eq!(p4[(0, 0)], 0.75);
        assert_relative_eq!(p4[(0, 1)], -0.25);
        let comps = vec![vec![0, 1, 2], vec![3, 4, 5, 6, 7]];
        let pb = range_projector(&RangeOperator::Components(comps));
        assert_relative_eq!(pb[(0, 1)], -1.0 / 3.0);
        assert_relative_eq!(pb[(4, 5)], -0.2);
        assert_eq!(pb[(0, 4)], 0.0);
        let pl = range_projector(&RangeOperator::Lattice { n: 8, k: 1 });
        let expected = RMat::identity(8, 8) - e_alpha(8, PI / 4.0) / 8.0;
        assert!((&pl - expected).amax() < 1e-15);
        assert!((&pl * &pl - &pl).amax() < 1e-10);
    }

    #[test]
    fn routing() {
        assert_eq!(AlphaRoute::classify(8, PI / 4.0), AlphaRoute::Lattice(1));
        assert_eq!(AlphaRoute::classify(8, PI), AlphaRoute::Pi);
        assert_eq!(AlphaRoute::classify(8, 2.0 * PI), AlphaRoute::Zero);
        assert_eq!(AlphaRoute::classify(8, 0.21), AlphaRoute::OffLattice);
        assert_eq!(AlphaRoute::classify(8, -PI / 4.0), AlphaRoute::Lattice(7));
    }

    #[test]
    fn graph_pinv_disconnected() {
        let g = crate::graph::disjoint_union(&[
            build_circulant(&CirculantSpec::cycle(3).unwrap()),
            build_circulant(&CirculantSpec::unweighted(5, &[1, 2]).unwrap()),
            crate::graph::Graph::from_edges(1, &[]).unwrap(),
        ]);
        let ours = graph_laplacian_pinv(&g).unwrap().matrix;
        assert!((ours - svd_pinv(&g.laplacian(), &pol()).unwrap()).amax() < 1e-12);
    }

    proptest! {
        #[test]
        fn four_penrose_identities(n in 3usize..40, k_frac in 0.0f64..1.0) {
            let k = 1 + ((n - 1) as f64 * k_frac) as usize;
            let k = k.min(n - 1);
            let x = real_part(&lalpha_cycle_pinv_closed(n, k).unwrap().matrix);
            let a = cycle_la(n, lattice_alpha(n, k));
            prop_assert!((&a * &x * &a - &a).amax() < 1e-9);
            prop_assert!((&x * &a * &x - &x).amax() < 1e-9 * x.amax().max(1.0));
            let ax = &a * &x;
            prop_assert!((&ax - ax.transpose()).amax() < 1e-9);
            let xa = &x * &a;
            prop_assert!((&xa - xa.transpose()).amax() < 1e-9);
        }

        #[test]
        fn inverse_is_inverse(n in 3usize..40, alpha in 0.01f64..3.1) {
            prop_assume!(AlphaRoute::classify(n, alpha) == AlphaRoute::OffLattice);
            let x = n as f64 * alpha / (2.0 * PI);
            prop_assume!((x - x.round()).abs() > 1e-3);
            let inv = real_part(&lalpha_cycle_inverse_closed(n, alpha).unwrap().matrix);
            let cond = inv.amax();
            prop_assert!((cycle_la(n, alpha) * inv - RMat::identity(n, n)).amax() < 1e-9 * cond.max(1.0));
        }
    }
}
