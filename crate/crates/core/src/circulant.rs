//! Symmetric circulant algebra through representer Laurent polynomials,
//! and the two factorizations through the simple-cycle operators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_circulant, laplacian, CirculantSpec, GraphError};
use crate::matrix::{circulant_from_row, real_part, rel_fro_diff, to_complex, CMat, RMat};
use crate::oracle::RankPolicy;

/// Relative Frobenius residual allowed for the factorizations.
pub const FACTOR_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CirculantError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("first row is not symmetric at offset {0}")]
    NotSymmetric(usize),
    #[error("polynomial has complex coefficients")]
    NotReal,
    #[error("factorization residual {residual:e} exceeds {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

/// `l0 + sum_i l_i (z^i + z^-i)`, realized mod `z^n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    n: usize,
    constant: Complex64,
    sym_coeffs: Vec<Complex64>,
    kind: ScalarKind,
}

impl LaurentPoly {
    pub fn real(n: usize, constant: f64, sym_coeffs: &[f64]) -> Self {
        Self {
            n,
            constant: Complex64::new(constant, 0.0),
            sym_coeffs: sym_coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            kind: ScalarKind::Real,
        }
    }

    /// Kind is `Real` when every imaginary part is exactly zero.
    pub fn complex(n: usize, constant: Complex64, sym_coeffs: Vec<Complex64>) -> Self {
        let real = constant.im == 0.0 && sym_coeffs.iter().all(|c| c.im == 0.0);
        let kind = if real {
            ScalarKind::Real
        } else {
            ScalarKind::Complex
        };
        Self {
            n,
            constant,
            sym_coeffs,
            kind,
        }
    }

    /// Inverse of [`first_row`](Self::first_row) for symmetric rows.
    pub fn from_first_row(row: &[Complex64]) -> Result<Self, CirculantError> {
        let n = row.len();
        let scale = row
            .iter()
            .fold(0.0f64, |a, z| a.max(z.norm()))
            .max(f64::MIN_POSITIVE);
        for k in 1..n {
            if (row[k] - row[n - k]).norm() > 1e-12 * scale {
                return Err(CirculantError::NotSymmetric(k));
            }
        }
        let mut coeffs: Vec<Complex64> = (1..n.div_ceil(2))
            .map(|k| (row[k] + row[n - k]) / 2.0)
            .collect();
        if n.is_multiple_of(2) && n >= 2 {
            coeffs.push(row[n / 2] / 2.0);
        }
        Ok(Self::complex(n, row[0], coeffs))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn sym_coeffs(&self) -> &[Complex64] {
        &self.sym_coeffs
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    /// Index of the last nonzero symmetric coefficient.
    pub fn bandwidth(&self) -> usize {
        self.sym_coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .map_or(0, |i| i + 1)
    }

    pub fn real_constant(&self) -> f64 {
        self.constant.re
    }

    pub fn real_coeffs(&self) -> Vec<f64> {
        self.sym_coeffs.iter().map(|c| c.re).collect()
    }

    /// First row of the realization; offsets beyond `n` wrap around.
    pub fn first_row(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        row[0] += self.constant;
        for (i, &c) in self.sym_coeffs.iter().enumerate() {
            let off = (i + 1) % n;
            row[off] += c;
            row[(n - off) % n] += c;
        }
        row
    }

    pub fn realize(&self) -> CMat {
        circulant_from_row(&self.first_row())
    }

    pub fn realize_real(&self) -> Result<RMat, CirculantError> {
        if self.kind != ScalarKind::Real {
            return Err(CirculantError::NotReal);
        }
        Ok(real_part(&self.realize()))
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let mut acc = self.constant;
        let (mut p, mut q) = (z, zi);
        for &c in &self.sym_coeffs {
            acc += c * (p + q);
            p *= z;
            q *= zi;
        }
        acc
    }

    /// Serialized form; complex coefficients become `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let enc = |z: Complex64| match self.kind {
            ScalarKind::Real => serde_json::json!(z.re),
            ScalarKind::Complex => serde_json::json!([z.re, z.im]),
        };
        serde_json::json!({
            "n": self.n,
            "constant": enc(self.constant),
            "sym_coeffs": self.sym_coeffs.iter().map(|&c| enc(c)).collect::<Vec<_>>(),
            "kind": self.kind,
        })
    }
}

/// Samples `p(e^{2 pi i k / n})`, `k = 0..n`.
pub fn eigenvalues(p: &LaurentPoly) -> Vec<Complex64> {
    let n = p.n;
    (0..n)
        .map(|k| {
            let mut acc = p.constant;
            for (i, &c) in p.sym_coeffs.iter().enumerate() {
                let theta = 2.0 * PI * (((i + 1) * k) % n) as f64 / n as f64;
                acc += c * (2.0 * theta.cos());
            }
            acc
        })
        .collect()
}

/// Product of the realizations, as a polynomial reduced mod `z^n - 1`.
pub fn circ_convolve(p: &LaurentPoly, q: &LaurentPoly) -> Result<LaurentPoly, CirculantError> {
    if p.n != q.n {
        return Err(CirculantError::DimensionMismatch(p.n, q.n));
    }
    let n = p.n;
    let (a, b) = (p.first_row(), q.first_row());
    let row: Vec<Complex64> = (0..n)
        .map(|k| (0..n).map(|j| a[j] * b[(k + n - j) % n]).sum())
        .collect();
    let mut out = LaurentPoly::from_first_row(&row)?;
    if p.kind == ScalarKind::Real && q.kind == ScalarKind::Real {
        out = LaurentPoly::real(n, out.constant.re, &out.real_coeffs());
    }
    Ok(out)
}

/// Symbol of the simple-cycle Laplacian `2 - z - z^-1`.
pub fn cycle_laplacian_poly(n: usize) -> LaurentPoly {
    LaurentPoly::real(n, 2.0, &[-1.0])
}

/// Symbol of the circulant Laplacian.
pub fn laplacian_poly(spec: &CirculantSpec) -> LaurentPoly {
    let m = spec.bandwidth();
    let coeffs: Vec<f64> = (1..=m).map(|s| -spec.symbol_weight(s)).collect();
    let constant: f64 = (1..=m).map(|s| 2.0 * spec.symbol_weight(s)).sum();
    LaurentPoly::real(spec.n(), constant, &coeffs)
}

/// Banded factor `P` with `L = P * L_cycle`: constant `sum s d_s`, and
/// coefficient `i` equal to `sum_{s > i} (s - i) d_s`.
pub fn decompose_laplacian(spec: &CirculantSpec) -> Result<LaurentPoly, CirculantError> {
    spec.require_connected()?;
    let m = spec.bandwidth();
    let d = |s: usize| spec.symbol_weight(s);
    let constant: f64 = (1..=m).map(|s| s as f64 * d(s)).sum();
    let coeffs: Vec<f64> = (1..m)
        .map(|i| ((i + 1)..=m).map(|s| (s - i) as f64 * d(s)).sum())
        .collect();
    let p = LaurentPoly::real(spec.n(), constant, &coeffs);
    let l = laplacian(&build_circulant(spec));
    let product = p.realize_real()? * cycle_laplacian_poly(spec.n()).realize_real()?;
    let residual = rel_fro_diff(&product, &l);
    if residual > FACTOR_TOL {
        return Err(CirculantError::Residual {
            residual,
            tol: FACTOR_TOL,
        });
    }
    Ok(p)
}

/// Circulant spec together with the frequency parameter of `L_alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedLaplacianSpec {
    pub circ: CirculantSpec,
    pub alpha: Complex64,
}

impl GeneralizedLaplacianSpec {
    pub fn real(circ: CirculantSpec, alpha: f64) -> Self {
        Self {
            circ,
            alpha: Complex64::new(alpha, 0.0),
        }
    }

    /// `d_alpha = sum_s 2 d_s cos(alpha s)`.
    pub fn degree(&self) -> Complex64 {
        let c = &self.circ;
        c.gens()
            .iter()
            .map(|&s| 2.0 * c.symbol_weight(s) * (self.alpha * s as f64).cos())
            .sum()
    }

    fn is_real(&self) -> bool {
        self.alpha.im == 0.0
    }
}

/// `L_alpha = d_alpha I - A`.
pub fn generalized_laplacian(spec: &GeneralizedLaplacianSpec) -> CMat {
    let g = build_circulant(&spec.circ);
    let mut m = to_complex(&-g.adjacency().clone());
    let d = spec.degree();
    for i in 0..g.n() {
        m[(i, i)] = d;
    }
    m
}

/// Real-typed `L_alpha` for real `alpha`.
pub fn generalized_laplacian_real(circ: &CirculantSpec, alpha: f64) -> RMat {
    real_part(&generalized_laplacian(&GeneralizedLaplacianSpec::real(
        circ.clone(),
        alpha,
    )))
}

/// Simple-cycle `L_{C,alpha}` with first row `[2 cos alpha, -1, 0, .., -1]`.
pub fn cycle_generalized_poly(n: usize, alpha: Complex64) -> LaurentPoly {
    LaurentPoly::complex(n, 2.0 * alpha.cos(), vec![Complex64::new(-1.0, 0.0)])
}

/// `r_t = sum_{m=0}^{t} cos(alpha (t - 2m))`, i.e. `sin(alpha(t+1))/sin(alpha)`.
pub fn r_coefficient(alpha: Complex64, t: usize) -> Complex64 {
    (0..=t)
        .map(|m| (alpha * (t as f64 - 2.0 * m as f64)).cos())
        .sum()
}

#[derive(Clone, Debug)]
pub struct GeneralizedFactor {
    pub p_alpha: LaurentPoly,
    pub positive_definite: bool,
}

/// Banded factor `P_alpha` with `L_alpha = L_{C,alpha} * P_alpha`.
pub fn decompose_generalized(
    spec: &GeneralizedLaplacianSpec,
    policy: &RankPolicy,
) -> Result<GeneralizedFactor, CirculantError> {
    let circ = &spec.circ;
    circ.require_connected()?;
    let n = circ.n();
    let m = circ.bandwidth();
    let alpha = spec.alpha;
    let r: Vec<Complex64> = (0..m).map(|t| r_coefficient(alpha, t)).collect();
    let d = |s: usize| circ.symbol_weight(s);
    let constant: Complex64 = (1..=m).map(|s| r[s - 1] * d(s)).sum();
    let coeffs: Vec<Complex64> = (1..m)
        .map(|t| ((t + 1)..=m).map(|s| r[s - 1 - t] * d(s)).sum())
        .collect();
    let p = LaurentPoly::complex(n, constant, coeffs);
    let residual = if spec.is_real() {
        let l = generalized_laplacian_real(circ, alpha.re);
        let lc = cycle_generalized_poly(n, alpha).realize_real()?;
        rel_fro_diff(&(lc * p.realize_real()?), &l)
    } else {
        let l = generalized_laplacian(spec);
        rel_fro_diff(
            &(cycle_generalized_poly(n, alpha).realize() * p.realize()),
            &l,
        )
    };
    if residual > FACTOR_TOL {
        return Err(CirculantError::Residual {
            residual,
            tol: FACTOR_TOL,
        });
    }
    let positive_definite = is_positive_definite(&p, policy);
    Ok(GeneralizedFactor {
        p_alpha: p,
        positive_definite,
    })
}

/// All DFT eigenvalues have real part above the rank threshold and
/// imaginary part within it.
pub fn is_positive_definite(p: &LaurentPoly, policy: &RankPolicy) -> bool {
    let ev = eigenvalues(p);
    let scale = ev.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return false;
    }
    let thr = policy.threshold(p.n, p.n, scale);
    ev.iter().all(|z| z.re > thr && z.im.abs() <= thr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dft_circulant_eigenvalues, symmetric_eigenvalues};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pol() -> RankPolicy {
        RankPolicy::default()
    }

    #[test]
    fn cycle_eigenvalues() {
        let ev = eigenvalues(&cycle_laplacian_poly(4));
        for (z, e) in ev.iter().zip([0.0, 2.0, 4.0, 2.0]) {
            assert!((z.re - e).abs() < 1e-14 && z.im == 0.0);
        }
    }

    #[test]
    fn constant_poly_eigenvalues() {
        let ev = eigenvalues(&LaurentPoly::real(7, 3.5, &[]));
        assert!(ev.iter().all(|z| *z == Complex64::new(3.5, 0.0)));
    }

    #[test]
    fn pgs_value_at_one() {
        let p = decompose_laplacian(&CirculantSpec::unweighted(16, &[1, 2, 3]).unwrap()).unwrap();
        assert_relative_eq!(eigenvalues(&p)[0].re, 14.0, epsilon = 1e-12);
        let dense = dft_circulant_eigenvalues(&p.first_row());
        for (a, b) in eigenvalues(&p).iter().zip(dense) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn convolve_identity_and_square() {
        let p = cycle_laplacian_poly(8);
        let one = LaurentPoly::real(8, 1.0, &[]);
        assert_eq!(circ_convolve(&p, &one).unwrap().first_row(), p.first_row());
        let sq = circ_convolve(&p, &p).unwrap();
        let row: Vec<f64> = sq.first_row().iter().map(|z| z.re).collect();
        assert_eq!(row, vec![6., -4., 1., 0., 0., 0., 1., -4.]);
        assert!(circ_convolve(&p, &cycle_laplacian_poly(9)).is_err());
    }

    #[test]
    fn from_first_row_round_trips_half_offset() {
        let p = LaurentPoly::real(6, 1.0, &[2.0, 3.0, 4.0]);
        let back = LaurentPoly::from_first_row(&p.first_row()).unwrap();
        assert_eq!(back.first_row(), p.first_row());
    }

    #[test]
    fn pgs_examples() {
        let p = decompose_laplacian(&CirculantSpec::cycle(10).unwrap()).unwrap();
        assert_eq!((p.real_constant(), p.bandwidth()), (1.0, 0));
        let p = decompose_laplacian(&CirculantSpec::unweighted(64, &[1, 2, 3]).unwrap()).unwrap();
        assert_eq!((p.real_constant(), p.real_coeffs()), (6.0, vec![3.0, 1.0]));
        let p = decompose_laplacian(&CirculantSpec::unweighted(9, &[1, 2]).unwrap()).unwrap();
        assert_eq!((p.real_constant(), p.real_coeffs()), (3.0, vec![1.0]));
        assert!(decompose_laplacian(&CirculantSpec::unweighted(9, &[2, 3]).unwrap()).is_err());
    }

    #[test]
    fn pgs_with_half_generator() {
        let spec = CirculantSpec::complete(8).unwrap();
        let p = decompose_laplacian(&spec).unwrap();
        assert!(is_positive_definite(&p, &pol()));
    }

    #[test]
    fn generalized_examples() {
        let spec = CirculantSpec::unweighted(12, &[1, 2]).unwrap();
        let l0 = generalized_laplacian_real(&spec, 0.0);
        assert_eq!(l0, laplacian(&build_circulant(&spec)));
        let a = 0.7f64;
        let lc = generalized_laplacian_real(&CirculantSpec::cycle(6).unwrap(), a);
        let row: Vec<f64> = lc.row(0).iter().copied().collect();
        assert_eq!(row, vec![2.0 * a.cos(), -1., 0., 0., 0., -1.]);
        let n = 8;
        let alpha = 2.0 * PI / n as f64;
        let l = generalized_laplacian(&GeneralizedLaplacianSpec::real(
            CirculantSpec::cycle(n).unwrap(),
            alpha,
        ));
        let x = CMat::from_fn(n, 1, |t, _| Complex64::from_polar(1.0, alpha * t as f64));
        assert!(crate::matrix::max_abs(&(l * x)) < 1e-14);
    }

    #[test]
    fn palpha_examples() {
        let a = 0.37f64;
        let spec =
            GeneralizedLaplacianSpec::real(CirculantSpec::unweighted(32, &[1, 2, 3]).unwrap(), a);
        let f = decompose_generalized(&spec, &pol()).unwrap();
        assert_relative_eq!(
            f.p_alpha.real_constant(),
            2.0 + 2.0 * a.cos() + 2.0 * (2.0 * a).cos(),
            epsilon = 1e-14
        );
        let c = f.p_alpha.real_coeffs();
        assert_relative_eq!(c[0], 1.0 + 2.0 * a.cos(), epsilon = 1e-14);
        assert_relative_eq!(c[1], 1.0, epsilon = 1e-14);
        let single = GeneralizedLaplacianSpec::real(CirculantSpec::cycle(9).unwrap(), a);
        let f = decompose_generalized(&single, &pol()).unwrap();
        assert_eq!((f.p_alpha.real_constant(), f.p_alpha.bandwidth()), (1.0, 0));
    }

    #[test]
    fn palpha_at_zero_is_pgs() {
        let circ = CirculantSpec::new(40, vec![1, 2, 5, 7], vec![1.0, 0.5, 2.0, 0.25]).unwrap();
        let pa = decompose_generalized(&GeneralizedLaplacianSpec::real(circ.clone(), 0.0), &pol())
            .unwrap();
        let pg = decompose_laplacian(&circ).unwrap();
        assert_eq!(pa.p_alpha.real_constant(), pg.real_constant());
        assert_eq!(pa.p_alpha.real_coeffs(), pg.real_coeffs());
    }

    #[test]
    fn r_coefficients_match_sine_ratio() {
        let a = Complex64::new(0.9, 0.0);
        for t in 0..8 {
            let expected = (a * (t as f64 + 1.0)).sin() / a.sin();
            assert!((r_coefficient(a, t) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn complex_alpha_factorization() {
        let spec = GeneralizedLaplacianSpec {
            circ: CirculantSpec::unweighted(20, &[1, 3]).unwrap(),
            alpha: Complex64::new(0.4, 0.2),
        };
        let f = decompose_generalized(&spec, &pol()).unwrap();
        assert_eq!(f.p_alpha.kind(), ScalarKind::Complex);
    }

    #[test]
    fn positive_definite_cases() {
        assert!(!is_positive_definite(
            &LaurentPoly::real(5, 0.0, &[]),
            &pol()
        ));
        let n = 64;
        let circ = CirculantSpec::unweighted(n, &[1, 2, 3]).unwrap();
        // Ratio of the {1,2,3} symbol to the cycle symbol, as a polynomial in
        // a = cos(alpha) and b = cos(theta).
        let symbol = |a: f64, b: f64| 4.0 * (a * a + a * b + b * b) + 2.0 * (a + b) - 2.0;
        for step in 0..=32 {
            let alpha = PI * step as f64 / 32.0;
            let min = (0..n)
                .map(|k| symbol(alpha.cos(), (2.0 * PI * k as f64 / n as f64).cos()))
                .fold(f64::INFINITY, f64::min);
            if min.abs() < 1e-6 {
                continue;
            }
            let f =
                decompose_generalized(&GeneralizedLaplacianSpec::real(circ.clone(), alpha), &pol())
                    .unwrap();
            assert_eq!(f.positive_definite, min > 0.0, "alpha = {alpha}");
        }
        assert!(
            decompose_generalized(&GeneralizedLaplacianSpec::real(circ.clone(), 0.1), &pol())
                .unwrap()
                .positive_definite
        );
        assert!(
            !decompose_generalized(&GeneralizedLaplacianSpec::real(circ, PI / 2.0), &pol())
                .unwrap()
                .positive_definite
        );
    }

    #[test]
    fn json_shape() {
        let v = LaurentPoly::real(8, 6.0, &[3.0, 1.0]).to_json();
        assert_eq!(v["kind"], "real");
        assert_eq!(v["sym_coeffs"][1], 1.0);
        let c = LaurentPoly::complex(8, Complex64::new(1.0, 2.0), vec![]).to_json();
        assert_eq!(c["constant"][1], 2.0);
    }

    fn arb_spec() -> impl Strategy<Value = CirculantSpec> {
        (12usize..48).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::btree_map(2..=n / 2, 0.1f64..3.0, 0..4),
                0.1f64..3.0,
            )
                .prop_map(|(n, m, w1)| {
                    let mut g = vec![1];
                    let mut w = vec![w1];
                    for (s, d) in m {
                        g.push(s);
                        w.push(d);
                    }
                    CirculantSpec::new(n, g, w).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn eigenvalues_match_dense(spec in arb_spec()) {
            let p = laplacian_poly(&spec);
            let mut ours: Vec<f64> = eigenvalues(&p).iter().map(|z| z.re).collect();
            ours.sort_by(|a, b| a.total_cmp(b));
            let dense = symmetric_eigenvalues(&laplacian(&build_circulant(&spec)));
            let scale = dense[dense.len() - 1];
            for (a, b) in ours.iter().zip(dense) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn pgs_is_banded_and_definite(spec in arb_spec()) {
            let p = decompose_laplacian(&spec).unwrap();
            prop_assert_eq!(p.bandwidth(), spec.bandwidth() - 1);
            prop_assert!(is_positive_definite(&p, &RankPolicy::default()));
        }

        #[test]
        fn convolution_commutes(spec in arb_spec(), alpha in 0.0f64..3.0) {
            let p = laplacian_poly(&spec);
            let q = cycle_generalized_poly(spec.n(), Complex64::new(alpha, 0.0));
            let pq = circ_convolve(&p, &q).unwrap();
            let qp = circ_convolve(&q, &p).unwrap();
            let dense = p.realize() * q.realize();
            let scale = crate::matrix::max_abs(&dense).max(1.0);
            prop_assert!(crate::matrix::max_abs(&(pq.realize() - &dense)) < 1e-12 * scale);
            prop_assert!(crate::matrix::max_abs(&(qp.realize() - dense)) < 1e-12 * scale);
        }

        #[test]
        fn generalized_factorization_holds(spec in arb_spec(), alpha in 0.0f64..PI) {
            let g = GeneralizedLaplacianSpec::real(spec, alpha);
            prop_assert!(decompose_generalized(&g, &RankPolicy::default()).is_ok());
        }
    }
}
