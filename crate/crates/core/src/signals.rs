//! Test signals, sparsity measurement, annihilation-order and degree
//! certification, and sparse Green's-function combinations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circulant::{decompose_laplacian, generalized_laplacian_real, CirculantError};
use crate::graph::{build_circulant, incidence, CirculantSpec, Graph};
use crate::greens::{graph_laplacian_pinv, lap_pinv, GreensError};
use crate::matrix::{matrix_power, max_abs_slice, to_complex, CMat, Entry, RMat};

/// Default relative zero threshold for `||.||_0` counts.
pub const SPARSITY_EPS: f64 = 1e-8;

/// Residual allowed when an analysis operator must reproduce a predicted pattern.
pub const PATTERN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("first knot must be 0, got {0}")]
    FirstKnot(usize),
    #[error("knots must be strictly increasing and below n = {n}: {knots:?}")]
    UnorderedKnots { n: usize, knots: Vec<usize> },
    #[error("{knots} knots but {pieces} pieces")]
    PieceCount { knots: usize, pieces: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{indices} indices but {weights} weights")]
    WeightCount { indices: usize, weights: usize },
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("analysis output misses the predicted pattern by {residual:e}")]
    PatternMismatch { residual: f64 },
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Circulant(#[from] CirculantError),
}

/// Piecewise polynomial on `0..n`; piece `j` covers `[knots[j], knots[j+1])`
/// and is evaluated at the global index `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    pub n: usize,
    pub knots: Vec<usize>,
    /// Ascending-degree coefficients per piece.
    pub pieces: Vec<Vec<f64>>,
}

impl PiecewisePoly {
    pub fn single(n: usize, coeffs: &[f64]) -> Self {
        Self {
            n,
            knots: vec![0],
            pieces: vec![coeffs.to_vec()],
        }
    }

    pub fn max_degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    fn validate(&self) -> Result<(), SignalError> {
        if self.knots.first() != Some(&0) {
            return Err(SignalError::FirstKnot(
                self.knots.first().copied().unwrap_or(usize::MAX),
            ));
        }
        let ordered = self.knots.windows(2).all(|w| w[0] < w[1]);
        if !ordered || self.knots.last().is_some_and(|&k| k >= self.n.max(1)) {
            return Err(SignalError::UnorderedKnots {
                n: self.n,
                knots: self.knots.clone(),
            });
        }
        if self.knots.len() != self.pieces.len() {
            return Err(SignalError::PieceCount {
                knots: self.knots.len(),
                pieces: self.pieces.len(),
            });
        }
        Ok(())
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

pub fn gen_piecewise_poly(spec: &PiecewisePoly) -> Result<Vec<f64>, SignalError> {
    spec.validate()?;
    let mut out = vec![0.0; spec.n];
    for (j, coeffs) in spec.pieces.iter().enumerate() {
        let end = spec.knots.get(j + 1).copied().unwrap_or(spec.n);
        for (t, slot) in out.iter_mut().enumerate().take(end).skip(spec.knots[j]) {
            *slot = horner(coeffs, t as f64);
        }
    }
    Ok(out)
}

/// `p(t) e^{sign i alpha t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolySignal {
    pub n: usize,
    pub alpha: f64,
    pub coeffs: Vec<f64>,
    /// `+1` or `-1`.
    pub sign: i8,
}

impl ExpPolySignal {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn sample(&self) -> Vec<Complex64> {
        let s = if self.sign < 0 { -1.0 } else { 1.0 };
        (0..self.n)
            .map(|t| {
                Complex64::from_polar(1.0, s * self.alpha * t as f64)
                    * horner(&self.coeffs, t as f64)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsityReport {
    pub l0: usize,
    pub support: Vec<usize>,
    pub cosupport: Vec<usize>,
    pub threshold: f64,
}

/// Entries above `eps_rel * ||x||_inf` count as nonzero.
pub fn sparsity<T: Entry>(x: &[T], eps_rel: f64) -> SparsityReport {
    let threshold = eps_rel * max_abs_slice(x);
    let (support, cosupport): (Vec<usize>, Vec<usize>) =
        (0..x.len()).partition(|&i| threshold > 0.0 && x[i].modulus() > threshold);
    let support = if threshold > 0.0 { support } else { Vec::new() };
    let cosupport = if threshold > 0.0 {
        cosupport
    } else {
        (0..x.len()).collect()
    };
    SparsityReport {
        l0: support.len(),
        support,
        cosupport,
        threshold,
    }
}

/// Operators whose vanishing moments are certified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalysisOperator {
    Laplacian { power: usize },
    IncidenceLaplacian { power: usize },
    Generalized { power: usize, alpha: f64, sign: i8 },
}

impl AnalysisOperator {
    fn power(&self) -> usize {
        match *self {
            AnalysisOperator::Laplacian { power }
            | AnalysisOperator::IncidenceLaplacian { power }
            | AnalysisOperator::Generalized { power, .. } => power,
        }
    }
}

/// Vertices whose stencil under a banded operator of reach `reach` crosses
/// the wrap between `n-1` and `0`.
pub fn wrap_window(n: usize, reach: usize) -> Vec<bool> {
    (0..n).map(|i| i.min(n - 1 - i) < reach).collect()
}

/// Largest degree `D` such that every one-piece test signal of degree at
/// most `D` is mapped to zero outside the border window around the wrap.
/// `None` when even constants are not annihilated.
pub fn annihilation_order(
    spec: &CirculantSpec,
    op: AnalysisOperator,
    max_degree: usize,
) -> Result<Option<usize>, SignalError> {
    let n = spec.n();
    let g = build_circulant(spec);
    let k = op.power();
    let window = wrap_window(n, k * spec.bandwidth());
    let (matrix, rows_window): (CMat, Vec<bool>) = match op {
        AnalysisOperator::Laplacian { power } => {
            (to_complex(&matrix_power(&g.laplacian(), power)), window)
        }
        AnalysisOperator::IncidenceLaplacian { power } => {
            let m = incidence(&g) * matrix_power(&g.laplacian(), power);
            let edge_window = g
                .edges()
                .iter()
                .map(|e| window[e.i] || window[e.j])
                .collect();
            (to_complex(&m), edge_window)
        }
        AnalysisOperator::Generalized { power, alpha, .. } => (
            to_complex(&matrix_power(
                &generalized_laplacian_real(spec, alpha),
                power,
            )),
            window,
        ),
    };
    let half = n as f64 / 2.0;
    let mut certified = None;
    for degree in 0..=max_degree {
        // All monomials up to `degree` in the centred variable (t - n/2)/(n/2).
        let coeffs: Vec<f64> = (0..=degree).map(|_| 1.0).collect();
        let base: Vec<f64> = (0..n)
            .map(|t| horner(&coeffs, (t as f64 - half) / half))
            .collect();
        let x: Vec<Complex64> = match op {
            AnalysisOperator::Generalized { alpha, sign, .. } => {
                let s = if sign < 0 { -1.0 } else { 1.0 };
                base.iter()
                    .enumerate()
                    .map(|(t, &v)| Complex64::from_polar(v, s * alpha * t as f64))
                    .collect()
            }
            _ => base.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        };
        let tol = SPARSITY_EPS * max_abs_slice(&x);
        let y = &matrix * DMatrix::from_column_slice(n, 1, &x);
        let clean = y
            .iter()
            .zip(&rows_window)
            .all(|(v, &inside)| inside || v.norm() <= tol);
        if !clean {
            break;
        }
        certified = Some(degree);
    }
    Ok(certified)
}

/// Which Green's-function combination is synthesized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinationMode {
    /// `x = sum w_j (L^+)^k S_j^T` over edges; sparse under `L^k`.
    Edge,
    /// `x = sum w_j ((L^+)^k)_j` over vertices; sparse under `S L^k`.
    VertexIncidence,
    /// `x = sum w_j (L^+)^k L_j` over vertices; sparse under `L^k`.
    VertexLaplacian,
}

#[derive(Clone, Debug)]
pub struct GreensCombination {
    pub signal: Vec<f64>,
    pub predicted: Vec<f64>,
    pub analysis_output: Vec<f64>,
    pub residual: f64,
}

impl GreensCombination {
    pub fn matches(&self) -> bool {
        self.residual < PATTERN_TOL
    }

    pub fn verify(&self) -> Result<(), SignalError> {
        if self.matches() {
            Ok(())
        } else {
            Err(SignalError::PatternMismatch {
                residual: self.residual,
            })
        }
    }
}

pub fn greens_combination(
    g: &Graph,
    mode: CombinationMode,
    indices: &[usize],
    weights: &[f64],
    power: usize,
) -> Result<GreensCombination, SignalError> {
    if indices.len() != weights.len() {
        return Err(SignalError::WeightCount {
            indices: indices.len(),
            weights: weights.len(),
        });
    }
    if power == 0 {
        return Err(SignalError::ZeroPower);
    }
    let n = g.n();
    let l = g.laplacian();
    let s = incidence(g);
    let lk = matrix_power(&l, power);
    let gk = matrix_power(&graph_laplacian_pinv(g)?.matrix, power);
    let limit = if mode == CombinationMode::Edge {
        s.nrows()
    } else {
        n
    };
    if let Some(&bad) = indices.iter().find(|&&j| j >= limit) {
        return Err(SignalError::IndexOutOfRange {
            index: bad,
            len: limit,
        });
    }
    let (source, predicted, analysis): (RMat, RMat, RMat) = match mode {
        CombinationMode::Edge => {
            let mut src = RMat::zeros(n, 1);
            for (&j, &w) in indices.iter().zip(weights) {
                src += s.row(j).transpose() * w;
            }
            (src.clone(), src, lk)
        }
        CombinationMode::VertexIncidence => {
            let mut src = RMat::zeros(n, 1);
            let mut pred = RMat::zeros(s.nrows(), 1);
            for (&j, &w) in indices.iter().zip(weights) {
                src[j] += w;
                pred += s.column(j) * w;
            }
            (src, pred, &s * lk)
        }
        CombinationMode::VertexLaplacian => {
            let mut src = RMat::zeros(n, 1);
            for (&j, &w) in indices.iter().zip(weights) {
                src += l.column(j) * w;
            }
            (src.clone(), src, lk)
        }
    };
    let x = gk * source;
    let y = analysis * &x;
    let scale = predicted.amax().max(1.0);
    let residual = (&y - &predicted).amax() / scale;
    Ok(GreensCombination {
        signal: x.iter().copied().collect(),
        predicted: predicted.iter().copied().collect(),
        analysis_output: y.iter().copied().collect(),
        residual,
    })
}

fn circular_difference(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| x[(i + 1) % n] - x[i]).collect()
}

/// Smallest `d` whose `(d+1)`-th circular forward difference vanishes at
/// every index `i` whose window `{i, .., i+d+1}` contains no knot. A knot at
/// `k` marks a break between `k-1` and `k` or a kink at `k`. `None` when no
/// degree below `n - 1` can be certified.
pub fn degree_profile(x: &[f64], knots: &[usize]) -> Option<usize> {
    let n = x.len();
    let scale = max_abs_slice(x);
    if scale == 0.0 {
        return Some(0);
    }
    let tol = SPARSITY_EPS * scale;
    let mut diff = x.to_vec();
    for d in 0..n.saturating_sub(1) {
        let order = d + 1;
        diff = circular_difference(&diff);
        let mut tested = 0;
        let mut clean = true;
        for (i, v) in diff.iter().enumerate() {
            let hits_knot = (0..=order).any(|r| knots.contains(&((i + r) % n)));
            if hits_knot {
                continue;
            }
            tested += 1;
            if v.abs() > tol {
                clean = false;
                break;
            }
        }
        if tested == 0 {
            return None;
        }
        if clean {
            return Some(d);
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct Tailored {
    /// Pattern under the graph Laplacian.
    pub pattern: Vec<f64>,
    pub signal: Vec<f64>,
    /// Pattern under the cycle Laplacian (two opposite unit spikes).
    pub cycle_pattern: Vec<f64>,
    pub cycle_residual: f64,
    pub graph_residual: f64,
}

/// Signal whose graph-Laplacian pattern is `P` column `j` convolved with
/// `e_k - e_l`, hence two-sparse under the cycle Laplacian.
pub fn smoothness_tailor(
    spec: &CirculantSpec,
    j: usize,
    k: usize,
    l: usize,
) -> Result<Tailored, SignalError> {
    let n = spec.n();
    for &i in &[j, k, l] {
        if i >= n {
            return Err(SignalError::IndexOutOfRange { index: i, len: n });
        }
    }
    let row = decompose_laplacian(spec)?
        .realize_real()?
        .row(0)
        .clone_owned();
    let col = |i: usize| row[(i + 2 * n - j) % n];
    let pattern: Vec<f64> = (0..n)
        .map(|i| col((i + n - k) % n) - col((i + n - l) % n))
        .collect();
    let x = lap_pinv(spec)?.matrix * RMat::from_column_slice(n, 1, &pattern);
    let mut cycle_pattern = vec![0.0; n];
    cycle_pattern[(j + k) % n] += 1.0;
    cycle_pattern[(j + l) % n] -= 1.0;
    let lc = crate::graph::laplacian(&build_circulant(
        &CirculantSpec::cycle(n).map_err(CirculantError::from)?,
    ));
    let lg = crate::graph::laplacian(&build_circulant(spec));
    let res = |op: &RMat, target: &[f64]| {
        let y = op * &x;
        let t = RMat::from_column_slice(n, 1, target);
        (y - &t).amax() / t.amax().max(1.0)
    };
    let cycle_residual = res(&lc, &cycle_pattern);
    let graph_residual = res(&lg, &pattern);
    let worst = cycle_residual.max(graph_residual);
    if worst > PATTERN_TOL {
        return Err(SignalError::PatternMismatch { residual: worst });
    }
    Ok(Tailored {
        pattern,
        signal: x.iter().copied().collect(),
        cycle_pattern,
        cycle_residual,
        graph_residual,
    })
}

/// `((e_i - e_j) * (e_k - e_l)) mod n`.
pub fn double_constraint(n: usize, i: usize, j: usize, k: usize, l: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    c[(i + k) % n] += 1.0;
    c[(i + l) % n] -= 1.0;
    c[(j + k) % n] -= 1.0;
    c[(j + l) % n] += 1.0;
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{lattice_alpha, lcycle_pinv_closed, scycle_pinv_closed};
    use crate::oracle::{fredholm_check, RankPolicy};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cycle_spec(n: usize) -> CirculantSpec {
        CirculantSpec::cycle(n).unwrap()
    }

    #[test]
    fn generator_examples() {
        let ramp = gen_piecewise_poly(&PiecewisePoly::single(8, &[0.0, 1.0])).unwrap();
        assert_eq!(ramp, (0..8).map(|t| t as f64).collect::<Vec<_>>());
        assert_eq!(
            gen_piecewise_poly(&PiecewisePoly::single(5, &[1.0])).unwrap(),
            vec![1.0; 5]
        );
        let bad = PiecewisePoly {
            n: 8,
            knots: vec![0, 5, 3],
            pieces: vec![vec![1.0]; 3],
        };
        assert!(matches!(
            gen_piecewise_poly(&bad),
            Err(SignalError::UnorderedKnots { .. })
        ));
        let bad = PiecewisePoly {
            n: 8,
            knots: vec![1],
            pieces: vec![vec![1.0]],
        };
        assert!(matches!(
            gen_piecewise_poly(&bad),
            Err(SignalError::FirstKnot(1))
        ));
    }

    #[test]
    fn two_piece_linear_matches_column_difference() {
        let (n, j1, j2) = (8usize, 5usize, 1usize);
        let nf = n as f64;
        let (a, b) = (j1 as f64, j2 as f64);
        // Difference of Green's columns j1 and j2: three linear pieces with knots at j2+1 and j1+1.
        let slope = -2.0 * (a - b) / (2.0 * nf);
        let c0 = (a * a - b * b) / (2.0 * nf);
        let spec = PiecewisePoly {
            n,
            knots: vec![0, j2 + 1, j1 + 1],
            pieces: vec![
                vec![c0 + (b - a) / 2.0, slope],
                vec![c0 - (a + b) / 2.0, slope + 1.0],
                vec![c0 - (b - a) / 2.0, slope],
            ],
        };
        let x = gen_piecewise_poly(&spec).unwrap();
        let l = lcycle_pinv_closed(n).unwrap().matrix;
        for i in 0..n {
            assert_relative_eq!(x[i], l[(i, j1)] - l[(i, j2)], epsilon = 1e-13);
        }
    }

    #[test]
    fn sparsity_examples() {
        let lc = build_circulant(&cycle_spec(8)).laplacian();
        let ramp = RMat::from_fn(8, 1, |t, _| t as f64);
        let y: Vec<f64> = (&lc * &ramp).iter().copied().collect();
        assert_eq!(y, vec![-8., 0., 0., 0., 0., 0., 0., 8.]);
        let r = sparsity(&y, SPARSITY_EPS);
        assert_eq!((r.l0, r.support.clone()), (2, vec![0, 7]));
        assert!(fredholm_check(
            &lc,
            &RMat::from_column_slice(8, 1, &y),
            &RankPolicy::default()
        )
        .unwrap());
        let ones: Vec<f64> = (&lc * RMat::from_element(8, 1, 1.0))
            .iter()
            .copied()
            .collect();
        assert_eq!(sparsity(&ones, SPARSITY_EPS).l0, 0);
        let l3 = build_circulant(&CirculantSpec::unweighted(16, &[1, 2, 3]).unwrap()).laplacian();
        let y3: Vec<f64> = (&l3 * RMat::from_fn(16, 1, |t, _| t as f64))
            .iter()
            .copied()
            .collect();
        let r = sparsity(&y3, SPARSITY_EPS);
        assert_eq!(r.l0, 6);
        assert_eq!(r.support, vec![0, 1, 2, 13, 14, 15]);
        assert_eq!(sparsity(&[0.0f64; 4], SPARSITY_EPS).l0, 0);
    }

    #[test]
    fn ramp_reconstruction() {
        let n = 8;
        let lc = build_circulant(&cycle_spec(n)).laplacian();
        let ramp = RMat::from_fn(n, 1, |t, _| t as f64);
        let y = &lc * &ramp;
        let x = lcycle_pinv_closed(n).unwrap().matrix * y;
        let shift = ramp[0] - x[0];
        assert!((x.add_scalar(shift) - ramp).amax() < 1e-10);
    }

    #[test]
    fn annihilation_examples() {
        let ann = |spec: &CirculantSpec, op| annihilation_order(spec, op, 8).unwrap();
        assert_eq!(
            ann(&cycle_spec(64), AnalysisOperator::Laplacian { power: 1 }),
            Some(1)
        );
        let s12 = CirculantSpec::unweighted(32, &[1, 2]).unwrap();
        assert_eq!(
            ann(&s12, AnalysisOperator::IncidenceLaplacian { power: 1 }),
            Some(2)
        );
        let a = lattice_alpha(32, 3);
        assert_eq!(
            ann(
                &cycle_spec(32),
                AnalysisOperator::Generalized {
                    power: 2,
                    alpha: a,
                    sign: 1
                }
            ),
            Some(1)
        );
        assert_eq!(
            ann(
                &cycle_spec(32),
                AnalysisOperator::Generalized {
                    power: 2,
                    alpha: a,
                    sign: -1
                }
            ),
            Some(1)
        );
    }

    #[test]
    fn combination_examples() {
        let g = build_circulant(&cycle_spec(8));
        let c = greens_combination(&g, CombinationMode::Edge, &[2], &[1.0], 1).unwrap();
        c.verify().unwrap();
        assert_eq!(sparsity(&c.predicted, SPARSITY_EPS).l0, 2);
        let c = greens_combination(&g, CombinationMode::VertexLaplacian, &[2], &[1.0], 1).unwrap();
        c.verify().unwrap();
        assert_eq!(&c.predicted[1..4], &[-1.0, 2.0, -1.0]);
        assert_eq!(sparsity(&c.predicted, SPARSITY_EPS).l0, 3);
        let c = greens_combination(&g, CombinationMode::VertexIncidence, &[0], &[1.0], 1).unwrap();
        c.verify().unwrap();
        let s = incidence(&g);
        assert_eq!(c.predicted, s.column(0).iter().copied().collect::<Vec<_>>());
        assert!(greens_combination(&g, CombinationMode::Edge, &[9], &[1.0], 1).is_err());
    }

    #[test]
    fn degree_examples() {
        let n = 16;
        let l = lcycle_pinv_closed(n).unwrap().matrix;
        let sp = scycle_pinv_closed(n).unwrap().matrix;
        for j in [0, 5, 15] {
            let col: Vec<f64> = l.column(j).iter().copied().collect();
            assert_eq!(degree_profile(&col, &[j]), Some(2));
            let col: Vec<f64> = sp.column(j).iter().copied().collect();
            assert_eq!(degree_profile(&col, &[(j + 1) % n]), Some(1));
            let mut e = vec![-1.0 / n as f64; n];
            e[j] += 1.0;
            assert_eq!(degree_profile(&e, &[j]), Some(0));
        }
        assert_eq!(degree_profile(&[0.0; 5], &[]), Some(0));
    }

    #[test]
    fn row_differences_are_piecewise_constant() {
        let n = 16;
        let sp = scycle_pinv_closed(n).unwrap().matrix;
        let (i1, i2) = (3, 11);
        let d: Vec<f64> = (0..n).map(|j| sp[(i1, j)] - sp[(i2, j)]).collect();
        assert_eq!(degree_profile(&d, &[i1, i2]), Some(0));
    }

    #[test]
    fn tailor_examples() {
        let t = smoothness_tailor(&cycle_spec(16), 2, 3, 9).unwrap();
        let mut expected = vec![0.0; 16];
        expected[5] = 1.0;
        expected[11] = -1.0;
        assert_eq!(t.pattern, expected);
        let spec = CirculantSpec::unweighted(64, &[1, 2, 3]).unwrap();
        let t = smoothness_tailor(&spec, 0, 10, 40).unwrap();
        let lc = build_circulant(&cycle_spec(64)).laplacian();
        let y: Vec<f64> = (lc * RMat::from_column_slice(64, 1, &t.signal))
            .iter()
            .copied()
            .collect();
        assert_eq!(sparsity(&y, SPARSITY_EPS).l0, 2);
    }

    #[test]
    fn double_constraint_is_piecewise_constant() {
        let n = 16;
        let c = double_constraint(n, 4, 5, 0, 8);
        let x: Vec<f64> = (lcycle_pinv_closed(n).unwrap().matrix
            * RMat::from_column_slice(n, 1, &c))
        .iter()
        .copied()
        .collect();
        let knots: Vec<usize> = (0..n).filter(|&i| c[i] != 0.0).collect();
        assert_eq!(degree_profile(&x, &knots), Some(0));
    }

    #[test]
    fn complete_graph_limits() {
        let n = 7;
        let g = build_circulant(&CirculantSpec::complete(n).unwrap());
        let c = greens_combination(&g, CombinationMode::Edge, &[0], &[1.0], 1).unwrap();
        let s = incidence(&g);
        for i in 0..n {
            assert_relative_eq!(c.signal[i], s[(0, i)] / n as f64, epsilon = 1e-13);
        }
    }

    #[test]
    fn exp_poly_samples() {
        let s = ExpPolySignal {
            n: 4,
            alpha: std::f64::consts::FRAC_PI_2,
            coeffs: vec![1.0, 1.0],
            sign: 1,
        };
        let x = s.sample();
        assert!((x[1] - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(s.degree(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn border_width(n_mult in 1usize..3, m in 1usize..5, k in 1usize..3) {
            let n = 16 * k * m * n_mult;
            let gens: Vec<usize> = (1..=m).collect();
            let spec = CirculantSpec::unweighted(n, &gens).unwrap();
            let ord = annihilation_order(&spec, AnalysisOperator::Laplacian { power: k }, 2 * k - 1).unwrap();
            prop_assert_eq!(ord, Some(2 * k - 1));
        }

        #[test]
        fn antisymmetric_differences(n in 6usize..30, j_frac in 0.0f64..1.0) {
            let j2 = ((n / 2) as f64 * j_frac) as usize;
            let j1 = n - 1 - j2;
            prop_assume!(j1 != j2);
            let l = lcycle_pinv_closed(n).unwrap().matrix;
            let d: Vec<f64> = (0..n).map(|i| l[(i, j1)] - l[(i, j2)]).collect();
            for i in 0..n {
                if i == j1 || i == j2 || n - 1 - i == j1 || n - 1 - i == j2 { continue; }
                prop_assert!((d[i] + d[n - 1 - i]).abs() < 1e-12);
            }
        }

        #[test]
        fn combinations_reproduce_patterns(n in 6usize..16, k in 1usize..3, mode_pick in 0usize..3, seed_idx in proptest::collection::vec(0usize..100, 1..4), w in proptest::collection::vec(-2.0f64..2.0, 3)) {
            let g = build_circulant(&CirculantSpec::unweighted(n, &[1, 2]).unwrap());
            let mode = [CombinationMode::Edge, CombinationMode::VertexIncidence, CombinationMode::VertexLaplacian][mode_pick];
            let limit = if mode == CombinationMode::Edge { g.edges().len() } else { n };
            let mut idx: Vec<usize> = seed_idx.iter().map(|i| i % limit).collect();
            idx.sort_unstable();
            idx.dedup();
            let weights = &w[..idx.len()];
            let c = greens_combination(&g, mode, &idx, weights, k).unwrap();
            prop_assert!(c.matches());
        }
    }
}
