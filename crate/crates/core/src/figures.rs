//! Series data for the Green's-function figures.

use serde_json::{json, Value};
use thiserror::Error;

use crate::circulant::generalized_laplacian_real;
use crate::graph::{CirculantSpec, GraphError};
use crate::greens::{
    inc_pinv, lalpha_cycle_inverse_closed, lalpha_cycle_pinv_closed, lalpha_inverse, lalpha_pinv,
    lap_pinv, lattice_alpha, lcycle_pinv_closed, palpha_inverse, pgs_inverse, GreensError,
};
use crate::matrix::{format_g17, real_part, RMat};
use crate::oracle::RankPolicy;
use crate::signals::degree_profile;
use crate::verify::Check;

/// Column shown in the single-column panels.
pub const FIGURE_COLUMN: usize = 30;
/// Off-lattice frequency of the invertible panels.
pub const OFF_LATTICE_ALPHA: f64 = 0.21;
/// Lattice index of the singular panels (`alpha = 4 pi / n`).
pub const LATTICE_K: usize = 2;
/// Columns compared in the column-difference panels.
pub const DIFFERENCE_COLUMNS: (usize, usize) = (20, 44);

/// Closed-form series must match within this absolute tolerance.
pub const SERIES_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure {0:?}; expected one of fig2a, fig2b, fig2c, fig3, fig4, fig5, fig6")]
    Unknown(String),
    #[error("figure needs n > {needed}, got {n}")]
    TooSmall { n: usize, needed: usize },
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureName {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureName {
    pub const ALL: [FigureName; 7] = [
        FigureName::Fig2a,
        FigureName::Fig2b,
        FigureName::Fig2c,
        FigureName::Fig3,
        FigureName::Fig4,
        FigureName::Fig5,
        FigureName::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig2a => "fig2a",
            FigureName::Fig2b => "fig2b",
            FigureName::Fig2c => "fig2c",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
        }
    }
}

impl std::str::FromStr for FigureName {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| FigureError::Unknown(s.to_string()))
    }
}

/// Named series over the vertex index `t`.
#[derive(Clone, Debug)]
pub struct FigureData {
    pub name: FigureName,
    pub n: usize,
    pub series: Vec<(String, Vec<f64>)>,
    pub checks: Vec<Check>,
}

impl FigureData {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|(s, _)| s == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (name, _) in &self.series {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in 0..self.n {
            out.push_str(&t.to_string());
            for (_, v) in &self.series {
                out.push(',');
                out.push_str(&format_g17(v[t]));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let series: serde_json::Map<String, Value> = self
            .series
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({ "figure": self.name.as_str(), "n": self.n, "series": series })
    }
}

fn column(m: &RMat, j: usize) -> Vec<f64> {
    m.column(j).iter().copied().collect()
}

/// `t~ = (t - j) mod n`, the index measured from column `j`.
fn shifted_index(n: usize, j: usize, t: usize) -> f64 {
    ((t + n - j % n) % n) as f64
}

/// Column `j` of the cycle `L_{C,alpha}^-1` in trigonometric form.
pub fn cycle_inverse_column_trig(n: usize, alpha: f64, j: usize) -> Vec<f64> {
    let cot = 1.0 / (alpha * n as f64 / 2.0).tan();
    (0..n)
        .map(|t| {
            let tt = shifted_index(n, j, t);
            -(cot * (alpha * tt).cos() + (alpha * tt).sin()) / (2.0 * alpha.sin())
        })
        .collect()
}

/// `L_{C,alpha}^+ (L_{C,alpha})_j = e_j - 2 cos(alpha t~) / n` for lattice alpha.
pub fn cycle_constrained_column(n: usize, alpha: f64, j: usize) -> Vec<f64> {
    (0..n)
        .map(|t| {
            let spike = if t == j { 1.0 } else { 0.0 };
            spike - 2.0 * (alpha * shifted_index(n, j, t)).cos() / n as f64
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn series_check(name: &str, got: &[f64], expected: &[f64]) -> Check {
    Check::within(name, 0.0, max_abs_diff(got, expected), SERIES_TOL)
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / m).collect()
    }
}

fn gens_label(spec: &CirculantSpec) -> String {
    spec.gens()
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join("_")
}

fn difference_panel(
    spec: &CirculantSpec,
    checks: &mut Vec<Check>,
) -> Result<Vec<(String, Vec<f64>)>, FigureError> {
    let (a, b) = DIFFERENCE_COLUMNS;
    let l = lap_pinv(spec)?.matrix;
    let ca = column(&l, a);
    let cb = column(&l, b);
    let diff: Vec<f64> = ca.iter().zip(&cb).map(|(x, y)| x - y).collect();
    let tag = gens_label(spec);
    if spec.gens() == [1] {
        let degree = degree_profile(&diff, &[a, b]).map_or(-1.0, |d| d as f64);
        checks.push(Check::exact(
            &format!("S{tag}_difference_degree"),
            1.0,
            degree,
        ));
    }
    Ok(vec![
        (format!("S{tag}_col{a}"), ca),
        (format!("S{tag}_col{b}"), cb),
        (format!("S{tag}_col{a}_minus_col{b}"), diff),
    ])
}

/// Builds the series of one figure. `spec` supplies `n` and the generating
/// set used by the graph panels; the cycle panels always use the cycle on
/// the same `n`.
pub fn figure(
    name: FigureName,
    spec: &CirculantSpec,
    policy: &RankPolicy,
) -> Result<FigureData, FigureError> {
    let n = spec.n();
    let j = FIGURE_COLUMN;
    let needed = match name {
        FigureName::Fig2a | FigureName::Fig2b => DIFFERENCE_COLUMNS.1,
        FigureName::Fig2c => 2,
        _ => j,
    };
    if n <= needed || (name == FigureName::Fig4 || name == FigureName::Fig5) && 2 * LATTICE_K >= n {
        return Err(FigureError::TooSmall { n, needed });
    }
    let mut checks = Vec::new();
    let series = match name {
        FigureName::Fig2a => difference_panel(&CirculantSpec::cycle(n)?, &mut checks)?,
        FigureName::Fig2b => difference_panel(spec, &mut checks)?,
        FigureName::Fig2c => {
            let mut out = Vec::new();
            let mut seen = Vec::new();
            for s in [
                CirculantSpec::cycle(n)?,
                spec.clone(),
                CirculantSpec::complete(n)?,
            ] {
                let label = if s.gens().len() == n / 2 {
                    "complete".to_string()
                } else {
                    format!("S{}", gens_label(&s))
                };
                if seen.contains(&label) {
                    continue;
                }
                let col = column(&inc_pinv(&s)?.matrix, 0);
                if label == "complete" {
                    // Complete graph: S^+ = S^T / n, so column 0 is (e_0 - e_1) / n.
                    let mut expected = vec![0.0; n];
                    expected[0] = 1.0 / n as f64;
                    expected[1] = -1.0 / n as f64;
                    checks.push(series_check("complete_column_closed_form", &col, &expected));
                }
                seen.push(label.clone());
                out.push((format!("{label}_incidence_pinv_col0"), col));
            }
            out
        }
        FigureName::Fig3 => {
            let a = OFF_LATTICE_ALPHA;
            let inv = real_part(&lalpha_inverse(spec, a, policy)?.matrix);
            let lca = generalized_laplacian_real(&CirculantSpec::cycle(n)?, a);
            let constrained = column(&(&inv * &lca), j);
            let cycle = column(&real_part(&lalpha_cycle_inverse_closed(n, a)?.matrix), j);
            let trig = cycle_inverse_column_trig(n, a, j);
            checks.push(series_check("cycle_inverse_trig_form", &cycle, &trig));
            let (p_inv, _) = palpha_inverse(spec, a, policy)?;
            checks.push(series_check(
                "constrained_equals_factor_column",
                &constrained,
                &column(&p_inv, j),
            ));
            vec![
                (format!("inverse_col{j}"), column(&inv, j)),
                (format!("inverse_times_cycle_col{j}"), constrained),
                (format!("cycle_inverse_col{j}"), cycle),
            ]
        }
        FigureName::Fig4 => {
            let a = lattice_alpha(n, LATTICE_K);
            let pinv = real_part(&lalpha_pinv(spec, LATTICE_K, policy)?.matrix);
            let lca = generalized_laplacian_real(&CirculantSpec::cycle(n)?, a);
            let cycle_pinv = real_part(&lalpha_cycle_pinv_closed(n, LATTICE_K)?.matrix);
            let cycle_constrained = column(&(&cycle_pinv * &lca), j);
            checks.push(series_check(
                "cycle_constrained_closed_form",
                &cycle_constrained,
                &cycle_constrained_column(n, a, j),
            ));
            let (p_inv, _) = palpha_inverse(spec, a, policy)?;
            vec![
                (format!("pinv_col{j}"), column(&pinv, j)),
                (
                    format!("pinv_times_cycle_col{j}"),
                    column(&(&pinv * &lca), j),
                ),
                (format!("cycle_pinv_times_cycle_col{j}"), cycle_constrained),
                (format!("factor_inverse_col{j}"), column(&p_inv, j)),
            ]
        }
        FigureName::Fig5 => {
            let a1 = lattice_alpha(n, LATTICE_K);
            let cycle_pinv = real_part(&lalpha_cycle_pinv_closed(n, LATTICE_K)?.matrix);
            let lca = generalized_laplacian_real(&CirculantSpec::cycle(n)?, a1);
            let singular = column(&(&cycle_pinv * &lca), j);
            checks.push(series_check(
                "singular_closed_form",
                &singular,
                &cycle_constrained_column(n, a1, j),
            ));
            let a2 = OFF_LATTICE_ALPHA;
            let regular = column(&real_part(&lalpha_cycle_inverse_closed(n, a2)?.matrix), j);
            checks.push(series_check(
                "regular_trig_form",
                &regular,
                &cycle_inverse_column_trig(n, a2, j),
            ));
            vec![
                (format!("singular_constrained_col{j}"), singular),
                (
                    format!("regular_inverse_col{j}_normalized"),
                    normalized(&regular),
                ),
            ]
        }
        FigureName::Fig6 => {
            let l = lap_pinv(spec)?.matrix;
            let lc = crate::graph::build_circulant(&CirculantSpec::cycle(n)?).laplacian();
            let cycle_constrained = column(&(lcycle_pinv_closed(n)?.matrix * &lc), j);
            let centered: Vec<f64> = (0..n)
                .map(|t| if t == j { 1.0 } else { 0.0 } - 1.0 / n as f64)
                .collect();
            checks.push(series_check(
                "cycle_constrained_closed_form",
                &cycle_constrained,
                &centered,
            ));
            let p_inv = pgs_inverse(spec)?;
            vec![
                (format!("pinv_col{j}"), column(&l, j)),
                (format!("pinv_times_cycle_col{j}"), column(&(&l * &lc), j)),
                (format!("cycle_pinv_times_cycle_col{j}"), cycle_constrained),
                (format!("factor_inverse_col{j}"), column(&p_inv, j)),
            ]
        }
    };
    Ok(FigureData {
        name,
        n,
        series,
        checks,
    })
}
