//! Analysis (cosparse) and synthesis (sparse) subspace models: constraint
//! matrices, nullspace bases, containment, subspace counts and bounds.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circulant::generalized_laplacian_real;
use crate::graph::{build_circulant, incidence, CirculantSpec, Graph, GraphError};
use crate::greens::{
    e_alpha, graph_laplacian_pinv, lalpha_inverse, lalpha_pinv, lattice_alpha, AlphaRoute,
    GreensError,
};
use crate::matrix::{hcat, matrix_power, select_columns, selector, to_complex, CMat, RMat};
use crate::oracle::{
    containment_angle, nullspace, numeric_rank, orthonormal_basis, svd_pinv, OracleError,
    RankPolicy, ANGLE_TOL,
};
use crate::parallel::{self, Execution};
use crate::subspace::SubspaceBasis;

/// Default cap on the number of cosupports the brute-force enumerator visits.
pub const ENUMERATION_BUDGET: u64 = 100_000;

#[derive(Debug, Error)]
pub enum UosError {
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("support must be nonempty")]
    EmptySupport,
    #[error("graph is not connected")]
    NotConnected,
    #[error("{what}: got {got}")]
    Domain { what: &'static str, got: String },
    #[error("{count} cosupports exceed the enumeration budget {budget}")]
    BudgetExceeded { count: u64, budget: u64 },
    #[error("constructed basis has rank {constructed}, numeric nullspace has dimension {numeric}")]
    Certification { constructed: usize, numeric: usize },
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Split of `{0..n}` into cosupport `lambda` and support `lambda_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosupportSpec {
    n: usize,
    lambda: Vec<usize>,
    lambda_c: Vec<usize>,
    per_component: Option<Vec<ComponentSplit>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSplit {
    pub vertices: Vec<usize>,
    pub lambda: Vec<usize>,
    pub lambda_c: Vec<usize>,
}

impl CosupportSpec {
    pub fn from_support(n: usize, lambda_c: &[usize]) -> Result<Self, UosError> {
        let mut mark = vec![false; n];
        for &i in lambda_c {
            if i >= n {
                return Err(UosError::IndexOutOfRange { index: i, n });
            }
            if mark[i] {
                return Err(UosError::DuplicateIndex(i));
            }
            mark[i] = true;
        }
        let lambda = (0..n).filter(|&i| !mark[i]).collect();
        let lambda_c = (0..n).filter(|&i| mark[i]).collect();
        Ok(Self {
            n,
            lambda,
            lambda_c,
            per_component: None,
        })
    }

    pub fn from_cosupport(n: usize, lambda: &[usize]) -> Result<Self, UosError> {
        let spec = Self::from_support(n, lambda)?;
        Ok(Self {
            n,
            lambda: spec.lambda_c,
            lambda_c: spec.lambda,
            per_component: None,
        })
    }

    /// Records the split restricted to each component of `g`.
    pub fn with_components(mut self, g: &Graph) -> Self {
        let owner = g.component_of();
        let splits = g
            .components()
            .iter()
            .enumerate()
            .map(|(k, c)| ComponentSplit {
                vertices: c.clone(),
                lambda: self
                    .lambda
                    .iter()
                    .copied()
                    .filter(|&i| owner[i] == k)
                    .collect(),
                lambda_c: self
                    .lambda_c
                    .iter()
                    .copied()
                    .filter(|&i| owner[i] == k)
                    .collect(),
            })
            .collect();
        self.per_component = Some(splits);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &[usize] {
        &self.lambda
    }

    pub fn lambda_c(&self) -> &[usize] {
        &self.lambda_c
    }

    pub fn per_component(&self) -> Option<&[ComponentSplit]> {
        self.per_component.as_deref()
    }
}

/// Zero-sum constraint matrix (`m x (m-1)`): column `j` has `m-1-j` at row
/// `j` and `-1` below it.
pub fn constraint_matrix(m: usize) -> RMat {
    if m < 2 {
        return RMat::zeros(m, 0);
    }
    RMat::from_fn(m, m - 1, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => (m - 1 - j) as f64,
        std::cmp::Ordering::Greater => -1.0,
        std::cmp::Ordering::Less => 0.0,
    })
}

/// `Psi_{Lambda^c}^T W` assembled with one constraint block per component.
fn block_sources(g: &Graph, cs: &CosupportSpec) -> RMat {
    let owner = g.component_of();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for k in 0..g.components().len() {
        let idx: Vec<usize> = cs
            .lambda_c
            .iter()
            .copied()
            .filter(|&i| owner[i] == k)
            .collect();
        let w = constraint_matrix(idx.len());
        for c in 0..w.ncols() {
            let mut v = vec![0.0; g.n()];
            for (r, &i) in idx.iter().enumerate() {
                v[i] = w[(r, c)];
            }
            cols.push(v);
        }
    }
    RMat::from_fn(g.n(), cols.len(), |i, j| cols[j][i])
}

fn check_dims(g: &Graph, cs: &CosupportSpec) -> Result<(), UosError> {
    if cs.n != g.n() {
        return Err(UosError::Domain {
            what: "cosupport dimension differs from graph",
            got: cs.n.to_string(),
        });
    }
    Ok(())
}

/// Nullspace of `Psi_Lambda L`: component indicators plus `L^+ Psi^T W`.
pub fn analysis_nullspace(
    g: &Graph,
    cs: &CosupportSpec,
    policy: &RankPolicy,
) -> Result<SubspaceBasis<f64>, UosError> {
    check_dims(g, cs)?;
    if cs.lambda_c.is_empty() {
        return Err(UosError::EmptySupport);
    }
    let l_pinv = graph_laplacian_pinv(g)?.matrix;
    let constrained = l_pinv * block_sources(g, cs);
    let translation = g.component_indicators();
    let rank = numeric_rank(&hcat(&translation, &constrained), policy)?;
    let numeric = nullspace(&(selector(g.n(), &cs.lambda) * g.laplacian()), policy)?.certified_rank;
    if rank != numeric {
        return Err(UosError::Certification {
            constructed: rank,
            numeric,
        });
    }
    Ok(SubspaceBasis::new(constrained, translation, rank))
}

/// Constrained block as `L^+ (e_a - e_j)`, anchored at `a = min(support)`.
pub fn analysis_nullspace_sparse_form(g: &Graph, cs: &CosupportSpec) -> Result<RMat, UosError> {
    check_dims(g, cs)?;
    if !g.is_connected() {
        return Err(UosError::NotConnected);
    }
    if cs.lambda_c.len() < 2 {
        return Err(UosError::Domain {
            what: "sparse form needs at least two support indices",
            got: cs.lambda_c.len().to_string(),
        });
    }
    let l_pinv = graph_laplacian_pinv(g)?.matrix;
    let a = cs.lambda_c[0];
    let rest = &cs.lambda_c[1..];
    Ok(RMat::from_fn(g.n(), rest.len(), |i, c| {
        l_pinv[(i, a)] - l_pinv[(i, rest[c])]
    }))
}

/// Nullspace of `Psi_Lambda S` for an edge cosupport (edge indices into the
/// canonical edge list). Translation: indicators of the components of `g`;
/// constrained block: `S^+ S 1_C` for the components `C` of the kept-edge
/// graph, one per component of `g` left out.
pub fn incidence_nullspace(
    g: &Graph,
    edge_cosupport: &[usize],
    policy: &RankPolicy,
) -> Result<SubspaceBasis<f64>, UosError> {
    let kept = g.keep_edges(edge_cosupport)?;
    let s = incidence(g);
    let s_pinv = graph_laplacian_pinv(g)?.matrix * s.transpose();
    let proj = &s_pinv * &s;
    let owner = g.component_of();
    let mut last_seen = vec![None; g.components().len()];
    for (c, comp) in kept.components().iter().enumerate() {
        last_seen[owner[comp[0]]] = Some(c);
    }
    let chosen: Vec<usize> = (0..kept.components().len())
        .filter(|c| !last_seen.contains(&Some(*c)))
        .collect();
    let ind = kept.component_indicators();
    let constrained = proj * select_columns(&ind, &chosen);
    let translation = g.component_indicators();
    let rank = numeric_rank(&hcat(&translation, &constrained), policy)?;
    let psi = selector(s.nrows(), edge_cosupport);
    let numeric = nullspace(&(psi * s), policy)?.certified_rank;
    if rank != numeric {
        return Err(UosError::Certification {
            constructed: rank,
            numeric,
        });
    }
    Ok(SubspaceBasis::new(constrained, translation, rank))
}

fn exponential_constraint(
    cs: &CosupportSpec,
    alpha: f64,
    policy: &RankPolicy,
) -> Result<RMat, UosError> {
    let e = e_alpha(cs.n, alpha);
    let m = selector(cs.n, &cs.lambda) * e * selector(cs.n, &cs.lambda_c).transpose();
    Ok(nullspace(&m, policy)?.basis)
}

/// Nullspace of `Psi_Lambda E_alpha Psi_{Lambda^c}^T` at `alpha = 2 pi k / n`.
pub fn walpha_constraint(
    cs: &CosupportSpec,
    k: usize,
    policy: &RankPolicy,
) -> Result<RMat, UosError> {
    let n = cs.n;
    let k = k % n;
    if k == 0 || 2 * k == n {
        return Err(GreensError::UnsupportedAlpha(format!("2*pi*{k}/{n} is 0 or pi")).into());
    }
    exponential_constraint(cs, lattice_alpha(n, k), policy)
}

fn exponentials(n: usize, alpha: f64) -> CMat {
    CMat::from_fn(n, 2, |t, c| {
        let sign = if c == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(1.0, sign * alpha * t as f64)
    })
}

/// Nullspace of `Psi_Lambda L_alpha`, routed by where `alpha` sits relative
/// to the frequency lattice.
pub fn analysis_nullspace_alpha(
    spec: &CirculantSpec,
    cs: &CosupportSpec,
    alpha: f64,
    policy: &RankPolicy,
) -> Result<SubspaceBasis<Complex64>, UosError> {
    let n = spec.n();
    if cs.n != n {
        return Err(UosError::Domain {
            what: "cosupport dimension differs from graph",
            got: cs.n.to_string(),
        });
    }
    if cs.lambda_c.is_empty() {
        return Err(UosError::EmptySupport);
    }
    let psi_c = to_complex(&selector(n, &cs.lambda_c).transpose());
    let out = match AlphaRoute::classify(n, alpha) {
        AlphaRoute::Zero => {
            let b = analysis_nullspace(&build_circulant(spec), cs, policy)?;
            return Ok(SubspaceBasis::new(
                to_complex(&b.basis),
                to_complex(&b.translation),
                b.certified_rank,
            ));
        }
        AlphaRoute::OffLattice => {
            let inv = lalpha_inverse(spec, alpha, policy)?.matrix;
            let basis = inv * psi_c;
            let rank = numeric_rank(&basis, policy)?;
            SubspaceBasis::plain(basis, rank)
        }
        AlphaRoute::Pi => {
            let pinv = lalpha_pinv(spec, n / 2, policy)?.matrix;
            let w = to_complex(&exponential_constraint(cs, std::f64::consts::PI, policy)?);
            let translation = CMat::from_fn(n, 1, |t, _| {
                Complex64::new(if t % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            });
            let constrained = pinv * psi_c * w;
            let rank = numeric_rank(&hcat(&translation, &constrained), policy)?;
            SubspaceBasis::new(constrained, translation, rank)
        }
        AlphaRoute::Lattice(k) => {
            let pinv = lalpha_pinv(spec, k, policy)?.matrix;
            let w = to_complex(&walpha_constraint(cs, k, policy)?);
            let translation = exponentials(n, lattice_alpha(n, k));
            let constrained = pinv * psi_c * w;
            let rank = numeric_rank(&hcat(&translation, &constrained), policy)?;
            SubspaceBasis::new(constrained, translation, rank)
        }
    };
    let op = selector(n, &cs.lambda) * generalized_laplacian_real(spec, alpha);
    let numeric = nullspace(&op, policy)?.certified_rank;
    if out.certified_rank != numeric {
        return Err(UosError::Certification {
            constructed: out.certified_rank,
            numeric,
        });
    }
    Ok(out)
}

/// `span((L^+)^k e_j, j in support)`.
pub fn synthesis_subspace(
    g: &Graph,
    support: &[usize],
    power: usize,
    policy: &RankPolicy,
) -> Result<SubspaceBasis<f64>, UosError> {
    for &j in support {
        if j >= g.n() {
            return Err(UosError::IndexOutOfRange { index: j, n: g.n() });
        }
    }
    let dict = matrix_power(&graph_laplacian_pinv(g)?.matrix, power);
    let basis = select_columns(&dict, support);
    let rank = numeric_rank(&basis, policy)?;
    Ok(SubspaceBasis::plain(basis, rank))
}

/// Outcome of comparing the analysis subspace with the synthesis subspace
/// on the same support.
#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    /// Analysis subspace with the constant direction projected out lies in
    /// the synthesis subspace.
    pub projected_contained: bool,
    pub projected_angle: f64,
    /// The raw analysis subspace (constant direction included) lies in it.
    pub unprojected_contained: bool,
    pub unprojected_angle: f64,
    /// Every constrained generator is orthogonal to the constant vector.
    pub constrained_orthogonal: bool,
    pub full_space: bool,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.projected_contained && !self.unprojected_contained && self.constrained_orthogonal
    }
}

pub fn containment_check(
    g: &Graph,
    cs: &CosupportSpec,
    policy: &RankPolicy,
) -> Result<ContainmentReport, UosError> {
    if !g.is_connected() {
        return Err(UosError::NotConnected);
    }
    let n = g.n();
    let analysis = analysis_nullspace(g, cs, policy)?;
    let synthesis = synthesis_subspace(g, &cs.lambda_c, 1, policy)?;
    let centering = RMat::identity(n, n) - RMat::from_element(n, n, 1.0 / n as f64);
    // Centering can shrink a direction to roundoff, so rank the projection
    // against the unit scale of an orthonormal basis.
    let q = orthonormal_basis(&analysis.combined(), policy)?;
    let projected = centering * &q;
    let unit_scale = RankPolicy {
        abs_floor: policy.threshold(n, q.ncols(), 1.0),
        ..*policy
    };
    let projected_angle = containment_angle(&projected, &synthesis.basis, &unit_scale)?;
    let unprojected_angle = containment_angle(&analysis.combined(), &synthesis.basis, policy)?;
    let constrained_orthogonal = analysis
        .basis
        .column_iter()
        .all(|c| c.sum().abs() <= 1e-9 * c.norm().max(f64::MIN_POSITIVE) * (n as f64).sqrt());
    Ok(ContainmentReport {
        projected_contained: projected_angle < ANGLE_TOL,
        projected_angle,
        unprojected_contained: unprojected_angle < ANGLE_TOL,
        unprojected_angle,
        constrained_orthogonal,
        full_space: cs.lambda_c.len() == n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Synthesis,
    Analysis,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Synthesis => "synthesis",
            Model::Analysis => "analysis",
        }
    }
}

/// Restriction on the per-component support sizes `|Lambda^c_i|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SupportConstraint {
    pub min_per_component: usize,
}

impl SupportConstraint {
    pub fn at_least(m: usize) -> Self {
        Self {
            min_per_component: m,
        }
    }

    /// With at least two support indices in every component, the analysis
    /// rows report the constrained dimension separately from the nullspace.
    pub fn splits_nullspace(&self) -> bool {
        self.min_per_component >= 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub model: Model,
    pub dimension: usize,
    pub count: u64,
    /// Nullspace dimension reported apart from `dimension` (zero otherwise).
    pub nullspace_dim: usize,
}

impl TableRow {
    pub fn total_dimension(&self) -> usize {
        self.dimension + self.nullspace_dim
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn compositions(sizes: &[usize], k: usize, min: usize) -> Vec<Vec<usize>> {
    fn rec(sizes: &[usize], k: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if sizes.is_empty() {
            if k == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest_cap: usize = sizes[1..].iter().sum();
        for ki in min..=sizes[0].min(k) {
            if k - ki > rest_cap {
                continue;
            }
            cur.push(ki);
            rec(&sizes[1..], k - ki, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(sizes, k, min, &mut Vec::new(), &mut out);
    out
}

/// Number of distinct analysis and synthesis subspaces, by dimension, over
/// all supports of size `k` on a graph with the given component sizes.
///
/// A component with at most one support index contributes only its
/// indicator to the analysis subspace, so such components are merged before
/// counting; on the synthesis side a component saturates at `N_i - 1`.
pub fn count_subspaces(
    sizes: &[usize],
    k: usize,
    constraint: SupportConstraint,
) -> Result<Vec<TableRow>, UosError> {
    let total: usize = sizes.iter().sum();
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(UosError::Domain {
            what: "component sizes must be positive",
            got: format!("{sizes:?}"),
        });
    }
    if k > total {
        return Err(UosError::Domain {
            what: "support size exceeds vertex count",
            got: k.to_string(),
        });
    }
    let t = sizes.len();
    let comps = compositions(sizes, k, constraint.min_per_component);
    let mut rows = Vec::new();
    for model in [Model::Synthesis, Model::Analysis] {
        let mut seen = BTreeSet::new();
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for c in &comps {
            let signature: Vec<usize> = match model {
                Model::Analysis => c.iter().map(|&ki| if ki >= 2 { ki } else { 1 }).collect(),
                Model::Synthesis => c
                    .iter()
                    .zip(sizes)
                    .map(|(&ki, &ni)| ki.min(ni - 1))
                    .collect(),
            };
            if !seen.insert(signature) {
                continue;
            }
            let (dim, count) = match model {
                Model::Analysis => {
                    let dim = t + c
                        .iter()
                        .filter(|&&ki| ki >= 2)
                        .map(|&ki| ki - 1)
                        .sum::<usize>();
                    let count: u64 = c
                        .iter()
                        .zip(sizes)
                        .filter(|(&ki, _)| ki >= 2)
                        .map(|(&ki, &ni)| binomial(ni, ki))
                        .product();
                    (dim, count)
                }
                Model::Synthesis => {
                    let dim = c.iter().zip(sizes).map(|(&ki, &ni)| ki.min(ni - 1)).sum();
                    let count: u64 = c
                        .iter()
                        .zip(sizes)
                        .map(|(&ki, &ni)| if ki + 1 >= ni { 1 } else { binomial(ni, ki) })
                        .product();
                    (dim, count)
                }
            };
            *hist.entry(dim).or_default() += count;
        }
        let split = model == Model::Analysis && constraint.splits_nullspace();
        for (dim, count) in hist {
            let (dimension, nullspace_dim) = if split { (dim - t, t) } else { (dim, 0) };
            rows.push(TableRow {
                model,
                dimension,
                count,
                nullspace_dim,
            });
        }
    }
    Ok(rows)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Histogram (total dimension -> number of distinct subspaces) obtained by
/// visiting every support of size `k`, computing the subspace numerically
/// and merging subspaces whose principal angles are all below 1e-8.
pub fn enumerate_subspaces_bruteforce(
    g: &Graph,
    k: usize,
    model: Model,
    constraint: SupportConstraint,
    budget: u64,
    exec: Execution,
    policy: &RankPolicy,
) -> Result<BTreeMap<usize, usize>, UosError> {
    let n = g.n();
    let count = binomial(n, k);
    if count > budget {
        return Err(UosError::BudgetExceeded { count, budget });
    }
    let owner = g.component_of();
    let t = g.components().len();
    let supports: Vec<Vec<usize>> = combinations(n, k)
        .into_iter()
        .filter(|s| {
            let mut per = vec![0usize; t];
            for &i in s {
                per[owner[i]] += 1;
            }
            per.iter().all(|&c| c >= constraint.min_per_component)
        })
        .collect();
    let l = g.laplacian();
    let l_pinv = svd_pinv(&l, policy)?;
    let bases: Vec<Result<RMat, OracleError>> = parallel::map(&supports, exec, |s| match model {
        Model::Analysis => {
            let cs = CosupportSpec::from_support(n, s).expect("valid support");
            nullspace(&(selector(n, cs.lambda()) * &l), policy).map(|b| b.basis)
        }
        Model::Synthesis => orthonormal_basis(&select_columns(&l_pinv, s), policy),
    });
    let mut reps: BTreeMap<usize, Vec<RMat>> = BTreeMap::new();
    for b in bases {
        let b = b?;
        let bucket = reps.entry(b.ncols()).or_default();
        let mut duplicate = false;
        for r in bucket.iter() {
            if containment_angle(&b, r, policy)? < ANGLE_TOL {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            bucket.push(b);
        }
    }
    Ok(reps
        .into_iter()
        .map(|(d, v)| (d, v.len()))
        .filter(|(_, c)| *c > 0)
        .collect())
}

/// Worst-case nullspace dimension over cosupports of size at least `l`.
pub fn kappa(l: usize, component_sizes: &[usize]) -> Result<usize, UosError> {
    let n: usize = component_sizes.iter().sum();
    if n < 2 || l + 1 >= n {
        return Err(UosError::Domain {
            what: "kappa needs l < n - 1",
            got: format!("l = {l}, n = {n}"),
        });
    }
    let c = component_sizes.len();
    Ok(if c <= 1 { n - l } else { n - l + c - 1 })
}

/// Measurements sufficient for uniqueness of a `k`-sparse analysis signal.
pub fn min_measurements(k: usize, c: usize, constrained: bool) -> Result<usize, UosError> {
    if k <= 1 {
        return Err(UosError::Domain {
            what: "bound needs k > 1",
            got: k.to_string(),
        });
    }
    if c == 0 {
        return Err(UosError::Domain {
            what: "component count must be positive",
            got: c.to_string(),
        });
    }
    Ok(match (c, constrained) {
        (1, _) => 2 * k - 1,
        (c, false) => 2 * k - 2 + c,
        (c, true) => (2 * k).saturating_sub(c),
    })
}

/// Membership in the structured zero-sum model: nonzeros inside the
/// declared block supports, each used block summing to zero and having more
/// than one admissible index.
pub fn structured_membership(c: &[f64], block_supports: &[Vec<usize>]) -> bool {
    let scale = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return true;
    }
    let tol = 1e-10 * scale;
    let mut covered = vec![false; c.len()];
    for block in block_supports {
        for &i in block {
            if i < c.len() {
                covered[i] = true;
            }
        }
    }
    if c.iter()
        .zip(&covered)
        .any(|(x, &cov)| x.abs() > tol && !cov)
    {
        return false;
    }
    block_supports.iter().all(|block| {
        let used = block.iter().any(|&i| i < c.len() && c[i].abs() > tol);
        if !used {
            return true;
        }
        let sum: f64 = block.iter().filter(|&&i| i < c.len()).map(|&i| c[i]).sum();
        block.len() > 1 && sum.abs() <= tol
    })
}
