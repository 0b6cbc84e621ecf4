//! Undirected weighted graphs, circulant construction, Laplacian and
//! oriented incidence matrix.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::RMat;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph needs at least {min} vertices, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("generator 0 is not allowed")]
    ZeroGenerator,
    #[error("generator {gen} exceeds n/2 for n = {n}")]
    GeneratorTooLarge { gen: usize, n: usize },
    #[error("duplicate generator {0}")]
    DuplicateGenerator(usize),
    #[error("{gens} generators but {weights} weights")]
    WeightCount { gens: usize, weights: usize },
    #[error("weight {weight} for generator {gen} is not positive")]
    NonPositiveWeight { gen: usize, weight: f64 },
    #[error("connectivity requires generator 1 in the generating set")]
    MissingUnitGenerator,
    #[error("adjacency must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("adjacency entry ({i},{j}) is invalid: {reason}")]
    BadAdjacency {
        i: usize,
        j: usize,
        reason: &'static str,
    },
    #[error("edge ({i},{j}) is invalid: {reason}")]
    BadEdge {
        i: usize,
        j: usize,
        reason: &'static str,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Circulant generating set with per-generator weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCirculant", into = "RawCirculant")]
pub struct CirculantSpec {
    n: usize,
    gens: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCirculant {
    n: usize,
    gens: Vec<usize>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawCirculant> for CirculantSpec {
    type Error = GraphError;
    fn try_from(raw: RawCirculant) -> Result<Self, GraphError> {
        let weights = raw.weights.unwrap_or_else(|| vec![1.0; raw.gens.len()]);
        CirculantSpec::new(raw.n, raw.gens, weights)
    }
}

impl From<CirculantSpec> for RawCirculant {
    fn from(s: CirculantSpec) -> Self {
        RawCirculant {
            n: s.n,
            gens: s.gens,
            weights: Some(s.weights),
        }
    }
}

impl CirculantSpec {
    /// Generators are sorted (weights follow their generator).
    pub fn new(n: usize, gens: Vec<usize>, weights: Vec<f64>) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::TooSmall { n, min: 3 });
        }
        if gens.len() != weights.len() {
            return Err(GraphError::WeightCount {
                gens: gens.len(),
                weights: weights.len(),
            });
        }
        let mut pairs: Vec<(usize, f64)> = gens.into_iter().zip(weights).collect();
        pairs.sort_by_key(|&(g, _)| g);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::DuplicateGenerator(w[0].0));
            }
        }
        for &(g, w) in &pairs {
            if g == 0 {
                return Err(GraphError::ZeroGenerator);
            }
            if 2 * g > n {
                return Err(GraphError::GeneratorTooLarge { gen: g, n });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::NonPositiveWeight { gen: g, weight: w });
            }
        }
        let (gens, weights) = pairs.into_iter().unzip();
        Ok(Self { n, gens, weights })
    }

    pub fn unweighted(n: usize, gens: &[usize]) -> Result<Self, GraphError> {
        Self::new(n, gens.to_vec(), vec![1.0; gens.len()])
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        Self::unweighted(n, &[1])
    }

    /// All generators 1..=n/2 with unit weight.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let gens: Vec<usize> = (1..=n / 2).collect();
        Self::unweighted(n, &gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest generator.
    pub fn bandwidth(&self) -> usize {
        *self.gens.last().expect("nonempty generating set")
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        if self.gens.first() == Some(&1) {
            Ok(())
        } else {
            Err(GraphError::MissingUnitGenerator)
        }
    }

    /// Edge weight at circular offset `s` (zero if `s` is not a generator).
    pub fn weight(&self, s: usize) -> f64 {
        self.gens
            .iter()
            .position(|&g| g == s)
            .map_or(0.0, |k| self.weights[k])
    }

    /// Coefficient of `(2 - z^s - z^-s)` in the Laplacian symbol. Equals the
    /// edge weight except for `s = n/2`, whose two offsets coincide.
    pub fn symbol_weight(&self, s: usize) -> f64 {
        let w = self.weight(s);
        if 2 * s == self.n {
            w / 2.0
        } else {
            w
        }
    }

    /// Connectivity by the gcd criterion.
    pub fn gcd_connected(&self) -> bool {
        self.gens.iter().fold(self.n, |g, &s| gcd(g, s)) == 1
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    adjacency: RMat,
    edges: Vec<Edge>,
    components: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn from_adjacency(adjacency: RMat) -> Result<Self, GraphError> {
        let (rows, cols) = adjacency.shape();
        if rows != cols {
            return Err(GraphError::NotSquare { rows, cols });
        }
        let n = rows;
        let mut edges = Vec::new();
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(GraphError::BadAdjacency {
                    i,
                    j: i,
                    reason: "nonzero diagonal",
                });
            }
            for j in (i + 1)..n {
                let w = adjacency[(i, j)];
                if w != adjacency[(j, i)] {
                    return Err(GraphError::BadAdjacency {
                        i,
                        j,
                        reason: "not symmetric",
                    });
                }
                if w < 0.0 || !w.is_finite() {
                    return Err(GraphError::BadAdjacency {
                        i,
                        j,
                        reason: "negative or non-finite weight",
                    });
                }
                if w > 0.0 {
                    edges.push(Edge { i, j, weight: w });
                }
            }
        }
        let components = bfs_components(n, &edges);
        Ok(Self {
            n,
            adjacency,
            edges,
            components,
        })
    }

    /// Edges may be given in any order and orientation; each unordered pair once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut a = RMat::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(GraphError::BadEdge {
                    i,
                    j,
                    reason: "vertex out of range",
                });
            }
            if i == j {
                return Err(GraphError::BadEdge {
                    i,
                    j,
                    reason: "self loop",
                });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::BadEdge {
                    i,
                    j,
                    reason: "weight must be positive",
                });
            }
            if a[(i, j)] != 0.0 {
                return Err(GraphError::BadEdge {
                    i,
                    j,
                    reason: "duplicate edge",
                });
            }
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        Self::from_adjacency(a)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Self::from_edges(raw.n, &raw.edges)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|e| (e.i, e.j, e.weight)).collect(),
        };
        serde_json::to_value(raw).expect("graph serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &RMat {
        &self.adjacency
    }

    /// Canonical edge list: `i < j`, lexicographic.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn component_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n];
        for (k, c) in self.components.iter().enumerate() {
            for &v in c {
                owner[v] = k;
            }
        }
        owner
    }

    pub fn laplacian(&self) -> RMat {
        laplacian(self)
    }

    pub fn incidence(&self) -> RMat {
        incidence(self)
    }

    /// Indicator vectors of the components, one column each.
    pub fn component_indicators(&self) -> RMat {
        let mut m = RMat::zeros(self.n, self.components.len());
        for (k, c) in self.components.iter().enumerate() {
            for &v in c {
                m[(v, k)] = 1.0;
            }
        }
        m
    }

    /// Subgraph on the same vertices keeping only the listed edge indices.
    pub fn keep_edges(&self, keep: &[usize]) -> Result<Self, GraphError> {
        let mut list = Vec::with_capacity(keep.len());
        for &k in keep {
            let e = self.edges.get(k).ok_or(GraphError::BadEdge {
                i: k,
                j: k,
                reason: "edge index out of range",
            })?;
            list.push((e.i, e.j, e.weight));
        }
        Self::from_edges(self.n, &list)
    }
}

fn bfs_components(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut nbrs = vec![Vec::new(); n];
    for e in edges {
        nbrs[e.i].push(e.j);
        nbrs[e.j].push(e.i);
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &nbrs[v] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

pub fn build_circulant(spec: &CirculantSpec) -> Graph {
    let n = spec.n();
    let mut a = RMat::zeros(n, n);
    for (&s, &d) in spec.gens().iter().zip(spec.weights()) {
        for i in 0..n {
            a[(i, (i + s) % n)] = d;
            a[(i, (i + n - s) % n)] = d;
        }
    }
    Graph::from_adjacency(a).expect("circulant adjacency is valid by construction")
}

/// `L = D - A`.
pub fn laplacian(g: &Graph) -> RMat {
    let a = g.adjacency();
    let mut l = -a.clone();
    for i in 0..g.n() {
        l[(i, i)] = a.row(i).sum();
    }
    l
}

/// Row per canonical edge `(i, j)`: `+sqrt(w)` at `i`, `-sqrt(w)` at `j`.
pub fn incidence(g: &Graph) -> RMat {
    let mut s = RMat::zeros(g.edges().len(), g.n());
    for (k, e) in g.edges().iter().enumerate() {
        let r = e.weight.sqrt();
        s[(k, e.i)] = r;
        s[(k, e.j)] = -r;
    }
    s
}

pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    g.components().to_vec()
}

/// Block-diagonal union; vertices of the k-th graph are offset by the sizes
/// of the graphs before it.
pub fn disjoint_union(gs: &[Graph]) -> Graph {
    let n: usize = gs.iter().map(Graph::n).sum();
    let mut a = RMat::zeros(n, n);
    let mut off = 0;
    for g in gs {
        a.view_mut((off, off), (g.n(), g.n()))
            .copy_from(g.adjacency());
        off += g.n();
    }
    Graph::from_adjacency(a).expect("union of valid graphs is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{numeric_rank, symmetric_eigenvalues, RankPolicy};
    use proptest::prelude::*;

    fn cycle(n: usize) -> Graph {
        build_circulant(&CirculantSpec::cycle(n).unwrap())
    }

    #[test]
    fn four_cycle_degrees() {
        let g = cycle(4);
        for i in 0..4 {
            assert_eq!(g.adjacency().row(i).sum(), 2.0);
        }
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn circulant_one_three_first_row() {
        let g = build_circulant(&CirculantSpec::unweighted(8, &[1, 3]).unwrap());
        let row: Vec<f64> = g.adjacency().row(0).iter().copied().collect();
        assert_eq!(row, vec![0., 1., 0., 1., 0., 1., 0., 1.]);
        for i in 0..8 {
            assert_eq!(g.adjacency().row(i).sum(), 4.0);
        }
    }

    #[test]
    fn five_vertices_two_generators_is_complete() {
        let g = build_circulant(&CirculantSpec::unweighted(5, &[1, 2]).unwrap());
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.adjacency()[(i, j)], if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn half_generator_gives_single_edge() {
        let g = build_circulant(&CirculantSpec::complete(4).unwrap());
        assert_eq!(
            g.laplacian().row(0).iter().copied().collect::<Vec<_>>(),
            vec![3., -1., -1., -1.]
        );
    }

    #[test]
    fn spec_rejections() {
        assert!(matches!(
            CirculantSpec::unweighted(8, &[5]),
            Err(GraphError::GeneratorTooLarge { .. })
        ));
        assert!(matches!(
            CirculantSpec::unweighted(8, &[1, 1]),
            Err(GraphError::DuplicateGenerator(1))
        ));
        assert!(matches!(
            CirculantSpec::new(8, vec![1], vec![0.0]),
            Err(GraphError::NonPositiveWeight { .. })
        ));
        assert!(CirculantSpec::unweighted(8, &[2])
            .unwrap()
            .require_connected()
            .is_err());
    }

    #[test]
    fn spec_sorts_generators_with_weights() {
        let s = CirculantSpec::new(10, vec![3, 1], vec![2.0, 5.0]).unwrap();
        assert_eq!(s.gens(), &[1, 3]);
        assert_eq!(s.weights(), &[5.0, 2.0]);
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(
            cycle(4)
                .laplacian()
                .row(0)
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![2., -1., 0., -1.]
        );
        let u = disjoint_union(&[cycle(3), cycle(3)]);
        let l = u.laplacian();
        assert_eq!(l.view((0, 0), (3, 3)), cycle(3).laplacian());
        assert_eq!(l.view((3, 3), (3, 3)), cycle(3).laplacian());
        assert_eq!(l.view((0, 3), (3, 3)).amax(), 0.0);
    }

    #[test]
    fn incidence_examples() {
        let g = Graph::from_edges(2, &[(0, 1, 4.0)]).unwrap();
        assert_eq!(
            g.incidence().row(0).iter().copied().collect::<Vec<_>>(),
            vec![2., -2.]
        );
        let c = cycle(4);
        let s = c.incidence();
        assert_eq!(s.shape(), (4, 4));
        assert_eq!(s.transpose() * &s, c.laplacian());
        let mut e0 = RMat::zeros(4, 1);
        e0[0] = 1.0;
        let y = &s * e0;
        // Canonical edges: (0,1), (0,3), (1,2), (2,3).
        assert_eq!(y.as_slice(), &[1., 1., 0., 0.]);
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&cycle(4)), vec![vec![0, 1, 2, 3]]);
        let u = disjoint_union(&[cycle(3), cycle(3)]);
        assert_eq!(connected_components(&u), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let empty = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(
            connected_components(&empty),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn union_shapes() {
        let u = disjoint_union(&[cycle(4), cycle(5), cycle(3)]);
        assert_eq!(u.n(), 12);
        assert_eq!(u.components().len(), 3);
        assert_eq!(u.components()[1], vec![4, 5, 6, 7, 8]);
        assert_eq!(u.edges().len(), 12);
    }

    #[test]
    fn json_round_trip() {
        let g = build_circulant(&CirculantSpec::unweighted(6, &[1, 2]).unwrap());
        let text = g.to_json().to_string();
        let back = Graph::from_json(&text).unwrap();
        assert_eq!(back.adjacency(), g.adjacency());
        let spec: CirculantSpec = serde_json::from_str(r#"{"n":8,"gens":[1,3]}"#).unwrap();
        assert_eq!(spec.weights(), &[1.0, 1.0]);
        assert!(serde_json::from_str::<CirculantSpec>(r#"{"n":8,"gens":[5]}"#).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = CirculantSpec> {
        (5usize..24).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::btree_map(1..=n / 2, 0.1f64..5.0, 1..4),
            )
                .prop_map(|(n, m)| {
                    let (g, w): (Vec<usize>, Vec<f64>) = m.into_iter().unzip();
                    CirculantSpec::new(n, g, w).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn gram_identity_and_psd(spec in arb_spec()) {
            let g = build_circulant(&spec);
            let l = g.laplacian();
            let s = g.incidence();
            let scale = l.amax();
            prop_assert!((s.transpose() * &s - &l).amax() <= 1e-12 * scale);
            let ev = symmetric_eigenvalues(&l);
            prop_assert!(ev[0] >= -1e-10 * ev[ev.len() - 1]);
        }

        #[test]
        fn rank_matches_components(spec in arb_spec()) {
            let g = build_circulant(&spec);
            let l = g.laplacian();
            let t = g.components().len();
            prop_assert_eq!(numeric_rank(&l, &RankPolicy::default()).unwrap(), g.n() - t);
            let ind = g.component_indicators();
            prop_assert!((&l * ind).amax() < 1e-12);
            prop_assert_eq!(g.is_connected(), spec.gcd_connected());
        }

        #[test]
        fn components_partition(edges in proptest::collection::btree_set((0usize..12, 0usize..12), 0..20)) {
            let list: Vec<(usize, usize, f64)> = edges.into_iter().filter(|(i, j)| i < j).map(|(i, j)| (i, j, 1.0)).collect();
            let g = Graph::from_edges(12, &list).unwrap();
            let mut all: Vec<usize> = g.components().iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..12).collect::<Vec<_>>());
            for e in g.edges() {
                let owner = g.component_of();
                prop_assert_eq!(owner[e.i], owner[e.j]);
            }
        }
    }
}
