//! Command-line surface. Data goes to `--out` or stdout; the one-line
//! verification summary goes to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::circulant::{
    cycle_laplacian_poly, decompose_generalized, decompose_laplacian, generalized_laplacian_real,
    laplacian_poly, CirculantError, GeneralizedLaplacianSpec,
};
use crate::figures::{figure, FigureError, FigureName};
use crate::graph::{build_circulant, disjoint_union, incidence, CirculantSpec, Graph, GraphError};
use crate::greens::{
    graph_laplacian_pinv, inc_pinv, lalpha_cycle_inverse_closed, lalpha_cycle_pinv_closed,
    lalpha_inverse, lalpha_pinv, lap_pinv, lattice_alpha, lcycle_pinv_closed, scycle_incidence,
    scycle_pinv_closed, AlphaRoute, GreensError,
};
use crate::matrix::{
    complex_csv, complex_json, format_g17, real_csv, real_json, real_part, rel_fro_diff,
    rel_max_diff, to_complex, CMat, RMat,
};
use crate::oracle::{nullspace, numeric_rank, svd_pinv, OracleError, RankPolicy};
use crate::parallel::Execution;
use crate::uos::{
    analysis_nullspace, analysis_nullspace_alpha, containment_check, count_subspaces,
    enumerate_subspaces_bruteforce, synthesis_subspace, CosupportSpec, Model, SupportConstraint,
    UosError,
};
use crate::verify::{
    run_suite, summary_line, Check, Suite, VerifyConfig, FACTOR_RESIDUAL_TOL, ORACLE_TOL,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Circulant(#[from] CirculantError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Uos(#[from] UosError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Figure(#[from] FigureError),
}

#[derive(Debug, Parser)]
#[command(
    name = "graphuos",
    version,
    about = "Graph difference operators, Green's matrices and union-of-subspaces models"
)]
pub struct Cli {
    /// Rank-tolerance multiplier (overrides GRAPHUOS_TOL_REL).
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and emit its edge list (json) or adjacency (csv).
    Graph {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit a difference operator or one of its banded factors.
    Operator {
        #[arg(long, value_enum, default_value_t = OperatorKind::Laplacian)]
        kind: OperatorKind,
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit a Green's matrix and compare it with the SVD oracle.
    Greens {
        #[arg(long, value_enum, default_value_t = GreensKindArg::Laplacian)]
        kind: GreensKindArg,
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the subspace of a support set under the analysis or synthesis model.
    Uos {
        #[arg(long, value_enum, default_value_t = ModelArg::Analysis)]
        model: ModelArg,
        /// Support indices (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_c: Vec<usize>,
        /// Power of the synthesis dictionary.
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run invariant suites and emit a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Vertex counts for the sized checks (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        /// Random draws per randomized family.
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run checks one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the series of one figure.
    Figure {
        #[arg(long)]
        name: FigureName,
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit subspace counts, optionally against a brute-force enumeration.
    Tables {
        /// Component sizes (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "8")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Minimum support size per component (0 = unconstrained).
        #[arg(long, default_value_t = 0)]
        min_per_component: usize,
        /// Also enumerate supports and compare histograms.
        #[arg(long)]
        bruteforce: bool,
        #[arg(long, default_value_t = crate::uos::ENUMERATION_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GraphInput {
    /// Number of vertices.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Circulant generating set (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub gens: Vec<usize>,
    /// Generator weights (comma separated; defaults to 1).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// JSON file with a circulant spec `{n, gens, weights}` or a graph `{n, edges}`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    /// Real frequency of the generalized Laplacian.
    #[arg(long, conflicts_with = "alpha_k", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Lattice frequency index: alpha = 2 pi k / n.
    #[arg(long)]
    pub alpha_k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    Adjacency,
    Laplacian,
    Incidence,
    /// Banded factor of the Laplacian over the cycle Laplacian.
    LaplacianFactor,
    Generalized,
    /// Banded factor of the generalized Laplacian over the cycle one.
    GeneralizedFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreensKindArg {
    CycleLaplacian,
    CycleIncidence,
    CycleGeneralized,
    Laplacian,
    Incidence,
    Generalized,
    /// Any graph (including `--input` edge lists), per component.
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Analysis,
    Synthesis,
}

/// Parsed input: a circulant spec when available, always a graph.
struct Input {
    spec: Option<CirculantSpec>,
    graph: Graph,
}

impl GraphInput {
    fn load(&self) -> Result<Input, CliError> {
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
            if let Ok(spec) = serde_json::from_str::<CirculantSpec>(&text) {
                return Ok(Input {
                    graph: build_circulant(&spec),
                    spec: Some(spec),
                });
            }
            return Ok(Input {
                spec: None,
                graph: Graph::from_json(&text)?,
            });
        }
        let weights = self
            .weights
            .clone()
            .unwrap_or_else(|| vec![1.0; self.gens.len()]);
        let spec = CirculantSpec::new(self.n, self.gens.clone(), weights)?;
        Ok(Input {
            graph: build_circulant(&spec),
            spec: Some(spec),
        })
    }

    fn circulant(&self) -> Result<CirculantSpec, CliError> {
        self.load()?.spec.ok_or_else(|| {
            CliError::Usage("this command needs a circulant spec, not an edge list".into())
        })
    }
}

impl AlphaArgs {
    fn resolve(&self, n: usize) -> Option<f64> {
        self.alpha
            .or_else(|| self.alpha_k.map(|k| lattice_alpha(n, k % n)))
    }

    fn require(&self, n: usize) -> Result<f64, CliError> {
        self.resolve(n)
            .ok_or_else(|| CliError::Usage("this command needs --alpha or --alpha-k".into()))
    }
}

/// Rendered data plus the checks that back it.
pub struct Outcome {
    pub what: String,
    pub data: String,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn summary(&self) -> String {
        summary_line(&self.what, &self.checks)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn render_real(m: &RMat, format: Format) -> String {
    match format {
        Format::Csv => real_csv(m),
        Format::Json => json_text(&real_json(m)),
    }
}

fn render_complex(m: &CMat, format: Format) -> String {
    match format {
        Format::Csv => complex_csv(m),
        Format::Json => json_text(&complex_json(m)),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn oracle_check(
    name: &str,
    closed: &RMat,
    dense: &RMat,
    policy: &RankPolicy,
) -> Result<Check, CliError> {
    Ok(Check::at_most(
        name,
        rel_max_diff(closed, &svd_pinv(dense, policy)?),
        ORACLE_TOL,
    ))
}

fn cmd_graph(input: &GraphInput, format: Format) -> Result<Outcome, CliError> {
    let g = input.load()?.graph;
    let l = g.laplacian();
    let s = incidence(&g);
    let checks = vec![
        Check::at_most(
            "incidence_gram_is_laplacian",
            (s.transpose() * &s - &l).amax(),
            1e-12,
        ),
        Check::at_most("laplacian_rows_sum_to_zero", l.column_sum().amax(), 1e-12),
    ];
    let data = match format {
        Format::Json => json_text(&json!({
            "graph": g.to_json(),
            "components": g.components(),
        })),
        Format::Csv => real_csv(g.adjacency()),
    };
    Ok(Outcome {
        what: format!(
            "graph n={} edges={} components={}",
            g.n(),
            g.edges().len(),
            g.components().len()
        ),
        data,
        checks,
    })
}

fn cmd_operator(
    kind: OperatorKind,
    input: &GraphInput,
    alpha: &AlphaArgs,
    format: Format,
    policy: &RankPolicy,
) -> Result<Outcome, CliError> {
    let loaded = input.load()?;
    let g = &loaded.graph;
    let mut checks = Vec::new();
    let m = match kind {
        OperatorKind::Adjacency => g.adjacency().clone(),
        OperatorKind::Laplacian => {
            let l = g.laplacian();
            checks.push(Check::at_most(
                "rows_sum_to_zero",
                l.column_sum().amax(),
                1e-12,
            ));
            if let Some(spec) = &loaded.spec {
                let symbol = laplacian_poly(spec).realize_real()?;
                checks.push(Check::at_most(
                    "matches_symbol",
                    (symbol - &l).amax(),
                    1e-12,
                ));
            }
            l
        }
        OperatorKind::Incidence => {
            let s = incidence(g);
            checks.push(Check::at_most(
                "gram_is_laplacian",
                (s.transpose() * &s - g.laplacian()).amax(),
                1e-12,
            ));
            s
        }
        OperatorKind::LaplacianFactor => {
            let spec = input.circulant()?;
            let p = decompose_laplacian(&spec)?.realize_real()?;
            let prod = &p * cycle_laplacian_poly(spec.n()).realize_real()?;
            checks.push(Check::at_most(
                "factor_residual",
                rel_fro_diff(&prod, &g.laplacian()),
                FACTOR_RESIDUAL_TOL,
            ));
            p
        }
        OperatorKind::Generalized => {
            let spec = input.circulant()?;
            let a = alpha.require(spec.n())?;
            let la = generalized_laplacian_real(&spec, a);
            checks.push(Check::at_most(
                "symmetric",
                (&la - la.transpose()).amax(),
                0.0,
            ));
            la
        }
        OperatorKind::GeneralizedFactor => {
            let spec = input.circulant()?;
            let a = alpha.require(spec.n())?;
            let f =
                decompose_generalized(&GeneralizedLaplacianSpec::real(spec.clone(), a), policy)?;
            let p = f.p_alpha.realize_real()?;
            let cycle = generalized_laplacian_real(&CirculantSpec::cycle(spec.n())?, a);
            let la = generalized_laplacian_real(&spec, a);
            checks.push(Check::at_most(
                "factor_residual",
                rel_fro_diff(&(&p * cycle), &la),
                FACTOR_RESIDUAL_TOL,
            ));
            log::info!("factor positive definite: {}", f.positive_definite);
            p
        }
    };
    let what = format!(
        "operator kind={} n={}",
        kind.to_possible_value().expect("named").get_name(),
        g.n()
    );
    Ok(Outcome {
        what,
        data: render_real(&m, format),
        checks,
    })
}

fn cmd_greens(
    kind: GreensKindArg,
    input: &GraphInput,
    alpha: &AlphaArgs,
    format: Format,
    policy: &RankPolicy,
) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let data = match kind {
        GreensKindArg::Graph => {
            let g = input.load()?.graph;
            let m = graph_laplacian_pinv(&g)?.matrix;
            checks.push(oracle_check(
                "oracle_agreement",
                &m,
                &g.laplacian(),
                policy,
            )?);
            render_real(&m, format)
        }
        GreensKindArg::CycleLaplacian | GreensKindArg::CycleIncidence => {
            let n = input.load()?.graph.n();
            let (m, dense) = if kind == GreensKindArg::CycleLaplacian {
                (
                    lcycle_pinv_closed(n)?.matrix,
                    build_circulant(&CirculantSpec::cycle(n)?).laplacian(),
                )
            } else {
                (scycle_pinv_closed(n)?.matrix, scycle_incidence(n))
            };
            checks.push(oracle_check("oracle_agreement", &m, &dense, policy)?);
            render_real(&m, format)
        }
        GreensKindArg::Laplacian => {
            let spec = input.circulant()?;
            let m = lap_pinv(&spec)?.matrix;
            checks.push(oracle_check(
                "oracle_agreement",
                &m,
                &build_circulant(&spec).laplacian(),
                policy,
            )?);
            render_real(&m, format)
        }
        GreensKindArg::Incidence => {
            let spec = input.circulant()?;
            let m = inc_pinv(&spec)?.matrix;
            checks.push(oracle_check(
                "oracle_agreement",
                &m,
                &incidence(&build_circulant(&spec)),
                policy,
            )?);
            render_real(&m, format)
        }
        GreensKindArg::CycleGeneralized | GreensKindArg::Generalized => {
            let spec = if kind == GreensKindArg::Generalized {
                input.circulant()?
            } else {
                CirculantSpec::cycle(input.load()?.graph.n())?
            };
            let n = spec.n();
            let a = alpha.require(n)?;
            let dense = generalized_laplacian_real(&spec, a);
            let m = match (AlphaRoute::classify(n, a), kind) {
                (AlphaRoute::OffLattice, GreensKindArg::CycleGeneralized) => {
                    lalpha_cycle_inverse_closed(n, a)?.matrix
                }
                (AlphaRoute::OffLattice, _) => lalpha_inverse(&spec, a, policy)?.matrix,
                (AlphaRoute::Zero, _) => to_complex(&if kind == GreensKindArg::CycleGeneralized {
                    lcycle_pinv_closed(n)?.matrix
                } else {
                    lap_pinv(&spec)?.matrix
                }),
                (AlphaRoute::Pi, GreensKindArg::CycleGeneralized) => {
                    lalpha_cycle_pinv_closed(n, n / 2)?.matrix
                }
                (AlphaRoute::Pi, _) => lalpha_pinv(&spec, n / 2, policy)?.matrix,
                (AlphaRoute::Lattice(k), GreensKindArg::CycleGeneralized) => {
                    lalpha_cycle_pinv_closed(n, k)?.matrix
                }
                (AlphaRoute::Lattice(k), _) => lalpha_pinv(&spec, k, policy)?.matrix,
            };
            checks.push(oracle_check(
                "oracle_agreement",
                &real_part(&m),
                &dense,
                policy,
            )?);
            render_complex(&m, format)
        }
    };
    let what = format!(
        "greens kind={}",
        kind.to_possible_value().expect("named").get_name()
    );
    Ok(Outcome { what, data, checks })
}

fn cmd_uos(
    model: ModelArg,
    support: &[usize],
    power: usize,
    input: &GraphInput,
    alpha: &AlphaArgs,
    format: Format,
    policy: &RankPolicy,
) -> Result<Outcome, CliError> {
    let loaded = input.load()?;
    let g = &loaded.graph;
    let n = g.n();
    let cs = CosupportSpec::from_support(n, support)?;
    let mut checks = Vec::new();
    let data = match (model, alpha.resolve(n)) {
        (ModelArg::Analysis, Some(a)) => {
            let spec = input.circulant()?;
            let b = analysis_nullspace_alpha(&spec, &cs, a, policy)?;
            let numeric = nullspace(
                &(crate::matrix::selector(n, cs.lambda()) * generalized_laplacian_real(&spec, a)),
                policy,
            )?;
            checks.push(Check::exact(
                "rank_matches_oracle",
                numeric.certified_rank as f64,
                b.certified_rank as f64,
            ));
            render_complex(&b.combined(), format)
        }
        (ModelArg::Analysis, None) => {
            let b = analysis_nullspace(g, &cs, policy)?;
            let numeric = nullspace(
                &(crate::matrix::selector(n, cs.lambda()) * g.laplacian()),
                policy,
            )?;
            checks.push(Check::exact(
                "rank_matches_oracle",
                numeric.certified_rank as f64,
                b.certified_rank as f64,
            ));
            if g.is_connected() && support.len() < n {
                let r = containment_check(g, &cs, policy)?;
                checks.push(Check::exact(
                    "projected_containment",
                    1.0,
                    if r.projected_contained { 1.0 } else { 0.0 },
                ));
            }
            render_real(&b.combined(), format)
        }
        (ModelArg::Synthesis, _) => {
            let b = synthesis_subspace(g, support, power, policy)?;
            let dict = crate::matrix::select_columns(
                &crate::matrix::matrix_power(&graph_laplacian_pinv(g)?.matrix, power),
                support,
            );
            checks.push(Check::exact(
                "rank_matches_oracle",
                numeric_rank(&dict, policy)? as f64,
                b.certified_rank as f64,
            ));
            render_real(&b.basis, format)
        }
    };
    let what = format!(
        "uos model={} n={n} support={}",
        if model == ModelArg::Analysis {
            "analysis"
        } else {
            "synthesis"
        },
        support.len()
    );
    Ok(Outcome { what, data, checks })
}

fn cmd_figure(
    name: FigureName,
    input: &GraphInput,
    format: Format,
    policy: &RankPolicy,
) -> Result<Outcome, CliError> {
    let spec = input.circulant()?;
    let f = figure(name, &spec, policy)?;
    let data = match format {
        Format::Csv => f.to_csv(),
        Format::Json => json_text(&f.to_json()),
    };
    Ok(Outcome {
        what: format!("figure name={} n={}", name.as_str(), spec.n()),
        data,
        checks: f.checks,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_tables(
    sizes: &[usize],
    k_min: usize,
    k_max: usize,
    min_per_component: usize,
    bruteforce: bool,
    budget: u64,
    policy: &RankPolicy,
) -> Result<Outcome, CliError> {
    let constraint = SupportConstraint::at_least(min_per_component);
    let graph = if bruteforce {
        let parts: Result<Vec<Graph>, GraphError> = sizes
            .iter()
            .map(|&s| CirculantSpec::cycle(s).map(|c| build_circulant(&c)))
            .collect();
        Some(disjoint_union(&parts?))
    } else {
        None
    };
    let mut data = String::from("model,k,dimension,nullspace_dim,count,bruteforce_count,match\n");
    let mut checks = Vec::new();
    let total: usize = sizes.iter().sum();
    for k in k_min..=k_max.min(total) {
        let rows = count_subspaces(sizes, k, constraint)?;
        for model in [Model::Synthesis, Model::Analysis] {
            let rows: Vec<_> = rows.iter().filter(|r| r.model == model).collect();
            let hist = match &graph {
                Some(g) => Some(enumerate_subspaces_bruteforce(
                    g,
                    k,
                    model,
                    constraint,
                    budget,
                    Execution::default(),
                    policy,
                )?),
                None => None,
            };
            if let Some(h) = &hist {
                let formula: Vec<(usize, u64)> = rows
                    .iter()
                    .map(|r| (r.total_dimension(), r.count))
                    .collect();
                let brute: Vec<(usize, u64)> = h.iter().map(|(&d, &c)| (d, c as u64)).collect();
                checks.push(Check::exact(
                    &format!("{}_k{k}_histogram", model.as_str()),
                    1.0,
                    if formula == brute { 1.0 } else { 0.0 },
                ));
            }
            for r in rows {
                let (brute, matched) = match &hist {
                    Some(h) => {
                        let b = h.get(&r.total_dimension()).copied().unwrap_or(0) as u64;
                        (b.to_string(), (b == r.count).to_string())
                    }
                    None => (String::new(), String::new()),
                };
                data.push_str(&format!(
                    "{},{k},{},{},{},{brute},{matched}\n",
                    model.as_str(),
                    r.dimension,
                    r.nullspace_dim,
                    r.count
                ));
            }
        }
    }
    let label: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    Ok(Outcome {
        what: format!("tables sizes={}", label.join(",")),
        data,
        checks,
    })
}

fn emit(path: Option<&PathBuf>, data: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, data).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Executes a parsed command and returns the outcome without printing.
pub fn execute(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let policy = match cli.tol_rel {
        Some(m) if m > 0.0 && m.is_finite() => RankPolicy::with_multiplier(m),
        Some(m) => {
            return Err(CliError::Usage(format!(
                "--tol-rel must be positive, got {m}"
            )))
        }
        None => RankPolicy::from_env(),
    };
    Ok(match &cli.command {
        Command::Graph { graph, out } => (cmd_graph(graph, out.format)?, out.out.clone()),
        Command::Operator {
            kind,
            graph,
            alpha,
            out,
        } => (
            cmd_operator(*kind, graph, alpha, out.format, &policy)?,
            out.out.clone(),
        ),
        Command::Greens {
            kind,
            graph,
            alpha,
            out,
        } => (
            cmd_greens(*kind, graph, alpha, out.format, &policy)?,
            out.out.clone(),
        ),
        Command::Uos {
            model,
            lambda_c,
            power,
            graph,
            alpha,
            out,
        } => (
            cmd_uos(*model, lambda_c, *power, graph, alpha, out.format, &policy)?,
            out.out.clone(),
        ),
        Command::Verify {
            suite,
            sizes,
            draws,
            seed,
            sequential,
            out,
        } => {
            let exec = if *sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let cfg = VerifyConfig {
                sizes: sizes.clone(),
                draws: *draws,
                seed: *seed,
                exec,
                policy,
            };
            let report = run_suite(*suite, &cfg);
            let outcome = Outcome {
                what: format!("verify suite={}", suite.as_str()),
                data: json_text(&report.to_json()),
                checks: report.checks,
            };
            (outcome, out.clone())
        }
        Command::Figure { name, graph, out } => (
            cmd_figure(*name, graph, out.format, &policy)?,
            out.out.clone(),
        ),
        Command::Tables {
            sizes,
            k_min,
            k_max,
            min_per_component,
            bruteforce,
            budget,
            out,
        } => (
            cmd_tables(
                sizes,
                *k_min,
                *k_max,
                *min_per_component,
                *bruteforce,
                *budget,
                &policy,
            )?,
            out.clone(),
        ),
    })
}

/// Runs the CLI; returns the process exit code (0 iff every check passed,
/// 1 on a failed check, 2 on an error).
pub fn run(cli: Cli) -> i32 {
    match execute(&cli).and_then(|(outcome, path)| {
        emit(path.as_ref(), &outcome.data)?;
        Ok(outcome)
    }) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary());
            for c in outcome.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "failed: {} expected={} got={} tol={}",
                    c.check,
                    format_g17(c.expected),
                    format_g17(c.got),
                    format_g17(c.tol)
                );
            }
            if outcome.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", summary_line("error", &[Check::failed("command", &e)]));
            2
        }
    }
}
