//! Invariant suites with a machine-readable report.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::circulant::{
    cycle_laplacian_poly, decompose_generalized, decompose_laplacian, generalized_laplacian_real,
    GeneralizedLaplacianSpec,
};
use crate::figures::{figure, FigureName};
use crate::graph::{build_circulant, incidence, CirculantSpec};
use crate::greens::{
    inc_pinv, lalpha_cycle_inverse_closed, lalpha_cycle_pinv_closed, lalpha_inverse, lap_pinv,
    lattice_alpha, lcycle_pinv_closed, scycle_incidence, scycle_pinv_closed,
};
use crate::matrix::{real_part, rel_fro_diff, rel_max_diff, to_complex, RMat};
use crate::oracle::{svd_pinv, RankPolicy};
use crate::parallel::{self, Execution};
use crate::signals::{
    annihilation_order, greens_combination, sparsity, AnalysisOperator, CombinationMode,
    PATTERN_TOL, SPARSITY_EPS,
};
use crate::uos::{
    analysis_nullspace, containment_check, count_subspaces, enumerate_subspaces_bruteforce,
    CosupportSpec, Model, SupportConstraint, ENUMERATION_BUDGET,
};

/// Entrywise relative agreement required between a closed form and the oracle.
pub const ORACLE_TOL: f64 = 1e-9;
/// Relative Frobenius residual allowed for the banded factorizations.
pub const FACTOR_RESIDUAL_TOL: f64 = 1e-10;

/// One named comparison. Failures and errors both surface as `pass = false`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub expected: f64,
    pub got: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn within(name: &str, expected: f64, got: f64, tol: f64) -> Self {
        let pass = (got - expected).abs() <= tol;
        Check {
            check: name.to_string(),
            expected,
            got,
            tol,
            pass,
            error: None,
        }
    }

    pub fn exact(name: &str, expected: f64, got: f64) -> Self {
        Self::within(name, expected, got, 0.0)
    }

    /// Passes when `got <= bound`.
    pub fn at_most(name: &str, got: f64, bound: f64) -> Self {
        Check {
            check: name.to_string(),
            expected: 0.0,
            got,
            tol: bound,
            pass: got <= bound,
            error: None,
        }
    }

    pub fn failed(name: &str, error: impl ToString) -> Self {
        Check {
            check: name.to_string(),
            expected: f64::NAN,
            got: f64::NAN,
            tol: 0.0,
            pass: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Greens,
    Uos,
    Signals,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Greens => "greens",
            Suite::Uos => "uos",
            Suite::Signals => "signals",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greens" => Ok(Suite::Greens),
            "uos" => Ok(Suite::Uos),
            "signals" => Ok(Suite::Signals),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite {other:?}; expected greens, uos, signals or all"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub sizes: Vec<usize>,
    /// Random draws per randomized check family.
    pub draws: usize,
    pub seed: u64,
    pub exec: Execution,
    pub policy: RankPolicy,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 16, 32],
            draws: 20,
            seed: 0,
            exec: Execution::default(),
            policy: RankPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn from_checks(suite: Suite, seed: u64, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.check.cmp(&b.check));
        let passed = checks.iter().filter(|c| c.pass).count();
        Report {
            suite,
            seed,
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn summary_line(&self) -> String {
        summary_line(
            &format!("verify suite={}", self.suite.as_str()),
            &self.checks,
        )
    }
}

/// `graphuos <what> checks=N passed=P failed=F status=PASS|FAIL`.
pub fn summary_line(what: &str, checks: &[Check]) -> String {
    let passed = checks.iter().filter(|c| c.pass).count();
    let status = if passed == checks.len() {
        "PASS"
    } else {
        "FAIL"
    };
    format!(
        "graphuos {what} checks={} passed={passed} failed={} status={status}",
        checks.len(),
        checks.len() - passed
    )
}

/// Connected circulant on `n` vertices: generator 1 plus up to
/// `max_extra` distinct generators from `2..=n/2`.
pub fn random_circulant(rng: &mut impl Rng, n: usize, max_extra: usize) -> CirculantSpec {
    let pool: Vec<usize> = (2..=n / 2).collect();
    let extra = rng.random_range(0..=max_extra.min(pool.len()));
    let mut gens = vec![1];
    gens.extend(sample(rng, pool.len(), extra).into_iter().map(|i| pool[i]));
    CirculantSpec::unweighted(n, &gens).expect("valid generators")
}

/// Real frequency at least a tenth of a lattice step away from `2 pi k / n`.
pub fn random_off_lattice(rng: &mut impl Rng, n: usize) -> f64 {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let k = rng.random_range(0..n) as f64;
    k * step + rng.random_range(0.1..0.9) * step
}

type Job = Box<dyn Fn() -> Vec<Check> + Send + Sync>;

fn oracle_check(name: String, closed: &RMat, dense: &RMat, policy: &RankPolicy) -> Check {
    match svd_pinv(dense, policy) {
        Ok(p) => Check::at_most(&name, rel_max_diff(closed, &p), ORACLE_TOL),
        Err(e) => Check::failed(&name, e),
    }
}

fn greens_jobs(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &cfg.sizes {
        let policy = cfg.policy;
        jobs.push(Box::new(move || {
            let mut out = Vec::new();
            let lc = build_circulant(&CirculantSpec::cycle(n).expect("n >= 3")).laplacian();
            match lcycle_pinv_closed(n) {
                Ok(g) => out.push(oracle_check(
                    format!("greens/cycle_laplacian_pinv/n{n}"),
                    &g.matrix,
                    &lc,
                    &policy,
                )),
                Err(e) => out.push(Check::failed(
                    &format!("greens/cycle_laplacian_pinv/n{n}"),
                    e,
                )),
            }
            match scycle_pinv_closed(n) {
                Ok(g) => out.push(oracle_check(
                    format!("greens/cycle_incidence_pinv/n{n}"),
                    &g.matrix,
                    &scycle_incidence(n),
                    &policy,
                )),
                Err(e) => out.push(Check::failed(
                    &format!("greens/cycle_incidence_pinv/n{n}"),
                    e,
                )),
            }
            let cycle = CirculantSpec::cycle(n).expect("n >= 3");
            for k in 1..n {
                let name = format!("greens/cycle_lattice_pinv/n{n}/k{k}");
                match lalpha_cycle_pinv_closed(n, k) {
                    Ok(g) => {
                        let dense = generalized_laplacian_real(&cycle, lattice_alpha(n, k));
                        out.push(oracle_check(name, &real_part(&g.matrix), &dense, &policy));
                    }
                    Err(e) => out.push(Check::failed(&name, e)),
                }
            }
            out
        }));
        for draw in 0..cfg.draws {
            let alpha = random_off_lattice(rng, n);
            let spec = random_circulant(rng, n, 3);
            let policy = cfg.policy;
            jobs.push(Box::new(move || {
                let mut out = Vec::new();
                let cycle = CirculantSpec::cycle(n).expect("n >= 3");
                let name = format!("greens/cycle_inverse/n{n}/draw{draw:03}");
                match lalpha_cycle_inverse_closed(n, alpha) {
                    Ok(g) => {
                        let dense = generalized_laplacian_real(&cycle, alpha);
                        out.push(oracle_check(name, &real_part(&g.matrix), &dense, &policy));
                    }
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let l = build_circulant(&spec).laplacian();
                let name = format!("greens/circulant_laplacian_pinv/n{n}/draw{draw:03}");
                match lap_pinv(&spec) {
                    Ok(g) => out.push(oracle_check(name, &g.matrix, &l, &policy)),
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let name = format!("greens/circulant_incidence_pinv/n{n}/draw{draw:03}");
                match inc_pinv(&spec) {
                    Ok(g) => out.push(oracle_check(
                        name,
                        &g.matrix,
                        &incidence(&build_circulant(&spec)),
                        &policy,
                    )),
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let name = format!("greens/laplacian_factor_residual/n{n}/draw{draw:03}");
                match decompose_laplacian(&spec)
                    .and_then(|p| Ok(p.realize_real()? * cycle_laplacian_poly(n).realize_real()?))
                {
                    Ok(prod) => out.push(Check::at_most(
                        &name,
                        rel_fro_diff(&prod, &l),
                        FACTOR_RESIDUAL_TOL,
                    )),
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let name = format!("greens/generalized_factor_residual/n{n}/draw{draw:03}");
                let la = generalized_laplacian_real(&spec, alpha);
                match decompose_generalized(
                    &GeneralizedLaplacianSpec::real(spec.clone(), alpha),
                    &policy,
                ) {
                    Ok(f) => {
                        let prod = real_part(
                            &(f.p_alpha.realize()
                                * to_complex(&generalized_laplacian_real(&cycle, alpha))),
                        );
                        out.push(Check::at_most(
                            &name,
                            rel_fro_diff(&prod, &la),
                            FACTOR_RESIDUAL_TOL,
                        ));
                    }
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let name = format!("greens/generalized_inverse/n{n}/draw{draw:03}");
                match lalpha_inverse(&spec, alpha, &policy) {
                    Ok(g) => {
                        // Identity residual; the inverse may be ill-conditioned near
                        // a zero of the factor symbol, so compare L_alpha X to I.
                        let res = (&la * real_part(&g.matrix) - RMat::identity(n, n)).amax();
                        out.push(Check::at_most(&name, res, 1e-8));
                    }
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                out
            }));
        }
    }
    jobs
}

fn uos_jobs(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &cfg.sizes {
        for draw in 0..cfg.draws {
            let spec = random_circulant(rng, n, 3);
            let k = rng.random_range(1..n - 1);
            let mut support: Vec<usize> = sample(rng, n, k).into_vec();
            support.sort_unstable();
            let policy = cfg.policy;
            jobs.push(Box::new(move || {
                let g = build_circulant(&spec);
                let mut out = Vec::new();
                let cs = CosupportSpec::from_support(n, &support).expect("valid support");
                let name = format!("uos/analysis_rank/n{n}/draw{draw:03}");
                match analysis_nullspace(&g, &cs, &policy) {
                    Ok(b) => out.push(Check::exact(
                        &name,
                        support.len() as f64,
                        b.certified_rank as f64,
                    )),
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                let name = format!("uos/containment/n{n}/draw{draw:03}");
                match containment_check(&g, &cs, &policy) {
                    Ok(r) => out.push(Check::exact(&name, 1.0, if r.holds() { 1.0 } else { 0.0 })),
                    Err(e) => out.push(Check::failed(&name, e)),
                }
                out
            }));
        }
    }
    let (exec, policy) = (cfg.exec, cfg.policy);
    for n in [6usize, 7] {
        jobs.push(Box::new(move || {
            let g = build_circulant(&CirculantSpec::cycle(n).expect("n >= 3"));
            let mut out = Vec::new();
            for k in 1..=3 {
                for model in [Model::Analysis, Model::Synthesis] {
                    let name = format!("uos/count_vs_bruteforce/{}/n{n}/k{k}", model.as_str());
                    let formula = count_subspaces(&[n], k, SupportConstraint::default());
                    let brute = enumerate_subspaces_bruteforce(
                        &g,
                        k,
                        model,
                        SupportConstraint::default(),
                        ENUMERATION_BUDGET,
                        exec,
                        &policy,
                    );
                    match (formula, brute) {
                        (Ok(rows), Ok(hist)) => {
                            let expected: Vec<(usize, u64)> = rows
                                .iter()
                                .filter(|r| r.model == model)
                                .map(|r| (r.total_dimension(), r.count))
                                .collect();
                            let got: Vec<(usize, u64)> =
                                hist.iter().map(|(&d, &c)| (d, c as u64)).collect();
                            out.push(Check::exact(
                                &name,
                                1.0,
                                if expected == got { 1.0 } else { 0.0 },
                            ));
                        }
                        (Err(e), _) => out.push(Check::failed(&name, e)),
                        (_, Err(e)) => out.push(Check::failed(&name, e)),
                    }
                }
            }
            out
        }));
    }
    jobs
}

fn signals_jobs(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for k in 1..=2usize {
        for m in 1..=3usize {
            jobs.push(Box::new(move || {
                let n = 64;
                let gens: Vec<usize> = (1..=m).collect();
                let spec = CirculantSpec::unweighted(n, &gens).expect("valid generators");
                let ops = [
                    (
                        "laplacian",
                        AnalysisOperator::Laplacian { power: k },
                        2 * k - 1,
                    ),
                    (
                        "incidence_laplacian",
                        AnalysisOperator::IncidenceLaplacian { power: k },
                        2 * k,
                    ),
                    (
                        "generalized",
                        AnalysisOperator::Generalized {
                            power: k,
                            alpha: lattice_alpha(n, 3),
                            sign: 1,
                        },
                        k - 1,
                    ),
                ];
                ops.into_iter()
                    .map(|(label, op, want)| {
                        let name = format!("signals/annihilation/{label}/m{m}/k{k}");
                        match annihilation_order(&spec, op, want + 1) {
                            Ok(Some(d)) => Check::exact(&name, want as f64, d as f64),
                            Ok(None) => Check::exact(&name, want as f64, -1.0),
                            Err(e) => Check::failed(&name, e),
                        }
                    })
                    .collect()
            }));
        }
    }
    jobs.push(Box::new(|| {
        let n = 8;
        let lc = build_circulant(&CirculantSpec::cycle(n).expect("n >= 3")).laplacian();
        let y: Vec<f64> = (&lc * RMat::from_fn(n, 1, |t, _| t as f64))
            .iter()
            .copied()
            .collect();
        let mut expected = vec![0.0; n];
        expected[0] = -8.0;
        expected[n - 1] = 8.0;
        let diff = y
            .iter()
            .zip(&expected)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        vec![
            Check::exact("signals/ramp_pattern", 0.0, diff),
            Check::exact(
                "signals/ramp_sparsity",
                2.0,
                sparsity(&y, SPARSITY_EPS).l0 as f64,
            ),
        ]
    }));
    let policy = cfg.policy;
    jobs.push(Box::new(move || {
        let spec = CirculantSpec::unweighted(64, &[1, 2, 3]).expect("valid generators");
        let mut out = Vec::new();
        for name in FigureName::ALL {
            match figure(name, &spec, &policy) {
                Ok(f) => out.extend(f.checks.into_iter().map(|mut c| {
                    c.check = format!("signals/figure/{}/{}", name.as_str(), c.check);
                    c
                })),
                Err(e) => out.push(Check::failed(
                    &format!("signals/figure/{}", name.as_str()),
                    e,
                )),
            }
        }
        out
    }));
    for &n in &cfg.sizes {
        for draw in 0..cfg.draws {
            let spec = random_circulant(rng, n, 2);
            let mode = [
                CombinationMode::Edge,
                CombinationMode::VertexIncidence,
                CombinationMode::VertexLaplacian,
            ][rng.random_range(0..3)];
            let power = rng.random_range(1..=2);
            let picks = rng.random_range(1..=3usize);
            let weights: Vec<f64> = (0..picks).map(|_| rng.random_range(-2.0..2.0)).collect();
            let seed = rng.random::<u64>();
            jobs.push(Box::new(move || {
                let g = build_circulant(&spec);
                let limit = if mode == CombinationMode::Edge {
                    g.edges().len()
                } else {
                    n
                };
                let mut local = ChaCha8Rng::seed_from_u64(seed);
                let mut idx = sample(&mut local, limit, weights.len()).into_vec();
                idx.sort_unstable();
                let name = format!("signals/combination/n{n}/draw{draw:03}");
                match greens_combination(&g, mode, &idx, &weights, power) {
                    Ok(c) => vec![Check::at_most(&name, c.residual, PATTERN_TOL)],
                    Err(e) => vec![Check::failed(&name, e)],
                }
            }));
        }
    }
    jobs
}

/// Runs a suite. Random draws come from `cfg.seed`; jobs fan out according
/// to `cfg.exec` and the report is ordered by check name.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::new();
    if matches!(suite, Suite::Greens | Suite::All) {
        jobs.extend(greens_jobs(cfg, &mut rng));
    }
    if matches!(suite, Suite::Uos | Suite::All) {
        jobs.extend(uos_jobs(cfg, &mut rng));
    }
    if matches!(suite, Suite::Signals | Suite::All) {
        jobs.extend(signals_jobs(cfg, &mut rng));
    }
    let checks = parallel::map(&jobs, cfg.exec, |job| job())
        .into_iter()
        .flatten()
        .collect();
    Report::from_checks(suite, cfg.seed, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            sizes: vec![8, 12],
            draws: 4,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suites_pass() {
        for suite in [Suite::Greens, Suite::Uos, Suite::Signals] {
            let r = run_suite(suite, &small());
            let bad: Vec<&Check> = r.checks.iter().filter(|c| !c.pass).collect();
            assert!(r.all_pass(), "{}: {bad:?}", suite.as_str());
            assert!(r.passed > 0);
        }
    }

    #[test]
    fn report_is_deterministic_across_strategies() {
        let seq = run_suite(
            Suite::Signals,
            &VerifyConfig {
                exec: Execution::Sequential,
                ..small()
            },
        );
        let par = run_suite(
            Suite::Signals,
            &VerifyConfig {
                exec: Execution::Parallel,
                ..small()
            },
        );
        assert_eq!(seq.to_json(), par.to_json());
        assert_eq!(seq.summary_line(), par.summary_line());
    }

    #[test]
    fn summary_format() {
        let checks = vec![
            Check::exact("a", 1.0, 1.0),
            Check::within("b", 0.0, 0.5, 0.1),
        ];
        assert_eq!(
            summary_line("x", &checks),
            "graphuos x checks=2 passed=1 failed=1 status=FAIL"
        );
        let r = Report::from_checks(
            Suite::Greens,
            3,
            vec![Check::exact("z", 0.0, 0.0), Check::failed("a", "boom")],
        );
        assert_eq!(r.checks[0].check, "a");
        assert!(!r.all_pass());
        assert_eq!(r.to_json()["checks"][0]["error"], "boom");
    }

    #[test]
    fn random_helpers_respect_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(6..40);
            let s = random_circulant(&mut rng, n, 4);
            assert_eq!(s.gens()[0], 1);
            let a = random_off_lattice(&mut rng, n);
            assert_eq!(
                crate::greens::AlphaRoute::classify(n, a),
                crate::greens::AlphaRoute::OffLattice
            );
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in [Suite::Greens, Suite::Uos, Suite::Signals, Suite::All] {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
