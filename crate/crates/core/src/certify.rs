//! The end-to-end pipeline: both bounds on `G` and `G'`, the identities
//! between them, a quantum realization, and optionally a simulated run.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::alpha::independence_number;
use crate::error::{Error, Result};
use crate::events::build_two_point_graph;
use crate::experiment::{run_experiment, EpsilonTable, NoiseModel};
use crate::graph::Graph;
use crate::io::{matrix_rows, to_json_string};
use crate::orthorep::{extract_ortho_rep, verify_ortho_rep, RepReport};
use crate::quantum::{ExactStatistics, QState, Scheme};
use crate::theta::{self, FeasibilityReport, Formulation, SdpSolution, SdpStatus, DEFAULT_TOLERANCE};

pub const SCHEMA_VERSION: u32 = 1;
/// Allowed mismatch of `S' − |E|` against `S` for exact tables.
pub const S_PRIME_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub tolerance: f64,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub scheme: Scheme,
    pub skip_montecarlo: bool,
    /// Include the optimal ϑ matrices in the report.
    pub dump_x: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tolerance: DEFAULT_TOLERANCE,
            shots: 100_000,
            seed: 0,
            noise: NoiseModel::noiseless(),
            scheme: Scheme::Projective,
            skip_montecarlo: false,
            dump_x: false,
        }
    }
}

impl CertifyOptions {
    /// Tolerance for ϑ-derived comparisons: identities, overlap sums, S.
    pub fn value_tolerance(&self) -> f64 {
        100.0 * self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub weighted: bool,
    pub hash: String,
}

impl GraphSummary {
    pub fn of(g: &Graph) -> Self {
        GraphSummary {
            n: g.n(),
            edges: g.edge_count(),
            weighted: g.is_weighted(),
            hash: format!("{:016x}", g.canonical_hash()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaSection {
    pub value: usize,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaSection {
    pub value: f64,
    pub dual_bound: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    pub formulation: Formulation,
    pub feasibility: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<f64>>>,
}

impl ThetaSection {
    fn from_solution(g: &Graph, sol: &SdpSolution, dump_x: bool) -> Result<Self> {
        Ok(ThetaSection {
            value: sol.primal_value,
            dual_bound: sol.dual_value,
            status: sol.status,
            iterations: sol.iterations,
            formulation: sol.formulation,
            feasibility: theta::verify_feasibility(g, &sol.x, sol.tolerance)?,
            x: dump_x.then(|| matrix_rows(&sol.x)),
        })
    }

    pub fn gap(&self) -> f64 {
        self.dual_bound - self.value
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactSection {
    pub s: f64,
    pub s_prime: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloSection {
    pub shots: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub noise: NoiseModel,
    pub s_estimate: f64,
    pub s_std_error: f64,
    pub epsilon: EpsilonTable,
    pub epsilon_prime: EpsilonTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageFailure {
    pub stage: &'static str,
    pub message: String,
}

/// Everything `certify` learned. Pass/fail verdicts are not stored; they
/// are derived from the numbers each time they are asked for.
#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub tolerance: f64,
    pub input: GraphSummary,
    /// The blow-up actually analysed when the input is weighted.
    pub expanded: Option<GraphSummary>,
    pub alpha: Option<AlphaSection>,
    pub theta: Option<ThetaSection>,
    pub transformed: Option<GraphSummary>,
    pub alpha_prime: Option<AlphaSection>,
    pub theta_prime: Option<ThetaSection>,
    pub representation: Option<RepReport>,
    pub exact: Option<ExactSection>,
    pub montecarlo: Option<MonteCarloSection>,
    pub failure: Option<StageFailure>,
}

/// One verdict line, computed on demand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn within(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            value,
            tolerance,
            passed: value.abs() <= tolerance,
        }
    }
}

impl CertifyReport {
    fn new(g: &Graph, tolerance: f64) -> Self {
        CertifyReport {
            tolerance,
            input: GraphSummary::of(g),
            expanded: None,
            alpha: None,
            theta: None,
            transformed: None,
            alpha_prime: None,
            theta_prime: None,
            representation: None,
            exact: None,
            montecarlo: None,
            failure: None,
        }
    }

    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Edge count of the graph the pipeline ran on.
    fn analysed_edges(&self) -> usize {
        self.expanded.as_ref().unwrap_or(&self.input).edges
    }

    fn value_tolerance(&self) -> f64 {
        100.0 * self.tolerance
    }

    /// α(G') − α(G) − |E| (must be 0).
    pub fn alpha_identity(&self) -> Option<Check> {
        let (a, ap) = (self.alpha.as_ref()?, self.alpha_prime.as_ref()?);
        let diff = ap.value as f64 - a.value as f64 - self.analysed_edges() as f64;
        Some(Check::within("alpha(G') - alpha(G) - |E|", diff, 0.0))
    }

    /// ϑ(G') − ϑ(G) − |E| (must vanish within 100 · tolerance).
    pub fn theta_identity(&self) -> Option<Check> {
        let (t, tp) = (self.theta.as_ref()?, self.theta_prime.as_ref()?);
        let diff = tp.value - t.value - self.analysed_edges() as f64;
        Some(Check::within("theta(G') - theta(G) - |E|", diff, self.value_tolerance()))
    }

    /// Every verdict available so far, in pipeline order.
    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let feasibility = |name, t: &ThetaSection| {
            let r = t.feasibility.residuals;
            let worst = (-r.min_eigenvalue).max(r.trace_error).max(r.max_edge_entry).max(0.0);
            Check::within(name, worst, t.feasibility.tolerance)
        };
        if let Some(t) = &self.theta {
            out.push(feasibility("theta(G) feasibility", t));
        }
        if let Some(t) = &self.theta_prime {
            out.push(feasibility("theta(G') feasibility", t));
        }
        out.extend(self.alpha_identity());
        out.extend(self.theta_identity());
        if let Some(r) = &self.representation {
            let worst = r.max_edge_overlap.max(r.max_norm_error).max(r.sum_error);
            out.push(Check::within("orthogonal representation", worst, r.tolerance));
        }
        if let (Some(e), Some(t)) = (&self.exact, &self.theta) {
            out.push(Check::within("S - theta(G)", e.s - t.value, self.value_tolerance()));
            let identity = e.s_prime - self.analysed_edges() as f64 - e.s;
            out.push(Check::within("S' - |E| - S", identity, S_PRIME_TOLERANCE));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.complete() && self.checks().iter().all(|c| c.passed)
    }

    pub fn to_value(&self) -> Value {
        let checks = self.checks();
        json!({
            "schema": SCHEMA_VERSION,
            "complete": self.complete(),
            "passed": self.passed(),
            "failure": self.failure,
            "tolerance": self.tolerance,
            "input": self.input,
            "expanded": self.expanded,
            "alpha": self.alpha,
            "theta": self.theta,
            "transformed": self.transformed,
            "alpha_prime": self.alpha_prime,
            "theta_prime": self.theta_prime,
            "checks": checks,
            "representation": self.representation,
            "exact": self.exact,
            "montecarlo": self.montecarlo,
        })
    }

    /// The stage error, if the pipeline stopped early.
    pub fn error(&self) -> Option<Error> {
        self.failure.as_ref().map(|f| Error::Stage {
            stage: f.stage,
            source: Box::new(Error::Reported(f.message.clone())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// Serializes deterministically: the same report always gives the same bytes.
pub fn emit_report(report: &CertifyReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => to_json_string(&report.to_value()),
        ReportFormat::Text => Ok(report_text(report)),
    }
}

fn graph_line(out: &mut String, label: &str, g: &GraphSummary) {
    let weighted = if g.weighted { ", weighted" } else { "" };
    let _ = writeln!(out, "{label}: n = {}, |E| = {}{weighted}", g.n, g.edges);
}

fn theta_line(out: &mut String, label: &str, t: &ThetaSection) {
    let _ = writeln!(
        out,
        "{label} = {:.10} (gap {:.1e}, {:?}, {} iterations)",
        t.value,
        t.gap(),
        t.status,
        t.iterations
    );
}

fn report_text(r: &CertifyReport) -> String {
    let mut out = String::new();
    graph_line(&mut out, "G", &r.input);
    if let Some(e) = &r.expanded {
        graph_line(&mut out, "G (expanded)", e);
    }
    if let Some(a) = &r.alpha {
        let _ = writeln!(out, "alpha(G) = {}", a.value);
    }
    if let Some(t) = &r.theta {
        theta_line(&mut out, "theta(G)", t);
    }
    if let Some(g) = &r.transformed {
        graph_line(&mut out, "G'", g);
    }
    if let Some(a) = &r.alpha_prime {
        let _ = writeln!(out, "alpha(G') = {}", a.value);
    }
    if let Some(t) = &r.theta_prime {
        theta_line(&mut out, "theta(G')", t);
    }
    if let Some(e) = &r.exact {
        let _ = writeln!(out, "S = {:.10}, S' = {:.10}", e.s, e.s_prime);
    }
    for c in r.checks() {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict} {}: {:.3e} (tolerance {:.1e})", c.name, c.value, c.tolerance);
    }
    if let Some(mc) = &r.montecarlo {
        let _ = writeln!(
            out,
            "Monte Carlo ({} shots per context, seed {}, {:?}): S = {:.6} +/- {:.6}",
            mc.shots, mc.seed, mc.scheme, mc.s_estimate, mc.s_std_error
        );
        for (name, table) in [("epsilon", &mc.epsilon), ("epsilon'", &mc.epsilon_prime)] {
            match (table.max, table.max_z, table.error_scale) {
                (Some(max), Some(z), Some(scale)) => {
                    let _ = writeln!(
                        out,
                        "  {name}: {} entries, max {max:.3e} ({z:.2} standard errors), error scale {scale:.3e}",
                        table.entries.len()
                    );
                }
                _ => {
                    let _ = writeln!(out, "  {name}: no comparable contexts");
                }
            }
        }
    }
    match &r.failure {
        None => out.push_str("complete\n"),
        Some(f) => {
            let _ = writeln!(out, "INCOMPLETE at {}: {}", f.stage, f.message);
        }
    }
    out
}

fn converged(sol: &SdpSolution) -> Result<()> {
    if sol.status == SdpStatus::Converged {
        Ok(())
    } else {
        Err(Error::NotConverged(sol.status))
    }
}

/// Runs every stage, stopping at the first failure. The returned report is
/// marked incomplete in that case and keeps whatever was computed before.
pub fn certify(g: &Graph, opts: &CertifyOptions) -> CertifyReport {
    let mut report = CertifyReport::new(g, opts.tolerance);
    if let Err(e) = run_stages(g, opts, &mut report) {
        let (stage, message) = match e {
            Error::Stage { stage, source } => (stage, source.to_string()),
            other => ("certify", other.to_string()),
        };
        report.failure = Some(StageFailure { stage, message });
    }
    report
}

fn run_stages(g: &Graph, opts: &CertifyOptions, report: &mut CertifyReport) -> Result<()> {
    theta::check_tolerance(opts.tolerance).map_err(|e| e.at_stage("options"))?;
    let h = if g.is_weighted() {
        let h = g.expand_weighted().graph;
        report.expanded = Some(GraphSummary::of(&h));
        h
    } else {
        g.clone()
    };

    let alpha = independence_number(&h).map_err(|e| e.at_stage("alpha"))?;
    report.alpha = Some(AlphaSection {
        value: alpha.alpha,
        witness: alpha.witness,
    });
    let sol = theta::theta(&h, opts.tolerance).map_err(|e| e.at_stage("theta"))?;
    report.theta = Some(ThetaSection::from_solution(&h, &sol, opts.dump_x).map_err(|e| e.at_stage("theta"))?);
    converged(&sol).map_err(|e| e.at_stage("theta"))?;

    let eg = build_two_point_graph(&h).map_err(|e| e.at_stage("transform"))?;
    report.transformed = Some(GraphSummary::of(eg.graph()));
    let alpha_p = independence_number(eg.graph()).map_err(|e| e.at_stage("alpha_prime"))?;
    report.alpha_prime = Some(AlphaSection {
        value: alpha_p.alpha,
        witness: alpha_p.witness,
    });
    let sol_p = theta::theta(eg.graph(), opts.tolerance).map_err(|e| e.at_stage("theta_prime"))?;
    report.theta_prime =
        Some(ThetaSection::from_solution(eg.graph(), &sol_p, opts.dump_x).map_err(|e| e.at_stage("theta_prime"))?);
    converged(&sol_p).map_err(|e| e.at_stage("theta_prime"))?;

    let rep = extract_ortho_rep(&h, &sol, opts.tolerance).map_err(|e| e.at_stage("orthorep"))?;
    report.representation = Some(
        verify_ortho_rep(&h, &rep, sol.primal_value, opts.value_tolerance()).map_err(|e| e.at_stage("orthorep"))?,
    );

    let exact = QState::pure(rep.psi())
        .and_then(|state| ExactStatistics::compute(&h, &rep, &state, opts.scheme))
        .and_then(|stats| Ok(ExactSection { s: stats.s(&h)?, s_prime: stats.s_prime(&h)? }))
        .map_err(|e| e.at_stage("exact_s"))?;
    report.exact = Some(exact);

    if !opts.skip_montecarlo {
        let rec = run_experiment(&rep, &h, opts.shots, opts.seed, opts.noise, opts.scheme)
            .map_err(|e| e.at_stage("montecarlo"))?;
        report.montecarlo = Some(MonteCarloSection {
            shots: rec.shots,
            seed: rec.seed,
            scheme: rec.scheme,
            noise: rec.noise,
            s_estimate: rec.s_estimate,
            s_std_error: rec.s_std_error,
            epsilon: rec.epsilon,
            epsilon_prime: rec.epsilon_prime,
        });
    }
    Ok(())
}
