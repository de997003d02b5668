//! Lovász number ϑ(G): the quantum maximum of `S`.
//!
//! ϑ(G) = max ⟨J, X⟩ over X ⪰ 0 with tr X = 1 and X_ij = 0 on edges.
//! The same value is min { t : Y ⪰ 0, Y_ii = t − 1, Y_ij = −1 on non-edges },
//! whose dual slack is again a feasible X. The solver picks whichever of the
//! two programs has fewer equality constraints, so dense graphs stay cheap.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sdp::{self, IpmOptions, IpmStatus, SdpProblem, SparseSym};

pub const DEFAULT_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const MIN_TOLERANCE: f64 = 1e-10;
pub const MAX_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SdpStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

/// Which of the two equivalent programs was solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Variables on X directly; one constraint per edge.
    EdgeZero,
    /// Variables on Y; one constraint per non-edge.
    NonEdgeGram,
    /// Single vertex, no solve.
    Trivial,
}

/// Feasibility residuals of a candidate ϑ matrix, recomputed from X alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub max_edge_entry: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub residuals: Residuals,
    pub tolerance: f64,
    pub psd_ok: bool,
    pub trace_ok: bool,
    pub edges_ok: bool,
}

impl FeasibilityReport {
    pub fn passed(&self) -> bool {
        self.psd_ok && self.trace_ok && self.edges_ok
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: DMatrix<f64>,
    /// ⟨J, X⟩; the reported ϑ estimate.
    pub primal_value: f64,
    /// λ_max(J + M) for the edge-supported M read off the dual iterate; an
    /// upper bound on ϑ whatever the quality of the iterate.
    pub dual_value: f64,
    pub tolerance: f64,
    pub status: SdpStatus,
    pub residuals: Residuals,
    pub iterations: usize,
    pub formulation: Formulation,
}

impl SdpSolution {
    pub fn theta(&self) -> f64 {
        self.primal_value
    }

    pub fn gap(&self) -> f64 {
        self.dual_value - self.primal_value
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ThetaOptions {
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions {
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

pub fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(MIN_TOLERANCE..=MAX_TOLERANCE).contains(&tolerance) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tolerance:e} outside [{MIN_TOLERANCE:e}, {MAX_TOLERANCE:e}]"
        )));
    }
    Ok(())
}

/// ϑ(g) at the given absolute tolerance.
pub fn theta(g: &Graph, tolerance: f64) -> Result<SdpSolution> {
    theta_with(
        g,
        ThetaOptions {
            tolerance,
            ..ThetaOptions::default()
        },
    )
}

pub fn theta_with(g: &Graph, opts: ThetaOptions) -> Result<SdpSolution> {
    check_tolerance(opts.tolerance)?;
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidArgument("ϑ needs at least one vertex".into()));
    }
    if n == 1 {
        let x = DMatrix::from_element(1, 1, 1.0);
        return Ok(SdpSolution {
            residuals: residuals(g, &x),
            x,
            primal_value: 1.0,
            dual_value: 1.0,
            tolerance: opts.tolerance,
            status: SdpStatus::Converged,
            iterations: 0,
            formulation: Formulation::Trivial,
        });
    }

    let non_edges = n * (n - 1) / 2 - g.edge_count();
    let ipm = IpmOptions {
        tol: (opts.tolerance * 1e-3).max(1e-14),
        max_iter: opts.max_iter.min(200),
    };
    let use_edges = g.edge_count() + 1 <= non_edges + n - 1;
    let (x, bound_matrix, run, formulation) = if use_edges {
        let run = sdp::solve(&edge_zero_program(g), ipm);
        // Z = −J − y₀I − Σ y_e A_e ⪰ 0  ⇔  −y₀ ≥ λ_max(J + Σ y_e A_e)
        let mut k = DMatrix::from_element(n, n, 1.0);
        for (&(i, j), &ye) in g.edges().iter().zip(run.y.iter().skip(1)) {
            k[(i, j)] += ye;
            k[(j, i)] += ye;
        }
        (run.x.clone(), k, run, Formulation::EdgeZero)
    } else {
        let run = sdp::solve(&non_edge_gram_program(g), ipm);
        // Y = tI − J − M with M on edges; ϑ ≤ λ_max(J + M)
        let mut k = DMatrix::from_element(n, n, 1.0);
        for &(i, j) in g.edges() {
            let m = -0.5 * (run.x[(i, j)] + run.x[(j, i)]);
            k[(i, j)] = m;
            k[(j, i)] = m;
        }
        (run.z.clone(), k, run, Formulation::NonEdgeGram)
    };
    // any edge-supported perturbation of J bounds ϑ from above
    let dual_value = bound_matrix.symmetric_eigenvalues().max();

    let primal_value = x.sum();
    let report = verify_feasibility(g, &x, opts.tolerance)?;
    let gap_ok = (dual_value - primal_value).abs() <= opts.tolerance;
    let status = match run.status {
        IpmStatus::Diverged => SdpStatus::Infeasible,
        _ if report.passed() && gap_ok => SdpStatus::Converged,
        _ => SdpStatus::MaxIterations,
    };
    log::debug!(
        "theta n={n} m={} {formulation:?}: {primal_value:.12} (gap {:.2e}, {} iterations, {status:?})",
        g.edge_count(),
        dual_value - primal_value,
        run.iterations
    );
    Ok(SdpSolution {
        x,
        primal_value,
        dual_value,
        tolerance: opts.tolerance,
        status,
        residuals: report.residuals,
        iterations: run.iterations,
        formulation,
    })
}

/// min ⟨−J, X⟩, tr X = 1, X_ij = 0 on edges.
fn edge_zero_program(g: &Graph) -> SdpProblem {
    let n = g.n();
    let mut constraints = vec![SparseSym::identity(n)];
    let mut b = vec![1.0];
    for &(i, j) in g.edges() {
        constraints.push(SparseSym::new([(i, j, 1.0)]));
        b.push(0.0);
    }
    SdpProblem {
        c: -DMatrix::from_element(n, n, 1.0),
        constraints,
        b,
    }
}

/// min Y_00, Y_ii = Y_00, Y_ij = −1 on non-edges; ϑ = 1 + Y_00.
fn non_edge_gram_program(g: &Graph) -> SdpProblem {
    let n = g.n();
    let mut constraints = Vec::new();
    let mut b = Vec::new();
    for i in 1..n {
        constraints.push(SparseSym::new([(i, i, 1.0), (0, 0, -1.0)]));
        b.push(0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                constraints.push(SparseSym::new([(i, j, 0.5)]));
                b.push(-1.0);
            }
        }
    }
    let mut c = DMatrix::zeros(n, n);
    c[(0, 0)] = 1.0;
    SdpProblem { c, constraints, b }
}

fn residuals(g: &Graph, x: &DMatrix<f64>) -> Residuals {
    let symmetric = (x + x.transpose()) * 0.5;
    let min_eigenvalue = symmetric.symmetric_eigenvalues().min();
    let trace_error = (x.trace() - 1.0).abs();
    let max_edge_entry = g
        .edges()
        .iter()
        .map(|&(i, j)| x[(i, j)].abs().max(x[(j, i)].abs()))
        .fold(0.0, f64::max);
    Residuals {
        min_eigenvalue,
        trace_error,
        max_edge_entry,
    }
}

/// Recomputes the three feasibility residuals of `x` for the ϑ program of
/// `g`, without trusting any solver output.
pub fn verify_feasibility(g: &Graph, x: &DMatrix<f64>, tolerance: f64) -> Result<FeasibilityReport> {
    if x.nrows() != g.n() || x.ncols() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: if x.nrows() != g.n() { x.nrows() } else { x.ncols() },
        });
    }
    let r = residuals(g, x);
    Ok(FeasibilityReport {
        residuals: r,
        tolerance,
        psd_ok: r.min_eigenvalue >= -tolerance,
        trace_ok: r.trace_error <= tolerance,
        edges_ok: r.max_edge_entry <= tolerance,
    })
}

/// Closed form ϑ(C_n) = n cos(π/n) / (1 + cos(π/n)) for odd cycles.
pub fn odd_cycle_theta(n: usize) -> Result<f64> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "odd cycle formula needs odd n >= 5, got {n}"
        )));
    }
    let c = (std::f64::consts::PI / n as f64).cos();
    Ok(n as f64 * c / (1.0 + c))
}

/// Both bounds on `S` for `g`: α(G) from exact search and ϑ(G) from the SDP.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub alpha: usize,
    pub theta: f64,
}

pub fn theta_sandwich(g: &Graph, tolerance: f64) -> Result<Sandwich> {
    let alpha = crate::alpha::independence_number(g)?.alpha;
    let sol = theta(g, tolerance)?;
    if sol.status != SdpStatus::Converged {
        return Err(Error::NotConverged(sol.status));
    }
    let theta = sol.primal_value;
    if alpha as f64 > theta + tolerance {
        return Err(Error::InvalidArgument(format!(
            "α = {alpha} exceeds ϑ = {theta} beyond tolerance"
        )));
    }
    Ok(Sandwich { alpha, theta })
}
