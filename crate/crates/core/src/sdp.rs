//! Dense primal-dual interior-point method for small semidefinite programs
//! with sparse constraint matrices.
//!
//! Primal:  min ⟨C, X⟩  s.t. ⟨A_k, X⟩ = b_k,  X ⪰ 0
//! Dual:    max bᵀy     s.t. Σ y_k A_k + Z = C,  Z ⪰ 0
//!
//! Search directions are HKM with a Mehrotra predictor-corrector. The Schur
//! complement `M_kl = tr(A_k X A_l Z⁻¹)` is assembled entrywise from the
//! sparse `A_k`, then factored with a dense Cholesky.

use faer::linalg::solvers::Solve;
use nalgebra::{DMatrix, DVector};

/// Symmetric matrix given by its upper-triangle nonzeros. An entry
/// `(i, j, v)` with `i < j` stands for both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new(entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let entries = entries
            .into_iter()
            .map(|(i, j, v)| (i.min(j), i.max(j), v))
            .collect();
        SparseSym { entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|i| (i, i, 1.0)))
    }

    /// Inner product ⟨A, G⟩ for any square `G` (only its symmetric part counts).
    pub fn dot(&self, g: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * g[(i, i)]
                } else {
                    v * (g[(i, j)] + g[(j, i)])
                }
            })
            .sum()
    }

    fn add_scaled_to(&self, alpha: f64, out: &mut DMatrix<f64>) {
        for &(i, j, v) in &self.entries {
            out[(i, j)] += alpha * v;
            if i != j {
                out[(j, i)] += alpha * v;
            }
        }
    }

    /// Entries of the full (both triangles) matrix.
    fn full(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.entries.len());
        for &(i, j, v) in &self.entries {
            out.push((i, j, v));
            if i != j {
                out.push((j, i, v));
            }
        }
        out
    }

    fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub c: DMatrix<f64>,
    pub constraints: Vec<SparseSym>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct IpmOptions {
    /// Target for relative gap and relative infeasibilities.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    /// Stopped on the iteration cap or because progress stalled.
    Stalled,
    /// Iterates diverged; the problem is likely infeasible or unbounded.
    Diverged,
}

#[derive(Clone, Debug)]
pub struct IpmResult {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Dual slack, computed as `C − Σ y_k A_k` so the dual equality holds exactly.
    /// All three are the iterate with the best merit seen, not the last one.
    pub z: DMatrix<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub status: IpmStatus,
}

impl SdpProblem {
    fn n(&self) -> usize {
        self.c.nrows()
    }

    fn apply(&self, g: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints.iter().map(|a| a.dot(g)),
        )
    }

    fn apply_adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n();
        let mut out = DMatrix::zeros(n, n);
        for (a, &yk) in self.constraints.iter().zip(y.iter()) {
            a.add_scaled_to(yk, &mut out);
        }
        out
    }

    /// `C − Aᵀy`.
    pub fn dual_slack(&self, y: &DVector<f64>) -> DMatrix<f64> {
        &self.c - self.apply_adjoint(y)
    }
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Largest step `α` with `X + α dX ⪰ 0`, or `None` if unbounded.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let chol = x.clone().cholesky()?;
    let l = chol.l();
    let linv_dx = l.solve_lower_triangular(dx)?;
    let s = l.solve_lower_triangular(&linv_dx.transpose())?;
    let lambda_min = sym(s).symmetric_eigenvalues().min();
    if lambda_min >= 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(-1.0 / lambda_min)
    }
}

/// Iterations without a new best merit before giving up.
const STALL_WINDOW: usize = 5;

struct Schur {
    matrix: faer::Mat<f64>,
    factor: faer::linalg::solvers::Llt<f64>,
}

impl Schur {
    fn assemble(full: &[Vec<(usize, usize, f64)>], x: &DMatrix<f64>, zinv: &DMatrix<f64>) -> Option<Self> {
        let m = full.len();
        let mut mat = faer::Mat::<f64>::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let mut acc = 0.0;
                for &(p, q, v) in &full[k] {
                    for &(r, s, w) in &full[l] {
                        acc += v * w * x[(q, r)] * zinv[(s, p)];
                    }
                }
                mat[(k, l)] = acc;
                mat[(l, k)] = acc;
            }
        }
        let scale = (0..m).map(|k| mat[(k, k)].abs()).fold(0.0, f64::max);
        if let Ok(factor) = mat.llt(faer::Side::Lower) {
            return Some(Schur { matrix: mat, factor });
        }
        // near-singular: factor with a tiny diagonal shift, refine against the original
        let mut shifted = mat.clone();
        for k in 0..m {
            shifted[(k, k)] += 1e-13 * scale.max(1.0);
        }
        let factor = shifted.llt(faer::Side::Lower).ok()?;
        Some(Schur { matrix: mat, factor })
    }

    /// Cholesky solve plus one round of iterative refinement.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let b = faer::Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let mut sol = b.clone();
        self.factor.solve_in_place(sol.as_mut());
        let mut residual = &b - &self.matrix * &sol;
        self.factor.solve_in_place(residual.as_mut());
        sol += &residual;
        DVector::from_fn(rhs.len(), |i, _| sol[(i, 0)])
    }
}

/// Solves `problem` from an infeasible start.
pub fn solve(problem: &SdpProblem, opts: IpmOptions) -> IpmResult {
    let n = problem.n();
    let m = problem.constraints.len();
    let b = DVector::from_column_slice(&problem.b);
    let full: Vec<_> = problem.constraints.iter().map(SparseSym::full).collect();

    let c_norm = problem.c.norm();
    let b_norm = b.norm();
    let sqrt_n = (n as f64).sqrt();
    let max_a = problem
        .constraints
        .iter()
        .map(SparseSym::frobenius)
        .fold(0.0, f64::max);
    let xi = problem
        .constraints
        .iter()
        .zip(&problem.b)
        .map(|(a, bk)| n as f64 * (1.0 + bk.abs()) / (1.0 + a.frobenius()))
        .fold(10f64.max(sqrt_n), f64::max);
    let eta = 10f64.max(sqrt_n).max(c_norm).max(max_a) / sqrt_n;

    let mut x = DMatrix::<f64>::identity(n, n) * xi;
    let mut y = DVector::<f64>::zeros(m);
    let mut z = DMatrix::<f64>::identity(n, n) * eta;
    let mut status = IpmStatus::Stalled;
    let mut iterations = 0;
    let mut best: Option<(f64, usize, DMatrix<f64>, DVector<f64>)> = None;

    for iter in 0..opts.max_iter {
        iterations = iter;
        let rp = &b - problem.apply(&x);
        let rd = problem.dual_slack(&y) - &z;
        let mu = inner(&x, &z) / n as f64;
        let pobj = inner(&problem.c, &x);
        let dobj = b.dot(&y);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = rd.norm() / (1.0 + c_norm);
        log::trace!(
            "ipm iter {iter}: pobj {pobj:.12e} dobj {dobj:.12e} gap {rel_gap:.2e} pinf {pinf:.2e} dinf {dinf:.2e}"
        );
        if !pobj.is_finite() || !dobj.is_finite() || x.norm() > 1e12 || z.norm() > 1e12 {
            status = IpmStatus::Diverged;
            break;
        }
        let merit = rel_gap.max(pinf).max(dinf);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, iter, x.clone(), y.clone()));
        }
        if merit < opts.tol {
            status = IpmStatus::Optimal;
            break;
        }
        // near the optimum, ill-conditioning can make feasibility drift away
        if best.as_ref().is_some_and(|b| iter >= b.1 + STALL_WINDOW) {
            break;
        }

        let Some(zinv) = z.clone().cholesky().map(|c| c.inverse()) else {
            break;
        };
        let Some(schur) = Schur::assemble(&full, &x, &zinv) else {
            break;
        };

        let x_rd_zinv = problem.apply(&(&x * &rd * &zinv));
        let direction = |rc_zinv: &DMatrix<f64>| {
            let rhs = &rp - problem.apply(rc_zinv) + &x_rd_zinv;
            let dy = schur.solve(&rhs);
            let dz = &rd - problem.apply_adjoint(&dy);
            let dx = sym(rc_zinv - &x * &dz * &zinv);
            (dx, dy, dz)
        };
        let step = |dx: &DMatrix<f64>, dz: &DMatrix<f64>, tau: f64| {
            let ap = max_step(&x, dx).map_or(0.0, |a| (tau * a).min(1.0));
            let ad = max_step(&z, dz).map_or(0.0, |a| (tau * a).min(1.0));
            (ap, ad)
        };

        // predictor: Rc = −XZ, so Rc Z⁻¹ = −X
        let (dx_a, _, dz_a) = direction(&(-&x));
        let (ap, ad) = step(&dx_a, &dz_a, 1.0);
        let mu_aff = inner(&(&x + &dx_a * ap), &(&z + &dz_a * ad)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector: Rc = σμI − XZ − dXa dZa
        let rc_zinv = &zinv * (sigma * mu) - &x - &dx_a * &dz_a * &zinv;
        let (dx, dy, dz) = direction(&rc_zinv);
        let tau = 0.9 + 0.09 * ap.min(ad);
        let (ap, ad) = step(&dx, &dz, tau);
        if ap < 1e-10 && ad < 1e-10 {
            break;
        }

        x += &dx * ap;
        x = sym(x);
        y += &dy * ad;
        z += &dz * ad;
        z = sym(z);
        iterations = iter + 1;
    }

    if status != IpmStatus::Diverged {
        if let Some((_, _, bx, by)) = best {
            x = bx;
            y = by;
        }
    }
    let z_exact = problem.dual_slack(&y);
    IpmResult {
        primal_objective: inner(&problem.c, &x),
        dual_objective: b.dot(&y),
        x,
        y,
        z: z_exact,
        iterations,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_max_eigenvalue() {
        // min ⟨C, X⟩ with tr X = 1 gives λ_min(C)
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let problem = SdpProblem {
            c: c.clone(),
            constraints: vec![SparseSym::identity(2)],
            b: vec![1.0],
        };
        let r = solve(&problem, IpmOptions::default());
        assert_eq!(r.status, IpmStatus::Optimal);
        let expected = c.symmetric_eigenvalues().min();
        assert!((r.primal_objective - expected).abs() < 1e-8);
        assert!((r.dual_objective - expected).abs() < 1e-8);
    }

    #[test]
    fn sparse_dot_counts_both_triangles() {
        let a = SparseSym::new([(1, 0, 0.5)]);
        let g = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 4.0, 0.0]);
        assert_eq!(a.dot(&g), 3.0);
    }
}
