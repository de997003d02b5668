//! Orthogonal representations: a handle state ψ and one unit vector per
//! vertex, adjacent vertices orthogonal, with Σ|⟨i|ψ⟩|² = ϑ(G) at the optimum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::theta::{SdpSolution, SdpStatus};

pub type CVector = DVector<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoRep {
    psi: CVector,
    vectors: Vec<CVector>,
}

impl OrthoRep {
    /// Builds a representation; every vector must live in the same space as `psi`.
    pub fn new(psi: CVector, vectors: Vec<CVector>) -> Result<Self> {
        let d = psi.len();
        if d == 0 {
            return Err(Error::InvalidArgument("representation of dimension 0".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                actual: v.len(),
            });
        }
        Ok(OrthoRep { psi, vectors })
    }

    pub fn from_real(psi: &[f64], vectors: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            real_vector(psi),
            vectors.iter().map(|v| real_vector(v)).collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.psi.len()
    }

    pub fn psi(&self) -> &CVector {
        &self.psi
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, v: usize) -> &CVector {
        &self.vectors[v]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// True when every coordinate is real.
    pub fn is_real(&self) -> bool {
        std::iter::once(&self.psi)
            .chain(&self.vectors)
            .all(|v| v.iter().all(|c| c.im == 0.0))
    }

    /// |⟨i|ψ⟩|² for every vertex.
    pub fn overlaps(&self) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|v| v.dotc(&self.psi).norm_sqr())
            .collect()
    }

    pub fn overlap_sum(&self) -> f64 {
        self.overlaps().iter().sum()
    }

    /// Same representation with every vector (and ψ) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = Complex64::new(factor, 0.0);
        OrthoRep {
            psi: &self.psi * f,
            vectors: self.vectors.iter().map(|v| v * f).collect(),
        }
    }

    /// Replaces the vector of vertex `v`.
    pub fn with_vector(&self, v: usize, vector: CVector) -> Result<Self> {
        if vector.len() != self.dimension() {
            return Err(Error::Dimension {
                expected: self.dimension(),
                actual: vector.len(),
            });
        }
        let mut out = self.clone();
        out.vectors[v] = vector;
        Ok(out)
    }
}

pub fn real_vector(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RepReport {
    pub max_edge_overlap: f64,
    pub max_norm_error: f64,
    pub overlap_sum: f64,
    pub theta_target: f64,
    pub sum_error: f64,
    pub tolerance: f64,
    pub orthogonality_ok: bool,
    pub norms_ok: bool,
    pub sum_ok: bool,
}

impl RepReport {
    pub fn passed(&self) -> bool {
        self.orthogonality_ok && self.norms_ok && self.sum_ok
    }
}

/// Checks edge orthogonality, unit norms (vectors and ψ) and the overlap sum
/// against `theta_target`.
pub fn verify_ortho_rep(
    g: &Graph,
    rep: &OrthoRep,
    theta_target: f64,
    tolerance: f64,
) -> Result<RepReport> {
    if rep.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: rep.len(),
        });
    }
    let max_edge_overlap = g
        .edges()
        .iter()
        .map(|&(i, j)| rep.vectors[i].dotc(&rep.vectors[j]).norm())
        .fold(0.0, f64::max);
    let max_norm_error = std::iter::once(&rep.psi)
        .chain(&rep.vectors)
        .map(|v| (v.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let overlap_sum = rep.overlap_sum();
    let sum_error = (overlap_sum - theta_target).abs();
    Ok(RepReport {
        max_edge_overlap,
        max_norm_error,
        overlap_sum,
        theta_target,
        sum_error,
        tolerance,
        orthogonality_ok: max_edge_overlap <= tolerance,
        norms_ok: max_norm_error <= tolerance,
        sum_ok: sum_error <= tolerance,
    })
}

/// Factors the ϑ optimum as X = WᵀW and reads the representation off the
/// columns of W. Verified at `100 · tolerance` before it is returned.
pub fn extract_ortho_rep(g: &Graph, sol: &SdpSolution, tolerance: f64) -> Result<OrthoRep> {
    if sol.status != SdpStatus::Converged {
        return Err(Error::NotConverged(sol.status));
    }
    let n = g.n();
    if sol.x.nrows() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: sol.x.nrows(),
        });
    }

    let eig = ((&sol.x + sol.x.transpose()) * 0.5).symmetric_eigen();
    let kept: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > tolerance).collect();
    if kept.is_empty() {
        return Err(Error::Extraction("X has no eigenvalue above tolerance".into()));
    }
    // row r of W is sqrt(λ_r) u_rᵀ
    let mut w = DMatrix::<f64>::zeros(kept.len(), n);
    for (r, &k) in kept.iter().enumerate() {
        let scale = eig.eigenvalues[k].sqrt();
        for i in 0..n {
            w[(r, i)] = scale * eig.eigenvectors[(i, k)];
        }
    }

    let sum = w.column_sum();
    let sum_norm = sum.norm();
    if sum_norm < 1e-12 {
        return Err(Error::Extraction("columns of W sum to zero".into()));
    }
    let psi: DVector<f64> = sum / sum_norm;

    // Longest columns first. A column is kept when, normalized, it stays
    // orthogonal to the kept columns of its neighbors; short columns whose
    // direction is dominated by rounding fail this and are rebuilt below.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|i| w.column(i).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let mut vectors: Vec<Option<DVector<f64>>> = vec![None; n];
    for &i in &order {
        if norms[i] * norms[i] <= 1e-14 {
            continue;
        }
        let col = w.column(i) / norms[i];
        let clean = g
            .neighbors(i)
            .iter()
            .filter_map(|&j| vectors[j].as_ref())
            .all(|v| v.dot(&col).abs() <= tolerance);
        if clean {
            vectors[i] = Some(col);
        }
    }
    let mut psi = psi;
    for i in 0..n {
        if vectors[i].is_none() {
            let v = fill_degenerate(g, i, &mut vectors, &mut psi);
            vectors[i] = Some(v);
        }
    }

    let rep = OrthoRep::new(
        real_vector(psi.as_slice()),
        vectors
            .into_iter()
            .map(|v| real_vector(v.expect("filled").as_slice()))
            .collect(),
    )?;
    let report = verify_ortho_rep(g, &rep, sol.primal_value, 100.0 * tolerance)?;
    if !report.passed() {
        return Err(Error::Extraction(format!(
            "edge overlap {:.3e}, norm error {:.3e}, sum error {:.3e} at tolerance {:.1e}",
            report.max_edge_overlap, report.max_norm_error, report.sum_error, report.tolerance
        )));
    }
    Ok(rep)
}

/// Unit vector for vertex `i` orthogonal to its assigned neighbors, as close
/// to ψ as possible. Grows the space by one dimension if the neighbors span it.
fn fill_degenerate(
    g: &Graph,
    i: usize,
    vectors: &mut [Option<DVector<f64>>],
    psi: &mut DVector<f64>,
) -> DVector<f64> {
    let d = psi.len();
    // orthonormal basis of the neighbors' span; Gram-Schmidt with a second
    // pass keeps it orthogonal to rounding, and a neighbor left out lies
    // within 1e-8 of the span
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for &j in g.neighbors(i) {
        if let Some(v) = &vectors[j] {
            let mut u = v / v.norm();
            for _ in 0..2 {
                for b in &basis {
                    u -= b * b.dot(&u);
                }
            }
            let norm = u.norm();
            if norm > 1e-8 {
                basis.push(u / norm);
            }
        }
    }
    let project = |v: &DVector<f64>| {
        let mut u = v.clone();
        for _ in 0..2 {
            for b in &basis {
                u -= b * b.dot(&u);
            }
        }
        u
    };
    let candidates = std::iter::once(psi.clone())
        .chain((0..d).map(|k| DVector::from_fn(d, |r, _| if r == k { 1.0 } else { 0.0 })));
    for cand in candidates {
        let u = project(&cand);
        let norm = u.norm();
        if norm > 1e-6 {
            return u / norm;
        }
    }
    // neighbors span everything: add a fresh axis
    for v in vectors.iter_mut().flatten() {
        *v = v.clone().insert_row(d, 0.0);
    }
    *psi = psi.clone().insert_row(d, 0.0);
    DVector::from_fn(d + 1, |r, _| if r == d { 1.0 } else { 0.0 })
}

/// The standard qutrit realization of the pentagon: ψ = (1,0,0) and
/// v_k = (cos θ, sin θ cos(4πk/5), sin θ sin(4πk/5)) with
/// cos²θ = cos(π/5) / (1 + cos(π/5)). Consecutive vectors are orthogonal,
/// so it realizes [`Graph::cycle`]`(5)`.
pub fn builtin_kcbs_rep() -> OrthoRep {
    let c = (std::f64::consts::PI / 5.0).cos();
    let cos_t = (c / (1.0 + c)).sqrt();
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    let vectors: Vec<Vec<f64>> = (0..5)
        .map(|k| {
            let phi = 4.0 * std::f64::consts::PI * k as f64 / 5.0;
            vec![cos_t, sin_t * phi.cos(), sin_t * phi.sin()]
        })
        .collect();
    OrthoRep::from_real(&[1.0, 0.0, 0.0], &vectors).expect("consistent dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::theta;

    const TOL: f64 = 1e-7;

    #[test]
    fn kcbs_vectors() {
        let rep = builtin_kcbs_rep();
        let c5 = Graph::cycle(5).unwrap();
        let inv_sqrt5 = 1.0 / 5f64.sqrt();
        for (k, o) in rep.overlaps().iter().enumerate() {
            assert!((o - inv_sqrt5).abs() < 1e-15, "overlap {k}");
            assert!((rep.vector(k).norm() - 1.0).abs() < 1e-15);
        }
        for &(i, j) in c5.edges() {
            assert!(rep.vector(i).dotc(rep.vector(j)).norm() < 1e-15);
        }
        // non-adjacent pairs are not orthogonal
        assert!(rep.vector(0).dotc(rep.vector(2)).norm() > 0.1);
        let report = verify_ortho_rep(&c5, &rep, 5f64.sqrt(), 1e-12).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn verifier_catches_defects() {
        let c5 = Graph::cycle(5).unwrap();
        let rep = builtin_kcbs_rep();
        let bad = rep.with_vector(1, rep.psi().clone()).unwrap();
        let r = verify_ortho_rep(&c5, &bad, 5f64.sqrt(), 1e-6).unwrap();
        assert!(!r.orthogonality_ok);

        let r = verify_ortho_rep(&c5, &rep.scaled(2.0), 5f64.sqrt(), 1e-6).unwrap();
        assert!(!r.norms_ok);

        assert!(matches!(
            verify_ortho_rep(&Graph::cycle(6).unwrap(), &rep, 1.0, 1e-6),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn extract_pentagon() {
        let c5 = Graph::cycle(5).unwrap();
        let sol = theta(&c5, TOL).unwrap();
        let rep = extract_ortho_rep(&c5, &sol, TOL).unwrap();
        assert_eq!(rep.dimension(), 3);
        assert!((rep.overlap_sum() - 5f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn extract_empty_and_single() {
        let g = Graph::empty(4);
        let sol = theta(&g, TOL).unwrap();
        let rep = extract_ortho_rep(&g, &sol, TOL).unwrap();
        assert_eq!(rep.dimension(), 1);
        for v in rep.vectors() {
            assert!((v.dotc(rep.psi()).norm() - 1.0).abs() < 1e-6);
        }
        assert!((rep.overlap_sum() - 4.0).abs() < 1e-5);

        let g = Graph::empty(1);
        let sol = theta(&g, TOL).unwrap();
        let rep = extract_ortho_rep(&g, &sol, TOL).unwrap();
        assert_eq!(rep.vector(0), rep.psi());
        assert!((rep.overlap_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_vertices_are_filled() {
        // a pendant vertex hanging off a triangle corner gets X_ii ≈ 0 in
        // some optima; either way the result must verify
        let g = Graph::unweighted(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
        let sol = theta(&g, TOL).unwrap();
        let rep = extract_ortho_rep(&g, &sol, TOL).unwrap();
        let r = verify_ortho_rep(&g, &rep, sol.primal_value, 100.0 * TOL).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn fill_extends_dimension_when_spanned() {
        let g = Graph::unweighted(3, [(0, 2), (1, 2)]).unwrap();
        let mut vectors = vec![
            Some(DVector::from_vec(vec![1.0, 0.0])),
            Some(DVector::from_vec(vec![0.0, 1.0])),
            None,
        ];
        let mut psi = DVector::from_vec(vec![0.6, 0.8]);
        let v = fill_degenerate(&g, 2, &mut vectors, &mut psi);
        assert_eq!(v.len(), 3);
        assert_eq!(psi.len(), 3);
        assert_eq!(vectors[0].as_ref().unwrap().len(), 3);
        assert_eq!(v.dot(vectors[0].as_ref().unwrap()), 0.0);
    }
}
