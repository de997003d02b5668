//! Exact two-point statistics for rank-1 projective measurements.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::orthorep::{CVector, OrthoRep};

pub type CMatrix = DMatrix<Complex64>;

/// Outcome probabilities below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    rho: CMatrix,
}

impl QState {
    /// Validates trace 1 (1e−12), hermiticity and positivity (1e−10).
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::Dimension {
                expected: rho.nrows(),
                actual: rho.ncols(),
            });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {trace} is not 1")));
        }
        let herm_err = (&rho - rho.adjoint()).norm();
        if herm_err > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix not Hermitian (error {herm_err:e})"
            )));
        }
        let min_eig = hermitian_min_eigenvalue(&rho);
        if min_eig < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has eigenvalue {min_eig:e}"
            )));
        }
        Ok(QState { rho })
    }

    /// |ψ⟩⟨ψ| for a (normalized here) state vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm < ZERO_PROBABILITY {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi = psi.unscale(norm);
        Ok(QState {
            rho: &psi * psi.adjoint(),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        QState {
            rho: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    /// `(1 − p)·ρ + p·I/d`.
    pub fn depolarized(&self, p: f64) -> Self {
        let d = self.dimension();
        let mixed = CMatrix::identity(d, d).unscale(d as f64);
        QState {
            rho: self.rho.scale(1.0 - p) + mixed.scale(p),
        }
    }

    pub fn dimension(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }
}

fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    // embed H = A + iB as the real symmetric [[A, -B], [B, A]]
    let d = m.nrows();
    let real = DMatrix::<f64>::from_fn(2 * d, 2 * d, |r, c| {
        let z = m[(r % d, c % d)];
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    ((&real + real.transpose()) * 0.5).symmetric_eigenvalues().min()
}

fn check_dims(state: &QState, v: &CVector) -> Result<()> {
    if v.len() != state.dimension() {
        return Err(Error::Dimension {
            expected: state.dimension(),
            actual: v.len(),
        });
    }
    Ok(())
}

fn projector(v: &CVector) -> CMatrix {
    let u = v.unscale(v.norm());
    &u * u.adjoint()
}

/// Born probability ⟨v|ρ|v⟩ of outcome 1 for the projector onto `v`.
pub fn born_single(state: &QState, v: &CVector) -> Result<f64> {
    check_dims(state, v)?;
    let u = v.unscale(v.norm());
    let p = u.dotc(&(&state.rho * &u)).re;
    Ok(p.clamp(0.0, 1.0))
}

/// Post-measurement state for outcome `outcome` of the projector onto `v`.
pub fn luders_update(state: &QState, v: &CVector, outcome: u8) -> Result<QState> {
    check_dims(state, v)?;
    let d = state.dimension();
    let proj = match outcome {
        1 => projector(v),
        0 => CMatrix::identity(d, d) - projector(v),
        _ => return Err(Error::InvalidArgument(format!("outcome {outcome} is not a bit"))),
    };
    let unnormalized = &proj * &state.rho * &proj;
    let p = unnormalized.trace().re;
    if p <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability(p));
    }
    let rho = unnormalized.unscale(p);
    Ok(QState {
        rho: (&rho + rho.adjoint()).unscale(2.0),
    })
}

/// Ordered measurement of two observables on an edge: `first`, then `second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoPointContext {
    pub first: usize,
    pub second: usize,
}

impl TwoPointContext {
    pub fn new(g: &Graph, first: usize, second: usize) -> Result<Self> {
        if !g.has_edge(first, second) {
            return Err(Error::InvalidArgument(format!(
                "({first}, {second}) is not an edge, so not a context"
            )));
        }
        Ok(TwoPointContext { first, second })
    }

    pub fn reversed(self) -> Self {
        TwoPointContext {
            first: self.second,
            second: self.first,
        }
    }
}

/// `table[a][b] = P(a, b | first, second)`.
pub type JointTable = [[f64; 2]; 2];

/// Sequential projective measurement: Born rule for the first outcome,
/// Lüders update, Born rule again.
pub fn joint_probs_projective_vectors(
    state: &QState,
    first: &CVector,
    second: &CVector,
) -> Result<JointTable> {
    let p1 = born_single(state, first)?;
    check_dims(state, second)?;
    let mut table = [[0.0; 2]; 2];
    for a in 0..2u8 {
        let pa = if a == 1 { p1 } else { 1.0 - p1 };
        if pa <= ZERO_PROBABILITY {
            continue;
        }
        let post = luders_update(state, first, a)?;
        let q1 = born_single(&post, second)?;
        table[a as usize] = [pa * (1.0 - q1), pa * q1];
    }
    Ok(clamp_table(table))
}

/// First measurement destroys the system; outcome 1 re-prepares |first⟩,
/// outcome 0 re-prepares the Lüders outcome-0 state of the input.
pub fn joint_probs_demolition_vectors(
    state: &QState,
    first: &CVector,
    second: &CVector,
) -> Result<JointTable> {
    let p1 = born_single(state, first)?;
    check_dims(state, second)?;
    let mut table = [[0.0; 2]; 2];
    if p1 > ZERO_PROBABILITY {
        let prepared = QState::pure(first)?;
        let q1 = born_single(&prepared, second)?;
        table[1] = [p1 * (1.0 - q1), p1 * q1];
    }
    let p0 = 1.0 - p1;
    if p0 > ZERO_PROBABILITY {
        let prepared = luders_update(state, first, 0)?;
        let q1 = born_single(&prepared, second)?;
        table[0] = [p0 * (1.0 - q1), p0 * q1];
    }
    Ok(clamp_table(table))
}

fn clamp_table(mut t: JointTable) -> JointTable {
    for row in &mut t {
        for p in row {
            *p = p.clamp(0.0, 1.0);
        }
    }
    t
}

pub fn joint_probs_projective(state: &QState, ctx: TwoPointContext, rep: &OrthoRep) -> Result<JointTable> {
    let (a, b) = context_vectors(ctx, rep)?;
    joint_probs_projective_vectors(state, a, b)
}

pub fn joint_probs_demolition(state: &QState, ctx: TwoPointContext, rep: &OrthoRep) -> Result<JointTable> {
    let (a, b) = context_vectors(ctx, rep)?;
    joint_probs_demolition_vectors(state, a, b)
}

fn context_vectors(ctx: TwoPointContext, rep: &OrthoRep) -> Result<(&CVector, &CVector)> {
    let n = rep.len();
    for v in [ctx.first, ctx.second] {
        if v >= n {
            return Err(Error::BadVertex(v, n));
        }
    }
    Ok((rep.vector(ctx.first), rep.vector(ctx.second)))
}

/// How the first of the two measurements is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Projective,
    DemolitionReprepare,
}

impl Scheme {
    pub fn joint(self, state: &QState, first: &CVector, second: &CVector) -> Result<JointTable> {
        match self {
            Scheme::Projective => joint_probs_projective_vectors(state, first, second),
            Scheme::DemolitionReprepare => joint_probs_demolition_vectors(state, first, second),
        }
    }
}

fn pair_key(g: &Graph, i: usize, j: usize) -> Result<(usize, usize)> {
    let key = (i.min(j), i.max(j));
    if !g.has_edge(key.0, key.1) {
        return Err(Error::InvalidArgument(format!("({i}, {j}) is not an edge")));
    }
    Ok(key)
}

fn lookup<K: Ord + std::fmt::Debug, V: Copy>(map: &BTreeMap<K, V>, key: K, what: &str) -> Result<V> {
    map.get(&key)
        .copied()
        .ok_or_else(|| Error::MissingEntry(format!("{what} {key:?}")))
}

/// `S = Σ_i P(1|i) − Σ_{(i,j)∈E} P(1,1|i,j)`. Pair keys are `(lo, hi)`.
pub fn evaluate_s(
    g: &Graph,
    singles: &BTreeMap<usize, f64>,
    pairs: &BTreeMap<(usize, usize), f64>,
) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..g.n() {
        s += lookup(singles, i, "single")?;
    }
    for &(i, j) in g.edges() {
        s -= lookup(pairs, pair_key(g, i, j)?, "pair")?;
    }
    Ok(s)
}

/// `S' = Σ_i P(1|i) + Σ_{(i,j)∈E} [P(0,0) + P(0,1) + P(1,0)]`, so that
/// `S = S' − |E|` whenever each table is normalized.
pub fn evaluate_s_prime(
    g: &Graph,
    singles: &BTreeMap<usize, f64>,
    tables: &BTreeMap<(usize, usize), JointTable>,
) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..g.n() {
        s += lookup(singles, i, "single")?;
    }
    for &(i, j) in g.edges() {
        let t = lookup(tables, pair_key(g, i, j)?, "pair table")?;
        s += t[0][0] + t[0][1] + t[1][0];
    }
    Ok(s)
}

/// Exact single and pair statistics of a representation on a state.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactStatistics {
    pub singles: BTreeMap<usize, f64>,
    /// Keyed by `(lo, hi)`, measured in that order.
    pub tables: BTreeMap<(usize, usize), JointTable>,
}

impl ExactStatistics {
    pub fn compute(g: &Graph, rep: &OrthoRep, state: &QState, scheme: Scheme) -> Result<Self> {
        if rep.len() != g.n() {
            return Err(Error::Dimension {
                expected: g.n(),
                actual: rep.len(),
            });
        }
        let singles = (0..g.n())
            .map(|i| Ok((i, born_single(state, rep.vector(i))?)))
            .collect::<Result<_>>()?;
        let tables = g
            .edges()
            .iter()
            .map(|&(i, j)| Ok(((i, j), scheme.joint(state, rep.vector(i), rep.vector(j))?)))
            .collect::<Result<_>>()?;
        Ok(ExactStatistics { singles, tables })
    }

    pub fn pair_ones(&self) -> BTreeMap<(usize, usize), f64> {
        self.tables.iter().map(|(&k, t)| (k, t[1][1])).collect()
    }

    pub fn s(&self, g: &Graph) -> Result<f64> {
        evaluate_s(g, &self.singles, &self.pair_ones())
    }

    pub fn s_prime(&self, g: &Graph) -> Result<f64> {
        evaluate_s_prime(g, &self.singles, &self.tables)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthorep::{builtin_kcbs_rep, real_vector};

    fn basis(d: usize, k: usize) -> CVector {
        CVector::from_fn(d, |r, _| Complex64::new(if r == k { 1.0 } else { 0.0 }, 0.0))
    }

    #[test]
    fn born_examples() {
        let psi = real_vector(&[0.6, 0.8, 0.0]);
        let pure = QState::pure(&psi).unwrap();
        assert!((born_single(&pure, &psi).unwrap() - 1.0).abs() < 1e-15);
        let mixed = QState::maximally_mixed(3);
        assert!((born_single(&mixed, &psi).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let rep = builtin_kcbs_rep();
        let state = QState::pure(rep.psi()).unwrap();
        let p = born_single(&state, rep.vector(2)).unwrap();
        assert!((p - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(born_single(&state, &basis(2, 0)).is_err());
    }

    #[test]
    fn luders_examples() {
        let psi = basis(3, 0);
        let state = QState::pure(&psi).unwrap();
        let orth = basis(3, 1);
        let after = luders_update(&state, &orth, 0).unwrap();
        assert!((after.rho() - state.rho()).norm() < 1e-15);

        let v = real_vector(&[0.6, 0.8, 0.0]);
        let after = luders_update(&state, &v, 1).unwrap();
        assert!((after.rho() - QState::pure(&v).unwrap().rho()).norm() < 1e-14);

        let half = QState::maximally_mixed(2);
        let q = real_vector(&[0.8, 0.6]);
        let after = luders_update(&half, &q, 1).unwrap();
        assert!((after.rho() - QState::pure(&q).unwrap().rho()).norm() < 1e-14);

        assert!(matches!(
            luders_update(&state, &orth, 1),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn state_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(QState::new(bad_trace).is_err());
        let mut not_psd = CMatrix::zeros(2, 2);
        not_psd[(0, 0)] = Complex64::new(1.5, 0.0);
        not_psd[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(QState::new(not_psd).is_err());
        let mut not_herm = CMatrix::identity(2, 2).unscale(2.0);
        not_herm[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(QState::new(not_herm).is_err());
        assert!(QState::new(CMatrix::identity(2, 2).unscale(2.0)).is_ok());
    }

    #[test]
    fn kcbs_edge_tables() {
        let rep = builtin_kcbs_rep();
        let state = QState::pure(rep.psi()).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        let ctx = TwoPointContext::new(&c5, 0, 1).unwrap();
        let t = joint_probs_projective(&state, ctx, &rep).unwrap();
        assert!(t[1][1].abs() < 1e-15);
        assert!((t[1][0] - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        let d = joint_probs_demolition(&state, ctx, &rep).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert!((t[a][b] - d[a][b]).abs() < 1e-12);
            }
        }
        assert!(TwoPointContext::new(&c5, 0, 2).is_err());
    }

    #[test]
    fn eigenstate_of_first() {
        let rep = builtin_kcbs_rep();
        let c5 = Graph::cycle(5).unwrap();
        let state = QState::pure(rep.vector(3)).unwrap();
        let t = joint_probs_projective(&state, TwoPointContext::new(&c5, 3, 4).unwrap(), &rep).unwrap();
        assert!((t[1][0] - 1.0).abs() < 1e-14);
        assert!(t[0][0].abs() + t[0][1].abs() + t[1][1].abs() < 1e-14);
    }

    #[test]
    fn s_values() {
        let c5 = Graph::cycle(5).unwrap();
        let rep = builtin_kcbs_rep();
        let state = QState::pure(rep.psi()).unwrap();
        let stats = ExactStatistics::compute(&c5, &rep, &state, Scheme::Projective).unwrap();
        assert!((stats.s(&c5).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        assert!((stats.s_prime(&c5).unwrap() - (5.0 + 5f64.sqrt())).abs() < 1e-14);

        // indicator of an independent set
        let singles = BTreeMap::from([(0, 1.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)]);
        let pairs = c5.edges().iter().map(|&e| (e, 0.0)).collect();
        assert_eq!(evaluate_s(&c5, &singles, &pairs).unwrap(), 2.0);

        let mut missing = singles.clone();
        missing.remove(&4);
        assert!(matches!(
            evaluate_s(&c5, &missing, &pairs),
            Err(Error::MissingEntry(_))
        ));
    }

    #[test]
    fn maximally_mixed_pentagon() {
        let c5 = Graph::cycle(5).unwrap();
        let rep = builtin_kcbs_rep();
        let state = QState::maximally_mixed(3);
        let stats = ExactStatistics::compute(&c5, &rep, &state, Scheme::Projective).unwrap();
        // P(1|i) = 1/3; P(1,1|i,j) = (1/3)|⟨i|j⟩|² = 0 on edges
        let expected = 5.0 / 3.0 - stats.pair_ones().values().sum::<f64>();
        assert!((stats.s(&c5).unwrap() - expected).abs() < 1e-14);
        assert!((stats.s(&c5).unwrap() - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn s_prime_on_deterministic_k2() {
        let k2 = Graph::complete(2);
        let zeros = BTreeMap::from([(0, 0.0), (1, 0.0)]);
        let tables = BTreeMap::from([((0, 1), [[1.0, 0.0], [0.0, 0.0]])]);
        assert_eq!(evaluate_s_prime(&k2, &zeros, &tables).unwrap(), 1.0);
        let ones = BTreeMap::from([(0, 1.0), (1, 1.0)]);
        let tables = BTreeMap::from([((0, 1), [[0.0, 0.0], [0.0, 1.0]])]);
        assert_eq!(evaluate_s_prime(&k2, &ones, &tables).unwrap(), 2.0);
    }
}
