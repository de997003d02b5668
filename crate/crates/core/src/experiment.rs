//! Monte Carlo runs of the two-point experiment with finite shots and noise.
//!
//! Random streams: one ChaCha8 generator per task, seeded with the master
//! seed and distinguished by stream number. Stream 0 draws the vector
//! misalignments, stream `1 + i` the single-measurement context of vertex
//! `i`, and stream `1 + n + 2e + o` the pair context of edge `e` in order
//! `o` (0 = lower vertex first). Streams do not depend on scheduling, so
//! parallel and sequential runs give the same record.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::orthorep::{CVector, OrthoRep};
use crate::quantum::{born_single, evaluate_s, JointTable, QState, Scheme};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depolarizing_p: f64,
    /// Radians; every measurement vector is turned by this angle towards an
    /// independent random orthogonal direction.
    pub vector_misalignment_angle: f64,
    pub outcome_flip_p: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("depolarizing probability", self.depolarizing_p),
            ("outcome flip probability", self.outcome_flip_p),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} {p} not in [0, 1]")));
            }
        }
        if !self.vector_misalignment_angle.is_finite() {
            return Err(Error::InvalidArgument("misalignment angle must be finite".into()));
        }
        Ok(())
    }
}

/// Binomial standard error of `p` from `shots` trials, floored at
/// `√(0.25/shots)` when `p` is 0 or 1.
pub fn binomial_std_error(p: f64, shots: u64) -> f64 {
    let n = shots as f64;
    if p <= 0.0 || p >= 1.0 {
        (0.25 / n).sqrt()
    } else {
        (p * (1.0 - p) / n).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleRecord {
    pub vertex: usize,
    pub n0: u64,
    pub n1: u64,
    /// Estimate of `P(1|i)`.
    pub p1: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextRecord {
    pub first: usize,
    pub second: usize,
    /// `counts[a][b]`: first outcome `a`, second outcome `b`.
    pub counts: [[u64; 2]; 2],
    pub estimates: JointTable,
    pub std_errors: JointTable,
}

/// One ε or ε' entry: the marginal of `observable` for `outcome`, compared
/// between two settings of the other measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonEntry {
    pub observable: usize,
    pub outcome: u8,
    pub settings: [usize; 2],
    pub value: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EpsilonTable {
    pub entries: Vec<EpsilonEntry>,
    pub max: Option<f64>,
    /// Largest `value / std_error`.
    pub max_z: Option<f64>,
    /// Root mean square of the propagated standard errors.
    pub error_scale: Option<f64>,
    /// Root mean square of the values.
    pub value_scale: Option<f64>,
}

impl EpsilonTable {
    fn from_entries(entries: Vec<EpsilonEntry>) -> Self {
        if entries.is_empty() {
            return EpsilonTable::default();
        }
        let len = entries.len() as f64;
        let max = entries.iter().map(|e| e.value).fold(0.0, f64::max);
        let max_z = entries
            .iter()
            .map(|e| if e.std_error > 0.0 { e.value / e.std_error } else { 0.0 })
            .fold(0.0, f64::max);
        let rms = |f: &dyn Fn(&EpsilonEntry) -> f64| {
            (entries.iter().map(|e| f(e).powi(2)).sum::<f64>() / len).sqrt()
        };
        EpsilonTable {
            max: Some(max),
            max_z: Some(max_z),
            error_scale: Some(rms(&|e| e.std_error)),
            value_scale: Some(rms(&|e| e.value)),
            entries,
        }
    }

    /// True when every entry lies within `k` standard errors of zero.
    pub fn within(&self, k: f64) -> bool {
        self.entries.iter().all(|e| e.value <= k * e.std_error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub scheme: Scheme,
    pub shots: u64,
    pub noise: NoiseModel,
    pub singles: Vec<SingleRecord>,
    /// Both orders of every edge, in edge order, lower vertex first.
    pub contexts: Vec<ContextRecord>,
    pub s_estimate: f64,
    pub s_std_error: f64,
    pub epsilon: EpsilonTable,
    pub epsilon_prime: EpsilonTable,
}

impl ExperimentRecord {
    /// `P(1,1|i,j)` per edge `(lo, hi)`, pooled over both orders.
    pub fn pooled_pair_ones(&self) -> BTreeMap<(usize, usize), f64> {
        let mut pooled = BTreeMap::new();
        for c in &self.contexts {
            let key = (c.first.min(c.second), c.first.max(c.second));
            *pooled.entry(key).or_insert(0.0) += c.estimates[1][1] / 2.0;
        }
        pooled
    }

    pub fn single_estimates(&self) -> BTreeMap<usize, f64> {
        self.singles.iter().map(|s| (s.vertex, s.p1)).collect()
    }

    pub fn context_tables(&self) -> BTreeMap<(usize, usize), JointTable> {
        self.contexts
            .iter()
            .map(|c| ((c.first, c.second), c.estimates))
            .collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `cos(angle)·v + sin(angle)·u` with `u` a random unit vector orthogonal
/// to `v` (real when `v` is real). Dimension 1 leaves `v` unchanged.
fn misalign(v: &CVector, angle: f64, rng: &mut ChaCha8Rng) -> CVector {
    let d = v.len();
    let unit = v.unscale(v.norm());
    if d < 2 || angle == 0.0 {
        return unit;
    }
    let real = unit.iter().all(|z| z.im == 0.0);
    loop {
        let raw = CVector::from_fn(d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
            Complex64::new(re, im)
        });
        let u = &raw - &unit * unit.dotc(&raw);
        let norm = u.norm();
        if norm > 1e-8 {
            return unit.scale(angle.cos()) + u.scale(angle.sin() / norm);
        }
    }
}

fn flip(bit: bool, p: f64, rng: &mut ChaCha8Rng) -> bool {
    if p > 0.0 && rng.random::<f64>() < p {
        !bit
    } else {
        bit
    }
}

/// Simulates `shots` single measurements of every vertex and `shots`
/// sequential pair measurements of every edge in both orders.
pub fn run_experiment(
    rep: &OrthoRep,
    g: &Graph,
    shots: u64,
    seed: u64,
    noise: NoiseModel,
    scheme: Scheme,
) -> Result<ExperimentRecord> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    noise.validate()?;
    if rep.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: rep.len(),
        });
    }
    let n = g.n();
    let state = QState::pure(rep.psi())?.depolarized(noise.depolarizing_p);
    let mut misalign_rng = stream_rng(seed, 0);
    let vectors: Vec<CVector> = rep
        .vectors()
        .iter()
        .map(|v| misalign(v, noise.vector_misalignment_angle, &mut misalign_rng))
        .collect();
    let flip_p = noise.outcome_flip_p;

    let singles = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = born_single(&state, &vectors[i])?;
            let mut rng = stream_rng(seed, 1 + i as u64);
            let mut n1 = 0;
            for _ in 0..shots {
                let bit = rng.random::<f64>() < p;
                if flip(bit, flip_p, &mut rng) {
                    n1 += 1;
                }
            }
            let p1 = n1 as f64 / shots as f64;
            Ok(SingleRecord {
                vertex: i,
                n0: shots - n1,
                n1,
                p1,
                std_error: binomial_std_error(p1, shots),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let orders: Vec<(usize, usize, usize, u64)> = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &(lo, hi))| [(e, lo, hi, 0), (e, hi, lo, 1)])
        .collect();
    let contexts = orders
        .into_par_iter()
        .map(|(e, first, second, order)| {
            let table = scheme.joint(&state, &vectors[first], &vectors[second])?;
            let p_first = table[1][0] + table[1][1];
            let cond = [0, 1].map(|a| {
                let row = table[a][0] + table[a][1];
                if row > 0.0 {
                    table[a][1] / row
                } else {
                    0.0
                }
            });
            let mut rng = stream_rng(seed, 1 + n as u64 + 2 * e as u64 + order);
            let mut counts = [[0u64; 2]; 2];
            for _ in 0..shots {
                let a = rng.random::<f64>() < p_first;
                let b = rng.random::<f64>() < cond[a as usize];
                let a = flip(a, flip_p, &mut rng);
                let b = flip(b, flip_p, &mut rng);
                counts[a as usize][b as usize] += 1;
            }
            let estimates = counts.map(|row| row.map(|c| c as f64 / shots as f64));
            let std_errors = estimates.map(|row| row.map(|p| binomial_std_error(p, shots)));
            Ok(ContextRecord {
                first,
                second,
                counts,
                estimates,
                std_errors,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut record = ExperimentRecord {
        seed,
        scheme,
        shots,
        noise,
        singles,
        contexts,
        s_estimate: 0.0,
        s_std_error: 0.0,
        epsilon: EpsilonTable::default(),
        epsilon_prime: EpsilonTable::default(),
    };
    record.s_estimate = evaluate_s(g, &record.single_estimates(), &record.pooled_pair_ones())?;
    let single_var: f64 = record.singles.iter().map(|s| s.std_error.powi(2)).sum();
    let pair_var: f64 = record
        .pooled_pair_ones()
        .values()
        .map(|&p| binomial_std_error(p, 2 * shots).powi(2))
        .sum();
    record.s_std_error = (single_var + pair_var).sqrt();
    record.epsilon = epsilon_signaling(&record);
    record.epsilon_prime = epsilon_prime(&record);
    Ok(record)
}

#[derive(Clone, Copy)]
enum Side {
    First,
    Second,
}

/// Marginal differences for every observable measured on `side` across
/// pairs of settings of the other measurement. `shots = None` means exact
/// probabilities (zero standard errors).
fn marginal_differences(
    tables: &BTreeMap<(usize, usize), JointTable>,
    shots: Option<u64>,
    side: Side,
) -> EpsilonTable {
    // observable -> [(other setting, P(outcome 1))]
    let mut by_observable: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for (&(first, second), t) in tables {
        let (observable, other, p1) = match side {
            Side::First => (first, second, t[1][0] + t[1][1]),
            Side::Second => (second, first, t[0][1] + t[1][1]),
        };
        by_observable.entry(observable).or_default().push((other, p1));
    }
    let se = |p: f64| shots.map_or(0.0, |s| binomial_std_error(p, s));
    let mut entries = Vec::new();
    for (&observable, settings) in &by_observable {
        for (k, &(a, pa)) in settings.iter().enumerate() {
            for &(b, pb) in &settings[k + 1..] {
                for outcome in 0..2u8 {
                    let (qa, qb) = if outcome == 1 { (pa, pb) } else { (1.0 - pa, 1.0 - pb) };
                    entries.push(EpsilonEntry {
                        observable,
                        outcome,
                        settings: [a, b],
                        value: (qa - qb).abs(),
                        std_error: se(qa).hypot(se(qb)),
                    });
                }
            }
        }
    }
    EpsilonTable::from_entries(entries)
}

/// ε: dependence of the second measurement's marginal on the first setting.
pub fn epsilon_signaling(record: &ExperimentRecord) -> EpsilonTable {
    marginal_differences(&record.context_tables(), Some(record.shots), Side::Second)
}

/// ε': dependence of the first measurement's marginal on the later setting.
pub fn epsilon_prime(record: &ExperimentRecord) -> EpsilonTable {
    marginal_differences(&record.context_tables(), Some(record.shots), Side::First)
}

/// ε from exact ordered-context tables keyed `(first, second)`.
pub fn epsilon_signaling_exact(tables: &BTreeMap<(usize, usize), JointTable>) -> EpsilonTable {
    marginal_differences(tables, None, Side::Second)
}

/// ε' from exact ordered-context tables keyed `(first, second)`.
pub fn epsilon_prime_exact(tables: &BTreeMap<(usize, usize), JointTable>) -> EpsilonTable {
    marginal_differences(tables, None, Side::First)
}

/// Exact tables for both orders of every edge.
pub fn exact_context_tables(
    g: &Graph,
    rep: &OrthoRep,
    state: &QState,
    scheme: Scheme,
) -> Result<BTreeMap<(usize, usize), JointTable>> {
    let mut tables = BTreeMap::new();
    for &(i, j) in g.edges() {
        for (a, b) in [(i, j), (j, i)] {
            tables.insert((a, b), scheme.joint(state, rep.vector(a), rep.vector(b))?);
        }
    }
    Ok(tables)
}
