#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twopoint::orthorep::CVector;
use twopoint::quantum::{CMatrix, QState};
use twopoint::{Graph, OrthoRep};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) random graph.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < density {
                edges.push((a, b));
            }
        }
    }
    Graph::unweighted(n, edges).unwrap()
}

/// Maximum weight of an independent set, by enumerating all subsets.
pub fn weighted_alpha_brute(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 20);
    (0u32..1 << n)
        .filter(|mask| {
            g.edges()
                .iter()
                .all(|&(a, b)| mask & (1 << a) == 0 || mask & (1 << b) == 0)
        })
        .map(|mask| (0..n).filter(|v| mask & (1 << v) != 0).map(|v| u64::from(g.weight(v))).sum())
        .max()
        .unwrap_or(0)
}

/// Exact α by branching on the closed neighbourhood of a minimum-degree
/// vertex (some vertex of it lies in every maximal independent set), with
/// memoisation on the remaining vertex set.
pub fn alpha_by_min_degree(g: &Graph) -> usize {
    assert!(g.n() <= 128);
    let mut adj = vec![0u128; g.n()];
    for &(a, b) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let all = if g.n() == 0 { 0 } else { u128::MAX >> (128 - g.n()) };
    let mut memo = HashMap::new();
    mis(all, &adj, &mut memo)
}

fn mis(set: u128, adj: &[u128], memo: &mut HashMap<u128, usize>) -> usize {
    if set == 0 {
        return 0;
    }
    if let Some(&v) = memo.get(&set) {
        return v;
    }
    let mut best_v = 0;
    let mut best_deg = u32::MAX;
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & set).count_ones();
        if d < best_deg {
            best_deg = d;
            best_v = v;
        }
    }
    let closed = (adj[best_v] & set) | (1 << best_v);
    let result = if best_deg <= 1 {
        // a vertex of degree ≤ 1 can always be taken
        1 + mis(set & !closed, adj, memo)
    } else {
        let mut best = 0;
        let mut choices = closed;
        while choices != 0 {
            let u = choices.trailing_zeros() as usize;
            choices &= choices - 1;
            let nu = (adj[u] & set) | (1 << u);
            best = best.max(1 + mis(set & !nu, adj, memo));
        }
        best
    };
    memo.insert(set, result);
    result
}

pub fn random_complex(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn orthonormal_basis(vectors: &[&CVector]) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for &u in vectors {
        let mut w = u.clone();
        for _ in 0..2 {
            for b in &basis {
                w -= b * b.dotc(&w);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 * u.norm() {
            basis.push(w.unscale(norm));
        }
    }
    basis
}

/// Random unit vector orthogonal to every vector in `against`.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize, against: &[&CVector]) -> CVector {
    let basis = orthonormal_basis(against);
    loop {
        let mut v = random_complex(rng, d);
        for _ in 0..2 {
            for b in &basis {
                v -= b * b.dotc(&v);
            }
        }
        let norm = v.norm();
        if norm > 1e-3 {
            return v.unscale(norm);
        }
    }
}

/// Random complex representation of `g` in dimension `n`: each vector is
/// orthogonal to the vectors of its lower-numbered neighbours.
pub fn random_rep(rng: &mut ChaCha8Rng, g: &Graph) -> OrthoRep {
    let d = g.n().max(1);
    let mut vectors: Vec<CVector> = Vec::new();
    for v in 0..g.n() {
        let against: Vec<&CVector> = g.neighbors(v).iter().filter(|&&u| u < v).map(|&u| &vectors[u]).collect();
        let w = random_orthogonal(rng, d, &against);
        vectors.push(w);
    }
    let psi = random_orthogonal(rng, d, &[]);
    OrthoRep::new(psi, vectors).unwrap()
}

/// Pure state, or a random mixture of up to `d` pure states.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize, mixed: bool) -> QState {
    if !mixed {
        return QState::pure(&random_complex(rng, d)).unwrap();
    }
    let rank = rng.random_range(2..=d.max(2));
    let mut rho = CMatrix::zeros(d, d);
    let mut total = 0.0;
    for _ in 0..rank {
        let w: f64 = rng.random::<f64>() + 0.05;
        let v = random_complex(rng, d);
        let v = v.unscale(v.norm());
        rho += (&v * v.adjoint()).scale(w);
        total += w;
    }
    let rho = rho.unscale(total);
    // exact trace 1 after rounding
    let t = rho.trace().re;
    QState::new(rho.unscale(t)).unwrap()
}

/// Dense real symmetric matrix of all ones.
pub fn ones(n: usize) -> DMatrix<f64> {
    DMatrix::from_element(n, n, 1.0)
}
