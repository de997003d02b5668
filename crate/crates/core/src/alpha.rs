//! Exact independence number: the bound on `S` for noncontextual
//! hidden-variable models.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Hard ceiling from the `u128` vertex sets used by the search.
pub const MAX_VERTICES: usize = 128;
/// Largest graph accepted by [`brute_force_alpha`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceResult {
    pub alpha: usize,
    /// One maximum independent set, sorted.
    pub witness: Vec<usize>,
    /// Search-tree nodes visited.
    pub node_count: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct AlphaOptions {
    pub vertex_limit: usize,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        AlphaOptions {
            vertex_limit: MAX_VERTICES,
        }
    }
}

type VertexSet = u128;

fn adjacency_masks(g: &Graph) -> Vec<VertexSet> {
    let mut adj = vec![0; g.n()];
    for &(a, b) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

fn members(mut set: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

struct Search<'a> {
    adj: &'a [VertexSet],
    best: VertexSet,
    best_size: u32,
    nodes: u64,
}

impl Search<'_> {
    /// Number of cliques in a greedy clique cover of `cand`; an
    /// independent set meets each clique at most once.
    fn clique_cover_bound(&self, mut cand: VertexSet) -> u32 {
        let mut count = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique_cand = cand & self.adj[v];
            cand &= !(1 << v);
            while clique_cand != 0 {
                let u = clique_cand.trailing_zeros() as usize;
                cand &= !(1 << u);
                clique_cand &= self.adj[u] & !(1 << u);
            }
            count += 1;
        }
        count
    }

    fn run(&mut self, cand: VertexSet, chosen: VertexSet) {
        self.nodes += 1;
        let size = chosen.count_ones();
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = chosen;
            }
            return;
        }
        if size + self.clique_cover_bound(cand) <= self.best_size {
            return;
        }

        // max-degree pivot inside cand, lowest id on ties
        let mut pivot = 0;
        let mut pivot_deg = 0;
        let mut first = true;
        for v in members(cand) {
            let d = (self.adj[v] & cand).count_ones();
            if first || d > pivot_deg {
                pivot = v;
                pivot_deg = d;
                first = false;
            }
        }
        if pivot_deg == 0 {
            // cand is itself independent
            self.run(0, chosen | cand);
            return;
        }

        let bit = 1 << pivot;
        self.run(cand & !bit & !self.adj[pivot], chosen | bit);
        self.run(cand & !bit, chosen);
    }
}

/// Exact α(G) by branch and bound, with a maximum independent set.
pub fn independence_number(g: &Graph) -> Result<IndependenceResult> {
    independence_number_with(g, AlphaOptions::default())
}

pub fn independence_number_with(g: &Graph, opts: AlphaOptions) -> Result<IndependenceResult> {
    let limit = opts.vertex_limit.min(MAX_VERTICES);
    if g.n() > limit {
        return Err(Error::TooLarge {
            what: "exact independence number",
            actual: g.n(),
            limit,
        });
    }
    let adj = adjacency_masks(g);
    let all = if g.n() == 0 {
        0
    } else {
        VertexSet::MAX >> (MAX_VERTICES - g.n())
    };
    let mut search = Search {
        adj: &adj,
        best: 0,
        best_size: 0,
        nodes: 0,
    };
    search.run(all, 0);
    Ok(IndependenceResult {
        alpha: search.best_size as usize,
        witness: members(search.best).collect(),
        node_count: search.nodes,
    })
}

/// True iff no edge of `g` has both endpoints in `set`.
pub fn is_independent(g: &Graph, set: &[usize]) -> Result<bool> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(Error::BadVertex(v, g.n()));
        }
        inside[v] = true;
    }
    Ok(g.edges().iter().all(|&(a, b)| !(inside[a] && inside[b])))
}

/// α(G) by enumerating every vertex subset. Independent of the branch and
/// bound search; used as its oracle.
pub fn brute_force_alpha(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "brute-force independence number",
            actual: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adj: Vec<u32> = adjacency_masks(g).into_iter().map(|m| m as u32).collect();
    // independent[mask] built from mask with its lowest vertex removed
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = independent[rest as usize] && adj[low] & rest == 0;
        independent[mask as usize] = ok;
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Value of `S = Σ P(1|i) − Σ_{(i,j)∈E} P(1,1|i,j)` under the deterministic
/// outcome assignment `assignment[i] ∈ {0, 1}`.
pub fn noncontextual_assignment_value(g: &Graph, assignment: &[u8]) -> Result<i64> {
    if assignment.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: assignment.len(),
        });
    }
    if let Some(&bad) = assignment.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidArgument(format!("outcome {bad} is not a bit")));
    }
    let ones: i64 = assignment.iter().map(|&b| i64::from(b)).sum();
    let clashes = g
        .edges()
        .iter()
        .filter(|&&(a, b)| assignment[a] == 1 && assignment[b] == 1)
        .count() as i64;
    Ok(ones - clashes)
}

/// Maximum of [`noncontextual_assignment_value`] over all `2^n`
/// deterministic assignments.
pub fn max_assignment_value(g: &Graph) -> Result<i64> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "exhaustive assignment search",
            actual: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut assignment = vec![0u8; n];
    let mut best = i64::MIN;
    for mask in 0u32..(1 << n) {
        for (i, bit) in assignment.iter_mut().enumerate() {
            *bit = ((mask >> i) & 1) as u8;
        }
        best = best.max(noncontextual_assignment_value(g, &assignment)?);
    }
    Ok(best)
}
