//! Exclusivity graphs: vertices are events, edges join mutually exclusive ones.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n`, optionally vertex-weighted.
///
/// Edges are stored once, as `(lo, hi)` with `lo < hi`, in lexicographic
/// order. Weights, when present, cover every vertex; vertices without an
/// explicit weight get 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<u32>>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a normalized graph. Duplicate edges (in either orientation)
    /// collapse into one.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        weights: Option<&BTreeMap<usize, u32>>,
    ) -> Result<Self> {
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let weights = match weights {
            None => None,
            Some(map) => {
                let mut w = vec![1u32; n];
                for (&v, &wv) in map {
                    if v >= n {
                        return Err(Error::WeightOutOfRange(v, n));
                    }
                    if wv == 0 {
                        return Err(Error::ZeroWeight(v));
                    }
                    w[v] = wv;
                }
                Some(w)
            }
        };

        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &normalized {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        Ok(Graph {
            n,
            edges: normalized,
            weights,
            neighbors,
        })
    }

    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges, None)
    }

    pub fn empty(n: usize) -> Self {
        Self::unweighted(n, []).expect("no edges")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::unweighted(n, edges).expect("valid edges")
    }

    /// The cycle `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        Self::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Index of the edge `{a, b}` in [`Graph::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights.as_ref().map_or(1, |w| w[v])
    }

    pub fn weights(&self) -> Option<&[u32]> {
        self.weights.as_deref()
    }

    /// True when some vertex carries a weight other than 1.
    pub fn is_weighted(&self) -> bool {
        self.weights
            .as_ref()
            .is_some_and(|w| w.iter().any(|&x| x != 1))
    }

    /// Same vertices and edges, weights dropped.
    pub fn without_weights(&self) -> Self {
        Graph {
            weights: None,
            ..self.clone()
        }
    }

    pub fn with_weights(&self, weights: &BTreeMap<usize, u32>) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied(), Some(weights))
    }

    /// Complement on the same vertex set. Weights are discarded.
    pub fn complement(&self) -> Self {
        let n = self.n;
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.has_edge(a, b));
        Self::unweighted(n, edges.collect::<Vec<_>>()).expect("valid edges")
    }

    /// Replaces each vertex of weight `w` by `w` pairwise non-adjacent copies,
    /// each adjacent to every copy of every original neighbor.
    pub fn expand_weighted(&self) -> Expansion {
        let mut origin = Vec::new();
        let mut copies = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let start = origin.len();
            origin.extend(std::iter::repeat_n(v, self.weight(v) as usize));
            copies.push(start..origin.len());
        }
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            for ca in copies[a].clone() {
                for cb in copies[b].clone() {
                    edges.push((ca, cb));
                }
            }
        }
        let graph = Self::unweighted(origin.len(), edges).expect("valid edges");
        Expansion { graph, origin }
    }

    /// Stable 64-bit fingerprint of the normalized graph (FNV-1a over
    /// `n`, the sorted edge list and weights).
    pub fn canonical_hash(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.n as u64);
        for &(a, b) in &self.edges {
            feed(a as u64);
            feed(b as u64);
        }
        if self.is_weighted() {
            for v in 0..self.n {
                feed(u64::from(self.weight(v)));
            }
        }
        h
    }
}

/// Result of [`Graph::expand_weighted`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub graph: Graph,
    /// `origin[c]` is the vertex of the weighted graph that copy `c` came from.
    pub origin: Vec<usize>,
}
