//! Named graphs.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Entry patterns, for listings and error messages.
pub const ENTRIES: &[&str] = &[
    "c5",
    "c<n> (odd n >= 3)",
    "k<n>",
    "empty<n>",
    "petersen",
    "chsh-circulant",
    "fig2-k2",
];

/// Circulant graph on `n` vertices joining `i` and `i ± d` for each `d`.
pub fn circulant(n: usize, distances: &[usize]) -> Result<Graph> {
    let mut edges = Vec::new();
    for &d in distances {
        if d == 0 || 2 * d > n {
            return Err(Error::InvalidArgument(format!(
                "circulant distance {d} not in 1..={}",
                n / 2
            )));
        }
        edges.extend((0..n).map(|i| (i, (i + d) % n)));
    }
    Graph::unweighted(n, edges)
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::unweighted(10, outer.chain(spokes).chain(inner)).expect("valid edges")
}

/// Size argument of `k5`, `k(5)`, `empty4`, `empty(4)`.
fn size_suffix(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let rest = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(rest);
    rest.parse().ok()
}

/// Looks up a named graph (case-insensitive).
///
/// `chsh-circulant` is the 8-vertex circulant with distances 1 and 4 (the
/// Möbius ladder): 12 edges, α = 3, ϑ = 2 + √2.
pub fn catalog(name: &str) -> Result<Graph> {
    let key = name.trim().to_ascii_lowercase();
    let unknown = || Error::UnknownCatalog {
        name: name.to_string(),
        available: ENTRIES.join(", "),
    };
    match key.as_str() {
        "petersen" => return Ok(petersen()),
        "chsh-circulant" => return circulant(8, &[1, 4]),
        "fig2-k2" => return Ok(Graph::complete(2)),
        _ => {}
    }
    if let Some(n) = size_suffix(&key, "empty") {
        return Ok(Graph::empty(n));
    }
    if let Some(n) = size_suffix(&key, "k") {
        return Ok(Graph::complete(n));
    }
    if let Some(n) = size_suffix(&key, "c") {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "catalog cycles are odd with n >= 3, got {n}"
            )));
        }
        return Graph::cycle(n);
    }
    Err(unknown())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::brute_force_alpha;

    #[test]
    fn named_graphs() {
        assert_eq!(catalog("c5").unwrap(), Graph::cycle(5).unwrap());
        assert_eq!(catalog("C(7)").unwrap(), Graph::cycle(7).unwrap());
        assert_eq!(catalog("k4").unwrap().edge_count(), 6);
        assert_eq!(catalog("k(3)").unwrap(), Graph::complete(3));
        assert_eq!(catalog("empty(4)").unwrap(), Graph::empty(4));
        assert_eq!(catalog("fig2-k2").unwrap(), Graph::complete(2));
        let p = catalog("petersen").unwrap();
        assert_eq!((p.n(), p.edge_count()), (10, 15));
        assert!((0..10).all(|v| p.degree(v) == 3));
    }

    #[test]
    fn chsh_circulant() {
        let g = catalog("chsh-circulant").unwrap();
        assert_eq!((g.n(), g.edge_count()), (8, 12));
        assert!((0..8).all(|v| g.degree(v) == 3));
        assert_eq!(brute_force_alpha(&g).unwrap(), 3);
    }

    #[test]
    fn unknown_entries() {
        match catalog("dodecahedron") {
            Err(Error::UnknownCatalog { available, .. }) => assert!(available.contains("petersen")),
            other => panic!("{other:?}"),
        }
        assert!(catalog("c4").is_err());
        assert!(catalog("c6").is_err());
        assert!(catalog("kx").is_err());
    }
}
