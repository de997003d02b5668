mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use twopoint::alpha::{brute_force_alpha, independence_number, max_assignment_value};
use twopoint::events::{are_exclusive, build_two_point_graph};
use twopoint::io::{parse_graph_dimacs, parse_graph_json, graph_to_dimacs, graph_to_json};
use twopoint::quantum::{evaluate_s, ExactStatistics, Scheme};
use twopoint::Graph;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let all = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges: Vec<_> = all.zip(bits).filter(|(_, keep)| *keep).map(|(e, _)| e).collect();
            Graph::unweighted(n, edges).unwrap()
        })
    })
}

fn weighted_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(1u32..=3, n).prop_map(move |w| {
            let map: BTreeMap<usize, u32> = w.into_iter().enumerate().collect();
            g.with_weights(&map).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exclusivity_is_symmetric_and_irreflexive(g in graph_strategy(5)) {
        let eg = build_two_point_graph(&g).unwrap();
        let labels = eg.labels();
        prop_assert_eq!(labels.len(), g.n() + 3 * g.edge_count());
        for a in labels {
            prop_assert!(!are_exclusive(a, a, &g));
            for b in labels {
                prop_assert_eq!(are_exclusive(a, b, &g), are_exclusive(b, a, &g));
            }
        }
    }

    #[test]
    fn branch_and_bound_matches_brute_force(g in graph_strategy(12)) {
        let r = independence_number(&g).unwrap();
        prop_assert_eq!(r.alpha, brute_force_alpha(&g).unwrap());
        prop_assert_eq!(r.witness.len(), r.alpha);
        prop_assert!(twopoint::alpha::is_independent(&g, &r.witness).unwrap());
    }

    #[test]
    fn alpha_transfers_to_event_graph(g in graph_strategy(7)) {
        let eg = build_two_point_graph(&g).unwrap();
        let a = independence_number(&g).unwrap().alpha;
        let ap = independence_number(eg.graph()).unwrap().alpha;
        prop_assert_eq!(ap, a + g.edge_count());
        prop_assert_eq!(common::alpha_by_min_degree(eg.graph()), ap);
    }

    #[test]
    fn classical_ceiling(g in graph_strategy(10)) {
        let best = max_assignment_value(&g).unwrap();
        prop_assert_eq!(best, independence_number(&g).unwrap().alpha as i64);
    }

    #[test]
    fn complement_is_an_involution(g in graph_strategy(9)) {
        let c = g.complement();
        prop_assert_eq!(c.edge_count() + g.edge_count(), g.n() * (g.n().saturating_sub(1)) / 2);
        prop_assert_eq!(c.complement(), g);
    }

    #[test]
    fn removing_an_edge_never_lowers_alpha(g in graph_strategy(9), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.edge_count() > 0);
        let drop = pick.index(g.edge_count());
        let edges: Vec<_> = g.edges().iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &e)| e).collect();
        let smaller = Graph::unweighted(g.n(), edges).unwrap();
        prop_assert!(independence_number(&smaller).unwrap().alpha >= independence_number(&g).unwrap().alpha);
    }

    #[test]
    fn weighted_expansion(g in weighted_strategy(6)) {
        let ex = g.expand_weighted();
        let total: u32 = (0..g.n()).map(|v| g.weight(v)).sum();
        prop_assert_eq!(ex.graph.n(), total as usize);
        prop_assert_eq!(ex.origin.len(), ex.graph.n());
        prop_assert_eq!(
            independence_number(&ex.graph).unwrap().alpha as u64,
            common::weighted_alpha_brute(&g)
        );
        // copies of one vertex are never adjacent; copies of neighbours always are
        for a in 0..ex.graph.n() {
            for b in a + 1..ex.graph.n() {
                let (oa, ob) = (ex.origin[a], ex.origin[b]);
                prop_assert_eq!(ex.graph.has_edge(a, b), oa != ob && g.has_edge(oa, ob));
            }
        }
        prop_assert_eq!(g.without_weights().expand_weighted().graph, g.without_weights());
    }

    #[test]
    fn json_round_trip(g in weighted_strategy(8), weighted in any::<bool>()) {
        let g = if weighted { g } else { g.without_weights() };
        prop_assert_eq!(parse_graph_json(&graph_to_json(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn dimacs_round_trip(g in weighted_strategy(8), weighted in any::<bool>()) {
        let g = if weighted { g } else { g.without_weights() };
        prop_assert_eq!(parse_graph_dimacs(&graph_to_dimacs(&g)).unwrap(), g);
    }

    #[test]
    fn quantum_tables_are_consistent(seed in any::<u64>(), mixed in any::<bool>()) {
        let mut rng = common::rng(seed);
        let n = rand::Rng::random_range(&mut rng, 2..=6);
        let g = common::random_graph(&mut rng, n, 0.5);
        let rep = common::random_rep(&mut rng, &g);
        let state = common::random_state(&mut rng, rep.dimension(), mixed);
        for scheme in [Scheme::Projective, Scheme::DemolitionReprepare] {
            let stats = ExactStatistics::compute(&g, &rep, &state, scheme).unwrap();
            for t in stats.tables.values() {
                let total: f64 = t.iter().flatten().sum();
                prop_assert!((total - 1.0).abs() <= 1e-10);
                prop_assert!(t.iter().flatten().all(|p| (0.0..=1.0).contains(p)));
                // adjacent vectors are orthogonal, so (1, 1) never happens
                prop_assert!(t[1][1].abs() <= 1e-12, "{:?} {:?}", scheme, t);
            }
            let s = stats.s(&g).unwrap();
            let sp = stats.s_prime(&g).unwrap();
            prop_assert!((sp - g.edge_count() as f64 - s).abs() <= 1e-10);
            let direct: f64 = stats.singles.values().sum::<f64>()
                - stats.tables.values().map(|t| t[1][1]).sum::<f64>();
            prop_assert!((direct - evaluate_s(&g, &stats.singles, &stats.pair_ones()).unwrap()).abs() <= 1e-15);
        }
        // both orders of an edge
        for &(i, j) in g.edges() {
            let t = Scheme::Projective.joint(&state, rep.vector(j), rep.vector(i)).unwrap();
            prop_assert!(t[1][1].abs() <= 1e-12);
        }
    }
}
