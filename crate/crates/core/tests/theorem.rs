mod common;

use twopoint::alpha::independence_number;
use twopoint::events::build_two_point_graph;
use twopoint::orthorep::extract_ortho_rep;
use twopoint::quantum::{ExactStatistics, QState, Scheme};
use twopoint::theta::{theta, theta_sandwich, SdpStatus};
use twopoint::Graph;

const TOL: f64 = 1e-7;

fn nine_vertex_graphs() -> Vec<Graph> {
    let mut rng = common::rng(9);
    let mut out = vec![Graph::cycle(9).unwrap(), Graph::empty(9)];
    for density in [0.2, 0.4, 0.6, 0.8] {
        out.push(common::random_graph(&mut rng, 9, density));
    }
    out
}

#[test]
fn theta_transfer_on_nine_vertices() {
    for g in nine_vertex_graphs() {
        let t = theta(&g, TOL).unwrap();
        let eg = build_two_point_graph(&g).unwrap();
        let tp = theta(eg.graph(), TOL).unwrap();
        assert_eq!(t.status, SdpStatus::Converged);
        assert_eq!(tp.status, SdpStatus::Converged);
        let diff = tp.primal_value - t.primal_value - g.edge_count() as f64;
        assert!(diff.abs() <= 10.0 * TOL, "{:?}: off by {diff:e}", g.edges());
        let a = independence_number(&g).unwrap().alpha;
        assert_eq!(
            independence_number(eg.graph()).unwrap().alpha,
            a + g.edge_count()
        );
    }
}

#[test]
fn extracted_representation_saturates_theta() {
    for g in nine_vertex_graphs() {
        let sol = theta(&g, TOL).unwrap();
        let rep = extract_ortho_rep(&g, &sol, TOL).unwrap();
        let state = QState::pure(rep.psi()).unwrap();
        let s = ExactStatistics::compute(&g, &rep, &state, Scheme::Projective)
            .unwrap()
            .s(&g)
            .unwrap();
        assert!((s - sol.primal_value).abs() <= 100.0 * TOL, "S = {s}, theta = {}", sol.primal_value);
    }
}

#[test]
fn sandwich_and_monotonicity() {
    let mut rng = common::rng(10);
    for density in [0.3, 0.6] {
        let g = common::random_graph(&mut rng, 8, density);
        let s = theta_sandwich(&g, TOL).unwrap();
        assert!(s.alpha as f64 <= s.theta + TOL);
        // the complement's ϑ satisfies ϑ(G)·ϑ(Ḡ) ≥ n
        let c = theta(&g.complement(), TOL).unwrap();
        assert!(s.theta * c.primal_value >= 8.0 - 1e-5);
        // adding an edge cannot raise ϑ
        let missing = (0..8)
            .flat_map(|a| (a + 1..8).map(move |b| (a, b)))
            .find(|&(a, b)| !g.has_edge(a, b));
        if let Some(e) = missing {
            let bigger = Graph::unweighted(8, g.edges().iter().copied().chain([e])).unwrap();
            assert!(theta(&bigger, TOL).unwrap().primal_value <= s.theta + TOL);
        }
    }
}
