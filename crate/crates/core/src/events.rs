//! Compilation of an exclusivity graph into events that need only
//! two-point correlations.
//!
//! Each vertex `i` of the source graph becomes the event "observable `i`
//! gave 1", and each edge `(i, j)` becomes the three events `(0,0)`,
//! `(0,1)`, `(1,0)` for the pair measured together. Two events are joined
//! when they cannot both happen: either they assign different outcomes to
//! the same observable, or they assign 1 to both ends of a source edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A measurement event: an outcome assignment to one or two observables
/// (vertices of the source graph).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventLabel {
    Single { obs: usize, out: u8 },
    Pair { obs: [usize; 2], out: [u8; 2] },
}

/// Outcome pairs used for the gadget of every edge, in vertex order.
pub const GADGET_OUTCOMES: [[u8; 2]; 3] = [[0, 0], [0, 1], [1, 0]];

impl EventLabel {
    pub fn single(obs: usize) -> Self {
        EventLabel::Single { obs, out: 1 }
    }

    /// `(observable, outcome)` pairs fixed by this event.
    pub fn assignments(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        let (obs, out): (&[usize], &[u8]) = match self {
            EventLabel::Single { obs, out } => {
                (std::slice::from_ref(obs), std::slice::from_ref(out))
            }
            EventLabel::Pair { obs, out } => (obs, out),
        };
        obs.iter().copied().zip(out.iter().copied())
    }

    /// Checks the label against `g`: observables in range, outcomes are
    /// bits, and pair labels sit on an edge with `obs[0] < obs[1]`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (o, b) in self.assignments() {
            if o >= g.n() {
                return Err(Error::BadVertex(o, g.n()));
            }
            if b > 1 {
                return Err(Error::InvalidArgument(format!("outcome {b} is not a bit")));
            }
        }
        if let EventLabel::Pair { obs: [a, b], .. } = *self {
            if a >= b || !g.has_edge(a, b) {
                return Err(Error::InvalidArgument(format!(
                    "pair event on ({a}, {b}) needs an edge with increasing endpoints"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for EventLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EventLabel::Single { obs, out } => write!(f, "{out}|{obs}"),
            EventLabel::Pair { obs, out } => {
                write!(f, "{}{}|{},{}", out[0], out[1], obs[0], obs[1])
            }
        }
    }
}

/// True iff the two events cannot both occur in a single run.
pub fn are_exclusive(e1: &EventLabel, e2: &EventLabel, g: &Graph) -> bool {
    for (o1, b1) in e1.assignments() {
        for (o2, b2) in e2.assignments() {
            if o1 == o2 && b1 != b2 {
                return true;
            }
            if b1 == 1 && b2 == 1 && g.has_edge(o1, o2) {
                return true;
            }
        }
    }
    false
}

/// The compiled graph `G'` together with the event behind each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventGraph {
    source: Graph,
    labels: Vec<EventLabel>,
    graph: Graph,
}

impl EventGraph {
    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn labels(&self) -> &[EventLabel] {
        &self.labels
    }

    /// The exclusivity graph over [`EventGraph::labels`].
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Rebuilds an event graph from a source graph and an explicit label
    /// order, recomputing the exclusivity edges.
    pub fn from_labels(source: Graph, labels: Vec<EventLabel>) -> Result<Self> {
        for label in &labels {
            label.validate(&source)?;
        }
        let graph = exclusivity_graph(&source, &labels);
        Ok(EventGraph {
            source,
            labels,
            graph,
        })
    }

    /// Vertex of `G'` holding the event "observable `v` gave 1".
    pub fn single_vertex(&self, v: usize) -> usize {
        v
    }

    /// Vertex of `G'` holding the pair event for edge number `edge` of the
    /// source and gadget slot `slot` (index into [`GADGET_OUTCOMES`]).
    pub fn pair_vertex(&self, edge: usize, slot: usize) -> usize {
        self.source.n() + 3 * edge + slot
    }
}

fn exclusivity_graph(source: &Graph, labels: &[EventLabel]) -> Graph {
    let mut edges = Vec::new();
    for (a, la) in labels.iter().enumerate() {
        for (b, lb) in labels.iter().enumerate().skip(a + 1) {
            if are_exclusive(la, lb, source) {
                edges.push((a, b));
            }
        }
    }
    Graph::unweighted(labels.len(), edges).expect("labels index vertices")
}

/// Compiles `g` into its two-point event graph `G'`.
///
/// Vertex order: `Single(i, 1)` for every `i`, then the three gadget events
/// of each edge in edge order.
pub fn build_two_point_graph(g: &Graph) -> Result<EventGraph> {
    if g.is_weighted() {
        return Err(Error::Weighted);
    }
    let source = g.without_weights();
    let mut labels: Vec<EventLabel> = (0..g.n()).map(EventLabel::single).collect();
    for &(a, b) in g.edges() {
        for out in GADGET_OUTCOMES {
            labels.push(EventLabel::Pair { obs: [a, b], out });
        }
    }
    let graph = exclusivity_graph(&source, &labels);
    Ok(EventGraph {
        source,
        labels,
        graph,
    })
}

/// JSON form of a label: `{"kind": "single"|"pair", "obs": [...], "out": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LabelRecord {
    pub kind: String,
    pub obs: Vec<usize>,
    pub out: Vec<u8>,
}

impl From<&EventLabel> for LabelRecord {
    fn from(label: &EventLabel) -> Self {
        let (obs, out) = label.assignments().unzip();
        let kind = match label {
            EventLabel::Single { .. } => "single",
            EventLabel::Pair { .. } => "pair",
        };
        LabelRecord {
            kind: kind.to_string(),
            obs,
            out,
        }
    }
}

impl TryFrom<&LabelRecord> for EventLabel {
    type Error = Error;

    fn try_from(rec: &LabelRecord) -> Result<Self> {
        match (rec.kind.as_str(), rec.obs.as_slice(), rec.out.as_slice()) {
            ("single", &[obs], &[out]) => Ok(EventLabel::Single { obs, out }),
            ("pair", &[a, b], &[x, y]) => Ok(EventLabel::Pair {
                obs: [a, b],
                out: [x, y],
            }),
            _ => Err(Error::InvalidArgument(format!(
                "malformed event label {rec:?}"
            ))),
        }
    }
}
