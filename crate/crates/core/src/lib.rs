//! Noncontextuality inequalities from exclusivity graphs, compiled into
//! tests that only need two-point correlations.
//!
//! For a graph `G`, `S = Σ P(1|i) − Σ_{(i,j)∈E} P(1,1|i,j)` is bounded by
//! α(G) for noncontextual models and by ϑ(G) in quantum theory. This crate
//! computes both bounds, builds the event graph `G'` behind the two-point
//! form, extracts a quantum realization reaching ϑ(G), and simulates the
//! experiment.

pub mod alpha;
pub mod catalog;
pub mod certify;
pub mod error;
pub mod events;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod orthorep;
pub mod quantum;
pub mod sdp;
pub mod theta;

pub use error::{Error, Result};
pub use events::{EventGraph, EventLabel};
pub use graph::Graph;
pub use orthorep::OrthoRep;
