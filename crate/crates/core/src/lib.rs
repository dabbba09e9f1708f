//! Labeled graphs of generalized Baumslag–Solitar groups: elementary moves,
//! deformation retraction onto reduced trees, exploration of the poset
//! complex, and verification tooling for `BS(p, q)` with `p | q`.

pub mod arith;
pub mod autver;
pub mod bspq;
pub mod canon;
pub mod explorer;
pub mod graph;
pub mod invariants;
pub mod moves;
pub mod retract;

pub use canon::{canonical, canonical_form, is_isomorphic, CanonicalCertificate};
pub use graph::{Edge, EdgeEnd, EdgeId, GraphError, GraphIoError, LabeledGraph, Side, VertexId};
