//! Extensional views of stream processors: the copower normal form,
//! maximally lazy realizations, continuous functions on streams, and
//! depth-bounded comparisons.

mod arena;
pub mod copower;
pub mod hyper;
pub mod reify;
pub mod traces;

pub use arena::NodeId;
pub use copower::{copower_normal_form, is_copower_normal, LazyTree};
pub use hyper::{ContId, Hypernormal};
pub use reify::{reflect, reify, ContinuousFunction, ReifyState, Reified};
pub use traces::{gen_prefix_dist, lts_trace_set, trace_equivalent, unfold_intensional, IntensionalNode, TraceVerdict};

/// Default bound on states materialized by on-demand constructions.
pub const DEFAULT_CAP: usize = 10_000;
