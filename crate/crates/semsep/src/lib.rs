//! Deterministic analysis of separation in causal DAGs.
//!
//! The crate provides four layers:
//!
//! - [`graph`]: immutable DAGs with path enumeration, topological sorting, and
//!   ancestor/descendant queries;
//! - [`dsep`] and [`roles`]: the graph-side criterion — path blocking,
//!   d-separation, and clean d-connected paths with disjoint descendant routes;
//! - [`semantics`] and [`witness`]: the value side — node functions evaluated
//!   in topological order, and perturb-and-repair witness sequences that
//!   refute separation, constructed from clean paths or recovered as paths
//!   from arbitrary witnesses;
//! - [`search`] and [`falsify`]: exhaustive equivalence checking between the
//!   two sides, and experiment oracles that soundly falsify a hypothesized
//!   DAG against an opaque world.
//!
//! The `semsep` binary exposes the same operations as subcommands; see the
//! crate examples for library walkthroughs of each capability.

pub mod cli;
pub mod dsep;
pub mod error;
pub mod falsify;
pub mod graph;
pub mod json;
pub mod roles;
pub mod search;
pub mod semantics;
pub mod witness;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId, Path};
pub use semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};
