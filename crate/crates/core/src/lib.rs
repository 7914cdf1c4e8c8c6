//! Random intersection graphs and their modularity.
//!
//! The crate is split along the lines of the experiment pipeline:
//!
//! * [`graph`] holds the incidence and graph types, the seeded generators for
//!   `G(n, m, p)` and Erdős–Rényi graphs, and the text formats.
//! * [`modularity`] scores partitions, enumerates exact optima on small graphs,
//!   computes the restricted `k`-block maxima and runs a deterministic Louvain.
//! * [`stats`] computes clique-cover statistics of an incidence.
//! * [`constructions`] builds the exclusive-attribute partition and the
//!   edge-thinning coupling with its matched Erdős–Rényi probability.
//! * [`harness`] drives parameter sweeps, summary reports and the self-check.

pub mod binomial;
pub mod constructions;
pub mod error;
pub mod graph;
pub mod harness;
pub mod modularity;
pub mod rng;
pub mod stats;

pub use error::{Result, RigError};
pub use graph::{Graph, Incidence, RigParams};
pub use modularity::{ModularityReport, Partition};
