//! Optimal k-in-out directed graphs and their uses.
//!
//! The crate builds the minimal in-out graphs `S_k`, checks the in-out
//! property with an exhaustive oracle, searches small vertex/arc budgets for
//! extremal in-out graphs, converts generalized TSP instances into sparse
//! asymmetric TSP instances, and emits the cutting-plane rows that describe
//! how a tour may traverse each embedded in-out subgraph.
//!
//! Vertices are 1-indexed throughout.

pub mod constraints;
pub mod construct;
pub mod error;
pub mod exec;
pub mod graph;
pub mod gtsp;
pub mod layout;
pub mod search;
pub mod verify;

pub use constraints::{emit_constraints, write_lp, LpConstraintSet};
pub use construct::{build_inout, canonical_path, CanonicalPath};
pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{Arc, DiGraph, InOutGraph, Vertex, VertexPartition};
pub use gtsp::{convert, map_tour_back, AtspInstance, ConversionMap, GtspInstance, GtspTour};
pub use layout::{crossing_count, layout, Layout};
pub use search::{search_min, SearchOptions, SearchOutcome};
pub use verify::{verify_inout, VerificationReport, VerifyOptions};
