//! Balanced separators for sparse graphs, or a K_h minor certifying that no
//! small separator is promised.

pub mod active;
pub mod approx;
pub mod certificates;
pub mod clustering;
pub mod ddg;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod minorfree;
pub mod oracle;
pub mod par;
pub mod paths;
pub mod shallow;
pub mod spanner;
pub mod tradeoff;
pub mod tree_or_cut;

pub use certificates::{MinorReport, MinorWitness, Ratio, SepOrMinor, Separator, VerifyReport};
pub use error::{GraphError, Result, SepError};
pub use graph::{DensityCertificate, Graph, GraphBuilder, GuardPolicy, VertexId, VertexSet};
pub use par::Parallelism;
