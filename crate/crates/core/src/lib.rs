//! Structural classification of row-finite directed graphs and higher-rank
//! graphs through their path groupoids: shift equivalence, boundary paths,
//! Cuntz-Krieger relation checking, source removal, and counting-measure
//! multiplicity profiles for the built-in staged families.

pub mod error;
pub mod graph;
pub mod paths;
pub mod staged;
pub mod kgraph;
pub mod kpaths;
pub mod kstaged;
pub mod families;
pub mod ck;
pub mod classify;
pub mod groupoid;
pub mod desourcify;
pub mod doc;

pub use error::{GraphError, KGraphError};
pub use graph::{Cycle, DirectedGraph, EdgeId, GraphDoc, GraphKind, ValidationReport, VertexId};
pub use paths::{AnchorRef, FinitePath, InfinitePath, LagSet};
pub use staged::{Count, FamilyContracts, Stabilized, StagedDigraph, StagedDoc, TailClass};
