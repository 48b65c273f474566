//! Random walks on weighted graphs: the lazy kernel, constructions of
//! decorated binary trees with torus delays and an expander sink, conductance
//! perturbations, and measurements of mixing, hitting and spectral quantities.

pub mod analysis;
pub mod constructions;
pub mod experiments;
pub mod format;
pub mod graph;
pub mod oracle;
pub mod rng;

pub use graph::{tv_distance, Distribution, GraphError, PerturbationRule, RegionLabel, TreeSide, VertexId, WeightedGraph};
