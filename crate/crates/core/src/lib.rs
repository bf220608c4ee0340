//! Affinity-based gravitational community detection.
//!
//! The pipeline: a weighted [`graph::Graph`] is transformed into one of five
//! affinity matrices ([`affinity`]), the Borgia engine ([`engine`]) runs an
//! influence-space gravitational simulation whose fusions build a
//! [`dendrogram::Dendrogram`], and a partition is selected and scored with
//! the [`metrics`] suite. A classical gravitational baseline ([`classic`])
//! and bundled benchmark loaders ([`datasets`]) round out the toolkit.

pub mod affinity;
pub mod classic;
pub mod datasets;
pub mod dendrogram;
pub mod engine;
pub mod graph;
pub mod metrics;
pub mod tnorm;

pub use affinity::{AffinityKind, AffinityMatrix, AffinitySpec};
pub use classic::{ClassicConfig, FeatureSource, ParticleSystem};
pub use datasets::{CorpusSpec, LabeledDataset};
pub use dendrogram::{ConfigurationScore, Dendrogram, Fusion, SelectionMode};
pub use engine::{DeltaMode, EngineConfig, Policy, RunReport, SimulationState};
pub use graph::{DegreeMode, Graph, GraphFormat, TemporalGraph};
pub use metrics::{MetricReport, Partition};
pub use tnorm::TNorm;
