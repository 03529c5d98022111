//! Provenance verification platform: ingestion, tamper-evident ledger,
//! seven-criterion analysis, knowledge graph, query service and companion.

pub mod companion;
pub mod config;
pub mod digest;
pub mod ingestion;
pub mod knowledge_graph;
pub mod ledger;
pub mod media;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod platform;
pub mod query;
pub mod resources;
pub mod text;
pub mod text_similarity;
pub mod tone;
pub mod workflow;
pub mod writing_quality;

pub use digest::Digest;
pub use model::*;
pub use par::Execution;
