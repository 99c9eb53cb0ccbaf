//! Controllable abstraction of documents through AMR graph editing.
//!
//! The crate covers the graph side of an abstract-and-expand augmentation
//! pipeline: PENMAN parsing and serialization ([`penman`]), structural
//! editing ([`graphops`]), SMATCH alignment ([`smatch`]), subgraph grafting
//! between related documents ([`mix`]), the per-round orchestration with
//! external model adapters ([`pipeline`]), and diversity metrics
//! ([`metrics`]).
//!
//! Neural steps (text-to-AMR, AMR-to-text, expansion) are not part of this
//! crate. They run as child processes speaking a line-oriented protocol,
//! see [`pipeline::adapter`].

pub mod graphops;
pub mod metrics;
pub mod mix;
pub mod penman;
pub mod pipeline;
pub mod smatch;
pub mod text;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use graphops::{DeletionPolicy, Subgraph, TriProtection};
pub use metrics::DiversityReport;
pub use mix::{LexicalProvider, MixPlan, SimilarityProvider};
pub use penman::{AmrGraph, Edge, Instance, Target, TreeView};
pub use pipeline::{AugRecord, EditConfig, RoundOutput};
pub use smatch::{SmatchScore, TripleSet, VariableMap};
