//! Hierarchical re-estimation of topic models for measuring the topical
//! diversity of documents.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! pieces: corpus preprocessing, a collapsed Gibbs LDA trainer, the EM
//! parsimonization engine, the three re-estimation stages and their pipeline
//! variants, Rao's diversity coefficient, and the evaluation metrics. File
//! formats, IO, and the command-line front end live in the `hitr` crate.
//! The optional `parallel` feature spreads per-document and per-topic work
//! over rayon without changing any result.
//!
//! A typical run:
//!
//! ```
//! use hitr_core::corpus::{build_corpus, BuildOptions, RawDocument};
//! use hitr_core::diversity::{rao_diversity, topic_distance_matrix};
//! use hitr_core::hitr::{run_pipeline, PipelineVariant, ReestimationConfig};
//! use hitr_core::lda::LdaConfig;
//!
//! let raw = [
//!     RawDocument::new("a", "cell protein gene cell protein gene"),
//!     RawDocument::new("b", "market price trade market price trade"),
//!     RawDocument::new("c", "cell gene market price protein trade"),
//! ];
//! let corpus = build_corpus(&raw, &BuildOptions { top_k_remove: 0, min_count: 1, ..Default::default() }).unwrap();
//!
//! let mut config = ReestimationConfig::default();
//! config.lda = LdaConfig::with_topics(2).iterations(50, 25);
//! let out = run_pipeline(&corpus, PipelineVariant::Hitr, &config, 7).unwrap();
//!
//! let distances = topic_distance_matrix(&out.model).unwrap();
//! for (_, row) in out.assignments.iter() {
//!     let score = rao_diversity(row, &distances);
//!     assert!((0.0..=1.0).contains(&score));
//! }
//! ```

#![no_std]
// Range checks are written as negated comparisons so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod dist;
pub mod diversity;
pub mod error;
pub mod eval;
pub mod hitr;
pub mod lda;
mod par;
pub mod parsimony;
pub mod planted;
mod seed;

pub use dist::SparseDistribution;
pub use error::{Error, Result};
