//! Combinatorial novelty and anticipation indexes over time-windowed
//! co-citation data, with the downstream impact analysis: hit-paper
//! probability curves, polynomial logistic fits, mutual information, and
//! journal citation-network export.
//!
//! The pipeline runs in file-separated stages:
//!
//! 1. [`corpus`] loads bibliographic records and the journal catalog, and
//!    selects the analysis sample per time interval.
//! 2. [`cooccur`] counts co-citation pair frequencies and element citation
//!    counts at the paper, journal, and subject-category levels.
//! 3. [`indexes`] turns counts into per-pair scores and per-paper score
//!    vectors.
//! 4. [`stats`] labels hit papers and quantifies how well each score
//!    predicts them.
//! 5. [`graphexport`] builds the journal citation network for external
//!    layout tools.
//!
//! [`synth`] generates seeded synthetic corpora and carries an independent
//! brute-force scorer used to verify the optimized path.

pub mod corpus;
pub mod cooccur;
pub mod error;
pub mod graphexport;
pub mod indexes;
pub mod provenance;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
