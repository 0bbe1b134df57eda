//! Gesture analytics for recorded talks.
//!
//! Pose keypoints and a word-timed transcript go in; gesture-space
//! statistics, phrase-aligned gesture segments, DTW similarity, clusters and
//! the view models of the exploration UI come out.

pub mod bundle;
pub mod config;
pub mod error;
pub mod export;
pub mod gesture;
pub mod ingest;
pub mod pipeline;
pub mod semantics;
pub mod similarity;
pub mod synth;
pub mod viewmodel;

pub use bundle::AnalysisBundle;
pub use config::AnalysisConfig;
pub use error::{Error, Result};
pub use pipeline::{analyze, AnalysisInputs, PhraseSource};
