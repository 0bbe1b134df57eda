//! The serialized result of analyzing one video.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::gesture::{GestureSegment, NormalizedSkeleton, WordMetrics};
use crate::ingest::TranscriptWord;
use crate::semantics::PhraseSpan;
use crate::similarity::{Clustering, DistanceMatrix};
use crate::viewmodel::{
    annotate_transcript, HeatmapGrid, RelationGraph, Thresholds, TimelineSeries,
    TranscriptAnnotation,
};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Display colors shared by every renderer of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Legend {
    pub right_hand: String,
    pub left_hand: String,
    pub closed: String,
    pub open: String,
    pub others: String,
    pub high_variation: String,
    pub large_change: String,
}

impl Default for Legend {
    fn default() -> Self {
        Legend {
            right_hand: "#8e44ad".into(),
            left_hand: "#f39c12".into(),
            closed: "#5dade2".into(),
            open: "#f1948a".into(),
            others: "#bfc9ca".into(),
            high_variation: "#e74c3c".into(),
            large_change: "#27ae60".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timelines {
    /// Wrist y over time.
    pub vertical: TimelineSeries,
    /// Wrist x over time.
    pub horizontal: TimelineSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedSegment {
    pub phrase_id: usize,
    pub reason: String,
}

/// Everything that was skipped, clamped or left unprojected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub frame_count: usize,
    /// Median speaker height in pixels used for normalization.
    pub height_estimate: f64,
    pub clamp_events: usize,
    /// Frames whose keypoint 0 was undetected.
    pub skipped_frames: Vec<usize>,
    pub words_without_frames: Vec<usize>,
    pub excluded_segments: Vec<ExcludedSegment>,
    /// Segments left out of the distance matrix.
    pub unmatched_segments: Vec<usize>,
    /// Phrases with no in-vocabulary token.
    pub oov_phrases: Vec<usize>,
    pub unprojected_phrases: Vec<usize>,
    pub unprojected_segments: Vec<usize>,
    pub phrase_perplexity: Option<f64>,
    pub gesture_perplexity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub schema_version: u32,
    /// Hash of the inputs and settings this bundle was computed from.
    pub input_hash: String,
    pub duration: f64,
    pub settings: AnalysisConfig,
    pub legend: Legend,
    pub words: Vec<TranscriptWord>,
    pub frame_times: Vec<f64>,
    /// Per-frame skeleton; `None` where normalization was impossible.
    pub skeletons: Vec<Option<NormalizedSkeleton>>,
    pub heatmap: HeatmapGrid,
    pub timelines: Timelines,
    pub word_metrics: Vec<WordMetrics>,
    pub annotations: Vec<TranscriptAnnotation>,
    pub phrases: Vec<PhraseSpan>,
    pub segments: Vec<GestureSegment>,
    pub gesture_distances: DistanceMatrix,
    pub clusters: Option<Clustering>,
    pub relation: RelationGraph,
    pub diagnostics: Diagnostics,
}

impl AnalysisBundle {
    /// Canonical JSON encoding. Equal bundles encode to equal bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    pub fn from_json(source: &[u8]) -> Result<Self> {
        let bundle: AnalysisBundle = serde_json::from_slice(source).map_err(|e| Error::Parse {
            frame: None,
            line: Some(e.line()),
            message: format!("invalid bundle: {e}"),
        })?;
        if bundle.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "bundle schema {} is not supported (expected {SCHEMA_VERSION})",
                bundle.schema_version
            )));
        }
        Ok(bundle)
    }

    /// Recompute transcript flags for other thresholds. The stored raw and
    /// normalized scores do not depend on them.
    pub fn reannotate(&mut self, thresholds: &Thresholds) {
        self.settings.variation_threshold = thresholds.variation;
        self.settings.change_threshold = thresholds.change;
        self.annotations = annotate_transcript(&self.word_metrics, thresholds);
    }

    /// The word whose interval contains `t`, if any.
    pub fn word_at(&self, t: f64) -> Option<&TranscriptWord> {
        let i = self.words.partition_point(|w| w.start <= t);
        i.checked_sub(1)
            .map(|i| &self.words[i])
            .filter(|w| t < w.end)
    }

    pub fn segment(&self, id: usize) -> Option<&GestureSegment> {
        self.segments.iter().find(|s| s.id == id)
    }

    pub fn phrase(&self, id: usize) -> Option<&PhraseSpan> {
        self.phrases.iter().find(|p| p.id == id)
    }
}

/// SHA-256 over length-prefixed parts, hex encoded.
pub fn content_hash<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hex::encode(hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_separates_parts() {
        let a = content_hash([b"ab".as_slice(), b"c".as_slice()]);
        let b = content_hash([b"a".as_slice(), b"bc".as_slice()]);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}
