use serde::{Deserialize, Serialize};

use crate::gesture::{NormalizedSkeleton, WordMetrics};
use crate::ingest::{normalize_token, TranscriptWord};

/// Flag thresholds of the transcript area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub variation: f64,
    pub change: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            variation: 0.4,
            change: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptAnnotation {
    pub word_index: usize,
    pub mini_skeleton: NormalizedSkeleton,
    pub spatial_variation: f64,
    pub temporal_change: f64,
    /// Drawn as a red stroke.
    pub high_variation_flag: bool,
    /// Drawn as a green triangle.
    pub large_change_flag: bool,
}

/// Flag words whose normalized score strictly exceeds the threshold.
pub fn annotate_transcript(metrics: &[WordMetrics], thresholds: &Thresholds) -> Vec<TranscriptAnnotation> {
    metrics
        .iter()
        .map(|m| TranscriptAnnotation {
            word_index: m.word_index,
            mini_skeleton: m.average,
            spatial_variation: m.spatial_variation,
            temporal_change: m.temporal_change,
            high_variation_flag: m.spatial_variation > thresholds.variation,
            large_change_flag: m.temporal_change > thresholds.change,
        })
        .collect()
}

/// Indices of words equal to `query`, ignoring case and edge punctuation.
pub fn search_keyword(words: &[TranscriptWord], query: &str) -> Vec<usize> {
    let query = normalize_token(query);
    if query.is_empty() {
        return Vec::new();
    }
    words
        .iter()
        .enumerate()
        .filter(|(_, w)| w.token() == query)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture::UPPER_BODY;
    use crate::ingest::Keypoint;

    fn metric(i: usize, variation: f64, change: f64) -> WordMetrics {
        WordMetrics {
            word_index: i,
            spatial_variation_raw: variation,
            temporal_change_raw: change,
            spatial_variation: variation,
            temporal_change: change,
            average: NormalizedSkeleton::new([Keypoint::new(0.0, 0.0, 1.0); UPPER_BODY]),
        }
    }

    #[test]
    fn strict_comparison() {
        let a = annotate_transcript(&[metric(0, 0.4, 0.5)], &Thresholds::default());
        assert!(!a[0].high_variation_flag);
        assert!(!a[0].large_change_flag);
    }

    #[test]
    fn large_change_with_defaults() {
        let a = annotate_transcript(&[metric(3, 0.1, 0.9)], &Thresholds::default());
        assert_eq!(a[0].word_index, 3);
        assert!(a[0].large_change_flag);
        assert!(!a[0].high_variation_flag);
    }

    #[test]
    fn zero_metrics_have_no_flags() {
        let a = annotate_transcript(&[metric(0, 0.0, 0.0), metric(1, 0.0, 0.0)], &Thresholds::default());
        assert!(a.iter().all(|x| !x.high_variation_flag && !x.large_change_flag));
    }

    fn words(text: &[&str]) -> Vec<TranscriptWord> {
        text.iter()
            .enumerate()
            .map(|(i, w)| TranscriptWord::new(*w, i as f64, i as f64 + 0.5))
            .collect()
    }

    #[test]
    fn keyword_search() {
        let w = words(&["Let", "me", "tell", "you", "what", "I", "TELL", "them", "tell."]);
        assert_eq!(search_keyword(&w, "tell"), vec![2, 6, 8]);
        assert!(search_keyword(&w, "story").is_empty());
        assert!(search_keyword(&w, "").is_empty());
        assert!(search_keyword(&w, "tel").is_empty());
    }
}
