use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};
use crate::gesture::{GestureSegment, GestureType, NormalizedSkeleton};
use crate::semantics::{PhraseKind, PhraseSpan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlyphModel {
    pub segment_id: usize,
    pub average: NormalizedSkeleton,
    pub gesture_type: GestureType,
    pub radial_variation: Vec<f64>,
}

/// Linearly resample `profile` to `samples` evenly spaced points, keeping
/// both endpoints.
pub fn resample(profile: &[f64], samples: usize) -> Vec<f64> {
    match (profile.len(), samples) {
        (0, _) | (_, 0) => Vec::new(),
        (n, s) if n == s => profile.to_vec(),
        (1, s) => vec![profile[0]; s],
        (_, 1) => vec![profile[0]],
        (n, s) => {
            let last = (n - 1) as f64;
            (0..s)
                .map(|k| {
                    let pos = k as f64 * last / (s - 1) as f64;
                    let lo = (pos.floor() as usize).min(n - 2);
                    let frac = pos - lo as f64;
                    profile[lo] + (profile[lo + 1] - profile[lo]) * frac
                })
                .collect()
        }
    }
}

pub fn build_glyph(segment: &GestureSegment, samples: usize) -> Result<GlyphModel> {
    if samples == 0 {
        return Err(Error::Glyph("glyph needs at least one radial sample".into()));
    }
    if segment.variation_profile.is_empty() {
        return Err(Error::Glyph(format!("segment {} has no frames", segment.id)));
    }
    Ok(GlyphModel {
        segment_id: segment.id,
        average: segment.average,
        gesture_type: segment.gesture_type,
        radial_variation: resample(&segment.variation_profile, samples),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseNode {
    pub phrase_id: usize,
    pub kind: PhraseKind,
    /// `None` when the phrase could not be projected (no embedding, or too
    /// few phrases).
    pub point: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureNode {
    pub segment_id: usize,
    pub point: Option<Point2>,
    pub glyph: Option<GlyphModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub phrase_id: usize,
    pub segment_id: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelationGraph {
    pub phrase_nodes: Vec<PhraseNode>,
    pub gesture_nodes: Vec<GestureNode>,
    pub links: Vec<Link>,
}

fn intersects(a: &std::ops::Range<usize>, b: &std::ops::Range<usize>) -> bool {
    a.start < b.end && b.start < a.end
}

/// Assemble the relation graph. Points are looked up by id; ids missing from
/// the maps get no point. Links join every phrase and segment whose word
/// ranges share at least one word.
pub fn build_relation_graph(
    phrases: &[PhraseSpan],
    segments: &[GestureSegment],
    phrase_points: &HashMap<usize, Point2>,
    gesture_points: &HashMap<usize, Point2>,
    glyph_samples: usize,
) -> RelationGraph {
    let phrase_nodes = phrases
        .iter()
        .map(|p| PhraseNode {
            phrase_id: p.id,
            kind: p.kind,
            point: phrase_points.get(&p.id).copied(),
        })
        .collect();
    let gesture_nodes = segments
        .iter()
        .map(|s| GestureNode {
            segment_id: s.id,
            point: gesture_points.get(&s.id).copied(),
            glyph: build_glyph(s, glyph_samples).ok(),
        })
        .collect();
    let mut links = Vec::new();
    for p in phrases {
        for s in segments {
            if intersects(&p.word_range, &s.word_range) {
                links.push(Link { phrase_id: p.id, segment_id: s.id });
            }
        }
    }
    links.sort();
    RelationGraph { phrase_nodes, gesture_nodes, links }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture::TypingParams;
    use crate::ingest::Keypoint;
    use crate::gesture::{VariationAggregate, UPPER_BODY};

    fn skeleton(rx: f64) -> NormalizedSkeleton {
        let mut k = [Keypoint::new(0.0, 0.0, 1.0); UPPER_BODY];
        k[2] = Keypoint::new(-0.15, -0.2, 1.0);
        k[5] = Keypoint::new(0.15, -0.2, 1.0);
        k[4] = Keypoint::new(rx, -0.4, 1.0);
        k[7] = Keypoint::new(0.05, -0.4, 1.0);
        NormalizedSkeleton::new(k)
    }

    fn segment(id: usize, words: std::ops::Range<usize>, skels: Vec<NormalizedSkeleton>) -> GestureSegment {
        let frames = 0..skels.len();
        GestureSegment::build(
            id,
            None,
            words,
            frames,
            skels,
            &TypingParams::default(),
            VariationAggregate::Mean,
        )
        .unwrap()
    }

    fn phrase(id: usize, words: std::ops::Range<usize>) -> PhraseSpan {
        PhraseSpan {
            id,
            kind: PhraseKind::Noun,
            word_range: words,
            text: String::new(),
            start: 0.0,
            end: 1.0,
            occurrence_count: 1,
            embedding: None,
        }
    }

    #[test]
    fn resample_by_hand() {
        let r = resample(&[0.0, 1.0], 4);
        let expect = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = [0.3, 0.1, 0.7];
        assert_eq!(resample(&p, 3), p.to_vec());
    }

    #[test]
    fn static_segment_ring_is_zero() {
        let s = segment(0, 0..2, vec![skeleton(-0.05); 5]);
        let g = build_glyph(&s, 24).unwrap();
        assert_eq!(g.radial_variation, vec![0.0; 24]);
        assert_eq!(g.gesture_type, s.gesture_type);
    }

    #[test]
    fn zero_samples_is_an_error() {
        let s = segment(0, 0..2, vec![skeleton(-0.05); 2]);
        assert!(matches!(build_glyph(&s, 0), Err(Error::Glyph(_))));
    }

    #[test]
    fn links_follow_word_overlap() {
        let skels = vec![skeleton(-0.05), skeleton(-0.1)];
        let segments = vec![segment(0, 5..7, skels.clone()), segment(1, 7..9, skels.clone()), segment(2, 10..12, skels)];
        let phrases = vec![phrase(0, 3..6), phrase(1, 6..8), phrase(2, 20..22)];
        let g = build_relation_graph(&phrases, &segments, &HashMap::new(), &HashMap::new(), 8);
        assert_eq!(
            g.links,
            vec![
                Link { phrase_id: 0, segment_id: 0 },
                Link { phrase_id: 1, segment_id: 0 },
                Link { phrase_id: 1, segment_id: 1 },
            ]
        );
        assert!(g.gesture_nodes.iter().all(|n| n.glyph.is_some() && n.point.is_none()));
    }
}
