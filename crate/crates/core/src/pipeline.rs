//! End-to-end analysis of one video.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bundle::{content_hash, AnalysisBundle, Diagnostics, ExcludedSegment, Legend, Timelines, SCHEMA_VERSION};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::gesture::{estimate_height, normalize_skeleton, word_metrics, GestureSegment, NormalizedSkeleton};
use crate::ingest::{align, frame_range, write_pose_track, write_transcript, EmbeddingTable, PoseTrack, TranscriptWord};
use crate::semantics::{extract_phrases, fallback_tag, phrase_embedding, phrases_from_annotations, PhraseSpan};
use crate::similarity::{cluster, distance_matrix, Cut, DistanceMatrix};
use crate::viewmodel::{
    annotate_transcript, build_heatmap, build_relation_graph, build_timelines, project_2d, Point2,
    ProjectionInput, TimedSkeleton, TsneParams,
};

/// Where phrases come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PhraseSource {
    /// Chunk the transcript's own POS tags.
    Tags,
    /// Pre-extracted annotations (JSON bytes).
    Annotations(Vec<u8>),
    /// Tag untagged words with the built-in closed-class lists, then chunk.
    FallbackTagger,
}

#[derive(Debug, Clone)]
pub struct AnalysisInputs {
    pub track: PoseTrack,
    pub words: Vec<TranscriptWord>,
    pub phrases: PhraseSource,
    pub embeddings: Option<EmbeddingTable>,
}

impl AnalysisInputs {
    /// Hash of the inputs together with the settings.
    pub fn hash(&self, config: &AnalysisConfig) -> String {
        let pose = write_pose_track(&self.track);
        let transcript = write_transcript(&self.words);
        let phrases: Vec<u8> = match &self.phrases {
            PhraseSource::Tags => b"tags".to_vec(),
            PhraseSource::FallbackTagger => b"fallback".to_vec(),
            PhraseSource::Annotations(bytes) => [b"annotations:".as_slice(), bytes].concat(),
        };
        let embeddings = self.embeddings.as_ref().map(embedding_digest).unwrap_or_default();
        let settings = config.to_json();
        content_hash([
            pose.as_bytes(),
            transcript.as_bytes(),
            &phrases,
            embeddings.as_bytes(),
            settings.as_bytes(),
        ])
    }
}

fn embedding_digest(table: &EmbeddingTable) -> String {
    let mut entries: Vec<(&str, &[f32])> = table.iter().collect();
    entries.sort_by_key(|(w, _)| *w);
    let mut buf = Vec::new();
    for (w, v) in entries {
        buf.extend_from_slice(w.as_bytes());
        buf.push(0);
        for x in v {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    content_hash([buf.as_slice()])
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    })
}

fn resolve_phrases(words: &mut [TranscriptWord], source: &PhraseSource) -> Result<Vec<PhraseSpan>> {
    match source {
        PhraseSource::Tags => extract_phrases(words),
        PhraseSource::Annotations(bytes) => phrases_from_annotations(words, bytes),
        PhraseSource::FallbackTagger => {
            fallback_tag(words);
            extract_phrases(words)
        }
    }
}

/// t-SNE over the given items, or `None` when there are too few of them.
/// The perplexity is lowered for small inputs so it stays below the count.
fn project(input: ProjectionInput<'_>, n: usize, params: &TsneParams) -> Result<Option<(Vec<Point2>, f64)>> {
    if n < 3 {
        return Ok(None);
    }
    let perplexity = params.perplexity.min((n - 1) as f64 / 3.0);
    let params = TsneParams { perplexity, ..*params };
    Ok(Some((project_2d(input, &params)?, perplexity)))
}

/// Run the whole analysis. The result depends only on the inputs and the
/// settings.
pub fn analyze(inputs: &AnalysisInputs, config: &AnalysisConfig) -> Result<AnalysisBundle> {
    config.validate()?;
    let input_hash = inputs.hash(config);
    let frames = &inputs.track.frames;
    if frames.is_empty() {
        return Err(Error::Schema("pose input has no frames".into()));
    }
    let mut words = inputs.words.clone();
    let mut diagnostics = Diagnostics {
        frame_count: frames.len(),
        ..Default::default()
    };

    let frame_height = inputs.track.frame_size.map(|s| s.height);
    let height = median(
        frames
            .iter()
            .filter_map(|f| estimate_height(f, frame_height).ok())
            .collect(),
    )
    .ok_or_else(|| Error::Normalization("speaker height cannot be estimated from any frame".into()))?;
    diagnostics.height_estimate = height;

    let normalized: Vec<Option<(NormalizedSkeleton, usize)>> = frames
        .par_iter()
        .map(|f| normalize_skeleton(f, height).ok())
        .collect();
    let mut skeletons = Vec::with_capacity(frames.len());
    for (frame, n) in frames.iter().zip(normalized) {
        match n {
            Some((s, clamps)) => {
                diagnostics.clamp_events += clamps;
                skeletons.push(Some(s));
            }
            None => {
                diagnostics.skipped_frames.push(frame.frame_index);
                skeletons.push(None);
            }
        }
    }
    let timed: Vec<TimedSkeleton> = frames
        .iter()
        .zip(&skeletons)
        .map(|(f, s)| TimedSkeleton { timestamp: f.timestamp, skeleton: *s })
        .collect();

    let space = config.gesture_space();
    let heatmap = build_heatmap(skeletons.iter().flatten(), &space);
    let (vertical, horizontal) = build_timelines(&timed);

    let word_frames = align(frames, &words);
    let metrics = word_metrics(&skeletons, &word_frames, config.variation_aggregate)?;
    diagnostics.words_without_frames = {
        let with: std::collections::HashSet<usize> = metrics.iter().map(|m| m.word_index).collect();
        (0..words.len()).filter(|i| !with.contains(i)).collect()
    };
    let annotations = annotate_transcript(&metrics, &config.thresholds());

    let mut phrases = resolve_phrases(&mut words, &inputs.phrases)?;
    if let Some(table) = &inputs.embeddings {
        for p in &mut phrases {
            p.embedding = phrase_embedding(p, table);
        }
    }
    diagnostics.oov_phrases = phrases
        .iter()
        .filter(|p| p.embedding.is_none())
        .map(|p| p.id)
        .collect();

    let typing = config.typing();
    let built: Vec<Result<GestureSegment>> = phrases
        .par_iter()
        .map(|p| {
            let range = frame_range(frames, p.start, p.end);
            let skels: Vec<NormalizedSkeleton> = skeletons[range.clone()].iter().flatten().copied().collect();
            GestureSegment::build(0, Some(p.id), p.word_range.clone(), range, skels, &typing, config.variation_aggregate)
        })
        .collect();
    let mut segments = Vec::new();
    for (p, seg) in phrases.iter().zip(built) {
        match seg {
            Ok(mut s) => {
                s.id = segments.len();
                segments.push(s);
            }
            Err(e) => diagnostics.excluded_segments.push(ExcludedSegment {
                phrase_id: p.id,
                reason: e.to_string(),
            }),
        }
    }

    let outcome = distance_matrix(&segments);
    diagnostics.unmatched_segments = outcome.excluded;
    let matrix: DistanceMatrix = outcome.matrix;
    let clusters = if matrix.is_empty() {
        None
    } else {
        Some(cluster(&matrix, Cut::Count(config.cluster_count.min(matrix.len())))?)
    };

    let tsne = config.tsne();
    let embedded: Vec<(usize, Vec<f64>)> = phrases
        .iter()
        .filter_map(|p| p.embedding.clone().map(|e| (p.id, e)))
        .collect();
    let vectors: Vec<Vec<f64>> = embedded.iter().map(|(_, e)| e.clone()).collect();
    let mut phrase_points = HashMap::new();
    if let Some((points, perplexity)) = project(ProjectionInput::Vectors(&vectors), vectors.len(), &tsne)? {
        diagnostics.phrase_perplexity = Some(perplexity);
        phrase_points.extend(embedded.iter().map(|(id, _)| *id).zip(points));
    }
    let mut gesture_points = HashMap::new();
    if let Some((points, perplexity)) = project(ProjectionInput::Distances(&matrix), matrix.len(), &tsne)? {
        diagnostics.gesture_perplexity = Some(perplexity);
        gesture_points.extend(matrix.ids.iter().copied().zip(points));
    }
    diagnostics.unprojected_phrases = phrases
        .iter()
        .map(|p| p.id)
        .filter(|id| !phrase_points.contains_key(id))
        .collect();
    diagnostics.unprojected_segments = segments
        .iter()
        .map(|s| s.id)
        .filter(|id| !gesture_points.contains_key(id))
        .collect();
    let relation = build_relation_graph(&phrases, &segments, &phrase_points, &gesture_points, config.glyph_samples);

    let last_frame = frames.last().map_or(0.0, |f| f.timestamp);
    let last_word = words.last().map_or(0.0, |w| w.end);
    Ok(AnalysisBundle {
        schema_version: SCHEMA_VERSION,
        input_hash,
        duration: last_frame.max(last_word),
        settings: config.clone(),
        legend: Legend::default(),
        words,
        frame_times: frames.iter().map(|f| f.timestamp).collect(),
        skeletons,
        heatmap,
        timelines: Timelines { vertical, horizontal },
        word_metrics: metrics,
        annotations,
        phrases,
        segments,
        gesture_distances: matrix,
        clusters,
        relation,
        diagnostics,
    })
}
