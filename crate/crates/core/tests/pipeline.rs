use std::collections::BTreeSet;
use std::path::PathBuf;

use gesturelens::export::{export, ExportKind};
use gesturelens::ingest::{load_embeddings, parse_pose_frames, parse_transcript, PoseParseOptions};
use gesturelens::viewmodel::{search_keyword, Thresholds};
use gesturelens::{analyze, AnalysisBundle, AnalysisConfig, AnalysisInputs, Error, PhraseSource};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/talk30")
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture_dir().join(name)).unwrap()
}

fn inputs(phrases: PhraseSource) -> AnalysisInputs {
    AnalysisInputs {
        track: parse_pose_frames(&read("pose.json"), &PoseParseOptions::default()).unwrap(),
        words: parse_transcript(&read("transcript.json")).unwrap(),
        phrases,
        embeddings: Some(load_embeddings(&read("embeddings.txt")[..]).unwrap()),
    }
}

fn fixture_bundle() -> AnalysisBundle {
    analyze(&inputs(PhraseSource::Tags), &AnalysisConfig::default()).unwrap()
}

#[test]
fn fixture_bundle_is_complete() {
    let b = fixture_bundle();
    assert!(b.heatmap.total_samples > 0);
    assert_eq!(b.heatmap.cells.iter().flatten().sum::<u64>(), b.heatmap.total_samples);
    assert_eq!(b.timelines.vertical.right_hand.len(), b.frame_times.len());
    assert!(!b.phrases.is_empty());
    assert!(!b.segments.is_empty());
    assert_eq!(b.gesture_distances.len(), b.segments.len());
    assert!(b.relation.gesture_nodes.iter().all(|n| n.point.is_some() && n.glyph.is_some()));
    assert!(b.relation.phrase_nodes.iter().any(|n| n.point.is_some()));
    assert_eq!(b.clusters.as_ref().unwrap().cluster_count(), 4);
    assert!(b.duration > 29.0 && b.duration <= 30.0);
    // The generator drops the face every 97th frame starting at 50.
    assert_eq!(b.diagnostics.skipped_frames, (50..750).step_by(97).collect::<Vec<_>>());
    for a in &b.annotations {
        assert_eq!(a.high_variation_flag, a.spatial_variation > 0.4);
        assert_eq!(a.large_change_flag, a.temporal_change > 0.5);
    }
}

#[test]
fn analysis_is_byte_stable() {
    let a = fixture_bundle().to_json();
    let b = fixture_bundle().to_json();
    assert_eq!(a, b);
    let reparsed = AnalysisBundle::from_json(a.as_bytes()).unwrap();
    assert_eq!(reparsed.to_json(), a);
}

#[test]
fn keyword_search_finds_every_tell() {
    let b = fixture_bundle();
    let raw: Vec<serde_json::Value> = serde_json::from_slice(&read("transcript.json")).unwrap();
    let expected: Vec<usize> = raw
        .iter()
        .filter(|w| w.get("start").is_some())
        .enumerate()
        .filter(|(_, w)| w["word"].as_str().unwrap().eq_ignore_ascii_case("tell"))
        .map(|(i, _)| i)
        .collect();
    assert!(expected.len() >= 3);
    assert_eq!(search_keyword(&b.words, "tell"), expected);
    assert_eq!(search_keyword(&b.words, "TELL"), expected);
    assert!(search_keyword(&b.words, "").is_empty());
    assert!(search_keyword(&b.words, "absent").is_empty());
}

#[test]
fn fixture_links_equal_word_overlap() {
    let b = fixture_bundle();
    let got: BTreeSet<(usize, usize)> = b.relation.links.iter().map(|l| (l.phrase_id, l.segment_id)).collect();
    let mut want = BTreeSet::new();
    for p in &b.phrases {
        for s in &b.segments {
            if p.word_range.clone().any(|w| s.word_range.contains(&w)) {
                want.insert((p.id, s.id));
            }
        }
    }
    assert_eq!(got, want);
}

#[test]
fn thresholds_only_change_flags() {
    let mut b = fixture_bundle();
    let before = b.word_metrics.clone();
    b.reannotate(&Thresholds { variation: 1.0, change: 1.0 });
    assert_eq!(b.word_metrics, before);
    assert!(b.annotations.iter().all(|a| !a.high_variation_flag && !a.large_change_flag));
    b.reannotate(&Thresholds { variation: 0.0, change: 0.0 });
    assert!(b.annotations.iter().any(|a| a.high_variation_flag));
}

#[test]
fn word_lookup_by_time() {
    let b = fixture_bundle();
    let germany = b.words.iter().find(|w| w.text == "Germany").unwrap();
    let mid = (germany.start + germany.end) / 2.0;
    assert_eq!(b.word_at(mid).unwrap().text, "Germany");
    assert!(b.word_at(0.0).is_none());
}

#[test]
fn untagged_transcript_needs_fallback_or_annotations() {
    let mut untagged = inputs(PhraseSource::Tags);
    for w in &mut untagged.words {
        w.pos_tag = None;
    }
    let err = analyze(&untagged, &AnalysisConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");

    untagged.phrases = PhraseSource::FallbackTagger;
    let b = analyze(&untagged, &AnalysisConfig::default()).unwrap();
    assert!(!b.phrases.is_empty());

    untagged.phrases = PhraseSource::Annotations(br#"[{"kind":"NP","words":[0,2]},{"kind":"VP","words":[2]}]"#.to_vec());
    let b = analyze(&untagged, &AnalysisConfig::default()).unwrap();
    assert_eq!(b.phrases.len(), 2);
    // The phrases share word 2, so each links to both segments.
    assert_eq!(b.relation.links.len(), 4);
    // Two phrases are too few to project.
    assert_eq!(b.diagnostics.unprojected_phrases, vec![0, 1]);
}

#[test]
fn settings_change_the_hash() {
    let i = inputs(PhraseSource::Tags);
    let a = i.hash(&AnalysisConfig::default());
    let b = i.hash(&AnalysisConfig { tsne_seed: 1, ..Default::default() });
    assert_ne!(a, b);
    assert_eq!(a, fixture_bundle().input_hash);
}

#[test]
fn exports() {
    let b = fixture_bundle();

    let mut csv = Vec::new();
    export(&b, ExportKind::Matrix, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), b.segments.len() + 1);
    assert!(rows[0].starts_with("segment_id,0,1"));
    let cell: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(cell, b.gesture_distances.get(0, 1));

    let mut pgm = Vec::new();
    export(&b, ExportKind::Heatmap, &mut pgm).unwrap();
    assert!(String::from_utf8(pgm).unwrap().starts_with("P2\n64 64\n255\n"));

    let mut words = Vec::new();
    export(&b, ExportKind::TranscriptCsv, &mut words).unwrap();
    let text = String::from_utf8(words).unwrap();
    assert_eq!(text.lines().count(), b.words.len() + 1);
    assert!(text.lines().nth(1).unwrap().starts_with("0,Let,"));

    assert!("pdf".parse::<ExportKind>().is_err());
}
