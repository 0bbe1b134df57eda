//! Project phrases and gestures with t-SNE, build glyphs and the link set.

use std::collections::HashMap;

use gesturelens::gesture::{GestureSegment, TypingParams, VariationAggregate};
use gesturelens::ingest::{load_embeddings, TranscriptWord};
use gesturelens::semantics::{extract_phrases, phrase_embedding};
use gesturelens::similarity::distance_matrix;
use gesturelens::synth::family_ramp;
use gesturelens::viewmodel::{build_relation_graph, project_2d, resample, ProjectionInput, TsneParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gesturelens::Result<()> {
    let tagged = [
        ("Teachers", "NOUN"), ("tell", "VERB"), ("students", "NOUN"), ("the", "DET"), ("truth", "NOUN"),
        ("about", "ADP"), ("Germany", "PROPN"), ("and", "CCONJ"), ("Europe", "PROPN"),
    ];
    let words: Vec<TranscriptWord> = tagged
        .iter()
        .enumerate()
        .map(|(i, (w, t))| TranscriptWord::new(*w, i as f64 * 0.5, i as f64 * 0.5 + 0.4).with_pos(*t))
        .collect();
    let table = load_embeddings(
        "teachers 1 0 0\nstudents 0.9 0.1 0\ntruth 0.2 0.8 0\ngermany 0 0.1 1\neurope 0 0.2 0.9\ntell 0.5 0.5 0\nthe 0 0 0\n"
            .as_bytes(),
    )?;
    let mut phrases = extract_phrases(&words)?;
    for p in &mut phrases {
        p.embedding = phrase_embedding(p, &table);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let segments: Vec<GestureSegment> = phrases
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let skels = family_ramp(id % 2 == 0, 10, 0.01, &mut rng);
            GestureSegment::build(id, Some(p.id), p.word_range.clone(), 0..10, skels, &TypingParams::default(), VariationAggregate::Mean)
        })
        .collect::<Result<_, _>>()?;

    let tsne = TsneParams { perplexity: 2.0, ..Default::default() };
    let vectors: Vec<Vec<f64>> = phrases.iter().filter_map(|p| p.embedding.clone()).collect();
    let phrase_points: HashMap<usize, [f64; 2]> = phrases
        .iter()
        .filter(|p| p.embedding.is_some())
        .map(|p| p.id)
        .zip(project_2d(ProjectionInput::Vectors(&vectors), &tsne)?)
        .collect();
    let matrix = distance_matrix(&segments).matrix;
    let gesture_points: HashMap<usize, [f64; 2]> =
        matrix.ids.iter().copied().zip(project_2d(ProjectionInput::Distances(&matrix), &tsne)?).collect();

    let graph = build_relation_graph(&phrases, &segments, &phrase_points, &gesture_points, 24);
    for n in &graph.phrase_nodes {
        let p = &phrases[n.phrase_id];
        println!("phrase {:>2} {:<3} {:<28} at {:?}", p.id, p.kind.label(), p.text, n.point.map(|q| [(q[0] * 100.0).round() / 100.0, (q[1] * 100.0).round() / 100.0]));
    }
    for n in &graph.gesture_nodes {
        let g = n.glyph.as_ref().expect("segments have frames");
        println!("gesture {:>2} {:?} ring peak {:.3}", n.segment_id, g.gesture_type, g.radial_variation.iter().copied().fold(0.0, f64::max));
    }
    println!("links: {:?}", graph.links.iter().map(|l| (l.phrase_id, l.segment_id)).collect::<Vec<_>>());
    println!("[0, 1] resampled to 4: {:?}", resample(&[0.0, 1.0], 4));
    Ok(())
}
