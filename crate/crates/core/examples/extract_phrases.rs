//! Chunk a tagged transcript into NP/VP/PP/SVO phrases, embed them and
//! filter them the way the relation view does.

use std::collections::BTreeSet;

use gesturelens::ingest::{load_embeddings, TranscriptWord};
use gesturelens::semantics::{extract_phrases, fallback_tag, filter_phrases, phrase_embedding, PhraseFilter, PhraseKind};

fn main() -> gesturelens::Result<()> {
    let tagged = [
        ("The", "DET"), ("pros", "NOUN"), ("outweigh", "VERB"), ("the", "DET"), ("cons", "NOUN"),
        ("in", "ADP"), ("Germany", "PROPN"),
    ];
    let words: Vec<TranscriptWord> = tagged
        .iter()
        .enumerate()
        .map(|(i, (w, tag))| TranscriptWord::new(*w, i as f64 * 0.4, i as f64 * 0.4 + 0.3).with_pos(*tag))
        .collect();

    let table = load_embeddings("pros 1 0\ncons 0.8 0.2\ngermany 0 1\n".as_bytes())?;
    let mut phrases = extract_phrases(&words)?;
    for p in &mut phrases {
        p.embedding = phrase_embedding(p, &table);
        println!("{:<3} {:?} {:<30} x{} {:?}", p.kind.label(), p.word_range, p.text, p.occurrence_count, p.embedding);
    }

    let filter = PhraseFilter {
        time_range: Some((0.0, 1.0)),
        kinds: Some(BTreeSet::from([PhraseKind::Noun])),
        ..Default::default()
    };
    let kept: Vec<String> = filter_phrases(&phrases, &filter)?.into_iter().map(|p| p.text).collect();
    println!("noun phrases starting in the first second: {kept:?}");

    // Untagged text needs the fallback tagger.
    let mut plain = vec![TranscriptWord::new("the", 0.0, 0.2), TranscriptWord::new("story", 0.3, 0.6)];
    fallback_tag(&mut plain);
    println!("fallback tags: {:?}", plain.iter().map(|w| w.pos_tag.clone().unwrap()).collect::<Vec<_>>());
    Ok(())
}
