//! Analyze the bundled 30-second talk and summarize the bundle.
//!
//! cargo run -p gesturelens --example analyze_fixture

use std::path::Path;

use gesturelens::ingest::{load_embeddings, parse_pose_frames, parse_transcript, PoseParseOptions};
use gesturelens::{analyze, AnalysisConfig, AnalysisInputs, PhraseSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/talk30");
    let inputs = AnalysisInputs {
        track: parse_pose_frames(&std::fs::read(dir.join("pose.json"))?, &PoseParseOptions::default())?,
        words: parse_transcript(&std::fs::read(dir.join("transcript.json"))?)?,
        phrases: PhraseSource::Tags,
        embeddings: Some(load_embeddings(std::io::BufReader::new(std::fs::File::open(
            dir.join("embeddings.txt"),
        )?))?),
    };
    let bundle = analyze(&inputs, &AnalysisConfig::default())?;

    println!("input hash     {}", bundle.input_hash);
    println!("duration       {:.2}s over {} frames", bundle.duration, bundle.frame_times.len());
    println!("height         {:.1}px", bundle.diagnostics.height_estimate);
    println!("heatmap mass   {}", bundle.heatmap.total_samples);
    println!("words          {}", bundle.words.len());
    println!(
        "flags          {} red strokes, {} green triangles",
        bundle.annotations.iter().filter(|a| a.high_variation_flag).count(),
        bundle.annotations.iter().filter(|a| a.large_change_flag).count()
    );
    println!("phrases        {}", bundle.phrases.len());
    println!("segments       {}", bundle.segments.len());
    println!("links          {}", bundle.relation.links.len());
    if let Some(c) = &bundle.clusters {
        println!("clusters       {} over {} segments", c.cluster_count(), c.labels.len());
    }
    println!("skipped frames {:?}", bundle.diagnostics.skipped_frames);
    for p in bundle.phrases.iter().take(8) {
        println!("  {:>3} {:<3} {:>6.2}-{:<6.2} x{} {}", p.id, p.kind.label(), p.start, p.end, p.occurrence_count, p.text);
    }
    Ok(())
}
