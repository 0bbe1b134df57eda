//! Write a synthetic talk (pose, transcript, embeddings) to a directory.
//!
//! cargo run -p gesturelens --example make_fixture -- [out_dir] [seconds]

use std::path::PathBuf;

use gesturelens::synth::{generate, SynthConfig};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/talk30"));
    let duration: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(30.0);

    let config = SynthConfig { duration, ..Default::default() };
    let talk = generate(&config);
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("pose.json"), &talk.pose_json)?;
    std::fs::write(out.join("transcript.json"), &talk.transcript_json)?;
    std::fs::write(out.join("embeddings.txt"), &talk.embeddings)?;
    println!(
        "wrote {} sentences over {duration}s to {}",
        talk.sentences.len(),
        out.display()
    );
    Ok(())
}
