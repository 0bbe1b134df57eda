//! Parse the three input formats and align words to frames.

use gesturelens::ingest::{align, load_embeddings, parse_pose_frames, parse_transcript, PoseParseOptions};

const POSE: &str = r#"{"frames":[
  {"index":0,"people":[{"pose_keypoints_2d":[PLACEHOLDER]}]},
  {"index":1,"people":[{"pose_keypoints_2d":[PLACEHOLDER]}]},
  {"index":2,"people":[]}
]}"#;

const TRANSCRIPT: &str = r#"[
  {"word":"Hello","start":0.0,"end":0.06,"pos":"INTJ"},
  {"word":",","start":0.06,"end":0.07},
  {"word":"world","start":0.07,"end":0.12,"pos":"NOUN"},
  {"word":"."}
]"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flat: Vec<String> = (0..25).map(|k| format!("{},{},0.9", 300 + 4 * k, 100 + 10 * k)).collect();
    let pose = POSE.replace("PLACEHOLDER", &flat.join(","));

    // No timestamps in the file, so the frame rate supplies them.
    let track = parse_pose_frames(pose.as_bytes(), &PoseParseOptions { fps_hint: Some(25.0), ..Default::default() })?;
    for f in &track.frames {
        let seen = f.keypoints.iter().filter(|k| k.detected()).count();
        println!("frame {} at {:.2}s: {seen} keypoints detected", f.frame_index, f.timestamp);
    }

    let words = parse_transcript(TRANSCRIPT.as_bytes())?;
    for w in &words {
        println!("{:>6} [{:.2}, {:.2}) pos={:?} sentence_end={}", w.text, w.start, w.end, w.pos_tag, w.sentence_end);
    }

    for (w, frames) in words.iter().zip(align(&track.frames, &words)) {
        println!("{} -> frames {frames:?}", w.text);
    }

    let table = load_embeddings("hello 0.1 0.2\nworld 0.3 0.4\nhello 9 9\n".as_bytes())?;
    println!("{} vectors of dimension {}; hello = {:?}", table.len(), table.dimension(), table.get("hello"));
    Ok(())
}
