//! Heatmap, timelines, transcript flags, keyword search and a trajectory
//! from the bundled talk.

use std::path::Path;

use gesturelens::ingest::{load_embeddings, parse_pose_frames, parse_transcript, PoseParseOptions};
use gesturelens::viewmodel::{annotate_transcript, build_trajectory, search_keyword, Thresholds, TimedSkeleton};
use gesturelens::{analyze, AnalysisConfig, AnalysisInputs, PhraseSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/talk30");
    let inputs = AnalysisInputs {
        track: parse_pose_frames(&std::fs::read(dir.join("pose.json"))?, &PoseParseOptions::default())?,
        words: parse_transcript(&std::fs::read(dir.join("transcript.json"))?)?,
        phrases: PhraseSource::Tags,
        embeddings: Some(load_embeddings(&std::fs::read(dir.join("embeddings.txt"))?[..])?),
    };
    let bundle = analyze(&inputs, &AnalysisConfig::default())?;

    // Coarse text rendering of the wrist heatmap, top row is y = 1.
    let shades = [' ', '.', ':', '*', '#'];
    let (r, step) = (bundle.heatmap.resolution, bundle.heatmap.resolution / 32);
    let max = bundle.heatmap.max_count().max(1) as f64;
    for row in (0..r).step_by(step * 2) {
        let line: String = (0..r)
            .step_by(step)
            .map(|col| {
                let c = (row..row + step * 2).map(|y| bundle.heatmap.cells[y][col..col + step].iter().sum::<u64>()).sum::<u64>();
                shades[((c as f64 / max).sqrt() * 4.0).round().min(4.0) as usize]
            })
            .collect();
        println!("|{line}|");
    }

    let right_y: Vec<f64> = bundle.timelines.vertical.right_hand.iter().filter_map(|(_, v)| *v).collect();
    let lo = right_y.iter().copied().fold(f64::MAX, f64::min);
    let hi = right_y.iter().copied().fold(f64::MIN, f64::max);
    println!("right wrist height spans [{lo:.2}, {hi:.2}]");

    for (label, t) in [("defaults", Thresholds::default()), ("strict", Thresholds { variation: 0.8, change: 0.9 })] {
        let notes = annotate_transcript(&bundle.word_metrics, &t);
        let marked: Vec<&str> = notes
            .iter()
            .filter(|a| a.high_variation_flag || a.large_change_flag)
            .map(|a| bundle.words[a.word_index].text.as_str())
            .collect();
        println!("{label}: {} flagged words {:?}", marked.len(), marked);
    }

    let hits = search_keyword(&bundle.words, "tell");
    println!("\"tell\" at words {hits:?}");

    if let Some(&first) = hits.first() {
        let w = &bundle.words[first];
        let frames: Vec<TimedSkeleton> = bundle
            .frame_times
            .iter()
            .zip(&bundle.skeletons)
            .filter(|(t, _)| **t >= w.start && **t < w.end + 1.0)
            .map(|(t, s)| TimedSkeleton { timestamp: *t, skeleton: *s })
            .collect();
        let trajectory = build_trajectory(&frames);
        println!(
            "trajectory after the first \"tell\": {} right-hand points, {} left-hand points",
            trajectory.right_hand.points().count(),
            trajectory.left_hand.points().count()
        );
    }
    Ok(())
}
