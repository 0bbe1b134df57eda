//! Two families of synthetic gestures separated by average-linkage
//! clustering on their DTW matrix.

use gesturelens::gesture::{GestureSegment, TypingParams, VariationAggregate};
use gesturelens::similarity::{cluster, distance_matrix, Cut};
use gesturelens::synth::family_ramp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gesturelens::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut segments = Vec::new();
    for id in 0..10 {
        let hands_up = id % 2 == 0;
        let frames = 12 + id * 2;
        let skels = family_ramp(hands_up, frames, 0.01, &mut rng);
        segments.push(GestureSegment::build(
            id,
            None,
            id..id + 1,
            0..frames,
            skels,
            &TypingParams::default(),
            VariationAggregate::Mean,
        )?);
    }
    let outcome = distance_matrix(&segments);
    let clusters = cluster(&outcome.matrix, Cut::Count(2))?;
    for (id, label) in clusters.ids.iter().zip(&clusters.labels) {
        let family = if id % 2 == 0 { "hands up" } else { "hands apart" };
        println!("segment {id} ({family:<11}) type {:?} -> cluster {label}", segments[*id].gesture_type);
    }
    let loose = cluster(&outcome.matrix, Cut::Threshold(0.5))?;
    println!("threshold 0.5 leaves {} clusters", loose.cluster_count());
    Ok(())
}
