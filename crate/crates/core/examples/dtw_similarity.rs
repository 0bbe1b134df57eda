//! Frame distance, DTW between segments of different lengths, and the CSV
//! export of a distance matrix.

use gesturelens::gesture::{NormalizedSkeleton, UPPER_BODY};
use gesturelens::ingest::Keypoint;
use gesturelens::similarity::{dtw_distance, frame_distance, DistanceMatrix};

fn skeleton(dx: f64, dy: f64) -> NormalizedSkeleton {
    // Keypoint 0 is shifted too, so the whole figure moves.
    let mut k = [Keypoint::new(0.0, 0.0, 1.0); UPPER_BODY];
    for (i, kp) in k.iter_mut().enumerate() {
        kp.x = (i as f64 * 0.05 + dx).clamp(-1.0, 1.0);
        kp.y = (-(i as f64) * 0.04 + dy).clamp(-1.0, 1.0);
    }
    NormalizedSkeleton::new(k)
}

fn main() -> gesturelens::Result<()> {
    let f = skeleton(0.0, 0.0);
    let g = skeleton(0.3, 0.4);
    println!("uniform shift (0.3, 0.4): D = {:.6}", frame_distance(&f, &g)?);

    let slow: Vec<_> = (0..8).map(|i| skeleton(0.0, i as f64 * 0.02)).collect();
    let fast: Vec<_> = (0..4).map(|i| skeleton(0.0, i as f64 * 0.04)).collect();
    let doubled: Vec<_> = slow.iter().flat_map(|s| [*s, *s]).collect();
    println!("slow vs fast ramp: {:.5}", dtw_distance(&slow, &fast)?);
    println!("slow vs itself with every frame doubled: {:.5}", dtw_distance(&slow, &doubled)?);

    let d = dtw_distance(&slow, &fast)?;
    let m = DistanceMatrix::from_values(vec![10, 11], vec![vec![0.0, d], vec![d, 0.0]])?;
    m.write_csv(std::io::stdout())?;
    Ok(())
}
