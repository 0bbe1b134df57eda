//! Closed, open and others on hand-built skeletons, plus per-word scores.

use gesturelens::gesture::{
    classify_gesture_type, normalize_scores, spatial_variation_raw, temporal_change_raw, NormalizedSkeleton,
    TypingParams, LEFT_SHOULDER, LEFT_WRIST, NOSE, RIGHT_SHOULDER, RIGHT_WRIST, UPPER_BODY,
};
use gesturelens::ingest::Keypoint;

fn pose(right: (f64, f64), left: (f64, f64)) -> NormalizedSkeleton {
    let mut k = [Keypoint::UNDETECTED; UPPER_BODY];
    k[NOSE] = Keypoint::new(0.0, 0.0, 1.0);
    k[RIGHT_SHOULDER] = Keypoint::new(-0.15, -0.15, 1.0);
    k[LEFT_SHOULDER] = Keypoint::new(0.15, -0.15, 1.0);
    k[RIGHT_WRIST] = Keypoint::new(right.0, right.1, 1.0);
    k[LEFT_WRIST] = Keypoint::new(left.0, left.1, 1.0);
    NormalizedSkeleton::new(k)
}

fn main() -> gesturelens::Result<()> {
    let params = TypingParams::default();
    let cases = [
        ("hands together", pose((-0.05, -0.2), (0.05, -0.2))),
        ("arms spread", pose((-0.6, 0.1), (0.6, 0.1))),
        ("one hand out", pose((-0.1, -0.2), (0.25, -0.2))),
    ];
    for (name, s) in &cases {
        println!("{name:>14}: {:?}", classify_gesture_type(&[*s], &params)?);
    }

    let a = pose((-0.05, -0.2), (0.05, -0.2));
    let b = pose((-0.05, 0.0), (0.05, 0.0));
    println!("variation of a two-frame word: {:.3}", spatial_variation_raw(&[a, b])?);
    println!("change between the frames: {:.3}", temporal_change_raw(&a, &b)?);
    println!("normalized [2, 4, 6]: {:?}", normalize_scores(&[2.0, 4.0, 6.0]));
    Ok(())
}
