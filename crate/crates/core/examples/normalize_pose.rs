//! Map one frame into the gesture space and classify its wrists by region.

use gesturelens::gesture::{
    classify_region, estimate_height, normalize_skeleton, GestureSpaceConfig, LEFT_WRIST, RIGHT_WRIST,
};
use gesturelens::ingest::{Keypoint, PoseFrame, BODY_KEYPOINTS};

fn main() -> gesturelens::Result<()> {
    let mut keypoints = [Keypoint::UNDETECTED; BODY_KEYPOINTS];
    let mut set = |i: usize, x: f64, y: f64| keypoints[i] = Keypoint::new(x, y, 0.9);
    set(0, 640.0, 100.0); // nose
    set(1, 640.0, 160.0);
    set(2, 580.0, 165.0);
    set(5, 700.0, 165.0);
    set(4, 600.0, 260.0); // right wrist near the chest
    set(7, 900.0, 180.0); // left wrist far out
    set(8, 640.0, 300.0); // mid-hip, no ankles in view
    let frame = PoseFrame { frame_index: 0, timestamp: 0.0, keypoints };

    let height = estimate_height(&frame, Some(720.0))?;
    println!("height from the trunk rule: {height}px");

    let (skeleton, clamped) = normalize_skeleton(&frame, height)?;
    println!("clamped coordinates: {clamped}");
    let space = GestureSpaceConfig::default();
    for (name, k) in [("right wrist", RIGHT_WRIST), ("left wrist", LEFT_WRIST)] {
        let (x, y) = skeleton.point(k).expect("wrist detected");
        println!("{name}: ({x:+.3}, {y:+.3}) in {:?}", classify_region(x, y, &space));
    }
    Ok(())
}
