//! Gesture space: keypoint normalization, region membership, gesture typing
//! and the per-word / per-segment descriptors built on top of them.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Keypoint, PoseFrame};
use crate::similarity::{frame_distance, frame_distance_sym};

/// Upper-body keypoints kept after normalization (indices 0..=8).
pub const UPPER_BODY: usize = 9;

pub const NOSE: usize = 0;
pub const NECK: usize = 1;
pub const RIGHT_SHOULDER: usize = 2;
pub const RIGHT_ELBOW: usize = 3;
pub const RIGHT_WRIST: usize = 4;
pub const LEFT_SHOULDER: usize = 5;
pub const LEFT_ELBOW: usize = 6;
pub const LEFT_WRIST: usize = 7;
pub const MID_HIP: usize = 8;
pub const RIGHT_ANKLE: usize = 11;
pub const LEFT_ANKLE: usize = 14;

/// Multiplier from the nose-to-mid-hip distance to a full body height.
const TRUNK_TO_HEIGHT: f64 = 2.2;

/// Upper-body pose in height-normalized units, origin at keypoint 0, y up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSkeleton {
    pub keypoints: [Keypoint; UPPER_BODY],
    /// Height used for normalization, in pixels.
    pub height: f64,
}

impl NormalizedSkeleton {
    pub fn new(keypoints: [Keypoint; UPPER_BODY]) -> Self {
        NormalizedSkeleton {
            keypoints,
            height: 1.0,
        }
    }

    /// Coordinates of a keypoint if it was detected.
    pub fn point(&self, index: usize) -> Option<(f64, f64)> {
        let k = self.keypoints[index];
        k.detected().then_some((k.x, k.y))
    }

    pub fn total_confidence(&self) -> f64 {
        self.keypoints.iter().map(|k| k.confidence).sum()
    }

    /// Left-right mirror image: swaps the arm chains and negates x.
    pub fn mirrored(&self) -> Self {
        let mut out = *self;
        for (a, b) in [(2, 5), (3, 6), (4, 7)] {
            out.keypoints.swap(a, b);
        }
        for k in out.keypoints.iter_mut().filter(|k| k.detected()) {
            k.x = -k.x;
        }
        out
    }
}

/// Estimate the speaker's height in pixels.
///
/// Uses the vertical span from keypoint 0 to the mean detected ankle, else
/// 2.2 times the distance from keypoint 0 to the mid-hip, else the video
/// frame height.
pub fn estimate_height(frame: &PoseFrame, frame_height: Option<f64>) -> Result<f64> {
    let origin = frame.keypoint(NOSE);
    if !origin.detected() {
        return Err(Error::Normalization(format!(
            "keypoint 0 undetected in frame {}",
            frame.frame_index
        )));
    }
    let ankles: Vec<f64> = [RIGHT_ANKLE, LEFT_ANKLE]
        .iter()
        .map(|&i| frame.keypoint(i))
        .filter(|k| k.detected())
        .map(|k| k.y)
        .collect();
    if !ankles.is_empty() {
        let mean = ankles.iter().sum::<f64>() / ankles.len() as f64;
        let span = (mean - origin.y).abs();
        if span > 0.0 {
            return Ok(span);
        }
    }
    let hip = frame.keypoint(MID_HIP);
    if hip.detected() {
        let span = TRUNK_TO_HEIGHT * (hip.y - origin.y).abs();
        if span > 0.0 {
            return Ok(span);
        }
    }
    match frame_height {
        Some(h) if h > 0.0 => Ok(h),
        _ => Err(Error::Normalization(format!(
            "no trunk keypoints and no frame height for frame {}",
            frame.frame_index
        ))),
    }
}

/// Map the upper-body keypoints of `frame` into the gesture space.
///
/// Returns the skeleton together with the number of coordinates that had to
/// be clamped into `[-1, 1]`.
pub fn normalize_skeleton(frame: &PoseFrame, height: f64) -> Result<(NormalizedSkeleton, usize)> {
    if !(height.is_finite() && height > 0.0) {
        return Err(Error::Normalization(format!("invalid height {height}")));
    }
    let origin = *frame.keypoint(NOSE);
    if !origin.detected() {
        return Err(Error::Normalization(format!(
            "keypoint 0 undetected in frame {}",
            frame.frame_index
        )));
    }
    let mut clamped = 0;
    let mut clamp = |v: f64| {
        if v.abs() > 1.0 {
            clamped += 1;
            v.clamp(-1.0, 1.0)
        } else {
            v
        }
    };
    let mut keypoints = [Keypoint::UNDETECTED; UPPER_BODY];
    for (out, kp) in keypoints.iter_mut().zip(&frame.keypoints[..UPPER_BODY]) {
        if kp.detected() {
            *out = Keypoint::new(
                clamp((kp.x - origin.x) / height),
                clamp((origin.y - kp.y) / height),
                kp.confidence,
            );
        }
    }
    Ok((NormalizedSkeleton { keypoints, height }, clamped))
}

/// Axis-aligned rectangle in normalized units, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    fn strictly_inside(&self, outer: &Rect) -> bool {
        self.x_min > outer.x_min
            && self.x_max < outer.x_max
            && self.y_min > outer.y_min
            && self.y_max < outer.y_max
    }
}

/// The three nested gesture-space rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regions {
    pub center_center: Rect,
    pub center: Rect,
    pub periphery: Rect,
}

impl Default for Regions {
    fn default() -> Self {
        Regions {
            center_center: Rect::new(-0.18, 0.18, -0.25, 0.10),
            center: Rect::new(-0.40, 0.40, -0.45, 0.22),
            periphery: Rect::new(-0.75, 0.75, -0.80, 0.45),
        }
    }
}

impl Regions {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.center_center, self.center, self.periphery]
            .iter()
            .all(|r| r.x_min < r.x_max && r.y_min < r.y_max);
        if !ok {
            return Err(Error::Config("region rectangles must have positive extent".into()));
        }
        if !(self.center_center.strictly_inside(&self.center)
            && self.center.strictly_inside(&self.periphery))
        {
            return Err(Error::Config(
                "regions must nest strictly: center-center inside center inside periphery".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureSpaceConfig {
    pub regions: Regions,
    pub grid_resolution: usize,
}

impl Default for GestureSpaceConfig {
    fn default() -> Self {
        GestureSpaceConfig {
            regions: Regions::default(),
            grid_resolution: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    CenterCenter,
    Center,
    Periphery,
    Outside,
}

/// Innermost region containing the point.
pub fn classify_region(x: f64, y: f64, config: &GestureSpaceConfig) -> Region {
    let r = &config.regions;
    if r.center_center.contains(x, y) {
        Region::CenterCenter
    } else if r.center.contains(x, y) {
        Region::Center
    } else if r.periphery.contains(x, y) {
        Region::Periphery
    } else {
        Region::Outside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureType {
    Closed,
    Open,
    Others,
}

/// Thresholds of the closed/open rule, as multiples of the shoulder span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypingParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for TypingParams {
    fn default() -> Self {
        TypingParams {
            alpha: 0.8,
            beta: 1.6,
        }
    }
}

/// Classify a segment as closed, open or others from its average skeleton.
///
/// Closed: inter-wrist distance below `alpha` shoulder spans with both wrists
/// inside the shoulders' x-span. Open: inter-wrist distance above `beta`
/// shoulder spans with each wrist the outermost keypoint on its side.
pub fn classify_gesture_type(
    skeletons: &[NormalizedSkeleton],
    params: &TypingParams,
) -> Result<GestureType> {
    if !skeletons
        .iter()
        .any(|s| s.keypoints[RIGHT_WRIST].detected() && s.keypoints[LEFT_WRIST].detected())
    {
        return Err(Error::Typing(
            "no frame has both wrists detected".into(),
        ));
    }
    let avg = average_skeleton(skeletons)?;
    Ok(type_of_average(&avg, params))
}

fn type_of_average(avg: &NormalizedSkeleton, params: &TypingParams) -> GestureType {
    let (Some(rw), Some(lw)) = (avg.point(RIGHT_WRIST), avg.point(LEFT_WRIST)) else {
        return GestureType::Others;
    };
    let (Some(rs), Some(ls)) = (avg.point(RIGHT_SHOULDER), avg.point(LEFT_SHOULDER)) else {
        return GestureType::Others;
    };
    let span = (rs.0 - ls.0).abs();
    if span == 0.0 {
        return GestureType::Others;
    }
    let wrist_gap = (rw.0 - lw.0).hypot(rw.1 - lw.1);
    let (torso_lo, torso_hi) = (rs.0.min(ls.0), rs.0.max(ls.0));
    let inside = |x: f64| (torso_lo..=torso_hi).contains(&x);

    if wrist_gap < params.alpha * span && inside(rw.0) && inside(lw.0) {
        return GestureType::Closed;
    }

    // +1 when the right side of the body points toward +x.
    let right_dir = (rs.0 - ls.0).signum();
    let outermost = |wrist: usize, dir: f64| {
        let wx = avg.keypoints[wrist].x * dir;
        avg.keypoints
            .iter()
            .enumerate()
            .filter(|(k, kp)| *k != wrist && kp.detected())
            .all(|(_, kp)| wx > kp.x * dir)
    };
    if wrist_gap > params.beta * span
        && outermost(RIGHT_WRIST, right_dir)
        && outermost(LEFT_WRIST, -right_dir)
    {
        return GestureType::Open;
    }
    GestureType::Others
}

/// Confidence-weighted mean skeleton. Output confidence is the mean
/// confidence; keypoints never detected keep confidence zero.
pub fn average_skeleton(skeletons: &[NormalizedSkeleton]) -> Result<NormalizedSkeleton> {
    if skeletons.is_empty() {
        return Err(Error::EmptySegment("cannot average zero skeletons".into()));
    }
    let n = skeletons.len() as f64;
    let mut keypoints = [Keypoint::UNDETECTED; UPPER_BODY];
    for (k, out) in keypoints.iter_mut().enumerate() {
        let weight: f64 = skeletons.iter().map(|s| s.keypoints[k].confidence).sum();
        if weight <= 0.0 {
            continue;
        }
        // Offsets from the first detection keep identical inputs exact.
        let mut detected = skeletons.iter().map(|s| s.keypoints[k]).filter(Keypoint::detected);
        let anchor = detected.next().expect("positive weight implies a detection");
        let (mut dx, mut dy) = (0.0, 0.0);
        for kp in detected {
            let w = kp.confidence / weight;
            dx += w * (kp.x - anchor.x);
            dy += w * (kp.y - anchor.y);
        }
        *out = Keypoint::new(anchor.x + dx, anchor.y + dy, weight / n);
    }
    let height = skeletons.iter().map(|s| s.height).sum::<f64>() / n;
    Ok(NormalizedSkeleton { keypoints, height })
}

/// How per-frame deviations are aggregated into one spatial variation score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationAggregate {
    #[default]
    Mean,
    Max,
    Sum,
}

impl VariationAggregate {
    fn apply(self, values: &[f64]) -> f64 {
        match self {
            VariationAggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            VariationAggregate::Max => values.iter().copied().fold(0.0, f64::max),
            VariationAggregate::Sum => values.iter().sum(),
        }
    }
}

/// Per-frame distance of each skeleton from `average`.
pub fn variation_profile(
    skeletons: &[NormalizedSkeleton],
    average: &NormalizedSkeleton,
) -> Result<Vec<f64>> {
    skeletons
        .iter()
        .map(|s| frame_distance(s, average))
        .collect()
}

/// Mean deviation of the skeletons from their average skeleton.
pub fn spatial_variation_raw(skeletons: &[NormalizedSkeleton]) -> Result<f64> {
    spatial_variation_with(skeletons, VariationAggregate::Mean)
}

pub fn spatial_variation_with(
    skeletons: &[NormalizedSkeleton],
    aggregate: VariationAggregate,
) -> Result<f64> {
    let avg = average_skeleton(skeletons)?;
    let profile = variation_profile(skeletons, &avg)?;
    Ok(aggregate.apply(&profile))
}

/// Change between two consecutive words' average skeletons.
pub fn temporal_change_raw(a: &NormalizedSkeleton, b: &NormalizedSkeleton) -> Result<f64> {
    frame_distance_sym(a, b)
}

/// Min-max normalization to `[0, 1]`; a constant sequence maps to zeros.
pub fn normalize_scores(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    raw.iter()
        .map(|&v| {
            if range > 0.0 {
                ((v - lo) / range).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Gesture descriptors of one transcript word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordMetrics {
    pub word_index: usize,
    pub spatial_variation_raw: f64,
    pub temporal_change_raw: f64,
    pub spatial_variation: f64,
    pub temporal_change: f64,
    pub average: NormalizedSkeleton,
}

/// Compute per-word metrics.
///
/// `skeletons` is indexed by frame position (`None` where normalization
/// failed) and `word_frames` holds each word's frame range. Words without any
/// skeleton produce no metrics; temporal change is measured against the
/// previous word that has metrics, and is zero for the first one.
pub fn word_metrics(
    skeletons: &[Option<NormalizedSkeleton>],
    word_frames: &[Range<usize>],
    aggregate: VariationAggregate,
) -> Result<Vec<WordMetrics>> {
    let mut out: Vec<WordMetrics> = Vec::new();
    for (word_index, range) in word_frames.iter().enumerate() {
        let frames: Vec<NormalizedSkeleton> =
            skeletons[range.clone()].iter().flatten().copied().collect();
        if frames.is_empty() {
            continue;
        }
        let average = average_skeleton(&frames)?;
        let spatial = aggregate.apply(&variation_profile(&frames, &average)?);
        let change = match out.last() {
            Some(prev) => temporal_change_raw(&prev.average, &average)?,
            None => 0.0,
        };
        out.push(WordMetrics {
            word_index,
            spatial_variation_raw: spatial,
            temporal_change_raw: change,
            spatial_variation: 0.0,
            temporal_change: 0.0,
            average,
        });
    }
    if !out.is_empty() {
        let spatial = normalize_scores(&out.iter().map(|m| m.spatial_variation_raw).collect::<Vec<_>>());
        let change = normalize_scores(&out.iter().map(|m| m.temporal_change_raw).collect::<Vec<_>>());
        for ((m, s), c) in out.iter_mut().zip(spatial).zip(change) {
            m.spatial_variation = s;
            m.temporal_change = c;
        }
    }
    Ok(out)
}

/// A phrase-aligned run of skeletons with its descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureSegment {
    pub id: usize,
    pub phrase_ref: Option<usize>,
    pub word_range: Range<usize>,
    pub frame_range: Range<usize>,
    #[serde(skip)]
    pub skeletons: Vec<NormalizedSkeleton>,
    pub gesture_type: GestureType,
    pub average: NormalizedSkeleton,
    pub variation_profile: Vec<f64>,
    pub spatial_variation: f64,
}

impl GestureSegment {
    /// Build a segment from the skeletons of its frames.
    pub fn build(
        id: usize,
        phrase_ref: Option<usize>,
        word_range: Range<usize>,
        frame_range: Range<usize>,
        skeletons: Vec<NormalizedSkeleton>,
        params: &TypingParams,
        aggregate: VariationAggregate,
    ) -> Result<Self> {
        if frame_range.is_empty() || skeletons.is_empty() {
            return Err(Error::EmptySegment(format!(
                "segment {id} has no usable frames"
            )));
        }
        let gesture_type = classify_gesture_type(&skeletons, params)?;
        let average = average_skeleton(&skeletons)?;
        let variation_profile = variation_profile(&skeletons, &average)?;
        let spatial_variation = aggregate.apply(&variation_profile);
        Ok(GestureSegment {
            id,
            phrase_ref,
            word_range,
            frame_range,
            skeletons,
            gesture_type,
            average,
            variation_profile,
            spatial_variation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BODY_KEYPOINTS;
    use approx::assert_abs_diff_eq;

    fn frame_with(points: &[(usize, f64, f64)]) -> PoseFrame {
        let mut keypoints = [Keypoint::UNDETECTED; BODY_KEYPOINTS];
        for &(k, x, y) in points {
            keypoints[k] = Keypoint::new(x, y, 1.0);
        }
        PoseFrame {
            frame_index: 0,
            timestamp: 0.0,
            keypoints,
        }
    }

    pub(crate) fn skeleton(points: &[(usize, f64, f64)]) -> NormalizedSkeleton {
        let mut keypoints = [Keypoint::UNDETECTED; UPPER_BODY];
        for &(k, x, y) in points {
            keypoints[k] = Keypoint::new(x, y, 1.0);
        }
        NormalizedSkeleton::new(keypoints)
    }

    #[test]
    fn height_from_ankles() {
        let f = frame_with(&[(0, 50.0, 100.0), (11, 40.0, 500.0), (14, 60.0, 500.0)]);
        assert_eq!(estimate_height(&f, None).unwrap(), 400.0);
    }

    #[test]
    fn height_from_mid_hip() {
        let f = frame_with(&[(0, 50.0, 100.0), (8, 50.0, 300.0)]);
        assert_abs_diff_eq!(estimate_height(&f, None).unwrap(), 440.0, epsilon = 1e-9);
    }

    #[test]
    fn height_falls_back_to_frame() {
        let f = frame_with(&[(0, 50.0, 100.0), (4, 10.0, 10.0)]);
        assert_eq!(estimate_height(&f, Some(720.0)).unwrap(), 720.0);
        assert!(matches!(estimate_height(&f, None), Err(Error::Normalization(_))));
    }

    #[test]
    fn height_needs_keypoint_zero() {
        let f = frame_with(&[(8, 50.0, 300.0)]);
        assert!(matches!(estimate_height(&f, Some(720.0)), Err(Error::Normalization(_))));
    }

    #[test]
    fn origin_maps_to_zero_and_y_points_up() {
        let f = frame_with(&[(0, 320.0, 100.0), (4, 420.0, 300.0)]);
        let (s, clamped) = normalize_skeleton(&f, 400.0).unwrap();
        assert_eq!(clamped, 0);
        assert_eq!((s.keypoints[0].x, s.keypoints[0].y), (0.0, 0.0));
        assert_eq!((s.keypoints[4].x, s.keypoints[4].y), (0.25, -0.5));
        assert!(!s.keypoints[1].detected());
    }

    #[test]
    fn translation_does_not_change_output() {
        let f = frame_with(&[(0, 320.0, 100.0), (2, 280.0, 160.0), (7, 500.0, 90.0)]);
        let mut g = f.clone();
        for k in g.keypoints.iter_mut().filter(|k| k.detected()) {
            k.x += 100.0;
            k.y += 50.0;
        }
        let (a, _) = normalize_skeleton(&f, 400.0).unwrap();
        let (b, _) = normalize_skeleton(&g, 400.0).unwrap();
        for (p, q) in a.keypoints.iter().zip(&b.keypoints) {
            assert_abs_diff_eq!(p.x, q.x, epsilon = 1e-12);
            assert_abs_diff_eq!(p.y, q.y, epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_range_coordinates_are_clamped_and_counted() {
        let f = frame_with(&[(0, 0.0, 0.0), (4, 900.0, -50.0)]);
        let (s, clamped) = normalize_skeleton(&f, 400.0).unwrap();
        assert_eq!(clamped, 1);
        assert_eq!(s.keypoints[4].x, 1.0);
    }

    #[test]
    fn normalize_rejects_bad_inputs() {
        let f = frame_with(&[(4, 1.0, 1.0)]);
        assert!(matches!(normalize_skeleton(&f, 400.0), Err(Error::Normalization(_))));
        let g = frame_with(&[(0, 1.0, 1.0)]);
        assert!(matches!(normalize_skeleton(&g, 0.0), Err(Error::Normalization(_))));
    }

    #[test]
    fn regions() {
        let cfg = GestureSpaceConfig::default();
        assert_eq!(classify_region(0.0, 0.0, &cfg), Region::CenterCenter);
        assert_eq!(classify_region(0.40, 0.0, &cfg), Region::Center);
        assert_eq!(classify_region(0.3, 0.22, &cfg), Region::Center);
        assert_eq!(classify_region(0.6, 0.3, &cfg), Region::Periphery);
        assert_eq!(classify_region(0.99, -0.99, &cfg), Region::Outside);
    }

    #[test]
    fn default_regions_nest() {
        Regions::default().validate().unwrap();
        let mut bad = Regions::default();
        bad.center.x_max = 0.75;
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    fn torso(extra: &[(usize, f64, f64)]) -> NormalizedSkeleton {
        let mut pts = vec![(0, 0.0, 0.0), (1, 0.0, -0.1), (2, -0.15, -0.1), (5, 0.15, -0.1), (8, 0.0, -0.45)];
        pts.extend_from_slice(extra);
        skeleton(&pts)
    }

    #[test]
    fn closed_example() {
        let s = torso(&[(3, -0.12, -0.25), (6, 0.12, -0.25), (4, -0.05, -0.2), (7, 0.05, -0.2)]);
        assert_eq!(classify_gesture_type(&[s], &TypingParams::default()).unwrap(), GestureType::Closed);
    }

    #[test]
    fn open_example() {
        let s = torso(&[(3, -0.35, 0.0), (6, 0.35, 0.0), (4, -0.6, 0.1), (7, 0.6, 0.1)]);
        assert_eq!(classify_gesture_type(&[s], &TypingParams::default()).unwrap(), GestureType::Open);
    }

    #[test]
    fn others_example() {
        // d = 0.35: above 0.8 * 0.3 but below 1.6 * 0.3; left wrist just outside the torso.
        let s = torso(&[(3, -0.15, -0.3), (6, 0.2, -0.3), (4, -0.1, -0.3), (7, 0.25, -0.3)]);
        assert_eq!(classify_gesture_type(&[s], &TypingParams::default()).unwrap(), GestureType::Others);
    }

    #[test]
    fn typing_requires_wrists() {
        let s = torso(&[(4, -0.1, -0.3)]);
        assert!(matches!(
            classify_gesture_type(&[s], &TypingParams::default()),
            Err(Error::Typing(_))
        ));
    }

    #[test]
    fn average_examples() {
        let a = torso(&[(4, 0.2, 0.0)]);
        assert_eq!(average_skeleton(&[a]).unwrap(), a);

        let b = torso(&[(4, 0.4, 0.0)]);
        let avg = average_skeleton(&[a, b]).unwrap();
        assert_abs_diff_eq!(avg.keypoints[4].x, 0.3, epsilon = 1e-15);
        assert_eq!(avg.keypoints[4].y, 0.0);

        let mut c = b;
        c.keypoints[4].confidence = 0.0;
        let avg = average_skeleton(&[a, c]).unwrap();
        assert_eq!(avg.keypoints[4].x, 0.2);
        assert_eq!(avg.keypoints[4].confidence, 0.5);
        assert!(!avg.keypoints[3].detected());

        assert!(matches!(average_skeleton(&[]), Err(Error::EmptySegment(_))));
    }

    #[test]
    fn spatial_variation_examples() {
        let a = torso(&[(4, 0.2, 0.0)]);
        assert_eq!(spatial_variation_raw(&[a, a, a]).unwrap(), 0.0);
        assert_eq!(spatial_variation_raw(&[a]).unwrap(), 0.0);

        let mut shifted = a;
        for k in shifted.keypoints.iter_mut().filter(|k| k.detected()) {
            k.y += 0.2;
        }
        assert_abs_diff_eq!(spatial_variation_raw(&[a, shifted]).unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(
            spatial_variation_with(&[a, shifted], VariationAggregate::Sum).unwrap(),
            0.2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn temporal_change_examples() {
        let a = torso(&[(4, 0.2, 0.0)]);
        assert_eq!(temporal_change_raw(&a, &a).unwrap(), 0.0);
        let mut b = a;
        for k in b.keypoints.iter_mut() {
            k.x += 0.3;
            k.y += 0.4;
        }
        assert_abs_diff_eq!(temporal_change_raw(&a, &b).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn score_normalization_examples() {
        assert_eq!(normalize_scores(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_scores(&[5.0, 5.0, 5.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(normalize_scores(&[0.0, 1.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn word_metrics_first_change_is_zero_and_gaps_skipped() {
        let a = torso(&[(4, 0.2, 0.0)]);
        let b = torso(&[(4, 0.5, 0.0)]);
        let skeletons = vec![Some(a), Some(a), None, Some(b), Some(b)];
        let metrics = word_metrics(&skeletons, &[0..2, 2..3, 3..5], VariationAggregate::Mean).unwrap();
        assert_eq!(metrics.len(), 2);
        assert_eq!(metrics[0].word_index, 0);
        assert_eq!(metrics[0].temporal_change_raw, 0.0);
        assert_eq!(metrics[1].word_index, 2);
        assert!(metrics[1].temporal_change_raw > 0.0);
        assert_eq!(metrics[1].temporal_change, 1.0);
    }

    #[test]
    fn empty_segment_rejected() {
        let err = GestureSegment::build(0, None, 0..1, 0..0, vec![], &TypingParams::default(), VariationAggregate::Mean)
            .unwrap_err();
        assert!(matches!(err, Error::EmptySegment(_)));
    }
}
