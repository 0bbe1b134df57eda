use serde::{Deserialize, Serialize};

use crate::gesture::{NormalizedSkeleton, LEFT_WRIST, RIGHT_WRIST};

/// A frame's timestamp with its skeleton, if one could be normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedSkeleton {
    pub timestamp: f64,
    pub skeleton: Option<NormalizedSkeleton>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimelineAxis {
    VerticalPosition,
    HorizontalPosition,
}

/// Per-frame wrist coordinate along one axis; `None` marks a gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineSeries {
    pub axis: TimelineAxis,
    pub right_hand: Vec<(f64, Option<f64>)>,
    pub left_hand: Vec<(f64, Option<f64>)>,
}

fn wrist(frame: &TimedSkeleton, index: usize) -> Option<(f64, f64)> {
    frame.skeleton.as_ref().and_then(|s| s.point(index))
}

/// Vertical (wrist y) and horizontal (wrist x) series over time.
pub fn build_timelines(frames: &[TimedSkeleton]) -> (TimelineSeries, TimelineSeries) {
    let series = |axis: TimelineAxis, pick: fn((f64, f64)) -> f64| TimelineSeries {
        axis,
        right_hand: frames
            .iter()
            .map(|f| (f.timestamp, wrist(f, RIGHT_WRIST).map(pick)))
            .collect(),
        left_hand: frames
            .iter()
            .map(|f| (f.timestamp, wrist(f, LEFT_WRIST).map(pick)))
            .collect(),
    };
    (
        series(TimelineAxis::VerticalPosition, |p| p.1),
        series(TimelineAxis::HorizontalPosition, |p| p.0),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStep {
    Point { t: f64, x: f64, y: f64 },
    /// A run of frames without a detection for this hand.
    Gap { start: f64, frames: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HandTrajectory {
    pub steps: Vec<TrajectoryStep>,
}

impl HandTrajectory {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.steps.iter().filter_map(|s| match *s {
            TrajectoryStep::Point { t, x, y } => Some((t, x, y)),
            TrajectoryStep::Gap { .. } => None,
        })
    }

    pub fn gap_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TrajectoryStep::Gap { .. }))
            .count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub right_hand: HandTrajectory,
    pub left_hand: HandTrajectory,
}

fn hand_path(frames: &[TimedSkeleton], index: usize) -> HandTrajectory {
    let mut steps = Vec::new();
    for f in frames {
        match (wrist(f, index), steps.last_mut()) {
            (Some((x, y)), _) => steps.push(TrajectoryStep::Point {
                t: f.timestamp,
                x,
                y,
            }),
            (None, Some(TrajectoryStep::Gap { frames, .. })) => *frames += 1,
            (None, _) => steps.push(TrajectoryStep::Gap {
                start: f.timestamp,
                frames: 1,
            }),
        }
    }
    HandTrajectory { steps }
}

/// Wrist paths over a frame range, with consecutive missing detections
/// collapsed into one gap marker.
pub fn build_trajectory(frames: &[TimedSkeleton]) -> Trajectory {
    Trajectory {
        right_hand: hand_path(frames, RIGHT_WRIST),
        left_hand: hand_path(frames, LEFT_WRIST),
    }
}
