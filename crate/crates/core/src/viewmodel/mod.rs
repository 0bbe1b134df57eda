//! Renderable view models: the gesture-space heatmap, hand timelines and
//! trajectories, the annotated transcript, 2D projections and the
//! phrase–gesture relation graph.

mod annotate;
mod heatmap;
mod projection;
mod relation;
mod timeline;

pub use annotate::{annotate_transcript, search_keyword, Thresholds, TranscriptAnnotation};
pub use heatmap::{build_heatmap, HeatmapGrid};
pub use projection::{project_2d, ProjectionInput, TsneParams};
pub use relation::{
    build_glyph, build_relation_graph, resample, GestureNode, GlyphModel, Link, PhraseNode,
    RelationGraph,
};
pub use timeline::{
    build_timelines, build_trajectory, HandTrajectory, TimedSkeleton, TimelineAxis,
    TimelineSeries, Trajectory, TrajectoryStep,
};

/// A point in the projected 2D plane.
pub type Point2 = [f64; 2];
