//! Frames to evaluate and the sweeps that aggregate over them.

mod annotations;
mod stats;
mod sweep;
mod synth;

pub use annotations::{
    load_annotations, parse_annotations, AnnotatedFrame, AnnotationSet, LineError,
};
pub use stats::Summary;
pub use sweep::{
    run_sweep, AggregateReport, AggregateRow, ConfigResult, FrameResult, ProfileEntry, RoiModel,
    SweepSpec,
};
pub use synth::{synth_scene, tile_boxes};
