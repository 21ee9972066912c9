//! Limit-set samples, neighbourhood volumes, box dimension, and the
//! ball-volume and containment diagnostics along the orbit.

mod diagnostics;
mod image;
mod sample;
mod volume;

pub use diagnostics::{
    ball_mesh, euclidean_ball, hyperbolic_ball_volume, lemma_one_check, volume_ratio_report,
    EuclideanBall, LemmaOneReport, LemmaShell, VolumeRatioReport, VolumeRecord, MESH_POINTS,
};
pub use image::{render_pgm, MAX_IMAGE_SCALE};
pub use sample::{sample_deep_orbit, sample_limit_set, LimitSample, SampleSource, SAMPLE_DEDUP};
pub use volume::{
    box_dimension_estimate, grid_volume, neighborhood_volume, BoxDimensionEstimate,
    DyadicScaleRecord, MAX_SCALE, MIN_SCALE,
};
