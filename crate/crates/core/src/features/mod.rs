//! Pen trajectories to anthropomorphic feature sequences and matrices.

mod config;
mod extract;
mod matrix;
mod preprocess;
mod realistic;

use thiserror::Error;

use crate::kinematics::KinematicsError;

pub use config::{
    ExtractionConfig, ParseEnumError, PenAngleMode, PenUpMode, Scale, PEN_UP_HEIGHT, PEN_UP_Q6_BUMP,
};
pub use extract::{extract_anthro, extract_features, unwrap_near, AnthroSequence};
pub use matrix::{
    build_feature_matrix, difference, zscore, FeatureKind, FeatureMatrix, MIN_SEQUENCE_LEN,
};
pub use preprocess::{
    anchor_to_workspace, apply_penup_lift, apply_scale, moving_average, preprocess,
    resolve_pen_angles, rotate_trajectory, SMOOTHING_SPAN,
};
pub use realistic::{
    humerus_distribution, radius_distribution, sample_realistic_geometry, Gender, SampledGeometry,
    REALISTIC_ELBOW_OFFSET,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("pen angles requested but the device recorded none")]
    MissingAngles,
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error("sequence of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("sample {index}: {source}")]
    Kinematics {
        index: usize,
        #[source]
        source: KinematicsError,
    },
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}
