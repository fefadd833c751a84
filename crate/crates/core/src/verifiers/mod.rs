//! DTW and histogram/Manhattan verifiers with feature- and score-level
//! fusion.

mod dtw;
mod histogram;
mod scoring;

use thiserror::Error;

pub use dtw::{dtw_align, dtw_distance, Alignment};
pub use histogram::{
    angle_histograms, bin_index, plane_basis, position_histograms, BinKind, HistogramVector,
    Segment, ANGULAR_BINS, DELTA2_BINS, DELTA_BINS, MIN_ANGLE_SAMPLES, PAIR_BINS, RADIAL_BINS,
    RANGE_SIGMAS,
};
pub use scoring::{
    dtw_template, dtw_verify, fuse_histograms, fuse_matrices, fuse_scores, gated_manhattan,
    manhattan_score, manhattan_template, tanh_normalize, NormStats, Score, Template,
    ABSOLUTE_EPSILON, MIN_REFERENCES, RELATIVE_EPSILON, STAT_FLOOR,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("channel counts differ ({left} vs {right})")]
    ChannelMismatch { left: usize, right: usize },
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("template has no references")]
    EmptyTemplate,
    #[error("template needs at least {min} references, got {got}")]
    TooFewReferences { got: usize, min: usize },
    #[error("histogram layouts differ")]
    LayoutMismatch,
    #[error("{joint} path collapses to a single point")]
    Degenerate { joint: String },
    #[error("sequence of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
}
