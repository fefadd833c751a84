//! Anthropomorphic features for online signature verification.
//!
//! A pen trajectory is fed through a six-joint virtual arm: inverse
//! kinematics turns each pen pose into joint angles, forward kinematics gives
//! elbow, wrist and finger positions. Those sequences feed a DTW verifier and a
//! histogram/Manhattan verifier, with feature- and score-level fusion, and an
//! evaluation harness reports FAR/FRR/EER.

pub mod evaluation;
pub mod features;
pub mod io;
pub mod kinematics;
pub mod trajectory;
pub mod verifiers;

pub use evaluation::{
    compute_eer, roundtrip_validation, run_benchmark, snr, split_protocol, synthetic_corpus,
    BenchmarkConfig, Dataset, EerReport, EvalError, FusionMode, GeometryMode, VerifierKind,
};
pub use features::{
    build_feature_matrix, extract_features, AnthroSequence, ExtractionConfig, FeatureError,
    FeatureKind, FeatureMatrix,
};
pub use io::{load_dataset, DatasetFormat, IoError, RunConfig};
pub use kinematics::{
    forward_positions, inverse_kinematics, pen_pose_matrix, ArmGeometry, JointAngles,
    KinematicsError, Transform4,
};
pub use trajectory::{Label, PenSample, SignatureTrajectory};
pub use verifiers::{HistogramVector, Score, Template, VerifierError};
