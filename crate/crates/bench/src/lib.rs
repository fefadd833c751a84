//! Inputs shared by the criterion benchmarks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vsa_core::evaluation::{synthetic_corpus, Dataset, SYNTHETIC_SEED};
use vsa_core::features::{build_feature_matrix, extract_features, FeatureKind, FeatureMatrix};
use vsa_core::kinematics::{forward_positions, in_solution_branch, ArmGeometry, JointAngles};
use vsa_core::{ExtractionConfig, SignatureTrajectory};

/// `n` postures on the branch returned by inverse kinematics, wrist away
/// from the singular configuration.
pub fn reachable_postures(n: usize, seed: u64, g: &ArmGeometry) -> Vec<JointAngles> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bias = g.forearm.atan2(g.elbow_offset);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let flex = rng.random_range(0.1 * PI + 0.05..PI - 0.05);
        let q = JointAngles::new(
            rng.random_range(-PI + 1e-3..PI - 1e-3),
            rng.random_range(0.3..PI - 0.3),
            -bias - flex,
            rng.random_range(-PI + 1e-3..PI - 1e-3),
            rng.random_range(0.01..PI - 0.01),
            rng.random_range(-PI + 1e-3..PI - 1e-3),
        );
        let mut planar = q;
        planar[0] = 0.0;
        if in_solution_branch(&q, g) && forward_positions(&planar, g).wrist().x > 1.0 {
            out.push(q);
        }
    }
    out
}

pub fn corpus() -> Dataset {
    synthetic_corpus(SYNTHETIC_SEED)
}

/// First genuine signature of the first signer.
pub fn sample_signature(ds: &Dataset) -> &SignatureTrajectory {
    &ds.signers[0].genuine[0]
}

/// Feature matrices of two signatures of the first signer.
pub fn matrix_pair(ds: &Dataset, kind: FeatureKind) -> (FeatureMatrix, FeatureMatrix) {
    let g = ArmGeometry::calibrated();
    let cfg = ExtractionConfig::default();
    let m = |t: &SignatureTrajectory| {
        build_feature_matrix(&extract_features(t, &g, &cfg).expect("extracts"), kind)
            .expect("builds")
    };
    (m(&ds.signers[0].genuine[0]), m(&ds.signers[0].genuine[1]))
}
