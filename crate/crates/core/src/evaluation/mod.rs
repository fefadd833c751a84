//! Evaluation protocol: enrolment splits, EER, reconstruction SNR and the
//! end-to-end benchmark.

mod benchmark;
mod dataset;
mod eer;
mod snr;
mod synthetic;
mod validation;

use thiserror::Error;

use crate::features::FeatureError;
use crate::verifiers::VerifierError;

pub use benchmark::{
    roc_csv, run_benchmark, BenchmarkConfig, EerEntry, EerReport, FusionMode, GeometryMode,
    ScoreCounts, SignerScores, TrialScores, VerifierKind,
};
pub use dataset::{
    split_protocol, Dataset, DatasetMeta, SigRef, SignerData, SignerSplit, ENROLL_COUNT,
};
pub use eer::{compute_eer, eer_from_roc, roc_points, RocPoint};
pub use snr::{resample_arc_length, snr, SNR_CAP_DB};
pub use synthetic::{
    synthetic_corpus, FORGERY_AMPLITUDE, JITTER_MM, SAMPLE_PERIOD_MS, SYNTHETIC_FORGERIES,
    SYNTHETIC_GENUINE, SYNTHETIC_SEED, SYNTHETIC_SIGNERS,
};
pub use validation::{roundtrip_snr, roundtrip_validation, snr_csv, SnrRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("signer {signer_id} has {count} genuine signatures, need at least {needed}")]
    InsufficientGenuine {
        signer_id: String,
        count: usize,
        needed: usize,
    },
    #[error("score list is empty")]
    EmptyScores,
    #[error("score list contains NaN")]
    NanScore,
    #[error("signer {signer_id}, signature {signature_id}: {source}")]
    Extraction {
        signer_id: String,
        signature_id: String,
        #[source]
        source: FeatureError,
    },
    #[error("signer {signer_id}, signature {signature_id}: {source}")]
    Verification {
        signer_id: String,
        signature_id: String,
        #[source]
        source: VerifierError,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Per-signer seed: FNV-1a over the global seed's bytes and the signer id,
/// so streams do not depend on iteration order.
pub fn signer_seed(global: u64, signer_id: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    global
        .to_le_bytes()
        .iter()
        .chain(signer_id.as_bytes())
        .fold(OFFSET, |h, b| (h ^ *b as u64).wrapping_mul(PRIME))
}
