use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::trajectory::SignatureTrajectory;

/// Enrolment size of the evaluation protocol.
pub const ENROLL_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub name: String,
    pub device: String,
    /// Units of the stored coordinates before conversion (`mm` or `lines`).
    pub units: String,
    /// Device resolution used to convert `lines` to millimetres.
    pub lines_per_mm: Option<f64>,
    pub sample_rate_hz: Option<f64>,
}

impl Default for DatasetMeta {
    fn default() -> Self {
        Self {
            name: String::new(),
            device: String::new(),
            units: "mm".into(),
            lines_per_mm: None,
            sample_rate_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerData {
    pub signer_id: String,
    /// Acquisition order.
    pub genuine: Vec<SignatureTrajectory>,
    pub forgeries: Vec<SignatureTrajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub signers: Vec<SignerData>,
}

impl Dataset {
    pub fn signature_count(&self) -> usize {
        self.signers
            .iter()
            .map(|s| s.genuine.len() + s.forgeries.len())
            .sum()
    }

    pub fn has_forgeries(&self) -> bool {
        self.signers.iter().any(|s| !s.forgeries.is_empty())
    }

    pub fn signatures(&self) -> impl Iterator<Item = &SignatureTrajectory> {
        self.signers
            .iter()
            .flat_map(|s| s.genuine.iter().chain(s.forgeries.iter()))
    }
}

/// Points at one signature: `(signer index, genuine?, index in that list)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SigRef {
    pub signer: usize,
    pub genuine: bool,
    pub index: usize,
}

impl SigRef {
    pub fn genuine(signer: usize, index: usize) -> Self {
        Self {
            signer,
            genuine: true,
            index,
        }
    }

    pub fn forgery(signer: usize, index: usize) -> Self {
        Self {
            signer,
            genuine: false,
            index,
        }
    }

    pub fn resolve<'a>(&self, ds: &'a Dataset) -> &'a SignatureTrajectory {
        let s = &ds.signers[self.signer];
        if self.genuine {
            &s.genuine[self.index]
        } else {
            &s.forgeries[self.index]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerSplit {
    pub signer: usize,
    pub signer_id: String,
    pub enroll: Vec<SigRef>,
    pub test_genuine: Vec<SigRef>,
    /// First genuine signature of every other signer.
    pub rf_impostors: Vec<SigRef>,
    pub sf_impostors: Vec<SigRef>,
}

/// First five genuine signatures enrol; the rest are genuine trials. Random
/// forgeries are the other signers' first signatures and skilled forgeries
/// are the signer's own forgery set.
pub fn split_protocol(ds: &Dataset) -> Result<Vec<SignerSplit>, EvalError> {
    ds.signers
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.genuine.len() <= ENROLL_COUNT {
                return Err(EvalError::InsufficientGenuine {
                    signer_id: s.signer_id.clone(),
                    count: s.genuine.len(),
                    needed: ENROLL_COUNT + 1,
                });
            }
            Ok(SignerSplit {
                signer: i,
                signer_id: s.signer_id.clone(),
                enroll: (0..ENROLL_COUNT).map(|k| SigRef::genuine(i, k)).collect(),
                test_genuine: (ENROLL_COUNT..s.genuine.len())
                    .map(|k| SigRef::genuine(i, k))
                    .collect(),
                rf_impostors: (0..ds.signers.len())
                    .filter(|j| *j != i && !ds.signers[*j].genuine.is_empty())
                    .map(|j| SigRef::genuine(j, 0))
                    .collect(),
                sf_impostors: (0..s.forgeries.len())
                    .map(|k| SigRef::forgery(i, k))
                    .collect(),
            })
        })
        .collect()
}
