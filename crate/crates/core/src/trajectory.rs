//! Pen samples and signatures as captured by a tablet (after unit conversion).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenSample {
    /// Pen position on the writing surface, mm.
    pub x: f64,
    pub y: f64,
    /// Pen height above the surface, mm.
    pub z: f64,
    /// Device pressure units; carried through untouched.
    pub pressure: f64,
    /// Timestamp, ms.
    pub t: f64,
    /// Azimuth, rad.
    pub theta: f64,
    /// Inclination, rad.
    pub phi: f64,
    pub pen_down: bool,
}

impl PenSample {
    pub fn at(t: f64, x: f64, y: f64, pen_down: bool) -> Self {
        Self {
            x,
            y,
            z: 0.0,
            pressure: if pen_down { 1.0 } else { 0.0 },
            t,
            theta: 0.0,
            phi: 0.0,
            pen_down,
        }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Genuine,
    SkilledForgery,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureTrajectory {
    pub signer_id: String,
    pub signature_id: String,
    pub label: Label,
    pub samples: Vec<PenSample>,
    /// Whether the device supplied azimuth/inclination for every sample.
    pub has_angles: bool,
    /// Samples flagged for the +1° hand-joint bump during pen-ups.
    #[serde(default)]
    pub q6_bump: Vec<bool>,
}

impl SignatureTrajectory {
    pub fn new(
        signer_id: impl Into<String>,
        signature_id: impl Into<String>,
        label: Label,
        samples: Vec<PenSample>,
    ) -> Self {
        Self {
            signer_id: signer_id.into(),
            signature_id: signature_id.into(),
            label,
            samples,
            has_angles: false,
            q6_bump: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Non-empty, strictly increasing timestamps, at least one pen-down sample.
    pub fn is_well_formed(&self) -> bool {
        !self.samples.is_empty()
            && self.samples.iter().any(|s| s.pen_down)
            && self.samples.windows(2).all(|w| w[1].t > w[0].t)
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(PenSample::position).collect()
    }

    pub fn planar_positions(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| [s.x, s.y]).collect()
    }
}
