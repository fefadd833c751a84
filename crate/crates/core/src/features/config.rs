use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenAngleMode {
    /// Device azimuth/inclination as recorded.
    Raw,
    /// Device angles through a centred 15-sample moving average.
    Smoothed,
    /// Constant neutral pen orientation.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    #[serde(rename = "0.1")]
    Tenth,
    #[serde(rename = "1")]
    Unit,
    #[serde(rename = "10")]
    Ten,
}

impl Scale {
    pub fn factor(self) -> f64 {
        match self {
            Scale::Tenth => 0.1,
            Scale::Unit => 1.0,
            Scale::Ten => 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenUpMode {
    /// z = 0 while writing, 5 mm in the air.
    Lift5mm,
    /// z = 0 everywhere.
    Flat,
    /// z = 0 everywhere, hand joint bumped by 1° during pen-ups.
    FlatQ6Bump,
}

/// Pen-up height used by [`PenUpMode::Lift5mm`], mm.
pub const PEN_UP_HEIGHT: f64 = 5.0;

/// Hand-joint increment applied on pen-up samples by [`PenUpMode::FlatQ6Bump`].
pub const PEN_UP_Q6_BUMP: f64 = PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub pen_angle_mode: PenAngleMode,
    pub fixed_theta: f64,
    pub fixed_phi: f64,
    pub scale: Scale,
    pub penup_mode: PenUpMode,
    /// Writing-plane rotation (ρx, ρy, ρz), rad.
    pub gamma: [f64; 3],
    pub fuse_omega: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            pen_angle_mode: PenAngleMode::Fixed,
            fixed_theta: PI / 3.0,
            fixed_phi: 3.0 * PI / 4.0,
            scale: Scale::Unit,
            penup_mode: PenUpMode::Lift5mm,
            gamma: [0.0; 3],
            fuse_omega: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseEnumError {
    pub what: &'static str,
    pub value: String,
}

impl fmt::Display for ParseEnumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {:?}", self.what, self.value)
    }
}

impl std::error::Error for ParseEnumError {}

impl FromStr for PenAngleMode {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Self::Raw),
            "smoothed" => Ok(Self::Smoothed),
            "fixed" => Ok(Self::Fixed),
            _ => Err(ParseEnumError {
                what: "pen angle mode",
                value: s.into(),
            }),
        }
    }
}

impl FromStr for Scale {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0.1" | "1:10" => Ok(Self::Tenth),
            "1" | "1:1" => Ok(Self::Unit),
            "10" | "10:1" => Ok(Self::Ten),
            _ => Err(ParseEnumError {
                what: "scale",
                value: s.into(),
            }),
        }
    }
}

impl FromStr for PenUpMode {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lift5mm" => Ok(Self::Lift5mm),
            "flat" => Ok(Self::Flat),
            "flat-q6" | "flat_q6_bump" => Ok(Self::FlatQ6Bump),
            _ => Err(ParseEnumError {
                what: "pen-up mode",
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for PenAngleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Smoothed => "smoothed",
            Self::Fixed => "fixed",
        })
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tenth => "0.1",
            Self::Unit => "1",
            Self::Ten => "10",
        })
    }
}

impl fmt::Display for PenUpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lift5mm => "lift5mm",
            Self::Flat => "flat",
            Self::FlatQ6Bump => "flat-q6",
        })
    }
}
