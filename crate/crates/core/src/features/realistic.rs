//! Per-signer arm geometry drawn from anthropometric bone-length
//! distributions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::config::ParseEnumError;
use crate::kinematics::ArmGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Male => "male",
            Self::Female => "female",
        })
    }
}

impl FromStr for Gender {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "male" | "m" => Ok(Self::Male),
            "female" | "f" => Ok(Self::Female),
            _ => Err(ParseEnumError {
                what: "gender",
                value: s.into(),
            }),
        }
    }
}

/// Humerus length (mean, std), mm.
pub fn humerus_distribution(gender: Gender) -> (f64, f64) {
    match gender {
        Gender::Male => (334.0, 15.8),
        Gender::Female => (307.0, 15.9),
    }
}

/// Radius length (mean, std), mm; stands in for the whole forearm link.
pub fn radius_distribution(gender: Gender) -> (f64, f64) {
    match gender {
        Gender::Male => (265.0, 15.4),
        Gender::Female => (238.0, 10.7),
    }
}

/// Elbow offset used by the realistic model, mm.
pub const REALISTIC_ELBOW_OFFSET: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledGeometry {
    pub geometry: ArmGeometry,
    pub gender: Gender,
}

/// Draws upper-arm and forearm lengths for one signer. Trunk and hand keep
/// `base`'s values and the elbow offset collapses to 1 mm. Without an
/// explicit gender a fair coin decides it from the same seeded stream.
pub fn sample_realistic_geometry(
    base: &ArmGeometry,
    seed: u64,
    gender: Option<Gender>,
) -> SampledGeometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gender = gender.unwrap_or_else(|| {
        if rng.random_bool(0.5) {
            Gender::Male
        } else {
            Gender::Female
        }
    });
    let (mu2, sd2) = humerus_distribution(gender);
    let (mu4, sd4) = radius_distribution(gender);
    let upper_arm = Normal::new(mu2, sd2).expect("finite std").sample(&mut rng);
    let forearm = Normal::new(mu4, sd4).expect("finite std").sample(&mut rng);
    SampledGeometry {
        geometry: ArmGeometry {
            upper_arm,
            elbow_offset: REALISTIC_ELBOW_OFFSET,
            forearm,
            ..*base
        },
        gender,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let base = ArmGeometry::calibrated();
        assert_eq!(
            sample_realistic_geometry(&base, 42, None),
            sample_realistic_geometry(&base, 42, None)
        );
        assert_ne!(
            sample_realistic_geometry(&base, 42, None).geometry,
            sample_realistic_geometry(&base, 43, None).geometry
        );
    }

    #[test]
    fn keeps_trunk_and_hand() {
        let base = ArmGeometry::calibrated();
        for seed in 0..50 {
            let g = sample_realistic_geometry(&base, seed, None).geometry;
            assert_eq!(g.elbow_offset, 1.0);
            assert_eq!(g.trunk, base.trunk);
            assert_eq!(g.hand, base.hand);
        }
    }

    #[test]
    fn both_genders_occur() {
        let base = ArmGeometry::calibrated();
        let males = (0..200)
            .filter(|s| sample_realistic_geometry(&base, *s, None).gender == Gender::Male)
            .count();
        assert!(males > 60 && males < 140);
    }
}
