//! Verifier-ready feature matrices: base channels, first and second
//! differences, then per-channel z-scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ParseEnumError;
use super::extract::AnthroSequence;
use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Position,
    Angle,
    Fused,
}

impl FeatureKind {
    pub fn channel_count(self) -> usize {
        match self {
            FeatureKind::Position => 27,
            FeatureKind::Angle => 18,
            FeatureKind::Fused => 45,
        }
    }
}

impl FromStr for FeatureKind {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "position" => Ok(Self::Position),
            "angle" | "angles" => Ok(Self::Angle),
            "fused" => Ok(Self::Fused),
            _ => Err(ParseEnumError {
                what: "feature kind",
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Position => "position",
            Self::Angle => "angle",
            Self::Fused => "fused",
        })
    }
}

/// Row-major `len × channels` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub kind: FeatureKind,
    pub channel_names: Vec<String>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    /// Builds a matrix from per-sample rows; all rows must have
    /// `channel_names.len()` entries.
    pub fn from_rows(kind: FeatureKind, channel_names: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let c = channel_names.len();
        let mut data = Vec::with_capacity(rows.len() * c);
        for r in rows {
            assert_eq!(r.len(), c, "row width does not match channel count");
            data.extend_from_slice(r);
        }
        Self {
            kind,
            channel_names,
            data,
        }
    }

    fn from_columns(kind: FeatureKind, channel_names: Vec<String>, columns: &[Vec<f64>]) -> Self {
        let n = columns.first().map_or(0, Vec::len);
        let c = columns.len();
        let mut data = vec![0.0; n * c];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                data[i * c + j] = *v;
            }
        }
        Self {
            kind,
            channel_names,
            data,
        }
    }

    pub fn channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn len(&self) -> usize {
        if self.channels() == 0 {
            0
        } else {
            self.data.len() / self.channels()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.channels();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.channels().max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Appends `other`'s channels after this matrix's channels.
    pub fn concat(&self, other: &FeatureMatrix, kind: FeatureKind) -> Result<Self, FeatureError> {
        if self.len() != other.len() {
            return Err(FeatureError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let mut names = self.channel_names.clone();
        names.extend(other.channel_names.iter().cloned());
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for (a, b) in self.rows().zip(other.rows()) {
            data.extend_from_slice(a);
            data.extend_from_slice(b);
        }
        Ok(Self {
            kind,
            channel_names: names,
            data,
        })
    }
}

/// First differences with the first difference repeated, so the output has
/// the input's length.
pub fn difference(values: &[f64]) -> Vec<f64> {
    if values.len() < 2 {
        return vec![0.0; values.len()];
    }
    let mut d = Vec::with_capacity(values.len());
    d.push(values[1] - values[0]);
    d.extend(values.windows(2).map(|w| w[1] - w[0]));
    d
}

/// Z-score with population statistics. A channel whose spread is at
/// rounding level maps to all zeros.
pub fn zscore(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    if values.is_empty() {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std <= 1e-10 * (1.0 + mean.abs()) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / std).collect()
}

fn block(base: Vec<Vec<f64>>, names: &[&str], kind: FeatureKind) -> FeatureMatrix {
    let d1: Vec<Vec<f64>> = base.iter().map(|c| difference(c)).collect();
    let d2: Vec<Vec<f64>> = d1.iter().map(|c| difference(c)).collect();
    let mut columns = Vec::with_capacity(base.len() * 3);
    let mut channel_names = Vec::with_capacity(base.len() * 3);
    for (prefix, group) in [("", &base), ("d_", &d1), ("dd_", &d2)] {
        for (name, col) in names.iter().zip(group.iter()) {
            columns.push(zscore(col));
            channel_names.push(format!("{prefix}{name}"));
        }
    }
    FeatureMatrix::from_columns(kind, channel_names, &columns)
}

const POSITION_CHANNELS: [&str; 9] = ["xe", "ye", "ze", "xw", "yw", "zw", "xf", "yf", "zf"];
const ANGLE_CHANNELS: [&str; 6] = ["q1", "q2", "q3", "q4", "q5", "q6"];

/// Minimum sequence length for second differences to exist.
pub const MIN_SEQUENCE_LEN: usize = 3;

pub fn build_feature_matrix(
    seq: &AnthroSequence,
    kind: FeatureKind,
) -> Result<FeatureMatrix, FeatureError> {
    if seq.len() < MIN_SEQUENCE_LEN {
        return Err(FeatureError::TooShort {
            len: seq.len(),
            min: MIN_SEQUENCE_LEN,
        });
    }
    match kind {
        FeatureKind::Position => {
            let rows = seq.position_rows();
            let cols = (0..9)
                .map(|j| rows.iter().map(|r| r[j]).collect())
                .collect();
            Ok(block(cols, &POSITION_CHANNELS, kind))
        }
        FeatureKind::Angle => {
            let rows = seq.angle_rows();
            let cols = (0..6)
                .map(|j| rows.iter().map(|r| r[j]).collect())
                .collect();
            Ok(block(cols, &ANGLE_CHANNELS, kind))
        }
        FeatureKind::Fused => {
            let p = build_feature_matrix(seq, FeatureKind::Position)?;
            let a = build_feature_matrix(seq, FeatureKind::Angle)?;
            p.concat(&a, FeatureKind::Fused)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{JointAngles, Vec3};
    use proptest::prelude::*;

    fn seq_from(f: impl Fn(usize) -> f64, n: usize) -> AnthroSequence {
        AnthroSequence {
            angles: (0..n)
                .map(|i| JointAngles([f(i), 2.0 * f(i), 0.5, -f(i), 1.0 + f(i) * f(i), 0.0]))
                .collect(),
            elbow: (0..n).map(|i| Vec3::new(f(i), 0.0, 1.0)).collect(),
            wrist: (0..n).map(|i| Vec3::new(0.0, f(i), 1.0)).collect(),
            finger: (0..n)
                .map(|i| Vec3::new(f(i), f(i), (i as f64).sin()))
                .collect(),
        }
    }

    #[test]
    fn channel_counts() {
        let s = seq_from(|i| i as f64, 10);
        for kind in [
            FeatureKind::Position,
            FeatureKind::Angle,
            FeatureKind::Fused,
        ] {
            let m = build_feature_matrix(&s, kind).unwrap();
            assert_eq!(m.channels(), kind.channel_count());
            assert_eq!(m.len(), 10);
        }
    }

    #[test]
    fn fused_is_position_then_angle() {
        let s = seq_from(|i| (i as f64 * 0.3).sin(), 12);
        let p = build_feature_matrix(&s, FeatureKind::Position).unwrap();
        let a = build_feature_matrix(&s, FeatureKind::Angle).unwrap();
        let f = build_feature_matrix(&s, FeatureKind::Fused).unwrap();
        for i in 0..12 {
            assert_eq!(&f.row(i)[..27], p.row(i));
            assert_eq!(&f.row(i)[27..], a.row(i));
        }
        assert_eq!(f.channel_names[0], "xe");
        assert_eq!(f.channel_names[27], "q1");
    }

    #[test]
    fn constant_sequence_is_all_zero() {
        let m = build_feature_matrix(&seq_from(|_| 0.3, 8), FeatureKind::Angle).unwrap();
        assert!(m.rows().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn ramp_has_constant_delta() {
        let v: Vec<f64> = (0..6).map(|i| 2.0 * i as f64 + 1.0).collect();
        let d = difference(&v);
        assert_eq!(d, vec![2.0; 6]);
        assert_eq!(difference(&d), vec![0.0; 6]);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            build_feature_matrix(&seq_from(|i| i as f64, 2), FeatureKind::Position),
            Err(FeatureError::TooShort { len: 2, min: 3 })
        ));
    }

    proptest! {
        #[test]
        fn channels_are_standardized(values in proptest::collection::vec(-100.0..100.0f64, 3..60)) {
            let n = values.len();
            let s = seq_from(|i| values[i], n);
            let m = build_feature_matrix(&s, FeatureKind::Fused).unwrap();
            for j in 0..m.channels() {
                let col = m.column(j);
                let mean = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!(var.abs() < 1e-9 || (var - 1.0).abs() < 1e-9, "var {}", var);
            }
        }
    }
}
