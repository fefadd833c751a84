//! Histogram feature vectors for the Manhattan verifier.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::VerifierError;
use crate::kinematics::{JointAngles, Vec3};

/// Histogram bins per segment.
pub const DELTA_BINS: usize = 16;
pub const DELTA2_BINS: usize = 24;
pub const PAIR_BINS: usize = 16;
pub const RADIAL_BINS: usize = 16;
pub const ANGULAR_BINS: usize = 16;
/// Half-width of the binning range in standard deviations.
pub const RANGE_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinKind {
    /// Raw counts.
    Absolute,
    /// Counts divided by the total; sums to 1.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub kind: BinKind,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramVector {
    pub values: Vec<f64>,
    pub segments: Vec<Segment>,
}

impl HistogramVector {
    pub fn new() -> Self {
        Self {
            values: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn push_segment(&mut self, name: impl Into<String>, kind: BinKind, bins: &[f64]) {
        self.segments.push(Segment {
            name: name.into(),
            kind,
            start: self.values.len(),
            len: bins.len(),
        });
        self.values.extend_from_slice(bins);
    }

    pub fn segment(&self, name: &str) -> Option<&[f64]> {
        self.segments
            .iter()
            .find(|s| s.name == name)
            .map(|s| &self.values[s.start..s.start + s.len])
    }

    /// Total mass of all segments whose name starts with `prefix`.
    pub fn group_sum(&self, prefix: &str) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.name.starts_with(prefix))
            .map(|s| self.values[s.start..s.start + s.len].iter().sum::<f64>())
            .sum()
    }

    /// True when both vectors have the same segment names, kinds and sizes.
    pub fn same_layout(&self, other: &HistogramVector) -> bool {
        self.segments == other.segments
    }

    pub fn concat(&self, other: &HistogramVector) -> HistogramVector {
        let mut out = self.clone();
        for s in &other.segments {
            out.push_segment(
                s.name.clone(),
                s.kind,
                &other.values[s.start..s.start + s.len],
            );
        }
        out
    }
}

impl Default for HistogramVector {
    fn default() -> Self {
        Self::new()
    }
}

/// Bin index of `v` among `bins` equal bins over `[lo, hi]`; values outside
/// are clipped to the edge bins and a collapsed range uses the middle bin.
pub fn bin_index(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let width = hi - lo;
    // NaN widths also land here.
    if width.is_nan() || width <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        return bins / 2;
    }
    let t = ((v - lo) / width * bins as f64).floor();
    if t < 0.0 {
        0
    } else {
        (t as usize).min(bins - 1)
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn sigma_range(values: &[f64]) -> (f64, f64) {
    let (m, s) = mean_std(values);
    (m - RANGE_SIGMAS * s, m + RANGE_SIGMAS * s)
}

fn counts(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for v in values {
        h[bin_index(*v, lo, hi, bins)] += 1.0;
    }
    h
}

fn relative(mut h: Vec<f64>) -> Vec<f64> {
    let total: f64 = h.iter().sum();
    if total > 0.0 {
        for v in &mut h {
            *v /= total;
        }
    }
    h
}

fn diff(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Minimum angle-sequence length: two samples for Δ, three for ΔΔ.
pub const MIN_ANGLE_SAMPLES: usize = 3;

/// Angle histograms `[h1 || h2 || h3]`, one relative segment per joint in
/// each group (`h1.q1` … `h3.q6`).
///
/// `h1` bins Δq over its mean ± 2σ, `h2` bins ΔΔq the same way with more
/// bins, and `h3` is a 2D histogram of consecutive (Δq[i], Δq[i+1]) pairs
/// over the `h1` range, flattened row-major.
pub fn angle_histograms(angles: &[JointAngles]) -> Result<HistogramVector, VerifierError> {
    if angles.len() < MIN_ANGLE_SAMPLES {
        return Err(VerifierError::TooShort {
            len: angles.len(),
            min: MIN_ANGLE_SAMPLES,
        });
    }
    let mut h1 = Vec::with_capacity(6);
    let mut h2 = Vec::with_capacity(6);
    let mut h3 = Vec::with_capacity(6);
    for k in 0..6 {
        let q: Vec<f64> = angles.iter().map(|a| a[k]).collect();
        let d1 = diff(&q);
        let d2 = diff(&d1);

        let (lo, hi) = sigma_range(&d1);
        h1.push(relative(counts(&d1, lo, hi, DELTA_BINS)));

        let (lo2, hi2) = sigma_range(&d2);
        h2.push(relative(counts(&d2, lo2, hi2, DELTA2_BINS)));

        let mut pairs = vec![0.0; PAIR_BINS * PAIR_BINS];
        for w in d1.windows(2) {
            let r = bin_index(w[0], lo, hi, PAIR_BINS);
            let c = bin_index(w[1], lo, hi, PAIR_BINS);
            pairs[r * PAIR_BINS + c] += 1.0;
        }
        h3.push(relative(pairs));
    }

    let mut out = HistogramVector::new();
    for (group, hs) in [("h1", &h1), ("h2", &h2), ("h3", &h3)] {
        for (k, h) in hs.iter().enumerate() {
            out.push_segment(format!("{group}.q{}", k + 1), BinKind::Relative, h);
        }
    }
    Ok(out)
}

/// Orthonormal in-plane axes `(u, v)` for the plane with normal `n`.
/// A normal along +z gives `u = x`, `v = y`.
pub fn plane_basis(normal: Vec3) -> (Vec3, Vec3) {
    let n = normal.normalize();
    let seed = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let u = (seed - n * seed.dot(&n)).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Position histograms `[h_e || h_w || h_f]` over the given joint paths.
///
/// Each path is projected onto the plane orthogonal to `normal` and turned
/// into polar coordinates about its projected centroid. Per joint the vector
/// holds radial and angular relative histograms followed by their absolute
/// counterparts. Radial bins span mean ± 2σ of the radius; angular bins span
/// (−π, π].
pub fn position_histograms(
    joints: &[(&str, &[Vec3])],
    normal: Vec3,
) -> Result<HistogramVector, VerifierError> {
    let (u, v) = plane_basis(normal);
    let mut out = HistogramVector::new();
    for (name, path) in joints {
        let planar: Vec<(f64, f64)> = path.iter().map(|p| (p.dot(&u), p.dot(&v))).collect();
        if planar.is_empty() {
            return Err(VerifierError::Degenerate {
                joint: name.to_string(),
            });
        }
        let n = planar.len() as f64;
        let cu = planar.iter().map(|p| p.0).sum::<f64>() / n;
        let cv = planar.iter().map(|p| p.1).sum::<f64>() / n;
        let radius: Vec<f64> = planar.iter().map(|p| (p.0 - cu).hypot(p.1 - cv)).collect();
        let scale = planar
            .iter()
            .map(|p| p.0.abs().max(p.1.abs()))
            .fold(1.0, f64::max);
        if radius.iter().all(|r| *r <= 1e-12 * scale) {
            return Err(VerifierError::Degenerate {
                joint: name.to_string(),
            });
        }
        let angle: Vec<f64> = planar.iter().map(|p| (p.1 - cv).atan2(p.0 - cu)).collect();

        let (lo, hi) = sigma_range(&radius);
        let r_abs = counts(&radius, lo, hi, RADIAL_BINS);
        let a_abs = counts(&angle, -PI, PI, ANGULAR_BINS);
        out.push_segment(
            format!("{name}.radial"),
            BinKind::Relative,
            &relative(r_abs.clone()),
        );
        out.push_segment(
            format!("{name}.angular"),
            BinKind::Relative,
            &relative(a_abs.clone()),
        );
        out.push_segment(format!("{name}.radial_abs"), BinKind::Absolute, &r_abs);
        out.push_segment(format!("{name}.angular_abs"), BinKind::Absolute, &a_abs);
    }
    Ok(out)
}
