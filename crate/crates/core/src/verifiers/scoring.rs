//! Templates, per-signer score normalization and fusion.

use serde::{Deserialize, Serialize};

use super::dtw::dtw_distance;
use super::histogram::{BinKind, HistogramVector};
use super::VerifierError;
use crate::features::{FeatureKind, FeatureMatrix};

/// Per-bin dead-zone for absolute-count segments.
pub const ABSOLUTE_EPSILON: f64 = 0.4;
/// Per-bin dead-zone for relative-frequency segments.
pub const RELATIVE_EPSILON: f64 = 0.004;
/// Floor for divisors built from reference statistics.
pub const STAT_FLOOR: f64 = 1e-9;
/// Minimum number of enrolment references.
pub const MIN_REFERENCES: usize = 2;

/// Mean and standard deviation of a signer's reference-vs-reference
/// similarities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: f64,
    pub std: f64,
}

impl NormStats {
    pub fn from_scores(scores: &[f64]) -> Self {
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    /// Normalized similarity in (0, 1); higher is more genuine.
    pub value: f64,
    /// Distance before normalization, ≥ 0.
    pub raw_distance: f64,
}

/// An enrolled signer: references plus the statistics used to normalize
/// scores against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template<R> {
    pub signer_id: String,
    pub references: Vec<R>,
    pub stats: NormStats,
    /// Divisor for raw distances: mean pairwise reference distance for DTW,
    /// 1 for histograms.
    pub scale: f64,
    pub mean_histogram: Option<HistogramVector>,
}

/// Maps a similarity into (0, 1) with a tanh-estimator,
/// `0.5·(tanh(0.01·(s − μ)/σ) + 1)`.
pub fn tanh_normalize(s: f64, stats: &NormStats) -> f64 {
    let sd = stats.std.max(STAT_FLOOR);
    let x = 0.01 * (s - stats.mean) / sd;
    // Same function written as a logistic, which stays above zero far
    // deeper into the lower tail than tanh(x) + 1.
    1.0 / (1.0 + (-2.0 * x).exp())
}

/// Weighted sum `ω·s_p + (1 − ω)·s_a`.
pub fn fuse_scores(s_p: f64, s_a: f64, omega: f64) -> f64 {
    omega * s_p + (1.0 - omega) * s_a
}

/// Feature-level fusion of a position and an angle matrix.
pub fn fuse_matrices(
    position: &FeatureMatrix,
    angle: &FeatureMatrix,
) -> Result<FeatureMatrix, VerifierError> {
    position
        .concat(angle, FeatureKind::Fused)
        .map_err(|_| VerifierError::LengthMismatch {
            left: position.len(),
            right: angle.len(),
        })
}

/// Feature-level fusion of two histogram vectors.
pub fn fuse_histograms(position: &HistogramVector, angle: &HistogramVector) -> HistogramVector {
    position.concat(angle)
}

fn check_refs<R>(refs: &[R]) -> Result<(), VerifierError> {
    if refs.is_empty() {
        return Err(VerifierError::EmptyTemplate);
    }
    if refs.len() < MIN_REFERENCES {
        return Err(VerifierError::TooFewReferences {
            got: refs.len(),
            min: MIN_REFERENCES,
        });
    }
    Ok(())
}

/// Builds a DTW template. The normalization scale is the mean pairwise
/// reference distance; the score statistics come from scoring each
/// reference against the others.
pub fn dtw_template(
    signer_id: impl Into<String>,
    references: Vec<FeatureMatrix>,
) -> Result<Template<FeatureMatrix>, VerifierError> {
    check_refs(&references)?;
    let n = references.len();
    let mut pair = vec![vec![0.0; n]; n];
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let d = dtw_distance(&references[i], &references[j])?;
            pair[i][j] = d;
            pair[j][i] = d;
            total += d;
            count += 1;
        }
    }
    let scale = (total / count as f64).max(STAT_FLOOR);
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            let best = (0..n)
                .filter(|j| *j != i)
                .map(|j| pair[i][j])
                .fold(f64::INFINITY, f64::min);
            -best / scale
        })
        .collect();
    Ok(Template {
        signer_id: signer_id.into(),
        references,
        stats: NormStats::from_scores(&loo),
        scale,
        mean_histogram: None,
    })
}

/// Scores a questioned matrix against a DTW template: closest reference
/// distance over the reference scale, negated and tanh-normalized.
pub fn dtw_verify(t: &Template<FeatureMatrix>, q: &FeatureMatrix) -> Result<Score, VerifierError> {
    if t.references.is_empty() {
        return Err(VerifierError::EmptyTemplate);
    }
    let mut raw = f64::INFINITY;
    for r in &t.references {
        raw = raw.min(dtw_distance(r, q)?);
    }
    Ok(Score {
        value: tanh_normalize(-raw / t.scale, &t.stats),
        raw_distance: raw,
    })
}

fn mean_histogram(refs: &[&HistogramVector]) -> HistogramVector {
    let mut out = refs[0].clone();
    for (j, v) in out.values.iter_mut().enumerate() {
        *v = refs.iter().map(|h| h.values[j]).sum::<f64>() / refs.len() as f64;
    }
    out
}

/// Manhattan distance with per-bin dead-zones: a bin contributes its full
/// difference only when that difference exceeds the segment's epsilon.
pub fn gated_manhattan(a: &HistogramVector, b: &HistogramVector) -> Result<f64, VerifierError> {
    if !a.same_layout(b) {
        return Err(VerifierError::LayoutMismatch);
    }
    let mut d = 0.0;
    for s in &a.segments {
        let eps = match s.kind {
            BinKind::Absolute => ABSOLUTE_EPSILON,
            BinKind::Relative => RELATIVE_EPSILON,
        };
        for j in s.start..s.start + s.len {
            let diff = (a.values[j] - b.values[j]).abs();
            if diff > eps {
                d += diff;
            }
        }
    }
    Ok(d)
}

/// Builds a histogram template around the per-bin reference mean. Score
/// statistics come from each reference against the mean of the others.
pub fn manhattan_template(
    signer_id: impl Into<String>,
    references: Vec<HistogramVector>,
) -> Result<Template<HistogramVector>, VerifierError> {
    check_refs(&references)?;
    if references.iter().any(|r| !r.same_layout(&references[0])) {
        return Err(VerifierError::LayoutMismatch);
    }
    let all: Vec<&HistogramVector> = references.iter().collect();
    let mean = mean_histogram(&all);
    let mut loo = Vec::with_capacity(references.len());
    for (i, r) in references.iter().enumerate() {
        let others: Vec<&HistogramVector> = all
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| *h)
            .collect();
        loo.push(-gated_manhattan(&mean_histogram(&others), r)?);
    }
    Ok(Template {
        signer_id: signer_id.into(),
        references,
        stats: NormStats::from_scores(&loo),
        scale: 1.0,
        mean_histogram: Some(mean),
    })
}

pub fn manhattan_score(
    t: &Template<HistogramVector>,
    q: &HistogramVector,
) -> Result<Score, VerifierError> {
    let mean = t
        .mean_histogram
        .as_ref()
        .ok_or(VerifierError::EmptyTemplate)?;
    let raw = gated_manhattan(mean, q)?;
    Ok(Score {
        value: tanh_normalize(-raw, &t.stats),
        raw_distance: raw,
    })
}
