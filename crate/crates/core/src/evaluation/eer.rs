use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    /// Fraction of impostor scores accepted (score ≥ threshold).
    pub far: f64,
    /// Fraction of genuine scores rejected (score < threshold).
    pub frr: f64,
}

/// FAR/FRR at every distinct pooled score plus +∞, in increasing threshold
/// order.
pub fn roc_points(genuine: &[f64], impostor: &[f64]) -> Result<Vec<RocPoint>, EvalError> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    if genuine.iter().chain(impostor).any(|s| s.is_nan()) {
        return Err(EvalError::NanScore);
    }
    let mut g = genuine.to_vec();
    let mut im = impostor.to_vec();
    g.sort_by(f64::total_cmp);
    im.sort_by(f64::total_cmp);
    let mut thresholds: Vec<f64> = g.iter().chain(im.iter()).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);

    let (ng, ni) = (g.len() as f64, im.len() as f64);
    let (mut gi, mut ii) = (0usize, 0usize);
    let mut out = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        while gi < g.len() && g[gi] < t {
            gi += 1;
        }
        while ii < im.len() && im[ii] < t {
            ii += 1;
        }
        out.push(RocPoint {
            threshold: t,
            far: (im.len() - ii) as f64 / ni,
            frr: gi as f64 / ng,
        });
    }
    Ok(out)
}

/// Rate where FAR and FRR cross along a threshold-ordered ROC, linearly
/// interpolated between the two points that bracket the crossing.
pub fn eer_from_roc(roc: &[RocPoint]) -> f64 {
    let mut prev: Option<&RocPoint> = None;
    for p in roc {
        let d = p.frr - p.far;
        if d >= 0.0 {
            return match prev {
                Some(q) if d > 0.0 => {
                    let dq = q.frr - q.far;
                    let lambda = -dq / (d - dq);
                    q.frr + lambda * (p.frr - q.frr)
                }
                _ => p.frr,
            };
        }
        prev = Some(p);
    }
    // The +∞ threshold always has FRR = 1, FAR = 0.
    1.0
}

/// Equal error rate in percent. Higher scores mean more genuine.
pub fn compute_eer(genuine: &[f64], impostor: &[f64]) -> Result<f64, EvalError> {
    Ok(100.0 * eer_from_roc(&roc_points(genuine, impostor)?))
}
