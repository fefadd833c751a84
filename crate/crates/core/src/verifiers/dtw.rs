//! Dynamic time warping over multichannel sequences.

use super::VerifierError;
use crate::features::FeatureMatrix;

/// Accumulated cost and alignment length of the best warping path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub cost: f64,
    pub length: usize,
}

impl Alignment {
    pub fn normalized(&self) -> f64 {
        self.cost / self.length as f64
    }

    // Lower cost wins; on an exact tie the shorter path wins.
    fn better(self, other: Alignment) -> Alignment {
        if other.cost < self.cost || (other.cost == self.cost && other.length < self.length) {
            other
        } else {
            self
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Best alignment of two row-major sequences with `dim` channels each, using
/// unit-weight diagonal, horizontal and vertical steps.
///
/// Panics if either slice is empty or not a multiple of `dim`.
pub fn dtw_align(a: &[f64], b: &[f64], dim: usize) -> Alignment {
    assert!(dim > 0 && a.len() % dim == 0 && b.len() % dim == 0);
    let n = a.len() / dim;
    let m = b.len() / dim;
    assert!(n > 0 && m > 0, "dtw on an empty sequence");

    let inf = Alignment {
        cost: f64::INFINITY,
        length: usize::MAX,
    };
    let mut prev = vec![inf; m];
    let mut cur = vec![inf; m];
    for i in 0..n {
        let ai = &a[i * dim..(i + 1) * dim];
        for j in 0..m {
            let d = euclidean(ai, &b[j * dim..(j + 1) * dim]);
            let best = if i == 0 && j == 0 {
                Alignment {
                    cost: 0.0,
                    length: 0,
                }
            } else {
                let mut best = inf;
                if i > 0 && j > 0 {
                    best = best.better(prev[j - 1]);
                }
                if i > 0 {
                    best = best.better(prev[j]);
                }
                if j > 0 {
                    best = best.better(cur[j - 1]);
                }
                best
            };
            cur[j] = Alignment {
                cost: best.cost + d,
                length: best.length + 1,
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Path-length-normalized DTW distance between two feature matrices.
pub fn dtw_distance(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<f64, VerifierError> {
    if a.channels() != b.channels() {
        return Err(VerifierError::ChannelMismatch {
            left: a.channels(),
            right: b.channels(),
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(VerifierError::EmptySequence);
    }
    let flat_a: Vec<f64> = a.rows().flatten().copied().collect();
    let flat_b: Vec<f64> = b.rows().flatten().copied().collect();
    Ok(dtw_align(&flat_a, &flat_b, a.channels()).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureKind;
    use proptest::prelude::*;

    // Exhaustive oracle: enumerate every monotone path from (0,0) to
    // (n-1,m-1) and keep the lowest cost, breaking ties by length.
    fn brute(a: &[f64], b: &[f64]) -> (f64, usize) {
        fn walk(
            a: &[f64],
            b: &[f64],
            i: usize,
            j: usize,
            cost: f64,
            len: usize,
            best: &mut (f64, usize),
        ) {
            let cost = cost + (a[i] - b[j]).abs();
            let len = len + 1;
            if i + 1 == a.len() && j + 1 == b.len() {
                if cost < best.0 || (cost == best.0 && len < best.1) {
                    *best = (cost, len);
                }
                return;
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                walk(a, b, i + 1, j + 1, cost, len, best);
            }
            if i + 1 < a.len() {
                walk(a, b, i + 1, j, cost, len, best);
            }
            if j + 1 < b.len() {
                walk(a, b, i, j + 1, cost, len, best);
            }
        }
        let mut best = (f64::INFINITY, usize::MAX);
        walk(a, b, 0, 0, 0.0, 0, &mut best);
        best
    }

    fn single(values: &[f64]) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        FeatureMatrix::from_rows(FeatureKind::Angle, vec!["c".into()], &rows)
    }

    #[test]
    fn self_distance_is_zero() {
        let a = single(&[1.0, 3.0, -2.0, 0.5]);
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn repetition_is_absorbed() {
        assert_eq!(
            dtw_distance(&single(&[0.0, 0.0]), &single(&[0.0, 0.0, 0.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn hand_computed_alignment() {
        // [0,1,2] vs [0,2]: best path (0,0) (1,0|1) (2,1), cost 1, length 3.
        let al = dtw_align(&[0.0, 1.0, 2.0], &[0.0, 2.0], 1);
        assert_eq!(
            al,
            Alignment {
                cost: 1.0,
                length: 3
            }
        );
    }

    #[test]
    fn channel_mismatch() {
        let a = single(&[0.0]);
        let b = FeatureMatrix::from_rows(
            FeatureKind::Angle,
            vec!["a".into(), "b".into()],
            &[vec![0.0, 0.0]],
        );
        assert!(matches!(
            dtw_distance(&a, &b),
            Err(VerifierError::ChannelMismatch { .. })
        ));
    }

    #[test]
    fn exhaustive_small_alphabet() {
        // Every pair of sequences over {0,1,2} with lengths 1..=4.
        let mut seqs: Vec<Vec<f64>> = Vec::new();
        for len in 1..=4u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                seqs.push(
                    (0..len)
                        .map(|_| {
                            let v = (c % 3) as f64;
                            c /= 3;
                            v
                        })
                        .collect(),
                );
            }
        }
        for a in &seqs {
            for b in &seqs {
                let al = dtw_align(a, b, 1);
                assert_eq!((al.cost, al.length), brute(a, b), "{a:?} vs {b:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_and_non_negative(
            a in proptest::collection::vec(-5.0..5.0f64, 2..20),
            b in proptest::collection::vec(-5.0..5.0f64, 2..20),
        ) {
            let dab = dtw_align(&a, &b, 1);
            let dba = dtw_align(&b, &a, 1);
            prop_assert!(dab.cost >= 0.0);
            prop_assert_eq!(dab, dba);
        }

        #[test]
        fn matches_brute_force(
            a in proptest::collection::vec(-3.0..3.0f64, 1..7),
            b in proptest::collection::vec(-3.0..3.0f64, 1..7),
        ) {
            let al = dtw_align(&a, &b, 1);
            let (c, _) = brute(&a, &b);
            prop_assert!((al.cost - c).abs() < 1e-12);
        }
    }
}
