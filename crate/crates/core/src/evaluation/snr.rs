/// Ceiling reported when the residual vanishes.
pub const SNR_CAP_DB: f64 = 300.0;

fn point_distance<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Resamples a polyline to `n` points spaced uniformly in arc length. A path
/// of zero length is resampled uniformly in index instead.
pub fn resample_arc_length<const D: usize>(points: &[[f64; D]], n: usize) -> Vec<[f64; D]> {
    assert!(!points.is_empty(), "cannot resample an empty path");
    if points.len() == 1 || n == 1 {
        return vec![points[0]; n];
    }
    let mut s = Vec::with_capacity(points.len());
    s.push(0.0);
    for w in points.windows(2) {
        s.push(s.last().unwrap() + point_distance(&w[0], &w[1]));
    }
    let total = *s.last().unwrap();
    if total <= 0.0 {
        s = (0..points.len()).map(|i| i as f64).collect();
    }
    let total = *s.last().unwrap();

    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for k in 0..n {
        let target = total * k as f64 / (n - 1) as f64;
        while seg + 2 < s.len() && s[seg + 1] < target {
            seg += 1;
        }
        let span = s[seg + 1] - s[seg];
        let t = if span > 0.0 {
            ((target - s[seg]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mut p = [0.0; D];
        for d in 0..D {
            p[d] = points[seg][d] + t * (points[seg + 1][d] - points[seg][d]);
        }
        out.push(p);
    }
    out
}

fn centered<const D: usize>(points: &[[f64; D]]) -> Vec<[f64; D]> {
    let n = points.len() as f64;
    let mut mean = [0.0; D];
    for p in points {
        for d in 0..D {
            mean[d] += p[d];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    points
        .iter()
        .map(|p| {
            let mut c = *p;
            for d in 0..D {
                c[d] -= mean[d];
            }
            c
        })
        .collect()
}

/// Signal-to-noise ratio in dB of `b` as a reconstruction of `a`:
/// `10·log10(Σ|a_c|² / Σ|a_c − b_c|²)` with both paths mean-centred.
///
/// Paths of different length are first resampled by arc length to the
/// longer length. Residuals at rounding level report [`SNR_CAP_DB`]; the
/// result is clamped to ±[`SNR_CAP_DB`].
pub fn snr<const D: usize>(a: &[[f64; D]], b: &[[f64; D]]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "snr of an empty path");
    let (ra, rb);
    let (a, b) = if a.len() == b.len() {
        (a, b)
    } else {
        let n = a.len().max(b.len());
        ra = resample_arc_length(a, n);
        rb = resample_arc_length(b, n);
        (&ra[..], &rb[..])
    };
    let ac = centered(a);
    let bc = centered(b);
    let signal: f64 = ac.iter().flatten().map(|v| v * v).sum();
    let noise: f64 = ac
        .iter()
        .zip(&bc)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)))
        .sum();

    let magnitude = a
        .iter()
        .chain(b)
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = (noise / (a.len() * D) as f64).sqrt();
    if rms <= 1e3 * f64::EPSILON * magnitude.max(f64::MIN_POSITIVE) || noise == 0.0 {
        return SNR_CAP_DB;
    }
    (10.0 * (signal / noise).log10()).clamp(-SNR_CAP_DB, SNR_CAP_DB)
}
