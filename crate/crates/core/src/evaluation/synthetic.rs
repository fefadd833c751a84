//! Deterministic synthetic signature corpus.
//!
//! Each signer owns a prototype made of Catmull-Rom strokes joined by pen-up
//! transitions. Genuine signatures apply a small affine wobble and positional
//! jitter to the prototype; skilled forgeries time-warp it and rescale its
//! amplitude before adding the same jitter.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{Dataset, DatasetMeta, SignerData};
use super::signer_seed;
use crate::trajectory::{Label, PenSample, SignatureTrajectory};

pub const SYNTHETIC_SIGNERS: usize = 20;
pub const SYNTHETIC_GENUINE: usize = 10;
pub const SYNTHETIC_FORGERIES: usize = 10;
/// Seed of the bundled corpus.
pub const SYNTHETIC_SEED: u64 = 0x5151_2024;
/// Sample period, ms (100 Hz).
pub const SAMPLE_PERIOD_MS: f64 = 10.0;
/// Per-sample positional jitter, mm.
pub const JITTER_MM: f64 = 0.3;
/// Relative amplitude change allowed for forgeries.
pub const FORGERY_AMPLITUDE: f64 = 0.15;

const SAMPLES_PER_SEGMENT: usize = 12;
const PEN_UP_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    y: f64,
    down: bool,
}

fn catmull_rom(
    p0: (f64, f64),
    p1: (f64, f64),
    p2: (f64, f64),
    p3: (f64, f64),
    t: f64,
) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let f = |a: f64, b: f64, c: f64, d: f64| {
        0.5 * (2.0 * b
            + (-a + c) * t
            + (2.0 * a - 5.0 * b + 4.0 * c - d) * t2
            + (-a + 3.0 * b - 3.0 * c + d) * t3)
    };
    (f(p0.0, p1.0, p2.0, p3.0), f(p0.1, p1.1, p2.1, p3.1))
}

fn prototype(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let strokes = rng.random_range(2..=4);
    let mut out: Vec<Point> = Vec::new();
    let mut x0 = 0.0;
    for _ in 0..strokes {
        let n_ctrl: usize = rng.random_range(5..=8);
        let ctrl: Vec<(f64, f64)> = (0..n_ctrl)
            .map(|k| {
                (
                    x0 + k as f64 * rng.random_range(2.0..6.0),
                    rng.random_range(-12.0..12.0),
                )
            })
            .collect();
        if let Some(last) = out.last().copied() {
            let (sx, sy) = ctrl[0];
            for k in 1..=PEN_UP_SAMPLES {
                let t = k as f64 / (PEN_UP_SAMPLES + 1) as f64;
                out.push(Point {
                    x: last.x + t * (sx - last.x),
                    y: last.y + t * (sy - last.y),
                    down: false,
                });
            }
        }
        for seg in 0..n_ctrl - 1 {
            let p0 = ctrl[seg.saturating_sub(1)];
            let p1 = ctrl[seg];
            let p2 = ctrl[seg + 1];
            let p3 = ctrl[(seg + 2).min(n_ctrl - 1)];
            for k in 0..SAMPLES_PER_SEGMENT {
                let (x, y) = catmull_rom(p0, p1, p2, p3, k as f64 / SAMPLES_PER_SEGMENT as f64);
                out.push(Point { x, y, down: true });
            }
        }
        let (lx, ly) = ctrl[n_ctrl - 1];
        out.push(Point {
            x: lx,
            y: ly,
            down: true,
        });
        x0 = lx + rng.random_range(3.0..8.0);
    }
    out
}

/// Samples `proto` at fractional index positions `u ∈ [0, 1]`.
fn sample_at(proto: &[Point], u: f64) -> Point {
    let pos = u.clamp(0.0, 1.0) * (proto.len() - 1) as f64;
    let i = (pos.floor() as usize).min(proto.len() - 2);
    let t = pos - i as f64;
    let (a, b) = (proto[i], proto[i + 1]);
    Point {
        x: a.x + t * (b.x - a.x),
        y: a.y + t * (b.y - a.y),
        down: if t < 0.5 { a.down } else { b.down },
    }
}

fn to_trajectory(
    signer_id: &str,
    signature_id: String,
    label: Label,
    points: &[Point],
    rng: &mut ChaCha8Rng,
) -> SignatureTrajectory {
    let jitter = Normal::new(0.0, JITTER_MM).expect("positive std");
    let phase = rng.random_range(0.0..TAU);
    let n = points.len() as f64;
    let samples = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let u = i as f64 / n;
            PenSample {
                x: p.x + jitter.sample(rng),
                y: p.y + jitter.sample(rng),
                z: 0.0,
                pressure: if p.down {
                    0.6 + 0.3 * (TAU * 2.0 * u + phase).sin()
                } else {
                    0.0
                },
                t: i as f64 * SAMPLE_PERIOD_MS,
                theta: PI / 3.0 + 0.15 * (TAU * 1.3 * u + phase).sin(),
                phi: 3.0 * PI / 4.0 + 0.08 * (TAU * 0.7 * u + phase).cos(),
                pen_down: p.down,
            }
        })
        .collect();
    let mut t = SignatureTrajectory::new(signer_id, signature_id, label, samples);
    t.has_angles = true;
    t
}

fn genuine(proto: &[Point], rng: &mut ChaCha8Rng) -> Vec<Point> {
    let rot = rng.random_range(-3.0f64..3.0).to_radians();
    let (sx, sy) = (rng.random_range(0.96..1.04), rng.random_range(0.96..1.04));
    let shear = rng.random_range(-0.03..0.03);
    let (tx, ty) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let (c, s) = (rot.cos(), rot.sin());
    proto
        .iter()
        .map(|p| {
            let x = sx * (p.x + shear * p.y);
            let y = sy * p.y;
            Point {
                x: c * x - s * y + tx,
                y: s * x + c * y + ty,
                down: p.down,
            }
        })
        .collect()
}

fn forgery(proto: &[Point], rng: &mut ChaCha8Rng) -> Vec<Point> {
    // Slower, unevenly paced reproduction.
    let duration = rng.random_range(1.1..1.5);
    let n = ((proto.len() as f64) * duration).round() as usize;
    // Whole cycles keep both endpoints fixed; amplitude below 1 keeps the
    // warp monotone.
    let freq = rng.random_range(1..=3) as f64;
    let amp = rng.random_range(0.3..0.7);
    let warp = |u: f64| u + amp * (TAU * freq * u).sin() / (TAU * freq);
    let (ax, ay) = (
        rng.random_range(1.0 - FORGERY_AMPLITUDE..1.0 + FORGERY_AMPLITUDE),
        rng.random_range(1.0 - FORGERY_AMPLITUDE..1.0 + FORGERY_AMPLITUDE),
    );
    (0..n)
        .map(|k| {
            let p = sample_at(proto, warp(k as f64 / (n - 1) as f64));
            Point {
                x: ax * p.x,
                y: ay * p.y,
                down: p.down,
            }
        })
        .collect()
}

/// Builds the corpus: [`SYNTHETIC_SIGNERS`] signers with
/// [`SYNTHETIC_GENUINE`] genuine signatures and [`SYNTHETIC_FORGERIES`]
/// skilled forgeries each.
pub fn synthetic_corpus(seed: u64) -> Dataset {
    let signers = (0..SYNTHETIC_SIGNERS)
        .map(|k| {
            let signer_id = format!("s{:03}", k + 1);
            let mut rng = ChaCha8Rng::seed_from_u64(signer_seed(seed, &signer_id));
            let proto = prototype(&mut rng);
            let genuine_sigs = (0..SYNTHETIC_GENUINE)
                .map(|i| {
                    let pts = genuine(&proto, &mut rng);
                    to_trajectory(
                        &signer_id,
                        format!("g{:02}", i + 1),
                        Label::Genuine,
                        &pts,
                        &mut rng,
                    )
                })
                .collect();
            let forgeries = (0..SYNTHETIC_FORGERIES)
                .map(|i| {
                    let pts = forgery(&proto, &mut rng);
                    to_trajectory(
                        &signer_id,
                        format!("f{:02}", i + 1),
                        Label::SkilledForgery,
                        &pts,
                        &mut rng,
                    )
                })
                .collect();
            SignerData {
                signer_id,
                genuine: genuine_sigs,
                forgeries,
            }
        })
        .collect();
    Dataset {
        meta: DatasetMeta {
            name: "synthetic".into(),
            device: "synthetic".into(),
            units: "mm".into(),
            lines_per_mm: None,
            sample_rate_hz: Some(1000.0 / SAMPLE_PERIOD_MS),
        },
        signers,
    }
}
