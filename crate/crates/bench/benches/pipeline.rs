use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use vsa_bench::{corpus, matrix_pair, reachable_postures, sample_signature};
use vsa_core::evaluation::{compute_eer, run_benchmark, BenchmarkConfig, VerifierKind};
use vsa_core::features::{extract_features, FeatureKind};
use vsa_core::kinematics::{forward_pose, inverse_kinematics, ArmGeometry};
use vsa_core::verifiers::dtw_distance;
use vsa_core::ExtractionConfig;

fn kinematics(c: &mut Criterion) {
    let g = ArmGeometry::calibrated();
    let postures = reachable_postures(256, 7, &g);
    let poses: Vec<_> = postures.iter().map(|q| forward_pose(q, &g)).collect();
    c.bench_function("fk_256", |b| {
        b.iter(|| {
            for q in &postures {
                black_box(forward_pose(black_box(q), &g));
            }
        })
    });
    c.bench_function("ik_256", |b| {
        b.iter(|| {
            for t in &poses {
                black_box(inverse_kinematics(black_box(t), &g, None).unwrap());
            }
        })
    });
}

fn features(c: &mut Criterion) {
    let ds = corpus();
    let t = sample_signature(&ds);
    let g = ArmGeometry::calibrated();
    let cfg = ExtractionConfig::default();
    c.bench_function("extract_signature", |b| {
        b.iter(|| extract_features(black_box(t), &g, &cfg).unwrap())
    });
}

fn dtw(c: &mut Criterion) {
    let ds = corpus();
    for kind in [FeatureKind::Position, FeatureKind::Fused] {
        let (a, b) = matrix_pair(&ds, kind);
        c.bench_function(&format!("dtw_{kind}_{}x{}", a.len(), b.len()), |bench| {
            bench.iter(|| dtw_distance(black_box(&a), black_box(&b)).unwrap())
        });
    }
}

fn evaluation(c: &mut Criterion) {
    let scores: Vec<f64> = (0..500)
        .map(|i| ((i * 7919) % 1000) as f64 / 1000.0)
        .collect();
    let (genuine, impostor) = scores.split_at(250);
    c.bench_function("eer_250x250", |b| {
        b.iter(|| compute_eer(black_box(genuine), black_box(impostor)).unwrap())
    });

    let mut ds = corpus();
    ds.signers.truncate(6);
    let cfg = BenchmarkConfig {
        verifier: VerifierKind::Manhattan,
        ..BenchmarkConfig::default()
    };
    let mut group = c.benchmark_group("benchmark");
    group.sample_size(10);
    group.bench_function("manhattan_6_signers", |b| {
        b.iter(|| run_benchmark(&ds, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kinematics, features, dtw, evaluation);
criterion_main!(benches);
