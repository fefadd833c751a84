use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{split_protocol, Dataset, SigRef, SignerSplit};
use super::eer::{compute_eer, roc_points, RocPoint};
use super::{signer_seed, EvalError};
use crate::features::{
    build_feature_matrix, extract_features, sample_realistic_geometry, AnthroSequence,
    ExtractionConfig, FeatureError, FeatureKind, FeatureMatrix, ParseEnumError,
};
use crate::kinematics::{plane_rotation, ArmGeometry, Vec3};
use crate::trajectory::SignatureTrajectory;
use crate::verifiers::{
    angle_histograms, dtw_template, dtw_verify, fuse_histograms, fuse_scores, manhattan_score,
    manhattan_template, position_histograms, HistogramVector, VerifierError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifierKind {
    Dtw,
    Manhattan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// No fusion; the fused feature kind falls back to feature-level.
    None,
    /// Position and angle representations concatenated before scoring.
    Feature,
    /// Position and angle scored separately, then `ω·s_p + (1 − ω)·s_a`.
    Score,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryMode {
    /// One calibrated arm for every signer.
    Fixed,
    /// Per-signer bone lengths drawn from anthropometric distributions.
    Realistic,
}

macro_rules! text_enum {
    ($ty:ty, $what:literal, { $($name:literal $(| $alias:literal)* => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = ParseEnumError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name $(| $alias)* => Ok($variant),)+
                    _ => Err(ParseEnumError { what: $what, value: s.into() }),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

text_enum!(VerifierKind, "verifier", { "dtw" => VerifierKind::Dtw, "man" | "manhattan" => VerifierKind::Manhattan });
text_enum!(FusionMode, "fusion mode", {
    "none" => FusionMode::None,
    "feature" => FusionMode::Feature,
    "score" => FusionMode::Score,
});
text_enum!(GeometryMode, "geometry mode", { "fixed" => GeometryMode::Fixed, "realistic" => GeometryMode::Realistic });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub extraction: ExtractionConfig,
    pub verifier: VerifierKind,
    pub features: FeatureKind,
    pub fusion: FusionMode,
    pub geometry: GeometryMode,
    pub base_geometry: ArmGeometry,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            extraction: ExtractionConfig::default(),
            verifier: VerifierKind::Dtw,
            features: FeatureKind::Fused,
            fusion: FusionMode::Score,
            geometry: GeometryMode::Fixed,
            base_geometry: ArmGeometry::calibrated(),
            seed: 0,
            threads: None,
        }
    }
}

impl BenchmarkConfig {
    /// Feature kinds scored independently; more than one means score fusion.
    /// Fusion only applies to the fused kind: a position or angle run is a
    /// single stream whatever the fusion mode.
    fn streams(&self) -> Vec<FeatureKind> {
        match (self.features, self.fusion) {
            (FeatureKind::Fused, FusionMode::Score) => {
                vec![FeatureKind::Position, FeatureKind::Angle]
            }
            (kind, _) => vec![kind],
        }
    }

    /// Fusion mode actually applied, given the feature kind.
    pub fn effective_fusion(&self) -> FusionMode {
        match (self.features, self.fusion) {
            (FeatureKind::Fused, FusionMode::None) => FusionMode::Feature,
            (FeatureKind::Fused, f) => f,
            _ => FusionMode::None,
        }
    }

    /// Arm geometry for the signer with the given id.
    pub fn geometry_for(&self, signer_id: &str) -> ArmGeometry {
        match self.geometry {
            GeometryMode::Fixed => self.base_geometry,
            GeometryMode::Realistic => {
                sample_realistic_geometry(
                    &self.base_geometry,
                    signer_seed(self.seed, signer_id),
                    None,
                )
                .geometry
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialScores {
    pub genuine: Vec<f64>,
    pub random_forgery: Vec<f64>,
    pub skilled_forgery: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerScores {
    pub signer_id: String,
    pub scores: TrialScores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCounts {
    pub genuine: usize,
    pub random_forgery: usize,
    pub skilled_forgery: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EerEntry {
    pub feature_kind: FeatureKind,
    pub verifier: VerifierKind,
    pub fusion_mode: FusionMode,
    pub omega: f64,
    pub geometry_mode: GeometryMode,
    /// Percent.
    pub eer_rf: f64,
    /// Percent; absent when the dataset has no skilled forgeries.
    pub eer_sf: Option<f64>,
    pub score_counts: ScoreCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EerReport {
    pub dataset: String,
    pub seed: u64,
    pub entries: Vec<EerEntry>,
    pub signers: Vec<SignerScores>,
    #[serde(skip)]
    pub roc_rf: Vec<RocPoint>,
    #[serde(skip)]
    pub roc_sf: Vec<RocPoint>,
    /// Wall-clock time; kept out of serialized output so reports stay
    /// reproducible.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl EerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "feature_kind,verifier,fusion_mode,omega,geometry_mode,eer_rf,eer_sf,n_genuine,n_rf,n_sf\n",
        );
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                e.feature_kind,
                e.verifier,
                e.fusion_mode,
                e.omega,
                e.geometry_mode,
                e.eer_rf,
                e.eer_sf.map(|v| v.to_string()).unwrap_or_default(),
                e.score_counts.genuine,
                e.score_counts.random_forgery,
                e.score_counts.skilled_forgery,
            ));
        }
        out
    }

    /// Everything except timing, for reproducibility checks.
    pub fn same_results(&self, other: &EerReport) -> bool {
        self.dataset == other.dataset
            && self.seed == other.seed
            && self.entries == other.entries
            && self.signers == other.signers
            && self.roc_rf == other.roc_rf
            && self.roc_sf == other.roc_sf
    }
}

pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("threshold,far,frr\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.threshold, p.far, p.frr));
    }
    out
}

struct SignerFeatures {
    genuine: Vec<AnthroSequence>,
    forgeries: Vec<AnthroSequence>,
}

impl SignerFeatures {
    fn get(&self, r: &SigRef) -> &AnthroSequence {
        if r.genuine {
            &self.genuine[r.index]
        } else {
            &self.forgeries[r.index]
        }
    }
}

fn extract_signer(
    ds: &Dataset,
    signer: usize,
    cfg: &BenchmarkConfig,
) -> Result<SignerFeatures, EvalError> {
    let s = &ds.signers[signer];
    let g = cfg.geometry_for(&s.signer_id);
    let run = |list: &[SignatureTrajectory]| {
        list.iter()
            .map(|t| {
                extract_features(t, &g, &cfg.extraction).map_err(|source| EvalError::Extraction {
                    signer_id: t.signer_id.clone(),
                    signature_id: t.signature_id.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(SignerFeatures {
        genuine: run(&s.genuine)?,
        forgeries: run(&s.forgeries)?,
    })
}

fn matrix_of(seq: &AnthroSequence, kind: FeatureKind) -> Result<FeatureMatrix, VerifierError> {
    build_feature_matrix(seq, kind).map_err(|e| match e {
        FeatureError::TooShort { len, min } => VerifierError::TooShort { len, min },
        _ => VerifierError::EmptySequence,
    })
}

fn histogram_of(
    seq: &AnthroSequence,
    kind: FeatureKind,
    normal: Vec3,
) -> Result<HistogramVector, VerifierError> {
    let pos = || {
        position_histograms(
            &[
                ("elbow", &seq.elbow),
                ("wrist", &seq.wrist),
                ("finger", &seq.finger),
            ],
            normal,
        )
    };
    Ok(match kind {
        FeatureKind::Position => pos()?,
        FeatureKind::Angle => angle_histograms(&seq.angles)?,
        FeatureKind::Fused => fuse_histograms(&pos()?, &angle_histograms(&seq.angles)?),
    })
}

/// Enrols `split`'s references with `enroll`, then scores every trial with
/// `score`. `repr` builds the verifier's representation of one signature.
fn score_trials<R, T>(
    ds: &Dataset,
    split: &SignerSplit,
    repr: impl Fn(&SigRef) -> Result<R, VerifierError>,
    enroll: impl Fn(Vec<R>) -> Result<T, VerifierError>,
    score: impl Fn(&T, &R) -> Result<f64, VerifierError>,
) -> Result<TrialScores, EvalError> {
    let context = |r: &SigRef| {
        let t = r.resolve(ds);
        move |source| EvalError::Verification {
            signer_id: t.signer_id.clone(),
            signature_id: t.signature_id.clone(),
            source,
        }
    };
    let refs = split
        .enroll
        .iter()
        .map(|r| repr(r).map_err(context(r)))
        .collect::<Result<Vec<_>, _>>()?;
    let template = enroll(refs).map_err(|source| EvalError::Verification {
        signer_id: split.signer_id.clone(),
        signature_id: String::new(),
        source,
    })?;
    let run = |trials: &[SigRef]| {
        trials
            .iter()
            .map(|r| {
                repr(r)
                    .and_then(|q| score(&template, &q))
                    .map_err(context(r))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(TrialScores {
        genuine: run(&split.test_genuine)?,
        random_forgery: run(&split.rf_impostors)?,
        skilled_forgery: run(&split.sf_impostors)?,
    })
}

fn score_signer(
    ds: &Dataset,
    split: &SignerSplit,
    feats: &[SignerFeatures],
    cfg: &BenchmarkConfig,
    kind: FeatureKind,
) -> Result<TrialScores, EvalError> {
    let seq = |r: &SigRef| feats[r.signer].get(r);
    match cfg.verifier {
        VerifierKind::Dtw => score_trials(
            ds,
            split,
            |r| matrix_of(seq(r), kind),
            |refs| dtw_template(&split.signer_id, refs),
            |t, q| dtw_verify(t, q).map(|s| s.value),
        ),
        VerifierKind::Manhattan => {
            let normal = plane_rotation(cfg.extraction.gamma) * Vec3::z();
            score_trials(
                ds,
                split,
                |r| histogram_of(seq(r), kind, normal),
                |refs| manhattan_template(&split.signer_id, refs),
                |t, q| manhattan_score(t, q).map(|s| s.value),
            )
        }
    }
}

fn fuse_trials(p: &TrialScores, a: &TrialScores, omega: f64) -> TrialScores {
    let f = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .map(|(u, v)| fuse_scores(*u, *v, omega))
            .collect()
    };
    TrialScores {
        genuine: f(&p.genuine, &a.genuine),
        random_forgery: f(&p.random_forgery, &a.random_forgery),
        skilled_forgery: f(&p.skilled_forgery, &a.skilled_forgery),
    }
}

fn run_inner(ds: &Dataset, cfg: &BenchmarkConfig) -> Result<EerReport, EvalError> {
    let start = Instant::now();
    let splits = split_protocol(ds)?;
    let feats = (0..ds.signers.len())
        .into_par_iter()
        .map(|i| extract_signer(ds, i, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let streams = cfg.streams();
    let per_signer = splits
        .par_iter()
        .map(|split| {
            let parts = streams
                .iter()
                .map(|k| score_signer(ds, split, &feats, cfg, *k))
                .collect::<Result<Vec<_>, _>>()?;
            let scores = match parts.as_slice() {
                [one] => one.clone(),
                [p, a] => fuse_trials(p, a, cfg.extraction.fuse_omega),
                _ => unreachable!(),
            };
            Ok(SignerScores {
                signer_id: split.signer_id.clone(),
                scores,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let pool = |f: fn(&TrialScores) -> &Vec<f64>| -> Vec<f64> {
        per_signer
            .iter()
            .flat_map(|s| f(&s.scores).iter().copied())
            .collect()
    };
    let genuine = pool(|s| &s.genuine);
    let rf = pool(|s| &s.random_forgery);
    let sf = pool(|s| &s.skilled_forgery);

    let eer_rf = compute_eer(&genuine, &rf)?;
    let roc_rf = roc_points(&genuine, &rf)?;
    let (eer_sf, roc_sf) = if sf.is_empty() {
        (None, Vec::new())
    } else {
        (
            Some(compute_eer(&genuine, &sf)?),
            roc_points(&genuine, &sf)?,
        )
    };
    Ok(EerReport {
        dataset: ds.meta.name.clone(),
        seed: cfg.seed,
        entries: vec![EerEntry {
            feature_kind: cfg.features,
            verifier: cfg.verifier,
            fusion_mode: cfg.effective_fusion(),
            omega: cfg.extraction.fuse_omega,
            geometry_mode: cfg.geometry,
            eer_rf,
            eer_sf,
            score_counts: ScoreCounts {
                genuine: genuine.len(),
                random_forgery: rf.len(),
                skilled_forgery: sf.len(),
            },
        }],
        signers: per_signer,
        roc_rf,
        roc_sf,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the full protocol on `ds`: per-signer extraction, enrolment,
/// scoring of genuine, random-forgery and skilled-forgery trials, optional
/// fusion and pooled EER. Output depends only on `ds` and `cfg`, not on
/// thread count.
pub fn run_benchmark(ds: &Dataset, cfg: &BenchmarkConfig) -> Result<EerReport, EvalError> {
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| EvalError::ThreadPool(e.to_string()))?
            .install(|| run_inner(ds, cfg)),
        None => run_inner(ds, cfg),
    }
}
