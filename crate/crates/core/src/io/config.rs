use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::evaluation::{BenchmarkConfig, FusionMode, GeometryMode, VerifierKind};
use crate::features::{ExtractionConfig, FeatureKind, ParseEnumError};
use crate::kinematics::ArmGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    CanonicalTsv,
    SvcStyle,
}

impl FromStr for DatasetFormat {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" | "canonical_tsv" | "canonical-tsv" | "tsv" => Ok(Self::CanonicalTsv),
            "svc" | "svc_style" | "svc-style" => Ok(Self::SvcStyle),
            _ => Err(ParseEnumError {
                what: "dataset format",
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CanonicalTsv => "canonical_tsv",
            Self::SvcStyle => "svc_style",
        })
    }
}

/// Keys accepted by [`RunConfig::set`]; CLI flags use the same names.
pub const CONFIG_KEYS: &[&str] = &[
    "dataset",
    "format",
    "features",
    "verifier",
    "fusion",
    "omega",
    "pen-angles",
    "theta",
    "phi",
    "penup",
    "scale",
    "gamma",
    "geometry",
    "seed",
    "out",
    "threads",
    "signers",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub extraction: ExtractionConfig,
    pub verifier: VerifierKind,
    pub features: FeatureKind,
    pub fusion: FusionMode,
    pub geometry: GeometryMode,
    pub seed: u64,
    /// `None` selects the bundled synthetic corpus.
    pub dataset: Option<PathBuf>,
    pub format: DatasetFormat,
    pub out: PathBuf,
    pub threads: Option<usize>,
    /// Keep only the first `n` signers.
    pub signers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = BenchmarkConfig::default();
        Self {
            extraction: b.extraction,
            verifier: b.verifier,
            features: b.features,
            fusion: b.fusion,
            geometry: b.geometry,
            seed: b.seed,
            dataset: None,
            format: DatasetFormat::CanonicalTsv,
            out: PathBuf::from("out"),
            threads: None,
            signers: None,
        }
    }
}

fn invalid(key: &str, value: &str, reason: impl fmt::Display) -> IoError {
    IoError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: reason.to_string(),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, IoError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| invalid(key, value, e))
}

fn finite(key: &str, value: &str) -> Result<f64, IoError> {
    let v: f64 = parse(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, value, "not finite"))
    }
}

fn positive(key: &str, value: &str) -> Result<usize, IoError> {
    match parse::<usize>(key, value)? {
        0 => Err(invalid(key, value, "must be at least 1")),
        n => Ok(n),
    }
}

impl RunConfig {
    /// Applies one `key=value` setting. Underscores in keys are accepted in
    /// place of dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), IoError> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let k = key.as_str();
        match k {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "format" => self.format = parse(k, value)?,
            "features" => self.features = parse(k, value)?,
            "verifier" => self.verifier = parse(k, value)?,
            "fusion" => self.fusion = parse(k, value)?,
            "omega" => {
                let w = finite(k, value)?;
                if !(0.0..=1.0).contains(&w) {
                    return Err(invalid(k, value, "must lie in [0, 1]"));
                }
                self.extraction.fuse_omega = w;
            }
            "pen-angles" => self.extraction.pen_angle_mode = parse(k, value)?,
            "theta" => self.extraction.fixed_theta = finite(k, value)?,
            "phi" => self.extraction.fixed_phi = finite(k, value)?,
            "penup" => self.extraction.penup_mode = parse(k, value)?,
            "scale" => self.extraction.scale = parse(k, value)?,
            "gamma" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(invalid(k, value, "expected rx,ry,rz"));
                }
                for (g, p) in self.extraction.gamma.iter_mut().zip(&parts) {
                    *g = finite(k, p)?;
                }
            }
            "geometry" => self.geometry = parse(k, value)?,
            "seed" => self.seed = parse(k, value)?,
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = Some(positive(k, value)?),
            "signers" => self.signers = Some(positive(k, value)?),
            _ => return Err(IoError::UnknownKey { key }),
        }
        Ok(())
    }

    /// Applies every setting of a `key=value` config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), IoError> {
        let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        let pairs =
            parse_key_values(&text).map_err(|(line, reason)| IoError::parse(path, line, reason))?;
        for (line, key, value) in pairs {
            self.set(&key, &value).map_err(|e| match e {
                IoError::UnknownKey { .. } | IoError::InvalidValue { .. } => {
                    IoError::parse(path, line, e.to_string())
                }
                e => e,
            })?;
        }
        Ok(())
    }

    /// Settings as `key=value` text accepted back by [`RunConfig::apply_file`].
    pub fn to_config_text(&self) -> String {
        let e = &self.extraction;
        let mut lines = vec![
            format!("format={}", self.format),
            format!("features={}", self.features),
            format!("verifier={}", self.verifier),
            format!("fusion={}", self.fusion),
            format!("omega={}", e.fuse_omega),
            format!("pen-angles={}", e.pen_angle_mode),
            format!("theta={}", e.fixed_theta),
            format!("phi={}", e.fixed_phi),
            format!("penup={}", e.penup_mode),
            format!("scale={}", e.scale),
            format!("gamma={},{},{}", e.gamma[0], e.gamma[1], e.gamma[2]),
            format!("geometry={}", self.geometry),
            format!("seed={}", self.seed),
            format!("out={}", self.out.display()),
        ];
        if let Some(d) = &self.dataset {
            lines.insert(0, format!("dataset={}", d.display()));
        }
        if let Some(t) = self.threads {
            lines.push(format!("threads={t}"));
        }
        if let Some(s) = self.signers {
            lines.push(format!("signers={s}"));
        }
        lines.join("\n") + "\n"
    }

    pub fn benchmark_config(&self) -> BenchmarkConfig {
        BenchmarkConfig {
            extraction: self.extraction,
            verifier: self.verifier,
            features: self.features,
            fusion: self.fusion,
            geometry: self.geometry,
            base_geometry: ArmGeometry::calibrated(),
            seed: self.seed,
            threads: self.threads,
        }
    }
}

/// `(line, key, value)`.
pub type KeyValue = (usize, String, String);

/// Splits `key=value` lines, skipping blanks and `#` comments. Returns
/// `(line, key, value)` triples, or the offending line and a reason.
pub fn parse_key_values(text: &str) -> Result<Vec<KeyValue>, (usize, String)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| (i + 1, format!("expected key=value, found {line:?}")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err((i + 1, "empty key".into()));
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}
