//! SVC2004-style exports: one `U<n>S<m>.TXT` file per signature, first line
//! the sample count, then `X Y T button [azimuth altitude pressure]` per
//! line with angles in degrees. Signatures 1–20 of a user are genuine, the
//! rest skilled forgeries.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{read_meta, IoError};
use crate::evaluation::{Dataset, SignerData};
use crate::trajectory::{Label, PenSample, SignatureTrajectory};

pub const SVC_GENUINE_PER_SIGNER: u32 = 20;

/// `U12S3.txt` → (12, 3), case-insensitive.
fn parse_name(name: &str) -> Option<(u32, u32)> {
    let upper = name.to_ascii_uppercase();
    let stem = upper.strip_suffix(".TXT")?.strip_prefix('U')?;
    let (u, s) = stem.split_once('S')?;
    Some((u.parse().ok()?, s.parse().ok()?))
}

/// Parses one SVC-style file. Coordinates are multiplied by `mm_per_unit`.
pub fn parse_svc_signature(
    text: &str,
    file: &Path,
    mm_per_unit: f64,
    signer_id: &str,
    signature_id: &str,
    label: Label,
) -> Result<SignatureTrajectory, IoError> {
    let err = |line: usize, reason: String| IoError::parse(file, line, reason);
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (first, count) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| err(first + 1, format!("sample count expected, found {count:?}")))?;

    let mut samples: Vec<PenSample> = Vec::with_capacity(count);
    let mut n_fields = None;
    for (i, raw) in lines {
        let line = i + 1;
        let v: Vec<f64> = raw
            .split_whitespace()
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| err(line, format!("non-numeric field in {raw:?}")))?;
        if v.len() != 4 && v.len() != 7 {
            return Err(err(
                line,
                format!("expected 4 or 7 fields, found {}", v.len()),
            ));
        }
        if *n_fields.get_or_insert(v.len()) != v.len() {
            return Err(err(line, "field count changes within the file".into()));
        }
        let t = v[2];
        if let Some(prev) = samples.last() {
            if t <= prev.t {
                return Err(err(
                    line,
                    format!("timestamp {t} does not increase (previous {})", prev.t),
                ));
            }
        }
        let pen_down = v[3] != 0.0;
        let (theta, phi, pressure) = if v.len() == 7 {
            (v[4].to_radians(), v[5].to_radians(), v[6])
        } else {
            (0.0, 0.0, v[3])
        };
        samples.push(PenSample {
            x: v[0] * mm_per_unit,
            y: v[1] * mm_per_unit,
            z: 0.0,
            pressure,
            t,
            theta,
            phi,
            pen_down,
        });
    }
    if samples.len() != count {
        return Err(err(
            first + 1,
            format!(
                "header declares {count} samples, file has {}",
                samples.len()
            ),
        ));
    }
    if samples.is_empty() {
        return Err(err(first + 1, "no samples".into()));
    }
    let mut traj = SignatureTrajectory::new(signer_id, signature_id, label, samples);
    traj.has_angles = n_fields == Some(7);
    Ok(traj)
}

/// Loads every `U<n>S<m>.TXT` file under `root`. Signers are ordered by `n`
/// and signatures by `m`. Coordinates are converted with `lines_per_mm` from
/// `dataset.meta`; without one they are kept in device units.
pub fn load_svc(root: &Path) -> Result<Dataset, IoError> {
    let mut meta = read_meta(root)?;
    if meta.lines_per_mm.is_none() {
        log::warn!(
            "{}: no lines_per_mm in dataset.meta, coordinates stay in device units",
            root.display()
        );
        meta.units = "lines".into();
    }
    let mm_per_unit = meta.lines_per_mm.map_or(1.0, |l| 1.0 / l);

    let mut files = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| IoError::io(root, e))? {
        let entry = entry.map_err(|e| IoError::io(root, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(key) = parse_name(&name) {
            files.push((key, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(IoError::MissingManifest {
            path: root.to_path_buf(),
        });
    }
    files.sort_by_key(|f| f.0);

    let parsed: Vec<SignatureTrajectory> = files
        .par_iter()
        .map(|((u, s), path)| {
            let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
            let label = if *s <= SVC_GENUINE_PER_SIGNER {
                Label::Genuine
            } else {
                Label::SkilledForgery
            };
            parse_svc_signature(
                &text,
                path,
                mm_per_unit,
                &format!("U{u}"),
                &format!("S{s}"),
                label,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut signers: Vec<SignerData> = Vec::new();
    for (((u, _), _), traj) in files.iter().zip(parsed) {
        let id = format!("U{u}");
        if signers.last().map_or(true, |s| s.signer_id != id) {
            signers.push(SignerData {
                signer_id: id,
                genuine: Vec::new(),
                forgeries: Vec::new(),
            });
        }
        let s = signers.last_mut().unwrap();
        match traj.label {
            Label::Genuine => s.genuine.push(traj),
            Label::SkilledForgery => s.forgeries.push(traj),
        }
    }
    Ok(Dataset { meta, signers })
}
