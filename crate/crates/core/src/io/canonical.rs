use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{natural_cmp, IoError};
use crate::evaluation::{Dataset, DatasetMeta, SignerData};
use crate::trajectory::{Label, PenSample, SignatureTrajectory};

/// Dataset metadata file, `key=value` per line.
pub const META_FILE: &str = "dataset.meta";
/// Optional manifest listing `signer_id<TAB>genuine|forgery<TAB>relative path`.
pub const INDEX_FILE: &str = "index.tsv";

const REQUIRED: [&str; 5] = ["t_ms", "x", "y", "pressure", "pen_state"];
const ANGLES: [&str; 2] = ["azimuth_rad", "inclination_rad"];

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

/// Reads `dataset.meta` under `root`; a missing file gives defaults named
/// after the directory.
pub fn read_meta(root: &Path) -> Result<DatasetMeta, IoError> {
    let mut meta = DatasetMeta {
        name: root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        ..DatasetMeta::default()
    };
    let path = root.join(META_FILE);
    if !path.is_file() {
        return Ok(meta);
    }
    let text = read_text(&path)?;
    for (line, key, value) in
        super::parse_key_values(&text).map_err(|(l, r)| IoError::parse(&path, l, r))?
    {
        let number = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .ok_or_else(|| {
                    IoError::parse(&path, line, format!("{key} must be a positive number"))
                })
        };
        match key.as_str() {
            "name" => meta.name = value,
            "device" => meta.device = value,
            "units" => {
                meta.units = parse_units(&value)
                    .map_err(|r| IoError::parse(&path, line, r))?
                    .into()
            }
            "lines_per_mm" => meta.lines_per_mm = Some(number(&value)?),
            "sample_rate_hz" => meta.sample_rate_hz = Some(number(&value)?),
            _ => return Err(IoError::parse(&path, line, format!("unknown key {key:?}"))),
        }
    }
    Ok(meta)
}

pub fn write_meta(meta: &DatasetMeta, root: &Path) -> Result<(), IoError> {
    let mut s = format!(
        "name={}\ndevice={}\nunits={}\n",
        meta.name, meta.device, meta.units
    );
    if let Some(l) = meta.lines_per_mm {
        writeln!(s, "lines_per_mm={l}").unwrap();
    }
    if let Some(r) = meta.sample_rate_hz {
        writeln!(s, "sample_rate_hz={r}").unwrap();
    }
    let path = root.join(META_FILE);
    fs::write(&path, s).map_err(|e| IoError::io(&path, e))
}

fn parse_units(s: &str) -> Result<&'static str, String> {
    match s {
        "mm" => Ok("mm"),
        "lines" => Ok("lines"),
        _ => Err(format!("unknown units {s:?} (expected mm or lines)")),
    }
}

/// Millimetres per stored coordinate unit.
fn unit_factor(units: &str, meta: &DatasetMeta) -> Result<f64, String> {
    match units {
        "mm" => Ok(1.0),
        _ => meta
            .lines_per_mm
            .map(|l| 1.0 / l)
            .ok_or_else(|| "units are lines but dataset.meta declares no lines_per_mm".to_string()),
    }
}

fn parse_pen_state(s: &str) -> Option<bool> {
    match s {
        "1" | "down" => Some(true),
        "0" | "up" => Some(false),
        _ => None,
    }
}

/// Parses one canonical signature file. `file` is used for diagnostics only.
pub fn parse_signature(
    text: &str,
    file: &Path,
    meta: &DatasetMeta,
    signer_id: &str,
    signature_id: &str,
    label: Label,
) -> Result<SignatureTrajectory, IoError> {
    let err = |line: usize, reason: String| IoError::parse(file, line, reason);
    let mut columns: Option<[usize; 7]> = None;
    let mut n_cols = 0;
    let mut has_angles = false;
    let mut units = meta.units.clone();
    let mut samples: Vec<PenSample> = Vec::new();
    let mut factor = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('#') {
            let mut parts = header.split_whitespace();
            match parts.next() {
                Some("columns") => {
                    if !samples.is_empty() {
                        return Err(err(line, "#columns after data".into()));
                    }
                    let names: Vec<&str> = parts.collect();
                    let find = |n: &str| names.iter().position(|c| *c == n);
                    let mut idx = [usize::MAX; 7];
                    for (k, name) in REQUIRED.iter().enumerate() {
                        idx[k] = find(name)
                            .ok_or_else(|| err(line, format!("missing column {name}")))?;
                    }
                    match (find(ANGLES[0]), find(ANGLES[1])) {
                        (Some(a), Some(b)) => {
                            idx[5] = a;
                            idx[6] = b;
                            has_angles = true;
                        }
                        (None, None) => {}
                        _ => {
                            return Err(err(
                                line,
                                "azimuth and inclination must come together".into(),
                            ))
                        }
                    }
                    let mut seen = names.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    if seen.len() != names.len() {
                        return Err(err(line, "duplicate column".into()));
                    }
                    n_cols = names.len();
                    columns = Some(idx);
                }
                Some("units") => {
                    if !samples.is_empty() {
                        return Err(err(line, "#units after data".into()));
                    }
                    let u = parts.next().unwrap_or("");
                    units = parse_units(u).map_err(|r| err(line, r))?.into();
                }
                _ => {}
            }
            continue;
        }

        let idx = columns.ok_or_else(|| err(line, "data before #columns header".into()))?;
        let f = match factor {
            Some(f) => f,
            None => {
                let f = unit_factor(&units, meta).map_err(|r| err(line, r))?;
                factor = Some(f);
                f
            }
        };
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        let fields: Vec<&str> = if fields.len() == n_cols {
            fields
        } else {
            trimmed.split_whitespace().collect()
        };
        if fields.len() != n_cols {
            return Err(err(
                line,
                format!("expected {n_cols} fields, found {}", fields.len()),
            ));
        }
        let num = |k: usize| -> Result<f64, IoError> {
            let s = fields[idx[k]];
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    err(
                        line,
                        format!("{} is not a finite number: {s:?}", column_name(k)),
                    )
                })
        };
        let t = num(0)?;
        if let Some(prev) = samples.last() {
            if t <= prev.t {
                return Err(err(
                    line,
                    format!("timestamp {t} does not increase (previous {})", prev.t),
                ));
            }
        }
        let pen_down = parse_pen_state(fields[idx[4]]).ok_or_else(|| {
            err(
                line,
                format!("pen_state must be 0/1/up/down: {:?}", fields[idx[4]]),
            )
        })?;
        let (theta, phi) = if has_angles {
            (num(5)?, num(6)?)
        } else {
            (0.0, 0.0)
        };
        samples.push(PenSample {
            x: num(1)? * f,
            y: num(2)? * f,
            z: 0.0,
            pressure: num(3)?,
            t,
            theta,
            phi,
            pen_down,
        });
    }
    if columns.is_none() {
        return Err(err(1, "missing #columns header".into()));
    }
    if samples.is_empty() {
        return Err(err(text.lines().count().max(1), "no samples".into()));
    }
    let mut traj = SignatureTrajectory::new(signer_id, signature_id, label, samples);
    traj.has_angles = has_angles;
    Ok(traj)
}

fn column_name(k: usize) -> &'static str {
    if k < 5 {
        REQUIRED[k]
    } else {
        ANGLES[k - 5]
    }
}

/// Serializes a trajectory in canonical form, coordinates in mm. Numbers use
/// shortest round-trip formatting, so reading the output back is exact.
pub fn write_signature(traj: &SignatureTrajectory) -> String {
    let mut s = String::from("#columns t_ms x y pressure pen_state");
    if traj.has_angles {
        s.push_str(" azimuth_rad inclination_rad");
    }
    s.push_str("\n#units mm\n");
    for p in &traj.samples {
        write!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            p.t,
            p.x,
            p.y,
            p.pressure,
            u8::from(p.pen_down)
        )
        .unwrap();
        if traj.has_angles {
            write!(s, "\t{}\t{}", p.theta, p.phi).unwrap();
        }
        s.push('\n');
    }
    s
}

fn label_dir(label: Label) -> &'static str {
    match label {
        Label::Genuine => "genuine",
        Label::SkilledForgery => "forgery",
    }
}

/// Writes `ds` as a canonical `signer/<id>/{genuine,forgery}/*.tsv` tree.
/// Coordinates are stored in mm, so the written metadata drops any
/// lines-per-mm conversion.
pub fn write_dataset(ds: &Dataset, root: &Path) -> Result<(), IoError> {
    let meta = DatasetMeta {
        units: "mm".into(),
        lines_per_mm: None,
        ..ds.meta.clone()
    };
    fs::create_dir_all(root).map_err(|e| IoError::io(root, e))?;
    write_meta(&meta, root)?;
    for s in &ds.signers {
        for (label, sigs) in [
            (Label::Genuine, &s.genuine),
            (Label::SkilledForgery, &s.forgeries),
        ] {
            let dir = root
                .join("signer")
                .join(&s.signer_id)
                .join(label_dir(label));
            fs::create_dir_all(&dir).map_err(|e| IoError::io(&dir, e))?;
            for t in sigs.iter() {
                let path = dir.join(format!("{}.tsv", t.signature_id));
                fs::write(&path, write_signature(t)).map_err(|e| IoError::io(&path, e))?;
            }
        }
    }
    Ok(())
}

struct Job {
    signer: usize,
    label: Label,
    path: PathBuf,
    signature_id: String,
}

fn sorted_entries(dir: &Path, want_dir: bool) -> Result<Vec<(String, PathBuf)>, IoError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| IoError::io(dir, e))? {
        let entry = entry.map_err(|e| IoError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() != want_dir {
            continue;
        }
        if !want_dir && path.extension().and_then(|e| e.to_str()) != Some("tsv") {
            continue;
        }
        let name = if want_dir {
            entry.file_name().to_string_lossy().into_owned()
        } else {
            path.file_stem().unwrap().to_string_lossy().into_owned()
        };
        out.push((name, path));
    }
    out.sort_by(|a, b| natural_cmp(&a.0, &b.0));
    Ok(out)
}

fn jobs_from_tree(root: &Path, signer_ids: &mut Vec<String>) -> Result<Vec<Job>, IoError> {
    let mut jobs = Vec::new();
    for (signer_id, dir) in sorted_entries(&root.join("signer"), true)? {
        let signer = signer_ids.len();
        signer_ids.push(signer_id);
        for label in [Label::Genuine, Label::SkilledForgery] {
            let sub = dir.join(label_dir(label));
            if !sub.is_dir() {
                continue;
            }
            for (signature_id, path) in sorted_entries(&sub, false)? {
                jobs.push(Job {
                    signer,
                    label,
                    path,
                    signature_id,
                });
            }
        }
    }
    Ok(jobs)
}

fn jobs_from_index(
    root: &Path,
    index: &Path,
    signer_ids: &mut Vec<String>,
) -> Result<Vec<Job>, IoError> {
    let text = read_text(index)?;
    let mut jobs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [signer_id, label, rel] = fields[..] else {
            return Err(IoError::parse(
                index,
                i + 1,
                "expected signer_id, label, path",
            ));
        };
        let label = match label {
            "genuine" => Label::Genuine,
            "forgery" | "skilled_forgery" => Label::SkilledForgery,
            _ => {
                return Err(IoError::parse(
                    index,
                    i + 1,
                    format!("unknown label {label:?}"),
                ))
            }
        };
        let signer = match signer_ids.iter().position(|s| s == signer_id) {
            Some(k) => k,
            None => {
                signer_ids.push(signer_id.to_string());
                signer_ids.len() - 1
            }
        };
        let path = root.join(rel);
        let signature_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| rel.to_string());
        jobs.push(Job {
            signer,
            label,
            path,
            signature_id,
        });
    }
    Ok(jobs)
}

/// Loads a canonical dataset from `index.tsv` if present, otherwise from the
/// `signer/` tree. Signers and files are taken in natural order (or manifest
/// order); files are parsed in parallel.
pub fn load_canonical(root: &Path) -> Result<Dataset, IoError> {
    if !root.is_dir() {
        return Err(IoError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        ));
    }
    let meta = read_meta(root)?;
    let index = root.join(INDEX_FILE);
    let mut signer_ids = Vec::new();
    let jobs = if index.is_file() {
        jobs_from_index(root, &index, &mut signer_ids)?
    } else if root.join("signer").is_dir() {
        jobs_from_tree(root, &mut signer_ids)?
    } else {
        Vec::new()
    };
    if jobs.is_empty() {
        return Err(IoError::MissingManifest {
            path: root.to_path_buf(),
        });
    }

    let parsed: Vec<SignatureTrajectory> = jobs
        .par_iter()
        .map(|j| {
            let text = read_text(&j.path)?;
            parse_signature(
                &text,
                &j.path,
                &meta,
                &signer_ids[j.signer],
                &j.signature_id,
                j.label,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut signers: Vec<SignerData> = signer_ids
        .into_iter()
        .map(|signer_id| SignerData {
            signer_id,
            genuine: Vec::new(),
            forgeries: Vec::new(),
        })
        .collect();
    for (job, traj) in jobs.iter().zip(parsed) {
        let s = &mut signers[job.signer];
        match job.label {
            Label::Genuine => s.genuine.push(traj),
            Label::SkilledForgery => s.forgeries.push(traj),
        }
    }
    Ok(Dataset { meta, signers })
}
