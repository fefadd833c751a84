//! Dataset ingestion, serialization and run configuration.
//!
//! The canonical on-disk format is one tab-separated file per signature
//! (tabs shown as spaces):
//!
//! ```text
//! #columns t_ms x y pressure pen_state azimuth_rad inclination_rad
//! #units mm
//! 0  12.5  3.25  0.61  1  1.0471975511965976  2.356194490192345
//! ```
//!
//! The angle columns are optional. `#units lines` coordinates are divided by
//! `lines_per_mm` from the dataset's `dataset.meta` file.

mod canonical;
mod config;
mod svc;

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use canonical::{
    load_canonical, parse_signature, read_meta, write_dataset, write_meta, write_signature,
    INDEX_FILE, META_FILE,
};
pub use config::{parse_key_values, DatasetFormat, KeyValue, RunConfig, CONFIG_KEYS};
pub use svc::{load_svc, parse_svc_signature, SVC_GENUINE_PER_SIGNER};

use crate::evaluation::Dataset;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {reason}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("no signer/ tree, index manifest or signature files under {}", path.display())]
    MissingManifest { path: PathBuf },
    #[error("unknown config key {key:?}")]
    UnknownKey { key: String },
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(file: &Path, line: usize, reason: impl Into<String>) -> Self {
        Self::Parse {
            file: file.to_path_buf(),
            line,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Parse { .. } => "parse",
            Self::MissingManifest { .. } => "missing_manifest",
            Self::UnknownKey { .. } => "unknown_key",
            Self::InvalidValue { .. } => "invalid_value",
        }
    }
}

/// Loads a dataset directory in the given format.
pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Dataset, IoError> {
    match format {
        DatasetFormat::CanonicalTsv => load_canonical(path),
        DatasetFormat::SvcStyle => load_svc(path),
    }
}

/// Orders strings with embedded numbers numerically: `s2 < s10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let da = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let db = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let (na, nb) = (trim_zeros(&a[..da]), trim_zeros(&b[..db]));
                let ord = na.len().cmp(&nb.len()).then(na.cmp(nb)).then(da.cmp(&db));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[da..];
                b = &b[db..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|&&c| c == b'0').count();
    &d[k..]
}
