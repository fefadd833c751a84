//! `vsa`: feature extraction, round-trip validation, benchmarking and
//! bone-length sampling from the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vsa_core::evaluation::{
    roc_csv, roundtrip_validation, run_benchmark, signer_seed, snr_csv, synthetic_corpus, Dataset,
    EvalError, SnrRecord, SYNTHETIC_SEED,
};
use vsa_core::features::{
    build_feature_matrix, extract_features, sample_realistic_geometry, FeatureError,
};
use vsa_core::io::{load_dataset, write_dataset, IoError, RunConfig};
use vsa_core::kinematics::ArmGeometry;

#[derive(Parser)]
#[command(
    name = "vsa",
    version,
    about = "Anthropomorphic signature features via a virtual skeletal arm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Write one feature matrix per signature.
    Extract,
    /// Kinematic round trip of every signature; writes an SNR table.
    Validate,
    /// Run the verification protocol and write EER and ROC files.
    Benchmark,
    /// Draw per-signer bone lengths from the realistic model.
    #[command(alias = "sample_geometry")]
    SampleGeometry,
    /// Write the bundled synthetic corpus in canonical format.
    Synth {
        /// Corpus seed.
        #[arg(long, default_value_t = SYNTHETIC_SEED)]
        corpus_seed: u64,
    },
    /// Load a dataset in any supported format and write it in canonical format.
    Convert,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract => "extract",
            Command::Validate => "validate",
            Command::Benchmark => "benchmark",
            Command::SampleGeometry => "sample-geometry",
            Command::Synth { .. } => "synth",
            Command::Convert => "convert",
        }
    }
}

/// Run settings. A config file is applied first; flags override it.
#[derive(Args)]
struct Opts {
    /// Dataset directory; the synthetic corpus is used when absent.
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// canonical_tsv | svc_style
    #[arg(long, global = true)]
    format: Option<String>,
    /// position | angle | fused
    #[arg(long, global = true)]
    features: Option<String>,
    /// dtw | man
    #[arg(long, global = true)]
    verifier: Option<String>,
    /// none | feature | score
    #[arg(long, global = true)]
    fusion: Option<String>,
    /// Score-fusion weight of the position stream.
    #[arg(long, global = true)]
    omega: Option<String>,
    /// raw | smoothed | fixed
    #[arg(long = "pen-angles", global = true)]
    pen_angles: Option<String>,
    /// lift5mm | flat | flat-q6
    #[arg(long, global = true)]
    penup: Option<String>,
    /// 0.1 | 1 | 10
    #[arg(long, global = true)]
    scale: Option<String>,
    /// Writing-plane rotation rx,ry,rz in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// fixed | realistic
    #[arg(long, global = true)]
    geometry: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// key=value config file using the flag names as keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Keep only the first N signers.
    #[arg(long, global = true)]
    signers: Option<String>,
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("dataset", &self.dataset),
            ("format", &self.format),
            ("features", &self.features),
            ("verifier", &self.verifier),
            ("fusion", &self.fusion),
            ("omega", &self.omega),
            ("pen-angles", &self.pen_angles),
            ("penup", &self.penup),
            ("scale", &self.scale),
            ("gamma", &self.gamma),
            ("geometry", &self.geometry),
            ("seed", &self.seed),
            ("out", &self.out),
            ("threads", &self.threads),
            ("signers", &self.signers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    dataset: &'a str,
    signers: usize,
    signatures: usize,
    config: &'a RunConfig,
    outputs: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(rel.to_string());
        Ok(())
    }
}

fn load(cfg: &RunConfig) -> Result<Dataset> {
    let mut ds = match &cfg.dataset {
        Some(path) => load_dataset(path, cfg.format)
            .with_context(|| format!("loading dataset {}", path.display()))?,
        None => synthetic_corpus(SYNTHETIC_SEED),
    };
    if let Some(n) = cfg.signers {
        ds.signers.truncate(n);
    }
    log::info!(
        "dataset {}: {} signers, {} signatures",
        ds.meta.name,
        ds.signers.len(),
        ds.signature_count()
    );
    Ok(ds)
}

fn cmd_extract(ds: &Dataset, cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let bench = cfg.benchmark_config();
    for s in &ds.signers {
        let g = bench.geometry_for(&s.signer_id);
        for t in s.genuine.iter().chain(&s.forgeries) {
            let context = || format!("extracting {}/{}", t.signer_id, t.signature_id);
            let seq = extract_features(t, &g, &cfg.extraction).with_context(context)?;
            let m = build_feature_matrix(&seq, cfg.features).with_context(context)?;
            let mut text = format!("#channels {}\n", m.channel_names.join(" "));
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                text.push_str(&cells.join("\t"));
                text.push('\n');
            }
            out.write(
                &format!("features/{}/{}.tsv", t.signer_id, t.signature_id),
                text,
            )?;
        }
    }
    Ok(())
}

fn cmd_validate(ds: &Dataset, cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let bench = cfg.benchmark_config();
    let mut records: Vec<SnrRecord> = Vec::new();
    for s in &ds.signers {
        let one = Dataset {
            meta: ds.meta.clone(),
            signers: vec![s.clone()],
        };
        records.extend(roundtrip_validation(
            &one,
            &bench.geometry_for(&s.signer_id),
            &cfg.extraction,
        )?);
    }
    out.write("snr.csv", snr_csv(&records))?;
    let min = records
        .iter()
        .map(|r| r.snr_db)
        .fold(f64::INFINITY, f64::min);
    let mean = records.iter().map(|r| r.snr_db).sum::<f64>() / records.len().max(1) as f64;
    println!(
        "{}",
        serde_json::json!({ "signatures": records.len(), "min_snr_db": min, "mean_snr_db": mean })
    );
    Ok(())
}

fn cmd_benchmark(ds: &Dataset, cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let report = run_benchmark(ds, &cfg.benchmark_config())?;
    out.write("report.json", report.to_json() + "\n")?;
    out.write("report.csv", report.to_csv())?;
    out.write("roc_rf.csv", roc_csv(&report.roc_rf))?;
    if ds.has_forgeries() {
        out.write("roc_sf.csv", roc_csv(&report.roc_sf))?;
    }
    for e in &report.entries {
        log::info!(
            "{} {} {}: EER_RF {:.3}% EER_SF {} ({:.0} ms)",
            e.feature_kind,
            e.verifier,
            e.fusion_mode,
            e.eer_rf,
            e.eer_sf.map_or("-".into(), |v| format!("{v:.3}%")),
            report.runtime_ms
        );
    }
    println!("{}", report.to_csv().trim_end());
    Ok(())
}

fn cmd_sample_geometry(ds: &Dataset, cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let base = ArmGeometry::calibrated();
    let mut text = String::from("signer_id,gender,trunk,upper_arm,elbow_offset,forearm,hand\n");
    for s in &ds.signers {
        let sampled = sample_realistic_geometry(&base, signer_seed(cfg.seed, &s.signer_id), None);
        let g = sampled.geometry;
        writeln!(
            text,
            "{},{},{},{},{},{},{}",
            s.signer_id, sampled.gender, g.trunk, g.upper_arm, g.elbow_offset, g.forearm, g.hand
        )
        .unwrap();
    }
    out.write("geometry.csv", text)?;
    Ok(())
}

fn write_tree(ds: &Dataset, out: &mut Outputs) -> Result<()> {
    write_dataset(ds, &out.dir)?;
    out.written.push("dataset.meta".into());
    out.written.push("signer/".into());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.opts.resolve()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let ds = match &cli.command {
        Command::Synth { corpus_seed } => synthetic_corpus(*corpus_seed),
        _ => load(&cfg)?,
    };
    let mut out = Outputs::new(&cfg.out)?;
    match &cli.command {
        Command::Extract => cmd_extract(&ds, &cfg, &mut out)?,
        Command::Validate => cmd_validate(&ds, &cfg, &mut out)?,
        Command::Benchmark => cmd_benchmark(&ds, &cfg, &mut out)?,
        Command::SampleGeometry => cmd_sample_geometry(&ds, &cfg, &mut out)?,
        Command::Synth { .. } | Command::Convert => write_tree(&ds, &mut out)?,
    }
    // The manifest records the exact settings, never the time of the run.
    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        dataset: &ds.meta.name,
        signers: ds.signers.len(),
        signatures: ds.signature_count(),
        config: &cfg,
        outputs: out.written.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    out.write("manifest.json", json + "\n")?;
    out.write("run.conf", cfg.to_config_text())?;
    Ok(())
}

/// Machine-readable failure record.
fn error_record(err: &anyhow::Error) -> serde_json::Value {
    let kind = err
        .chain()
        .find_map(|e| {
            if let Some(e) = e.downcast_ref::<IoError>() {
                Some(e.kind())
            } else if let Some(e) = e.downcast_ref::<EvalError>() {
                Some(match e {
                    EvalError::InsufficientGenuine { .. } => "insufficient_genuine",
                    EvalError::Extraction { .. } => "extraction",
                    EvalError::Verification { .. } => "verification",
                    _ => "evaluation",
                })
            } else {
                e.downcast_ref::<FeatureError>().map(|_| "extraction")
            }
        })
        .unwrap_or("error");
    let mut record = serde_json::json!({
        "kind": kind,
        "message": err.to_string(),
        "causes": err.chain().skip(1).map(|e| e.to_string()).collect::<Vec<_>>(),
    });
    if let Some(IoError::Parse { file, line, reason }) =
        err.chain().find_map(|e| e.downcast_ref::<IoError>())
    {
        record["file"] = file.display().to_string().into();
        record["line"] = (*line).into();
        record["reason"] = reason.clone().into();
    }
    serde_json::json!({ "error": record })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_record(&err));
            ExitCode::FAILURE
        }
    }
}
