use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsa"))
        .args(args)
        .output()
        .expect("vsa runs")
}

fn ok(args: &[&str]) -> Output {
    let out = vsa(args);
    assert!(
        out.status.success(),
        "vsa {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn eers(report: &Value) -> Vec<(Value, Value)> {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["eer_rf"].clone(), e["eer_sf"].clone()))
        .collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn omega_one_matches_position_only() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("fused"), dir.path().join("position"));
    ok(&[
        "benchmark",
        "--signers",
        "8",
        "--omega",
        "1.0",
        "--out",
        path(&a),
    ]);
    ok(&[
        "benchmark",
        "--signers",
        "8",
        "--features",
        "position",
        "--out",
        path(&b),
    ]);
    let (ra, rb) = (json(&a.join("report.json")), json(&b.join("report.json")));
    assert_eq!(eers(&ra), eers(&rb));
    assert_eq!(ra["signers"], rb["signers"]);
    for roc in ["roc_rf.csv", "roc_sf.csv"] {
        assert_eq!(
            fs::read(a.join(roc)).unwrap(),
            fs::read(b.join(roc)).unwrap()
        );
    }
    assert_eq!(ra["entries"][0]["fusion_mode"], "score");
    assert_eq!(rb["entries"][0]["fusion_mode"], "none");
}

#[test]
fn validate_synthetic_corpus_above_60_db() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["validate", "--out", path(dir.path())]);
    let table = fs::read_to_string(dir.path().join("snr.csv")).unwrap();
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let snr: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(snr >= 60.0, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 400);
}

#[test]
fn sample_geometry_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["sample_geometry", "--seed", "7", "--out", path(&a)]);
    ok(&["sample-geometry", "--seed", "7", "--out", path(&b)]);
    let ga = fs::read(a.join("geometry.csv")).unwrap();
    assert_eq!(ga, fs::read(b.join("geometry.csv")).unwrap());
    let text = String::from_utf8(ga).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(4) == Some("1")));

    let c = dir.path().join("c");
    ok(&["sample-geometry", "--seed", "8", "--out", path(&c)]);
    assert_ne!(
        fs::read(a.join("geometry.csv")).unwrap(),
        fs::read(c.join("geometry.csv")).unwrap()
    );
}

#[test]
fn failure_prints_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = vsa(&[
        "benchmark",
        "--dataset",
        path(&empty),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "missing_manifest");

    let bad = dir.path().join("bad");
    let sig = bad.join("signer/u1/genuine");
    fs::create_dir_all(&sig).unwrap();
    fs::write(
        sig.join("s1.tsv"),
        "#columns t_ms x y pressure pen_state\n0\t0\t0\t1\t1\n20\t1\t0\t1\t1\n10\t2\t0\t1\t1\n",
    )
    .unwrap();
    let out = vsa(&[
        "extract",
        "--dataset",
        path(&bad),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "parse");
    assert_eq!(record["error"]["line"], 4);
    assert!(record["error"]["file"]
        .as_str()
        .unwrap()
        .ends_with("s1.tsv"));

    let out = vsa(&["benchmark", "--verifier", "svm"]);
    assert!(!out.status.success());
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "invalid_value");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        "# settings\nverifier=man\nomega=0.7\nsigners=3\nseed=5\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    ok(&[
        "benchmark",
        "--config",
        path(&conf),
        "--omega",
        "0.2",
        "--out",
        path(&out),
    ]);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["extraction"]["fuse_omega"], 0.2);
    assert_eq!(m["config"]["verifier"], "manhattan");
    assert_eq!(m["config"]["seed"], 5);
    assert_eq!(m["signers"], 3);
    let outputs: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(outputs.contains(&"report.json") && outputs.contains(&"roc_sf.csv"));

    // The written run.conf reproduces the run.
    let again = dir.path().join("again");
    ok(&[
        "benchmark",
        "--config",
        path(&out.join("run.conf")),
        "--out",
        path(&again),
    ]);
    assert_eq!(
        fs::read(out.join("report.json")).unwrap(),
        fs::read(again.join("report.json")).unwrap()
    );
}

#[test]
fn synth_then_load_matches_bundled_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["synth", "--out", path(&corpus)]);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "benchmark",
        "--verifier",
        "man",
        "--signers",
        "5",
        "--out",
        path(&a),
    ]);
    ok(&[
        "benchmark",
        "--verifier",
        "man",
        "--signers",
        "5",
        "--dataset",
        path(&corpus),
        "--out",
        path(&b),
    ]);
    assert_eq!(
        eers(&json(&a.join("report.json"))),
        eers(&json(&b.join("report.json")))
    );
    assert_eq!(
        fs::read(a.join("roc_rf.csv")).unwrap(),
        fs::read(b.join("roc_rf.csv")).unwrap()
    );
}

#[test]
fn svc_export_through_canonical_format() {
    let dir = tempfile::tempdir().unwrap();
    let svc = dir.path().join("svc");
    fs::create_dir(&svc).unwrap();
    fs::write(
        svc.join("dataset.meta"),
        "name=svc-mini\nunits=lines\nlines_per_mm=10\n",
    )
    .unwrap();
    for u in 1..=2 {
        for s in [1, 2, 3, 4, 5, 6, 7, 21, 22] {
            let mut text = String::from("40\n");
            for i in 0..40 {
                let t = i as f64 / 39.0;
                let wobble = (u * 7 + s) as f64 * 0.3;
                let x = 300.0 * t
                    + 40.0 * (6.0 * t + wobble).sin()
                    + if s > 20 { 25.0 * t * t } else { 0.0 };
                let y = 80.0 * (4.0 * t * u as f64).cos();
                let down = u8::from(i % 13 != 12);
                text.push_str(&format!(
                    "{} {} {} {} 120 60 {}\n",
                    x.round(),
                    y.round(),
                    10 * i,
                    down,
                    300 * down as u32
                ));
            }
            fs::write(svc.join(format!("U{u}S{s}.TXT")), text).unwrap();
        }
    }
    let canon = dir.path().join("canon");
    ok(&[
        "convert",
        "--dataset",
        path(&svc),
        "--format",
        "svc_style",
        "--out",
        path(&canon),
    ]);
    assert!(canon.join("signer/U1/forgery/S21.tsv").is_file());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "benchmark",
        "--dataset",
        path(&svc),
        "--format",
        "svc",
        "--out",
        path(&a),
    ]);
    ok(&["benchmark", "--dataset", path(&canon), "--out", path(&b)]);
    let (ra, rb) = (json(&a.join("report.json")), json(&b.join("report.json")));
    assert_eq!(eers(&ra), eers(&rb));
    assert!(ra["entries"][0]["eer_sf"].is_number());
}

#[test]
fn extract_writes_fused_matrices() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["extract", "--signers", "1", "--out", path(dir.path())]);
    let f = fs::read_to_string(dir.path().join("features/s001/g01.tsv")).unwrap();
    let header = f.lines().next().unwrap();
    assert_eq!(header.split_whitespace().count(), 1 + 45);
    assert!(f.lines().skip(1).all(|l| l.split('\t').count() == 45));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 20);
}
