use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schurlab"))
}

fn presets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn presets() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(presets_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .args(extra)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn small_dw(command: &str) -> Value {
    json!({
        "model": {"model": "damped_wave", "length": std::f64::consts::PI, "n_modes": 10,
                  "damping": {"kind": {"power": {"alpha": 1.0}}, "scale": 1.0}},
        "command": command,
        "output_dir": "unused",
        "seed": 42
    })
}

struct Row {
    re: f64,
    im: f64,
    method: String,
}

fn spectrum_rows(dir: &Path) -> Vec<Row> {
    let text = fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,residual,method,model,N"));
    lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            assert_eq!(c.len(), 6);
            Row {
                re: c[0].parse().unwrap(),
                im: c[1].parse().unwrap(),
                method: c[3].to_string(),
            }
        })
        .collect()
}

#[test]
fn compare_on_damped_wave_preset_matches_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&presets_dir().join("dw_const.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = spectrum_rows(tmp.path());
    let block: Vec<&Row> = rows.iter().filter(|r| r.method == "block_eig").collect();
    let nep: Vec<&Row> = rows.iter().filter(|r| r.method == "schur_nep").collect();
    assert_eq!(block.len(), 20);
    assert_eq!(nep.len(), block.len());
    for b in &block {
        let near = nep
            .iter()
            .map(|n| (n.re - b.re).hypot(n.im - b.im))
            .fold(f64::INFINITY, f64::min);
        assert!(near <= 1e-8);
    }
    let report = read_json(&tmp.path().join("report.json"));
    assert_eq!(report["verdict"], "PASS");
}

#[test]
fn negative_mode_count_is_a_field_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_dw("spectrum");
    cfg["model"]["n_modes"] = json!(-4);
    let p = write_config(tmp.path(), "bad.json", &cfg);
    let out = run(&p, &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_modes"), "{err}");
}

#[test]
fn unknown_keys_and_tolerances_are_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_dw("spectrum");
    cfg["model"]["dampnig"] = json!(1.0);
    let p = write_config(tmp.path(), "typo.json", &cfg);
    let out = run(&p, &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dampnig"));

    let p = write_config(tmp.path(), "ok.json", &small_dw("spectrum"));
    let out = run(&p, &tmp.path().join("o"), &["--tol", "speed=1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));
}

#[test]
fn verify_identities_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_config(tmp.path(), "ids.json", &small_dw("verify-identities"));
    let out_dir = tmp.path().join("o");
    let first = run(&p, &out_dir, &[]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let a = fs::read(out_dir.join("report.json")).unwrap();
    let second = run(&p, &out_dir, &[]);
    assert_eq!(second.status.code(), Some(0));
    let b = fs::read(out_dir.join("report.json")).unwrap();
    assert_eq!(a, b);
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["config"]["seed"], 42);
    assert!(!report["identities"]["rows"].as_array().unwrap().is_empty());
}

#[test]
fn failing_verdict_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &presets_dir().join("dw_const.json"),
        tmp.path(),
        &["--tol", "compare=1e-300"],
    );
    let report = read_json(&tmp.path().join("report.json"));
    let matching: f64 = report["summary"]["matching_max"].as_str().unwrap().parse().unwrap();
    assert!(matching > 1e-300);
    assert_eq!(report["verdict"], "FAIL");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pseudospectrum_writes_the_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = read_json(&presets_dir().join("kg_shift.json"));
    cfg["command"] = json!("pseudospectrum");
    cfg["model"]["n_hermite"] = json!(32);
    let p = write_config(tmp.path(), "ps.json", &cfg);
    let out = run(&p, &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("o/pseudospectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,sigma_min"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 25 * 25);
    assert!(values.iter().all(|v| *v > 0.0));
}

#[test]
fn presets_round_trip_and_run() {
    let tmp = tempfile::tempdir().unwrap();
    for preset in presets() {
        let name = preset.file_stem().unwrap().to_string_lossy().to_string();
        let out_dir = tmp.path().join(&name);
        let out = run(&preset, &out_dir, &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );

        // The echoed config re-serializes to the preset.
        let mut original = read_json(&preset);
        let report = read_json(&out_dir.join("report.json"));
        let mut echoed = report["config"].clone();
        original["output_dir"] = Value::Null;
        echoed["output_dir"] = Value::Null;
        assert_eq!(echoed, original, "{name}");
        echoed["output_dir"] = json!(out_dir);
        let again = write_config(tmp.path(), &format!("{name}.again.json"), &echoed);
        assert_eq!(run(&again, &out_dir, &[]).status.code(), Some(0), "{name}");
    }
}

#[test]
fn every_preset_passes_compare_at_default_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    for preset in presets() {
        let name = preset.file_stem().unwrap().to_string_lossy().to_string();
        let mut cfg = read_json(&preset);
        cfg["command"] = json!("compare");
        if let Some(t) = cfg.get_mut("tolerances").and_then(Value::as_object_mut) {
            t.remove("compare");
        }
        let p = write_config(tmp.path(), &format!("{name}.json"), &cfg);
        let out_dir = tmp.path().join(&name);
        let out = run(&p, &out_dir, &["--tol", "compare=1e-7"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(read_json(&out_dir.join("report.json"))["verdict"], "PASS", "{name}");
    }
}
