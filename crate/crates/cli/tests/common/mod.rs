//! Helpers shared by the CLI test targets.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use kiq_core::spectro::ResonanceModel;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Golden payloads agree to this relative tolerance.
pub const GOLDEN_RTOL: f64 = 1e-9;

pub const REGEN_VAR: &str = "KIQ_REGEN_GOLDEN";

pub fn golden_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Runs `kiq <command> --config <config> --out-dir <out> [extra...]` in process.
pub fn kiq(command: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args: Vec<String> = vec![
        "kiq".into(),
        command.into(),
        "--config".into(),
        config.display().to_string(),
        "--out-dir".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    kiq_cli::run(args)
}

/// Writes `json` to `dir/name` and returns the path.
pub fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

pub fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

/// Envelope with the timestamp removed.
pub fn envelope_sans_time(dir: &Path) -> serde_json::Value {
    let mut v = read_json(&dir.join("envelope.json"));
    v.as_object_mut().unwrap().remove("timestamp_utc");
    v
}

fn close(a: f64, e: f64) -> bool {
    a == e || (a - e).abs() <= GOLDEN_RTOL * a.abs().max(e.abs())
}

/// Structural JSON comparison; numbers within `GOLDEN_RTOL`, timestamps skipped.
pub fn json_diff(path: &str, actual: &serde_json::Value, expected: &serde_json::Value) -> Option<String> {
    use serde_json::Value::{Array, Number, Object};
    match (actual, expected) {
        (Number(a), Number(e)) => {
            let (a, e) = (a.as_f64().unwrap(), e.as_f64().unwrap());
            (!close(a, e)).then(|| format!("{path}: {a} != {e}"))
        }
        (Array(a), Array(e)) => {
            if a.len() != e.len() {
                return Some(format!("{path}: length {} != {}", a.len(), e.len()));
            }
            a.iter()
                .zip(e)
                .enumerate()
                .find_map(|(i, (x, y))| json_diff(&format!("{path}[{i}]"), x, y))
        }
        (Object(a), Object(e)) => {
            let keys = |m: &serde_json::Map<String, serde_json::Value>| {
                m.keys().filter(|k| *k != "timestamp_utc").cloned().collect::<Vec<_>>()
            };
            if keys(a) != keys(e) {
                return Some(format!("{path}: keys {:?} != {:?}", keys(a), keys(e)));
            }
            keys(a)
                .iter()
                .find_map(|k| json_diff(&format!("{path}.{k}"), &a[k], &e[k]))
        }
        _ => (actual != expected).then(|| format!("{path}: {actual} != {expected}")),
    }
}

/// Cell-wise CSV comparison; numeric cells within `GOLDEN_RTOL`.
pub fn csv_diff(actual: &str, expected: &str) -> Option<String> {
    let (a, e): (Vec<&str>, Vec<&str>) = (actual.lines().collect(), expected.lines().collect());
    if a.len() != e.len() {
        return Some(format!("{} lines != {}", a.len(), e.len()));
    }
    for (i, (la, le)) in a.iter().zip(&e).enumerate() {
        let (ca, ce): (Vec<&str>, Vec<&str>) = (la.split(',').collect(), le.split(',').collect());
        if ca.len() != ce.len() {
            return Some(format!("line {}: {la} != {le}", i + 1));
        }
        for (x, y) in ca.iter().zip(&ce) {
            let same = match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(p), Ok(q)) => close(p, q),
                _ => x == y,
            };
            if !same {
                return Some(format!("line {}: {la} != {le}", i + 1));
            }
        }
    }
    None
}

pub fn file_diff(actual: &Path, expected: &Path) -> Option<String> {
    let a = match fs::read_to_string(actual) {
        Ok(s) => s,
        Err(e) => return Some(format!("{}: {e}", actual.display())),
    };
    let e = fs::read_to_string(expected).unwrap();
    let name = expected.file_name().unwrap().to_string_lossy().to_string();
    if name.ends_with(".json") {
        let (a, e): (serde_json::Value, serde_json::Value) =
            (serde_json::from_str(&a).unwrap(), serde_json::from_str(&e).unwrap());
        json_diff(&name, &a, &e)
    } else {
        csv_diff(&a, &e).map(|d| format!("{name}: {d}"))
    }
}

/// The resonator used for trace fixtures.
pub fn device() -> ResonanceModel {
    ResonanceModel {
        f_r: 7.8e9,
        q_i: 1e5,
        q_c: 2.5e4,
        phi0: -0.15,
        amp: 0.05,
        alpha: 2.5,
        delay: 60e-9,
    }
}

/// `n` points over `+- linewidths` half-widths with 40 dB SNR quadrature noise.
pub fn noisy_trace_csv(m: &ResonanceModel, linewidths: f64, n: usize, seed: u64) -> String {
    let w = m.f_r / m.q_l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, m.amp * 1e-2).unwrap();
    let mut out = String::from("freq_Hz,re,im\n");
    for i in 0..n {
        let f = m.f_r + w * linewidths * (2.0 * i as f64 / (n - 1) as f64 - 1.0);
        let z = m.s21(f) + Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng));
        out.push_str(&format!("{f},{},{}\n", z.re, z.im));
    }
    out
}

/// Generated inputs that golden cases read; rebuilt only on regeneration.
const TRACE_FIXTURE: &str = "fitres_40dB/trace.csv";

pub struct CaseReport {
    pub name: String,
    pub failures: Vec<String>,
}

/// Runs every case under `tests/golden`, comparing against (or, with
/// `KIQ_REGEN_GOLDEN=1`, rewriting) its `expected/` directory.
///
/// Synthesize cases run first since extract cases read their outputs.
pub fn run_golden_suite() -> Vec<CaseReport> {
    let root = golden_root();
    let regen = std::env::var(REGEN_VAR).is_ok_and(|v| v == "1");
    if regen {
        fs::write(root.join(TRACE_FIXTURE), noisy_trace_csv(&device(), 3.0, 2001, 1)).unwrap();
    }
    let mut cases: Vec<String> = fs::read_dir(&root)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().join("config.json").exists())
        .map(|e| e.file_name().to_string_lossy().to_string())
        .collect();
    cases.sort_by_key(|c| (!c.starts_with("synthesize"), c.clone()));

    let scratch = tempfile::tempdir().unwrap();
    cases
        .into_iter()
        .map(|name| {
            let dir = root.join(&name);
            let command = name.split('_').next().unwrap().to_string();
            let out = scratch.path().join(&name);
            let expected = dir.join("expected");
            let code = kiq(&command, &dir.join("config.json"), &out, &[]);
            let mut failures = Vec::new();
            if code != 0 {
                failures.push(format!("exit code {code}"));
            } else if regen {
                fs::create_dir_all(&expected).unwrap();
                for f in fs::read_dir(&out).unwrap() {
                    let f = f.unwrap();
                    fs::copy(f.path(), expected.join(f.file_name())).unwrap();
                }
            } else {
                let mut files: Vec<PathBuf> = fs::read_dir(&expected)
                    .unwrap()
                    .map(|e| e.unwrap().path())
                    .collect();
                files.sort();
                for e in files {
                    if let Some(d) = file_diff(&out.join(e.file_name().unwrap()), &e) {
                        failures.push(d);
                    }
                }
            }
            CaseReport { name, failures }
        })
        .collect()
}
