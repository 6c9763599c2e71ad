//! 100 seeded random configs per command; every output must parse back into
//! its domain type with the type's invariants intact.

mod common;

use std::fs;
use std::path::Path;

use common::*;
use kiq_cli::commands::decay::DecayRecord;
use kiq_cli::commands::extract::ExtractionRecord;
use kiq_cli::commands::fitres::ResonanceRecord;
use kiq_cli::commands::twotone::Ridge;
use kiq_core::io::{read_sweep_file, SWEEP_HEADER};
use kiq_core::spectro::ResonanceModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const CASES: u64 = 100;

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let body = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn write(dir: &Path, v: serde_json::Value) -> std::path::PathBuf {
    write_config(dir, "config.json", &serde_json::to_string_pretty(&v).unwrap())
}

#[test]
fn fuzz_fig4() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let nd = rng.random_range(1..4);
        let mut d: Vec<f64> = (0..nd).map(|_| rng.random_range(5.0..120.0)).collect();
        d.sort_by(f64::total_cmp);
        let b: Vec<f64> = (0..rng.random_range(1..3)).map(|_| rng.random_range(10.0..1400.0)).collect();
        let cfg = write(
            tmp.path(),
            json!({
                "circuit": {
                    "E_J_GHz": rng.random_range(3.0..25.0),
                    "E_C_GHz": rng.random_range(1.0..5.0),
                    "E_L_GHz": rng.random_range(0.5..2.0),
                    "phi_ext_frac": rng.random_range(0.3..0.7),
                },
                "moment_muB": rng.random_range(1.0..20.0),
                "d_nm": d, "B_par_mT": b,
                "grid_n": rng.random_range(2..6),
                "lateral_offset_nm": [rng.random_range(-5.0..5.0), 0.0],
                "basis_dim": 60,
            }),
        );
        let out = tmp.path().join("o");
        assert_eq!(kiq("fig4", &cfg, &out, &[]), 0, "case {case}");
        let (header, body) = rows(&out.join("fig4c.csv"));
        assert_eq!(header, ["d_nm", "B_par_mT", "delta_fq_Hz"]);
        assert_eq!(body.len(), nd * b.len(), "case {case}");
        for r in &body {
            assert!(num(&r[0]) >= 0.0 && num(&r[1]).is_finite());
            assert!(num(&r[2]).is_finite(), "case {case}: {r:?}");
        }
    }
}

fn random_synthesis(rng: &mut ChaCha8Rng) -> serde_json::Value {
    let n = rng.random_range(40..200);
    json!({
        "g": rng.random_range(1.7..2.1),
        "T_S_K": rng.random_range(0.03..0.15),
        "saturation_shift_Hz": log_uniform(rng, 1e5, 5e6),
        "c2_Hz_per_T2": -log_uniform(rng, 1e6, 5e7),
        "f_r0_Hz": rng.random_range(5e9..9e9),
        "B_par_T": {"start": 0.0, "stop": rng.random_range(0.55..0.8), "n": n},
        "noise_Hz": log_uniform(rng, 1.0, 3e3),
        "seed": rng.random::<u64>(),
    })
}

#[test]
fn fuzz_synthesize() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let v = random_synthesis(&mut rng);
        let cfg = write(tmp.path(), v.clone());
        let out = tmp.path().join("o");
        assert_eq!(kiq("synthesize", &cfg, &out, &[]), 0, "case {case}");
        let trace = read_sweep_file(&out.join("sweep.csv"), v["f_r0_Hz"].as_f64().unwrap()).unwrap();
        assert_eq!(trace.len() as u64, v["B_par_T"]["n"].as_u64().unwrap());
        assert_eq!(rows(&out.join("sweep.csv")).0, SWEEP_HEADER);
        for p in trace.points() {
            assert_eq!(p.sigma_f, v["noise_Hz"].as_f64().unwrap());
        }
    }
}

#[test]
fn fuzz_extract() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let t = tmp.path();
        let v = random_synthesis(&mut rng);
        let s = write_config(t, "s.json", &v.to_string());
        assert_eq!(kiq("synthesize", &s, &t.join("in"), &[]), 0);
        let mut e = json!({"input_csv": "in/sweep.csv", "f_r0_Hz": v["f_r0_Hz"]});
        if rng.random_bool(0.5) {
            e["zeeman"] = json!({"fixed_T_S_K": v["T_S_K"]});
        }
        if rng.random_bool(0.3) {
            e["exclusion_T"] = serde_json::Value::Null;
        }
        let cfg = write(t, e);
        let out = t.join("o");
        assert_eq!(kiq("extract", &cfg, &out, &[]), 0, "case {case}: {v}");
        let rec: ExtractionRecord = serde_json::from_str(&fs::read_to_string(out.join("extraction.json")).unwrap()).unwrap();
        assert!(rec.c2_sigma >= 0.0 && rec.offset_sigma >= 0.0);
        assert!(rec.t_s.is_some_and(|x| x > 0.0) && rec.g.is_some_and(|x| x > 0.0), "case {case}");
        let (header, body) = rows(&out.join("magnetization.csv"));
        assert_eq!(header, ["B_par_T", "M_over_MS", "sigma_M_over_MS", "excluded"]);
        assert_eq!(body.len(), rec.points);
        let mut last = f64::NEG_INFINITY;
        for r in &body {
            let (b, m, s) = (num(&r[0]), num(&r[1]), num(&r[2]));
            assert!(b > last);
            last = b;
            assert!(m >= 0.0 && s >= 0.0, "case {case}: {r:?}");
            assert!(r[3] == "true" || r[3] == "false");
        }
    }
}

#[test]
fn fuzz_twotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let g = rng.random_range(1.7..2.1);
        let f0 = rng.random_range(8e9..11e9);
        let b0 = 6.626_070_15e-34 * f0 / (g * 9.274_010_078_3e-24);
        let (nf, nb) = (rng.random_range(1..15), rng.random_range(1..40));
        let cfg = write(
            tmp.path(),
            json!({
                "g": g,
                "T_S_K": rng.random_range(0.02..0.2),
                "sigma_inh_Hz": log_uniform(&mut rng, 1e4, 5e6),
                "f_drive_res_Hz": f0,
                "kappa_Hz": log_uniform(&mut rng, 1e5, 1e7),
                "drive_strength": rng.random_range(0.0..50.0),
                "T1_s": log_uniform(&mut rng, 1e-3, 10.0),
                "f_drive_Hz": {"start": f0 - 5e6, "stop": f0 + 5e6, "n": nf},
                "B_par_T": {"start": b0 - 1e-3, "stop": b0 + 1e-3, "n": nb},
            }),
        );
        let out = tmp.path().join("o");
        assert_eq!(kiq("twotone", &cfg, &out, &[]), 0, "case {case}");
        let (header, body) = rows(&out.join("twotone.csv"));
        assert_eq!(header, ["f_drive_Hz", "B_par_T", "dM_over_MS"]);
        assert_eq!(body.len(), nf * nb);
        for (k, r) in body.iter().enumerate() {
            let v = num(&r[2]);
            assert!((0.0..=1.0).contains(&v), "case {case}: {r:?}");
            if k % nb > 0 {
                assert!(num(&r[1]) > num(&body[k - 1][1]));
                assert_eq!(r[0], body[k - 1][0]);
            }
        }
        let ridge: Ridge = serde_json::from_str(&fs::read_to_string(out.join("ridge.json")).unwrap()).unwrap();
        assert_eq!(ridge.points.len(), nb);
        assert!(ridge.points.windows(2).all(|w| w[1].f > w[0].f));
    }
}

#[test]
fn fuzz_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let tau = log_uniform(&mut rng, 1e-3, 10.0);
        let n = rng.random_range(20..300);
        let cfg = write(
            tmp.path(),
            json!({
                "tau_1e_s": tau,
                "stretch_beta": rng.random_range(0.4..=1.0),
                "time_s": {"start": 0.0, "stop": tau * rng.random_range(2.0..8.0), "n": n},
                "noise_rel": rng.random_range(0.0..0.03),
                "seed": rng.random::<u64>(),
            }),
        );
        let out = tmp.path().join("o");
        assert_eq!(kiq("decay", &cfg, &out, &[]), 0, "case {case}");
        let rec: DecayRecord = serde_json::from_str(&fs::read_to_string(out.join("decay_fit.json")).unwrap()).unwrap();
        assert!(rec.tau_1e_fit_s > 0.0 && rec.stretch_beta_fit > 0.0);
        assert!((rec.tau_1e_fit_s / tau - 1.0).abs() < 0.3, "case {case}: {rec:?}");
        let (header, body) = rows(&out.join("decay.csv"));
        assert_eq!(header, ["time_s", "dM_over_dM0"]);
        assert_eq!(body.len(), n);
        assert!(body.windows(2).all(|w| num(&w[1][0]) > num(&w[0][0])));
    }
}

#[test]
fn fuzz_fitres() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..CASES {
        let tmp = tempfile::tempdir().unwrap();
        let m = ResonanceModel {
            f_r: rng.random_range(4e9..9e9),
            q_i: log_uniform(&mut rng, 1e4, 1e6),
            q_c: log_uniform(&mut rng, 5e3, 1e5),
            phi0: rng.random_range(-0.4..0.4),
            amp: log_uniform(&mut rng, 1e-3, 1.0),
            alpha: rng.random_range(-3.0..3.0),
            delay: rng.random_range(0.0..100e-9),
        };
        let n = rng.random_range(200..1200);
        fs::write(tmp.path().join("trace.csv"), noisy_trace_csv(&m, rng.random_range(3.0..8.0), n, case)).unwrap();
        let cfg = write(tmp.path(), json!({"input_csv": "trace.csv"}));
        let out = tmp.path().join("o");
        assert_eq!(kiq("fitres", &cfg, &out, &[]), 0, "case {case}: {m:?}");
        let rec: ResonanceRecord = serde_json::from_str(&fs::read_to_string(out.join("resonance.json")).unwrap()).unwrap();
        rec.to_model().validate().unwrap();
        assert_eq!(rec.points, n);
        assert!((rec.model.f_r / m.f_r - 1.0).abs() < 1e-5, "case {case}: {rec:?}");
    }
}
