use kiq_core::fluxonium::{
    fig4c_sweep, nanojunction_ej, solve_fluxonium, spin_flip_shift, FluxoniumParams, SpinReadoutScenario,
};
use kiq_core::physics::Polarity;
use kiq_oracles::phase_grid::{qubit_frequency_extrapolated, qubit_frequency_romberg};
use proptest::prelude::*;

const GHZ: f64 = 1e9;

fn grid_points() -> Vec<(f64, f64, f64)> {
    let f = [10f64.powf(-0.25), 1.0, 10f64.powf(0.25)];
    let mut out = Vec::new();
    for a in f {
        for b in f {
            for c in f {
                out.push((20.0 * a, 2.0 * b, 1.0 * c));
            }
        }
    }
    out
}

#[test]
fn harmonic_basis_matches_phase_grid() {
    let mut worst: f64 = 0.0;
    for (ej, ec, el) in grid_points() {
        let p = FluxoniumParams::from_ghz(ej, ec, el, 0.5).unwrap();
        let s = solve_fluxonium(&p, 160).unwrap();
        let oracle = qubit_frequency_romberg(ej, ec, el, 0.5, 1023) * GHZ;
        let rel = (s.f_q() / oracle - 1.0).abs();
        worst = worst.max(rel);
        assert!(rel < 1e-6, "({ej}, {ec}, {el}): {} vs {oracle}, rel {rel:e}", s.f_q());
    }
    eprintln!("worst relative disagreement {worst:e}");
}

#[test]
fn off_sweet_spot_matches_phase_grid() {
    for phi in [0.0, 0.2, 0.37] {
        let p = FluxoniumParams::from_ghz(6.0, 1.5, 0.8, phi).unwrap();
        let s = solve_fluxonium(&p, 160).unwrap();
        let oracle = qubit_frequency_extrapolated(6.0, 1.5, 0.8, phi, 4095) * GHZ;
        assert!((s.f_q() / oracle - 1.0).abs() < 1e-6, "{phi}");
    }
}

#[test]
fn basis_converges_between_80_and_100() {
    let p = FluxoniumParams::from_ghz(20.0, 2.0, 1.0, 0.5).unwrap();
    let a = solve_fluxonium(&p, 80).unwrap().f_q();
    let b = solve_fluxonium(&p, 100).unwrap().f_q();
    assert!((a / b - 1.0).abs() < 1e-9);
}

#[test]
fn inductive_limit_is_evenly_spaced() {
    for (ec, el) in [(2.0, 1.0), (0.5, 0.3), (5.0, 0.1)] {
        let p = FluxoniumParams::from_ghz(0.0, ec, el, 0.3).unwrap();
        let w = (8.0 * ec * el).sqrt() * GHZ;
        let s = solve_fluxonium(&p, 40).unwrap();
        for k in 0..6 {
            let gap = s.eigenvalues[k + 1] - s.eigenvalues[k];
            assert!((gap / w - 1.0).abs() < 1e-10, "gap {k}: {gap} vs {w}");
        }
    }
}

fn readout(d: f64, b: f64) -> SpinReadoutScenario {
    let circuit = FluxoniumParams::from_ghz(10.0, 4.0, 1.0, 0.5).unwrap();
    let mut s = SpinReadoutScenario::new(circuit, d, b).unwrap();
    s.basis_dim = 80;
    s
}

#[test]
fn up_spin_screens_the_bias_and_lowers_the_qubit() {
    let s = readout(10e-9, 0.2);
    let up = nanojunction_ej(&s, Polarity::Up).unwrap();
    let down = nanojunction_ej(&s, Polarity::Down).unwrap();
    assert!(up > down);
    assert!(spin_flip_shift(&s).unwrap() < 0.0);
}

#[test]
fn readout_table_trends() {
    let d: Vec<f64> = [10.0, 20.0, 40.0, 70.0, 100.0].iter().map(|x| x * 1e-9).collect();
    let b = [0.1, 0.2, 0.5];
    let rows = fig4c_sweep(&readout(10e-9, 0.1), &d, &b).unwrap();
    let at = |i: usize, j: usize| rows[i * b.len() + j].delta_fq.unwrap().abs();
    for j in 0..b.len() {
        for i in 1..d.len() {
            assert!(at(i, j) < at(i - 1, j));
        }
    }
    for i in 0..d.len() {
        for j in 1..b.len() {
            assert!(at(i, j) > at(i, j - 1));
        }
    }
    let khz = at(0, 1);
    assert!((10f64.powf(2.5)..10f64.powf(3.5)).contains(&khz), "{khz}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_symmetric_about_half_flux(ej in 2.0..30.0f64, ec in 0.5..5.0f64, el in 0.2..2.0f64, x in 0.0..0.5f64) {
        let a = solve_fluxonium(&FluxoniumParams::from_ghz(ej, ec, el, 0.5 - x).unwrap(), 100).unwrap();
        let b = solve_fluxonium(&FluxoniumParams::from_ghz(ej, ec, el, 0.5 + x).unwrap(), 100).unwrap();
        prop_assert!((a.f_q() - b.f_q()).abs() <= 1e-7 * a.f_q().abs().max(1e6));
    }

    #[test]
    fn levels_are_sorted(ej in 0.5..30.0f64, ec in 0.5..5.0f64, el in 0.2..2.0f64, x in 0.0..1.0f64) {
        let s = solve_fluxonium(&FluxoniumParams::from_ghz(ej, ec, el, x).unwrap(), 60).unwrap();
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.f_q() >= 0.0);
    }
}
