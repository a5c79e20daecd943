mod common;

use common::continued_fraction;
use eit_core::analytic::{optimal_detuning, tau_eff, PhaseTarget};
use eit_core::fock::kerr_spread_error;
use eit_core::gate::{gate_error, gate_error_with, one_qubit_error, per_component_response};
use eit_core::{ErrorMeasure, GateDesign, GateMode, SystemParams};
use proptest::prelude::*;
use std::f64::consts::PI;

fn lossless() -> SystemParams {
    SystemParams {
        gamma_10: 0.0,
        gamma_20: 0.0,
        gamma_30: 0.0,
        gamma_40: 0.0,
        omega_b_tilde: 1.0,
        omega_c_tilde: 1.0,
        nu_c: 50.0,
        ..SystemParams::default()
    }
}

fn spread(alpha: f64) -> f64 {
    let p = lossless();
    let d = GateDesign::calibrated(&p, p.nu_c, alpha, PI, GateMode::TwoQubit, None).unwrap();
    gate_error(&p, &d).unwrap().delta_coherent_spread
}

#[test]
fn spread_error_scales_as_inverse_intensity() {
    let scaled: Vec<f64> = [5.0, 10.0, 20.0, 40.0].iter().map(|&a| spread(a) * a * a).collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi / lo < 1.1, "{scaled:?}");
    assert!(spread(160.0) < spread(80.0));
    assert!(spread(160.0) < 1e-3);
}

#[test]
fn lossless_gate_reproduces_ideal_kerr_state() {
    for alpha in [5.0, 7.0, 12.0] {
        let g = spread(alpha);
        let k = kerr_spread_error(alpha, PI, 1e-12).unwrap();
        assert!(((g - k) / k).abs() < 0.01, "alpha {alpha}: gate {g} vs Kerr state {k}");
    }
}

#[test]
fn lossless_budget_is_pure_spread() {
    let p = lossless();
    let d = GateDesign::calibrated(&p, p.nu_c, 8.0, PI, GateMode::TwoQubit, None).unwrap();
    let b = gate_error(&p, &d).unwrap();
    assert_eq!(b.delta_decoherence, 0.0);
    assert_eq!(b.delta_total, b.delta_coherent_spread);
}

#[test]
fn doubled_photon_component_at_unsuppressed_point() {
    let p = SystemParams {
        gamma_10: 6e-7,
        nu_c: 125.0,
        ..SystemParams::default()
    };
    let d = GateDesign::calibrated(&p, 125.0, 10.0, PI, GateMode::TwoQubit, None).unwrap();
    let (phase, damping) = per_component_response(&p, 200, d.time_norm).unwrap();
    let mut q = p;
    q.omega_b_tilde *= 200f64.sqrt();
    let w = continued_fraction(&q);
    let nt = d.time_norm / p.omega_a_tilde;
    assert!((phase - (-w.re * nt)).abs() <= 1e-11 * phase.abs());
    assert!((damping - (p.gamma_10 + w.im) * nt).abs() <= 1e-11 * damping.abs());
    // Twice the photons: about half the phase.
    assert!((phase / PI - 0.5).abs() < 0.01);
}

#[test]
fn one_qubit_decoherence_insensitive_to_intensity() {
    let base = SystemParams {
        gamma_10: 1e-4,
        omega_b_tilde: 1.0,
        omega_c_tilde: 1.0,
        ..SystemParams::default()
    };
    let ratio = 10.0;
    let mut values = Vec::new();
    for alpha in [5.0, 10.0, 20.0, 50.0] {
        let mut mean = base;
        mean.omega_b_tilde *= alpha;
        mean.omega_c_tilde *= ratio * alpha;
        let seed = optimal_detuning(&mean).unwrap().value;
        let nu = (-40..=40)
            .map(|k| seed * 10f64.powf(k as f64 / 20.0))
            .min_by(|&a, &b| {
                let f = |nu: f64| tau_eff(&mean.with_nu_c(nu), PhaseTarget::pi()).unwrap();
                f(a).total_cmp(&f(b))
            })
            .unwrap();
        let d = GateDesign::calibrated(&base, nu, alpha, PI, GateMode::OneQubit, Some(ratio * alpha)).unwrap();
        values.push(one_qubit_error(&base, &d).unwrap().delta_decoherence);
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi / lo < 2.0, "{values:?}");
}

fn lossy_design() -> impl Strategy<Value = (SystemParams, GateDesign)> {
    (1.0..1000.0f64, 2.0..30.0f64, -7.0..-3.0f64, -3.0..0.0f64).prop_map(|(nu, alpha, lg, ls)| {
        let p = SystemParams {
            gamma_10: 10f64.powf(lg),
            gamma_40: 10f64.powf(ls),
            omega_b_tilde: 1.0,
            omega_c_tilde: 1.0,
            ..SystemParams::default()
        };
        let d = GateDesign::calibrated(&p, nu, alpha, PI, GateMode::TwoQubit, None).unwrap();
        (p, d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn budget_invariants((p, d) in lossy_design()) {
        for m in [ErrorMeasure::ConditionalOverlap, ErrorMeasure::DualRailCoherence] {
            let b = gate_error_with(&p, &d, m, 1e-10).unwrap();
            prop_assert!((b.delta_total - (1.0 - b.fidelity * b.fidelity)).abs() < 1e-12);
            prop_assert!(b.delta_decoherence >= 0.0 && b.delta_coherent_spread >= 0.0);
            // Past half the fully dephased error, damping of anti-phased
            // components can raise the net overlap above the spread-only value.
            let half_dephased = 0.5 * m.error(eit_core::C64::new(0.0, 0.0));
            if b.delta_coherent_spread <= half_dephased {
                prop_assert!(b.delta_total >= b.delta_decoherence.max(b.delta_coherent_spread) - 1e-12,
                    "{:?} {:?}", m, b);
            } else {
                prop_assert!(b.delta_total >= b.delta_decoherence - 1e-12);
            }
        }
    }
}
