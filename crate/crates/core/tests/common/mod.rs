#![allow(dead_code)]

use eit_core::{SystemParams, C64};
use proptest::prelude::*;

/// Continued-fraction form of the response, written independently of the library.
pub fn continued_fraction(p: &SystemParams) -> C64 {
    let i = C64::i();
    let oa2 = p.omega_a_tilde.powi(2) * p.n_a as f64;
    let ob2 = p.omega_b_tilde.powi(2);
    let oc2 = p.omega_c_tilde.powi(2) * p.n_c as f64;
    let d3 = p.nu_a - p.nu_b;
    let d4 = d3 + p.nu_c;
    let inner = C64::new(p.gamma_40, -d4);
    let mid = C64::new(p.gamma_30, -d3) + oc2 / inner;
    let outer = C64::new(p.gamma_20, -p.nu_a) + ob2 / mid;
    i * oa2 / outer
}

/// Physical ensemble: rates in [0, 10], detunings in [−100, 100], amplitudes in [0, 100].
pub fn physical_params() -> impl Strategy<Value = SystemParams> {
    (
        (0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64),
        (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64),
        (0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64),
    )
        .prop_map(|((oa, ob, oc), (na, nb, nc), (g1, g2, g3, g4))| SystemParams {
            omega_a_tilde: oa,
            omega_b_tilde: ob,
            omega_c_tilde: oc,
            n_a: 1,
            n_c: 1,
            nu_a: na,
            nu_b: nb,
            nu_c: nc,
            gamma_10: g1,
            gamma_20: g2,
            gamma_30: g3,
            gamma_40: g4,
            n_atoms: 1,
        })
}

pub fn rel_diff(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
