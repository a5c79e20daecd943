//! Brute-force check of the quasi-steady-state response: integrates the
//! weak-probe coherence chain `ρ10 → ρ20 → ρ30 → ρ40` directly.
//!
//! Times here are single-manifold times. The collective exponent `N·t` of the
//! closed form corresponds to oracle time `s = N·t`, so comparisons use
//! `ρ10(0)·e^{(−γ10 + iW10)s}`.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{w10, SystemParams};
use crate::ode::dopri5;

/// Default integrator tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Transient window discarded before comparison, in units of `1/γ20`.
pub const TRANSIENT_WINDOWS: f64 = 10.0;

/// Comparison points spread over the post-transient interval.
pub const DEFAULT_SAMPLES: usize = 200;

/// Initial ground-state coherence of a dual-rail qubit.
pub const RHO10_INITIAL: f64 = 0.5;

/// Coherences of the single-excitation manifold with the collective ground state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherenceVector {
    pub rho_10: C64,
    pub rho_20: C64,
    pub rho_30: C64,
    pub rho_40: C64,
}

impl CoherenceVector {
    /// Probe-qubit initial state: `ρ10 = rho_10`, excited coherences zero.
    pub fn ground(rho_10: C64) -> Self {
        CoherenceVector {
            rho_10,
            ..Default::default()
        }
    }

    pub fn to_array(self) -> [C64; 4] {
        [self.rho_10, self.rho_20, self.rho_30, self.rho_40]
    }

    pub fn from_array(a: [C64; 4]) -> Self {
        CoherenceVector {
            rho_10: a[0],
            rho_20: a[1],
            rho_30: a[2],
            rho_40: a[3],
        }
    }

    pub fn scale(self, s: f64) -> Self {
        CoherenceVector::from_array(self.to_array().map(|z| z * s))
    }

    pub fn max_norm(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

// Real, non-negative Rabi frequencies (|Ω_a|, |Ω_b|, |Ω_c|).
fn rabi(params: &SystemParams) -> (f64, f64, f64) {
    (params.omega_a(), params.omega_b_tilde.abs(), params.omega_c())
}

/// Time derivative of the coherence chain.
pub fn chain_rhs(params: &SystemParams, v: &CoherenceVector) -> CoherenceVector {
    let i = C64::i();
    let (oa, ob, oc) = rabi(params);
    let d3 = params.nu_a - params.nu_b;
    let d4 = d3 + params.nu_c;
    CoherenceVector {
        rho_10: -params.gamma_10 * v.rho_10 + i * oa * v.rho_20,
        rho_20: -C64::new(params.gamma_20, -params.nu_a) * v.rho_20 + i * oa * v.rho_10 + i * ob * v.rho_30,
        rho_30: -C64::new(params.gamma_30, -d3) * v.rho_30 + i * ob * v.rho_20 + i * oc * v.rho_40,
        rho_40: -C64::new(params.gamma_40, -d4) * v.rho_40 + i * oc * v.rho_30,
    }
}

/// Response obtained by holding `ρ10 = 1` and solving the excited
/// coherences' steady state directly: `ρ̇10/ρ10 = −γ10 + i·W10`.
pub fn steady_state_response(params: &SystemParams) -> Result<C64> {
    let i = C64::i();
    let zero = C64::new(0.0, 0.0);
    let (oa, ob, oc) = rabi(params);
    let d3 = params.nu_a - params.nu_b;
    let d4 = d3 + params.nu_c;
    let m = Matrix3::new(
        -C64::new(params.gamma_20, -params.nu_a),
        i * ob,
        zero,
        i * ob,
        -C64::new(params.gamma_30, -d3),
        i * oc,
        zero,
        i * oc,
        -C64::new(params.gamma_40, -d4),
    );
    let rhs = Vector3::new(-i * oa, zero, zero);
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateParams("steady-state chain matrix is singular".into()))?;
    // i·Ω_a·ρ20 = i·W10.
    Ok(oa * x[0])
}

/// Oracle trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<CoherenceVector>,
}

impl Trajectory {
    /// CSV with columns `t`, then real and imaginary parts of each coherence.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidInput(format!("trajectory export: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "re_rho_10",
            "im_rho_10",
            "re_rho_20",
            "im_rho_20",
            "re_rho_30",
            "im_rho_30",
            "re_rho_40",
            "im_rho_40",
        ])
        .map_err(io)?;
        for (t, s) in self.t.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.16e}")];
            for z in s.to_array() {
                row.push(format!("{:.16e}", z.re));
                row.push(format!("{:.16e}", z.im));
            }
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidInput(format!("trajectory export: {e}")))?;
        Ok(())
    }
}

fn run(
    params: &SystemParams,
    v0: CoherenceVector,
    t_final: f64,
    tol: f64,
    samples: Option<&[f64]>,
) -> Result<Trajectory> {
    let p = *params;
    let f = move |_t: f64, y: &[C64; 4]| chain_rhs(&p, &CoherenceVector::from_array(*y)).to_array();
    let sol = dopri5(f, v0.to_array(), t_final, tol, samples)?;
    Ok(Trajectory {
        t: sol.t,
        states: sol.y.into_iter().map(CoherenceVector::from_array).collect(),
    })
}

/// Integrates the chain, recording every accepted step.
pub fn integrate(params: &SystemParams, v0: CoherenceVector, t_final: f64, tol: f64) -> Result<Trajectory> {
    run(params, v0, t_final, tol, None)
}

/// Integrates the chain and interpolates at the ascending `times`.
pub fn integrate_sampled(
    params: &SystemParams,
    v0: CoherenceVector,
    t_final: f64,
    tol: f64,
    times: &[f64],
) -> Result<Trajectory> {
    run(params, v0, t_final, tol, Some(times))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeFlag {
    /// `|Ω_a| ≤ γ20`.
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub max_rel_deviation: f64,
    pub final_phase_error: f64,
    pub final_magnitude_ratio: f64,
    pub regime_flag: RegimeFlag,
}

/// Oracle time of a half turn of phase, `π/|Re W10|`.
pub fn default_t_final(params: &SystemParams) -> Result<f64> {
    let w = w10(params)?;
    if w.phase_rate() == 0.0 {
        return Err(Error::ZeroPhaseRate);
    }
    Ok(std::f64::consts::PI / w.phase_rate().abs())
}

/// Start of the comparison window, `10/γ20`.
pub fn transient_window(params: &SystemParams) -> f64 {
    if params.gamma_20 > 0.0 {
        TRANSIENT_WINDOWS / params.gamma_20
    } else {
        0.0
    }
}

/// Compares the integrated `ρ10(s)` with the closed-form exponential.
pub fn verify_qss(params: &SystemParams, t_final: f64, tol: f64) -> Result<OracleReport> {
    verify_qss_sampled(params, t_final, tol, DEFAULT_SAMPLES)
}

pub fn verify_qss_sampled(params: &SystemParams, t_final: f64, tol: f64, samples: usize) -> Result<OracleReport> {
    if samples < 2 {
        return Err(Error::InvalidInput(format!(
            "verify_qss needs at least 2 samples, got {samples}"
        )));
    }
    let t0 = transient_window(params);
    if !(t_final > t0) {
        return Err(Error::InvalidInput(format!(
            "t_final = {t_final:e} does not exceed the transient window {t0:e}"
        )));
    }
    let w = w10(params)?.value;
    let rate = C64::new(-params.gamma_10, 0.0) + C64::i() * w;
    let times: Vec<f64> = (0..samples)
        .map(|k| {
            if k + 1 == samples {
                t_final
            } else {
                t0 + (t_final - t0) * k as f64 / (samples - 1) as f64
            }
        })
        .collect();
    let rho0 = C64::new(RHO10_INITIAL, 0.0);
    let traj = integrate_sampled(params, CoherenceVector::ground(rho0), t_final, tol, &times)?;

    let mut max_rel = 0.0f64;
    let mut last = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (t, s) in traj.t.iter().zip(&traj.states) {
        let closed = rho0 * (rate * *t).exp();
        let dev = (s.rho_10 - closed).norm() / closed.norm();
        max_rel = max_rel.max(dev);
        last = (s.rho_10, closed);
    }
    let ratio = last.0 / last.1;
    let report = OracleReport {
        max_rel_deviation: max_rel,
        final_phase_error: ratio.arg().abs(),
        final_magnitude_ratio: ratio.norm(),
        regime_flag: if params.omega_a() <= params.gamma_20 {
            RegimeFlag::In
        } else {
            RegimeFlag::Out
        },
    };
    if ![
        report.max_rel_deviation,
        report.final_phase_error,
        report.final_magnitude_ratio,
    ]
    .iter()
    .all(|x| x.is_finite())
    {
        return Err(Error::DegenerateParams(
            "oracle comparison produced non-finite values".into(),
        ));
    }
    Ok(report)
}

/// Default oracle point: dispersive, `|Ω_a| = 0.1γ20`.
pub fn dispersive_point() -> SystemParams {
    SystemParams {
        omega_a_tilde: 0.1,
        ..SystemParams::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decoupled_probe_decays() {
        let p = SystemParams {
            omega_a_tilde: 0.0,
            gamma_10: 0.3,
            ..SystemParams::default()
        };
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let traj = integrate_sampled(&p, CoherenceVector::ground(C64::new(0.5, 0.0)), 10.0, 1e-10, &times).unwrap();
        for (t, s) in traj.t.iter().zip(&traj.states) {
            assert_relative_eq!(s.rho_10.re, 0.5 * (-0.3 * t).exp(), max_relative = 1e-9);
            assert_eq!(s.rho_20, C64::new(0.0, 0.0));
            assert_eq!(s.rho_40, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn unitary_two_level_conserves_norm() {
        let p = SystemParams {
            omega_a_tilde: 1.3,
            omega_b_tilde: 0.0,
            omega_c_tilde: 0.0,
            nu_a: 0.0,
            gamma_10: 0.0,
            gamma_20: 0.0,
            gamma_30: 0.0,
            gamma_40: 0.0,
            ..SystemParams::default()
        };
        let traj = integrate(&p, CoherenceVector::ground(C64::new(0.5, 0.0)), 20.0, 1e-11).unwrap();
        for s in &traj.states {
            let n = s.rho_10.norm_sqr() + s.rho_20.norm_sqr();
            assert!((n - 0.25).abs() < 1e-8);
        }
        // Rabi oscillation: ρ10 = cos(Ω t)/2.
        let last = traj.states.last().unwrap().rho_10;
        assert!((last.re - 0.5 * (1.3f64 * 20.0).cos()).abs() < 1e-7);
    }

    #[test]
    fn steady_state_matches_closed_form_at_default() {
        let p = SystemParams::default();
        let w = steady_state_response(&p).unwrap();
        assert_relative_eq!(w.re, w10(&p).unwrap().value.re, max_relative = 1e-12);
        assert_relative_eq!(w.im, w10(&p).unwrap().value.im, max_relative = 1e-12);
    }

    #[test]
    fn linearity_is_exact() {
        let p = dispersive_point();
        let v = CoherenceVector::ground(C64::new(0.5, 0.1));
        let a = integrate(&p, v, 200.0, 1e-10).unwrap();
        let b = integrate(&p, v.scale(2.0), 200.0, 1e-10).unwrap();
        assert_eq!(a.t, b.t);
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.scale(2.0).rho_10 - y.rho_10).norm() <= 1e-12 * y.max_norm());
        }
    }

    #[test]
    fn dispersive_point_within_one_percent() {
        let p = dispersive_point();
        let r = verify_qss(&p, default_t_final(&p).unwrap(), DEFAULT_TOL).unwrap();
        assert!(r.max_rel_deviation < 0.01, "{r:?}");
        assert_eq!(r.regime_flag, RegimeFlag::In);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let p = dispersive_point();
        let traj = integrate_sampled(
            &p,
            CoherenceVector::ground(C64::new(0.5, 0.0)),
            1.0,
            1e-8,
            &[0.0, 0.5, 1.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("t,re_rho_10,im_rho_10"));
        assert_eq!(lines[1].split(',').count(), 9);
    }

    #[test]
    fn transient_window_must_fit() {
        let p = dispersive_point();
        assert!(verify_qss(&p, 5.0, 1e-8).is_err());
    }
}
