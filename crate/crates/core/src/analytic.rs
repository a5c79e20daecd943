//! Closed-form design formulas for the dispersive phase gate.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{w10, SystemParams};
use crate::regime::{require_much_less, Flagged, RegimeWarning};

/// Equal dual-rail superposition: `ρ10(0) = 1/2`.
pub const DUAL_RAIL_RHO10: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryFactors {
    /// `Q_b² = γ20γ30 + |Ω_b|²`
    pub q_b_sq: f64,
    /// `Q_c² = γ30γ40 + |Ω_c|²`
    pub q_c_sq: f64,
    /// `γ̃10 = γ10 + γ30|Ω_a|²/Q_b²`
    pub gamma_10_tilde: f64,
    /// `γ̃20 = γ20 + γ40|Ω_b|²/Q_c²`
    pub gamma_20_tilde: f64,
}

/// Target phase shift φ in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTarget {
    pub phi: f64,
}

impl PhaseTarget {
    pub fn new(phi: f64) -> Self {
        PhaseTarget { phi }
    }

    pub fn pi() -> Self {
        PhaseTarget {
            phi: std::f64::consts::PI,
        }
    }

    /// Targets outside `(0, 2π]` are usable but unusual.
    pub fn warnings(&self) -> Vec<RegimeWarning> {
        if self.phi > 0.0 && self.phi <= std::f64::consts::TAU {
            Vec::new()
        } else {
            vec![RegimeWarning {
                condition: "0 < phi <= 2*pi".into(),
                small: self.phi,
                large: std::f64::consts::TAU,
            }]
        }
    }
}

/// Asymptotic π-gate operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticDesign {
    pub nu_c: f64,
    pub tau_eff: f64,
}

pub fn aux_factors(params: &SystemParams) -> Result<AuxiliaryFactors> {
    let c = params.couplings();
    let q_b_sq = params.gamma_20 * params.gamma_30 + c.omega_b_sq;
    let q_c_sq = params.gamma_30 * params.gamma_40 + c.omega_c_sq;
    if q_b_sq == 0.0 {
        return Err(Error::DegenerateParams(
            "Q_b^2 = 0 (gamma_20*gamma_30 and |Omega_b| both zero)".into(),
        ));
    }
    if q_c_sq == 0.0 {
        return Err(Error::DegenerateParams(
            "Q_c^2 = 0 (gamma_30*gamma_40 and |Omega_c| both zero)".into(),
        ));
    }
    Ok(AuxiliaryFactors {
        q_b_sq,
        q_c_sq,
        gamma_10_tilde: params.gamma_10 + params.gamma_30 * c.omega_a_sq / q_b_sq,
        gamma_20_tilde: params.gamma_20 + params.gamma_40 * c.omega_b_sq / q_c_sq,
    })
}

/// Effective decoherence exposure `τ_eff = −(γ10 + Im W10)/Re W10 · φ`,
/// always from the exact response.
pub fn tau_eff(params: &SystemParams, target: PhaseTarget) -> Result<f64> {
    let w = w10(params)?;
    if w.phase_rate() == 0.0 {
        return Err(Error::ZeroPhaseRate);
    }
    Ok(-(params.gamma_10 + w.absorption_rate()) / w.phase_rate() * target.phi)
}

fn dephasing_regime(params: &SystemParams) -> Vec<RegimeWarning> {
    let c = params.couplings();
    let mut warnings = Vec::new();
    let large = [
        ("gamma_20", params.gamma_20),
        ("gamma_40", params.gamma_40),
        ("|Omega_b|", c.omega_b_sq.sqrt()),
        ("|Omega_c|", c.omega_c_sq.sqrt()),
    ];
    for (small_name, small) in [("gamma_10", params.gamma_10), ("gamma_30", params.gamma_30)] {
        for (large_name, value) in large {
            require_much_less(&mut warnings, &format!("{small_name} << {large_name}"), small, value);
        }
    }
    warnings
}

/// Detuning `ν_c` that minimizes `τ_eff`:
/// `[γ̃20(γ10γ̃20 + |Ω_a|²)/γ̃10]^{1/2} · Q_c²/Q_b²`.
pub fn optimal_detuning(params: &SystemParams) -> Result<Flagged<f64>> {
    let aux = aux_factors(params)?;
    if aux.gamma_10_tilde == 0.0 {
        return Err(Error::DegenerateParams(
            "optimal_detuning: effective dephasing gamma_10_tilde = 0, optimum nu_c diverges".into(),
        ));
    }
    let omega_a_sq = params.couplings().omega_a_sq;
    let g20 = aux.gamma_20_tilde;
    let nu = (g20 * (params.gamma_10 * g20 + omega_a_sq) / aux.gamma_10_tilde).sqrt() * aux.q_c_sq / aux.q_b_sq;
    Ok(Flagged::new(nu, dephasing_regime(params)))
}

/// Minimum of `τ_eff` over `ν_c`:
/// `2[γ̃10γ̃20(γ10γ̃20 + |Ω_a|²)]^{1/2} (Q_b²/|Ω_b|²)(Q_c²/|Ω_c|²) φ/|Ω_a|²`.
pub fn tau_eff_at_optimum(params: &SystemParams, target: PhaseTarget) -> Result<Flagged<f64>> {
    let c = params.couplings();
    for (name, v) in [
        ("|Omega_a|", c.omega_a_sq),
        ("|Omega_b|", c.omega_b_sq),
        ("|Omega_c|", c.omega_c_sq),
    ] {
        if v == 0.0 {
            return Err(Error::DivisionByZero(format!("tau_eff_at_optimum: {name} = 0")));
        }
    }
    let aux = aux_factors(params)?;
    let (g10, g20) = (aux.gamma_10_tilde, aux.gamma_20_tilde);
    let tau = 2.0
        * (g10 * g20 * (params.gamma_10 * g20 + c.omega_a_sq)).sqrt()
        * (aux.q_b_sq / c.omega_b_sq)
        * (aux.q_c_sq / c.omega_c_sq)
        * target.phi
        / c.omega_a_sq;
    Ok(Flagged::new(tau, dephasing_regime(params)))
}

/// Large-detuning, weak-dephasing limit of the optimum:
/// `ν_c ≈ √(γ̃20/γ̃10)(|Ω_c|²/|Ω_b|²)|Ω_a|`, `τ_eff ≈ 2φ√(γ̃10γ̃20)/|Ω_a|`.
pub fn asymptotic_design(params: &SystemParams, target: PhaseTarget) -> Result<Flagged<AsymptoticDesign>> {
    let c = params.couplings();
    let aux = aux_factors(params)?;
    if aux.gamma_10_tilde == 0.0 {
        return Err(Error::DegenerateParams(
            "asymptotic_design: effective dephasing gamma_10_tilde = 0, optimum nu_c diverges".into(),
        ));
    }
    if c.omega_a_sq == 0.0 {
        return Err(Error::DivisionByZero("asymptotic_design: |Omega_a| = 0".into()));
    }
    if c.omega_b_sq == 0.0 {
        return Err(Error::DivisionByZero("asymptotic_design: |Omega_b| = 0".into()));
    }
    let omega_a = c.omega_a_sq.sqrt();
    let (g10, g20) = (aux.gamma_10_tilde, aux.gamma_20_tilde);

    let mut warnings = Vec::new();
    require_much_less(
        &mut warnings,
        "gamma_20*gamma_30 << |Omega_b|^2",
        params.gamma_20 * params.gamma_30,
        c.omega_b_sq,
    );
    require_much_less(
        &mut warnings,
        "gamma_30*gamma_40 << |Omega_c|^2",
        params.gamma_30 * params.gamma_40,
        c.omega_c_sq,
    );
    require_much_less(&mut warnings, "|Omega_a|^2 << |Omega_b|^2", c.omega_a_sq, c.omega_b_sq);
    require_much_less(
        &mut warnings,
        "gamma_10*gamma_20_tilde << |Omega_a|^2",
        params.gamma_10 * g20,
        c.omega_a_sq,
    );

    Ok(Flagged::new(
        AsymptoticDesign {
            nu_c: (g20 / g10).sqrt() * (c.omega_c_sq / c.omega_b_sq) * omega_a,
            tau_eff: 2.0 * target.phi * (g10 * g20).sqrt() / omega_a,
        },
        warnings,
    ))
}

/// Dephasing `γ10/|Ω̃_a|` tolerable for error `δ` with a Fock input of `n_b`
/// photons: `(δ/φ)²/n_b`.
pub fn fock_dephasing_bound(delta: f64, target: PhaseTarget, n_b: u64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "fock_dephasing_bound: delta must be > 0, got {delta}"
        )));
    }
    if !(target.phi > 0.0) {
        return Err(Error::InvalidInput(format!(
            "fock_dephasing_bound: phi must be > 0, got {}",
            target.phi
        )));
    }
    if n_b == 0 {
        return Err(Error::InvalidInput("fock_dephasing_bound: n_b must be >= 1".into()));
    }
    Ok((delta / target.phi).powi(2) / n_b as f64)
}

/// Error `|ρ10(0)|²(1 − e^{−2τ})` from dephasing and depopulation alone.
pub fn decoherence_error(tau: f64, rho10_initial: C64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "decoherence_error: tau must be >= 0, got {tau}"
        )));
    }
    let rho_sq = rho10_initial.norm_sqr();
    if rho_sq > 0.25 * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "decoherence_error: |rho10(0)| must be <= 1/2, got {}",
            rho_sq.sqrt()
        )));
    }
    Ok(-rho_sq * (-2.0 * tau).exp_m1())
}

/// Gate time in the normalization `|Ω_a|·N·t`, with `t = −φ/(Re W10·N)`.
pub fn gate_time(params: &SystemParams, target: PhaseTarget) -> Result<f64> {
    let w = w10(params)?;
    if w.phase_rate() == 0.0 {
        return Err(Error::ZeroPhaseRate);
    }
    Ok(-target.phi * params.omega_a() / w.phase_rate() + 0.0)
}
