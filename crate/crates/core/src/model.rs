//! Four-level 𝒩-system response.
//!
//! All quantities are dimensionless multiples of a caller-chosen reference
//! rate. Rabi amplitudes of modes a and c are `|Ω̃_k|·√n_k`; the mode-b
//! amplitude stored here is the effective `|Ω_b|` of the evaluation at hand
//! (callers evaluating a single Fock component fold `√n_b` in themselves, see
//! [`Couplings`]).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regime::RegimeWarning;

/// Relative floor below which the response denominator is treated as singular.
pub const DENOMINATOR_EPS: f64 = 1e-12;

/// Slack allowed on passivity (`Im W10 ≥ 0`) checks.
pub const PASSIVITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemParams {
    pub omega_a_tilde: f64,
    pub omega_b_tilde: f64,
    pub omega_c_tilde: f64,
    pub n_a: u64,
    pub n_c: u64,
    pub nu_a: f64,
    pub nu_b: f64,
    pub nu_c: f64,
    pub gamma_10: f64,
    pub gamma_20: f64,
    pub gamma_30: f64,
    pub gamma_40: f64,
    pub n_atoms: u64,
}

impl Default for SystemParams {
    /// Dispersive reference point: unit probe coupling, strong b/c couplings,
    /// detuned fourth level, equal optical decay of levels 2 and 4.
    fn default() -> Self {
        SystemParams {
            omega_a_tilde: 1.0,
            omega_b_tilde: 10.0,
            omega_c_tilde: 10.0,
            n_a: 1,
            n_c: 1,
            nu_a: 0.0,
            nu_b: 0.0,
            nu_c: 10.0,
            gamma_10: 1e-6,
            gamma_20: 1.0,
            gamma_30: 0.0,
            gamma_40: 1.0,
            n_atoms: 1,
        }
    }
}

impl SystemParams {
    /// Squared Rabi amplitudes for this parameter set.
    pub fn couplings(&self) -> Couplings {
        Couplings {
            omega_a_sq: self.omega_a_tilde.powi(2) * self.n_a as f64,
            omega_b_sq: self.omega_b_tilde.powi(2),
            omega_c_sq: self.omega_c_tilde.powi(2) * self.n_c as f64,
        }
    }

    /// `|Ω_a| = |Ω̃_a|·√n_a`.
    pub fn omega_a(&self) -> f64 {
        self.omega_a_tilde * (self.n_a as f64).sqrt()
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c_tilde * (self.n_c as f64).sqrt()
    }

    pub fn with_nu_c(mut self, nu_c: f64) -> Self {
        self.nu_c = nu_c;
        self
    }

    pub fn with_gamma_10(mut self, gamma_10: f64) -> Self {
        self.gamma_10 = gamma_10;
        self
    }

    /// Every rate, detuning and amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        SystemParams {
            omega_a_tilde: self.omega_a_tilde * s,
            omega_b_tilde: self.omega_b_tilde * s,
            omega_c_tilde: self.omega_c_tilde * s,
            nu_a: self.nu_a * s,
            nu_b: self.nu_b * s,
            nu_c: self.nu_c * s,
            gamma_10: self.gamma_10 * s,
            gamma_20: self.gamma_20 * s,
            gamma_30: self.gamma_30 * s,
            gamma_40: self.gamma_40 * s,
            ..*self
        }
    }

    /// Checks the hard invariants and returns soft warnings.
    ///
    /// Levels 1 and 3 are metastable, so `γ10` and `γ30` exceeding `γ20` is
    /// flagged but allowed.
    pub fn validate(&self) -> Result<Vec<RegimeWarning>> {
        let named = [
            ("omega_a_tilde", self.omega_a_tilde),
            ("omega_b_tilde", self.omega_b_tilde),
            ("omega_c_tilde", self.omega_c_tilde),
            ("gamma_10", self.gamma_10),
            ("gamma_20", self.gamma_20),
            ("gamma_30", self.gamma_30),
            ("gamma_40", self.gamma_40),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, v) in [("nu_a", self.nu_a), ("nu_b", self.nu_b), ("nu_c", self.nu_c)] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite, got {v}")));
            }
        }
        if self.n_atoms == 0 {
            return Err(Error::InvalidInput("n_atoms must be at least 1".into()));
        }
        let mut warnings = Vec::new();
        for (name, v) in [("gamma_10", self.gamma_10), ("gamma_30", self.gamma_30)] {
            if v > self.gamma_20 {
                warnings.push(RegimeWarning {
                    condition: format!("{name} <= gamma_20 (metastable dephasing)"),
                    small: v,
                    large: self.gamma_20,
                });
            }
        }
        Ok(warnings)
    }
}

/// Squared Rabi amplitudes `|Ω_a|², |Ω_b|², |Ω_c|²` entering the response.
///
/// Separate from [`SystemParams`] so Fock-resolved and mean-field evaluations
/// can use non-integer photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub omega_a_sq: f64,
    pub omega_b_sq: f64,
    pub omega_c_sq: f64,
}

/// Complex ground-coherence response `W10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseW10 {
    pub value: C64,
}

impl ResponseW10 {
    /// `Re W10`; a phase `−Re(W10)·N·t` accumulates.
    pub fn phase_rate(&self) -> f64 {
        self.value.re
    }

    /// `Im W10`; adds to `γ10` as a decay rate.
    pub fn absorption_rate(&self) -> f64 {
        self.value.im
    }
}

/// Evaluates `W10` for the couplings stored in `params`.
pub fn w10(params: &SystemParams) -> Result<ResponseW10> {
    w10_with(params, &params.couplings())
}

/// Evaluates `W10` with explicit squared couplings; rates and detunings come
/// from `params`.
///
/// ```text
///            [(D3 + iγ30)(D4 + iγ40) − |Ωc|²] |Ωa|²
/// W10 = − ─────────────────────────────────────────────────────────────
///          (νa + iγ20)[(D3 + iγ30)(D4 + iγ40) − |Ωc|²] − (D4 + iγ40)|Ωb|²
/// ```
/// with `D3 = νa − νb`, `D4 = νa − νb + νc`.
pub fn w10_with(params: &SystemParams, c: &Couplings) -> Result<ResponseW10> {
    let d3 = C64::new(params.nu_a - params.nu_b, params.gamma_30);
    let d4 = C64::new(params.nu_a - params.nu_b + params.nu_c, params.gamma_40);
    let bracket = d3 * d4 - c.omega_c_sq;
    let probe = C64::new(params.nu_a, params.gamma_20);

    let left = probe * bracket;
    let right = d4 * c.omega_b_sq;
    let den = left - right;
    let magnitude = den.norm();
    let scale = left.norm().max(right.norm());
    if !(magnitude > DENOMINATOR_EPS * scale) || !magnitude.is_finite() {
        return Err(Error::DegenerateDenominator { magnitude, scale });
    }
    Ok(ResponseW10 {
        value: -(bracket * c.omega_a_sq) / den,
    })
}

/// Quasi-steady-state propagator `e^{(−γ10 + iW10)·N·t}` of the ground coherence.
pub fn rho10_at(params: &SystemParams, t: f64) -> Result<C64> {
    let w = w10(params)?.value;
    let exponent = (C64::new(-params.gamma_10, 0.0) + C64::i() * w) * (params.n_atoms as f64 * t);
    Ok(exponent.exp())
}

/// Dispersive cross-Kerr limit of `Re W10`: `−|Ωa|²|Ωc|² / (νc |Ωb|²)`.
pub fn kerr_approximation(params: &SystemParams) -> Result<f64> {
    let c = params.couplings();
    if params.nu_c == 0.0 {
        return Err(Error::DivisionByZero("kerr_approximation: nu_c = 0".into()));
    }
    if c.omega_b_sq == 0.0 {
        return Err(Error::DivisionByZero("kerr_approximation: |Omega_b| = 0".into()));
    }
    Ok(-c.omega_a_sq * c.omega_c_sq / (params.nu_c * c.omega_b_sq))
}
