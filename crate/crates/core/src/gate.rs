//! Coherent-drive phase gate: Fock-resolved response, error budgets and the
//! one-qubit variant.
//!
//! Mode b (and, for the one-qubit gate, mode c) carries a coherent state. Each
//! Fock component `n` experiences its own exact response `W10(n)`, so after an
//! interaction time calibrated on the mean photon number it has picked up a
//! phase `φ_n` and a damping exponent `τ_n`. Every error measure here is a
//! function of the Poisson-weighted coherence sum
//!
//! ```text
//! S = Σ_n P(n) · e^{i(φ − φ_n)} · e^{−τ_n}
//! ```
//!
//! and of its two single-mechanism restrictions (`τ_n := 0`, `φ_n := φ`).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analytic::PhaseTarget;
use crate::error::{Error, Result};
use crate::fock::{poisson_window, PoissonWindow, DEFAULT_TRUNCATION_EPS};
use crate::model::{w10_with, Couplings, SystemParams};
use crate::regime::{require_much_less, RegimeWarning};

/// Relative slack on the calibrated interaction time of a [`GateDesign`].
pub const CALIBRATION_RTOL: f64 = 1e-9;

/// Minimum `α_c/α_b` for the one-qubit gate before a warning is raised.
pub const ONE_QUBIT_RATIO_FLOOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateMode {
    /// Single photons in modes a and c, coherent drive in b.
    #[default]
    TwoQubit,
    /// Single photon in a, coherent drives in b and c.
    OneQubit,
}

impl GateMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GateMode::TwoQubit => "two-qubit",
            GateMode::OneQubit => "one-qubit",
        }
    }
}

impl std::str::FromStr for GateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-qubit" => Ok(GateMode::TwoQubit),
            "one-qubit" => Ok(GateMode::OneQubit),
            other => Err(Error::InvalidInput(format!("unknown gate mode `{other}`"))),
        }
    }
}

/// How the coherence sum is turned into a gate error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMeasure {
    /// `δ = 1 − |S|²`: infidelity of the conditional (phase-shifted) branch.
    /// Pure spread gives `1 − |⟨ideal|ψ⟩|²`; pure damping gives `1 − e^{−2τ}`.
    #[default]
    ConditionalOverlap,
    /// `δ = 1/2 − Re(S)/2`: dual-rail coherence with `ρ10(0) = 1/2`.
    /// Pure damping gives `(1 − e^{−τ})/2`.
    DualRailCoherence,
}

impl ErrorMeasure {
    pub fn error(&self, sum: C64) -> f64 {
        let delta = match self {
            ErrorMeasure::ConditionalOverlap => 1.0 - sum.norm_sqr(),
            ErrorMeasure::DualRailCoherence => 0.5 - 0.5 * sum.re,
        };
        delta.max(0.0)
    }

    /// Error of a single component damped by `e^{−τ}` with the exact phase.
    pub fn damping_only(&self, tau: f64) -> f64 {
        self.error(C64::new((-tau).exp(), 0.0))
    }
}

/// A chosen operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDesign {
    pub nu_c: f64,
    pub alpha_b: f64,
    /// Mode-c coherent amplitude; only set for [`GateMode::OneQubit`].
    pub alpha_c: Option<f64>,
    pub phi: f64,
    /// Interaction time as `|Ω_a|·N·t`.
    pub time_norm: f64,
    /// `γ40/γ20` of the parameters the design was built for.
    pub suppression: f64,
    pub mode: GateMode,
}

/// Couplings of the mean component: `|Ω_b|² = |Ω̃_b|²|α_b|²` and, for the
/// one-qubit gate, `|Ω_c|² = |Ω̃_c|²|α_c|²`.
fn mean_couplings(params: &SystemParams, alpha_b: f64, alpha_c: Option<f64>) -> Couplings {
    let mut c = params.couplings();
    c.omega_b_sq = params.omega_b_tilde.powi(2) * alpha_b * alpha_b;
    if let Some(ac) = alpha_c {
        c.omega_c_sq = params.omega_c_tilde.powi(2) * ac * ac;
    }
    c
}

fn suppression_of(params: &SystemParams) -> f64 {
    if params.gamma_20 > 0.0 {
        params.gamma_40 / params.gamma_20
    } else {
        f64::INFINITY
    }
}

impl GateDesign {
    /// Builds a design whose interaction time gives the mean component
    /// exactly the phase `phi`.
    pub fn calibrated(
        params: &SystemParams,
        nu_c: f64,
        alpha_b: f64,
        phi: f64,
        mode: GateMode,
        alpha_c: Option<f64>,
    ) -> Result<Self> {
        let alpha_c = check_mode_amplitudes(mode, alpha_b, alpha_c)?;
        let p = params.with_nu_c(nu_c);
        let w = w10_with(&p, &mean_couplings(&p, alpha_b, alpha_c))?;
        if w.phase_rate() == 0.0 {
            return Err(Error::ZeroPhaseRate);
        }
        let time_norm = -phi * p.omega_a() / w.phase_rate() + 0.0;
        Ok(GateDesign {
            nu_c,
            alpha_b,
            alpha_c,
            phi,
            time_norm,
            suppression: suppression_of(params),
            mode,
        })
    }

    /// Checks that `time_norm` is the calibrated interaction time for `params`.
    pub fn check_consistent(&self, params: &SystemParams) -> Result<()> {
        let expected = GateDesign::calibrated(params, self.nu_c, self.alpha_b, self.phi, self.mode, self.alpha_c)?;
        let scale = expected.time_norm.abs().max(f64::MIN_POSITIVE);
        if (self.time_norm - expected.time_norm).abs() > CALIBRATION_RTOL * scale {
            return Err(Error::InvalidInput(format!(
                "design time_norm {} inconsistent with calibrated {}",
                self.time_norm, expected.time_norm
            )));
        }
        Ok(())
    }

    pub fn target(&self) -> PhaseTarget {
        PhaseTarget::new(self.phi)
    }

    pub fn warnings(&self) -> Vec<RegimeWarning> {
        let mut warnings = Vec::new();
        if let (GateMode::OneQubit, Some(ac)) = (self.mode, self.alpha_c) {
            if ac < ONE_QUBIT_RATIO_FLOOR * self.alpha_b {
                warnings.push(RegimeWarning {
                    condition: "|alpha_c| >= 10 |alpha_b|".into(),
                    small: self.alpha_b,
                    large: ac,
                });
            }
        }
        if self.mode == GateMode::TwoQubit {
            require_much_less(&mut warnings, "1 << |alpha_b|^2", 1.0, self.alpha_b * self.alpha_b);
        }
        warnings
    }
}

fn check_mode_amplitudes(mode: GateMode, alpha_b: f64, alpha_c: Option<f64>) -> Result<Option<f64>> {
    if !(alpha_b.is_finite() && alpha_b >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "alpha_b must be finite and >= 0, got {alpha_b}"
        )));
    }
    match (mode, alpha_c) {
        (GateMode::TwoQubit, None) => Ok(None),
        (GateMode::TwoQubit, Some(_)) => Err(Error::InvalidInput("two-qubit designs carry no alpha_c".into())),
        (GateMode::OneQubit, Some(ac)) if ac.is_finite() && ac > 0.0 => Ok(Some(ac)),
        (GateMode::OneQubit, _) => Err(Error::InvalidInput("one-qubit designs need alpha_c > 0".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub delta_decoherence: f64,
    pub delta_coherent_spread: f64,
    pub delta_total: f64,
    pub fidelity: f64,
}

impl ErrorBudget {
    pub fn new(delta_total: f64, delta_decoherence: f64, delta_coherent_spread: f64) -> Self {
        ErrorBudget {
            delta_decoherence,
            delta_coherent_spread,
            delta_total,
            fidelity: (1.0 - delta_total).clamp(0.0, 1.0).sqrt(),
        }
    }

    fn from_sums(measure: ErrorMeasure, sums: &CoherenceSums) -> Self {
        ErrorBudget::new(
            measure.error(sums.total),
            measure.error(sums.damping_only),
            measure.error(sums.spread_only),
        )
    }
}

/// The coherence sum and its single-mechanism restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherenceSums {
    pub total: C64,
    pub damping_only: C64,
    pub spread_only: C64,
}

impl CoherenceSums {
    /// Divides out the retained Poisson mass so truncation is not counted as error.
    fn normalized(self, mass: f64) -> Self {
        CoherenceSums {
            total: self.total / mass,
            damping_only: self.damping_only / mass,
            spread_only: self.spread_only / mass,
        }
    }

    fn add(&mut self, weight: f64, phase_offset: f64, damping: f64) {
        let decay = (-damping).exp();
        let rot = C64::from_polar(1.0, phase_offset);
        self.total += rot * (weight * decay);
        self.damping_only += weight * decay;
        self.spread_only += rot * weight;
    }
}

fn component_response(params: &SystemParams, c: &Couplings, n_t: f64) -> Result<(f64, f64)> {
    let w = w10_with(params, c)?;
    Ok((-w.phase_rate() * n_t, (params.gamma_10 + w.absorption_rate()) * n_t))
}

fn atoms_time(params: &SystemParams, time_norm: f64) -> Result<f64> {
    let omega_a = params.omega_a();
    if omega_a == 0.0 {
        return Err(Error::DivisionByZero("interaction time: |Omega_a| = 0".into()));
    }
    Ok(time_norm / omega_a)
}

/// Phase `−Re(W10)·N·t` and damping `(γ10 + Im W10)·N·t` of the Fock
/// component `n_b`, with `|Ω_b| = |Ω̃_b|√n_b`. `n_b = 0` is evaluated exactly.
pub fn per_component_response(params: &SystemParams, n_b: u64, time_norm: f64) -> Result<(f64, f64)> {
    let mut c = params.couplings();
    c.omega_b_sq = params.omega_b_tilde.powi(2) * n_b as f64;
    component_response(params, &c, atoms_time(params, time_norm)?)
}

fn window_for(alpha: f64, eps: f64) -> Result<PoissonWindow> {
    let window = poisson_window(alpha * alpha, eps)?;
    if window.excluded_mass > eps {
        return Err(Error::TruncationNotConverged {
            tail_mass: window.excluded_mass,
            eps,
        });
    }
    Ok(window)
}

/// Coherence sums of a two-qubit design.
pub fn two_qubit_sums(params: &SystemParams, design: &GateDesign, eps: f64) -> Result<CoherenceSums> {
    if design.mode != GateMode::TwoQubit {
        return Err(Error::InvalidInput(
            "two-qubit error requested for a one-qubit design".into(),
        ));
    }
    let p = params.with_nu_c(design.nu_c);
    let n_t = atoms_time(&p, design.time_norm)?;
    let window = window_for(design.alpha_b, eps)?;
    let mut c = p.couplings();
    let ob_sq = p.omega_b_tilde.powi(2);
    let mut sums = CoherenceSums::default();
    for (n, weight) in window.iter() {
        c.omega_b_sq = ob_sq * n as f64;
        let (phase, damping) = component_response(&p, &c, n_t)?;
        sums.add(weight, design.phi - phase, damping);
    }
    Ok(sums.normalized(1.0 - window.excluded_mass))
}

/// Error budget of a two-qubit design with the default measure and truncation.
pub fn gate_error(params: &SystemParams, design: &GateDesign) -> Result<ErrorBudget> {
    gate_error_with(params, design, ErrorMeasure::default(), DEFAULT_TRUNCATION_EPS)
}

pub fn gate_error_with(
    params: &SystemParams,
    design: &GateDesign,
    measure: ErrorMeasure,
    eps: f64,
) -> Result<ErrorBudget> {
    let sums = two_qubit_sums(params, design, eps)?;
    Ok(ErrorBudget::from_sums(measure, &sums))
}

/// Coherence sums of a one-qubit design: Poisson double sum over `(n_b, n_c)`.
pub fn one_qubit_sums(
    params: &SystemParams,
    design: &GateDesign,
    eps: f64,
    with_damping: bool,
) -> Result<CoherenceSums> {
    let alpha_c = match (design.mode, design.alpha_c) {
        (GateMode::OneQubit, Some(ac)) => ac,
        _ => {
            return Err(Error::InvalidInput(
                "one-qubit error requested for a design without alpha_c".into(),
            ))
        }
    };
    let p = params.with_nu_c(design.nu_c);
    let n_t = atoms_time(&p, design.time_norm)?;
    let window_b = window_for(design.alpha_b, eps / 2.0)?;
    let window_c = window_for(alpha_c, eps / 2.0)?;
    let ob_sq = p.omega_b_tilde.powi(2);
    let oc_sq = p.omega_c_tilde.powi(2);
    let mut c = p.couplings();
    let mut sums = CoherenceSums::default();
    for (nb, wb) in window_b.iter() {
        c.omega_b_sq = ob_sq * nb as f64;
        // Inner sums accumulate at a common scale before weighting by P(n_b).
        let mut inner = CoherenceSums::default();
        for (nc, wc) in window_c.iter() {
            c.omega_c_sq = oc_sq * nc as f64;
            let w = w10_with(&p, &c)?;
            let phase = -w.phase_rate() * n_t;
            let damping = if with_damping {
                (p.gamma_10 + w.absorption_rate()) * n_t
            } else {
                0.0
            };
            inner.add(wc, design.phi - phase, damping);
        }
        sums.total += inner.total * wb;
        sums.damping_only += inner.damping_only * wb;
        sums.spread_only += inner.spread_only * wb;
    }
    Ok(sums.normalized((1.0 - window_b.excluded_mass) * (1.0 - window_c.excluded_mass)))
}

/// Error budget of the one-qubit gate (coherent drives in both b and c).
pub fn one_qubit_error(params: &SystemParams, design: &GateDesign) -> Result<ErrorBudget> {
    one_qubit_error_with(params, design, ErrorMeasure::default(), DEFAULT_TRUNCATION_EPS)
}

pub fn one_qubit_error_with(
    params: &SystemParams,
    design: &GateDesign,
    measure: ErrorMeasure,
    eps: f64,
) -> Result<ErrorBudget> {
    let sums = one_qubit_sums(params, design, eps, true)?;
    Ok(ErrorBudget::from_sums(measure, &sums))
}

/// Spread-only one-qubit error at `α_b`, with `α_c = ratio·α_b` and the time
/// recalibrated for that amplitude.
pub fn one_qubit_spread(
    params: &SystemParams,
    nu_c: f64,
    phi: f64,
    alpha_b: f64,
    alpha_c_ratio: f64,
    measure: ErrorMeasure,
    eps: f64,
) -> Result<f64> {
    let design = GateDesign::calibrated(
        params,
        nu_c,
        alpha_b,
        phi,
        GateMode::OneQubit,
        Some(alpha_c_ratio * alpha_b),
    )?;
    let sums = one_qubit_sums(params, &design, eps, false)?;
    Ok(measure.error(sums.spread_only))
}

/// Smallest `α_b` (on a 0.1 grid within `range`) whose one-qubit spread-only
/// error is at most `delta_target`.
#[allow(clippy::too_many_arguments)]
pub fn min_alpha_b(
    params: &SystemParams,
    nu_c: f64,
    phi: f64,
    alpha_c_ratio: f64,
    delta_target: f64,
    range: (f64, f64),
    measure: ErrorMeasure,
    eps: f64,
) -> Result<f64> {
    if !(delta_target > 0.0) {
        return Err(Error::InvalidInput(format!(
            "min_alpha_b: delta_target must be > 0, got {delta_target}"
        )));
    }
    if !(alpha_c_ratio > 0.0) {
        return Err(Error::InvalidInput("min_alpha_b: alpha_c/alpha_b must be > 0".into()));
    }
    let lo = (range.0.max(0.1) * 10.0).ceil() as u64;
    let hi = (range.1 * 10.0).floor() as u64;
    if lo > hi {
        return Err(Error::InvalidInput(format!("min_alpha_b: empty range {range:?}")));
    }
    let spread = |tenths: u64| one_qubit_spread(params, nu_c, phi, tenths as f64 / 10.0, alpha_c_ratio, measure, eps);
    // Spread error decreases with α_b. Doubling from the bottom keeps the
    // expensive large-amplitude double sums out of reach unless needed.
    let mut a = lo;
    let mut b = lo;
    loop {
        let s = spread(b)?;
        if s <= delta_target {
            break;
        }
        if b == hi {
            return Err(Error::NotAttainable { delta_target, floor: s });
        }
        a = b + 1;
        b = (b * 2).min(hi);
    }
    while a < b {
        let mid = a + (b - a) / 2;
        if spread(mid)? <= delta_target {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    Ok(b as f64 / 10.0)
}
