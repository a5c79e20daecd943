//! Numerical design search: the `(ν_c, α_b)` pair minimizing the gate error
//! at a given dephasing, and its inversion to the largest tolerable dephasing
//! for a target error.

use serde::{Deserialize, Serialize};

use crate::analytic::{optimal_detuning, tau_eff, PhaseTarget};
use crate::error::{Error, Result};
use crate::fock::DEFAULT_TRUNCATION_EPS;
use crate::gate::{gate_error_with, min_alpha_b, ErrorBudget, ErrorMeasure, GateDesign, GateMode};
use crate::model::SystemParams;
use crate::regime::RegimeWarning;

/// Points of the coarse logarithmic `ν_c` grid.
pub const NU_GRID_POINTS: usize = 25;

/// Golden-section termination width on `ln ν_c`.
pub const NU_LOG_TOL: f64 = 1e-9;

// Looser width for the integer α_b scan; the refinement stage polishes.
const NU_LOG_TOL_SCAN: f64 = 1e-4;

/// Relative perturbation used by the local-minimum certificate.
pub const CERTIFICATE_STEP: f64 = 0.05;

/// Largest improvement a certificate perturbation may find.
pub const CERTIFICATE_SLACK: f64 = 1e-4;

const CERTIFICATE_ROUNDS: usize = 10;

/// Amplitudes whose damping-only error exceeds this multiple of the best
/// total found so far are skipped.
const PRUNE_FACTOR: f64 = 1.5;

/// Dephasing search interval for [`max_dephasing`], relative to `|Ω̃_a|`.
pub const GAMMA_10_RANGE: (f64, f64) = (1e-12, 1.0);

/// Bisection stops once `hi/lo` is within this factor of 1.
pub const GAMMA_10_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizationConstraints {
    /// `|Ω_a|/γ20`; fixes γ20.
    pub omega_a_over_gamma_20: f64,
    /// `|Ω̃_b|²/|Ω̃_c|²`; fixes `|Ω̃_b|` from `|Ω̃_c|`.
    pub omega_b_sq_over_omega_c_sq: f64,
    /// `γ40/γ20`.
    pub suppression: f64,
    /// The `ν_c` search covers `[ν*/span, ν*·span]` around the analytic optimum `ν*`.
    pub nu_c_span: f64,
    pub alpha_b_min: f64,
    pub alpha_b_max: f64,
    pub mode: GateMode,
    pub phi: f64,
    /// One-qubit gate only.
    pub alpha_c_over_alpha_b: f64,
    /// `γ30/γ10`.
    pub gamma_30_over_gamma_10: f64,
    pub error_measure: ErrorMeasure,
    pub truncation_eps: f64,
}

impl Default for OptimizationConstraints {
    fn default() -> Self {
        OptimizationConstraints {
            omega_a_over_gamma_20: 1.0,
            omega_b_sq_over_omega_c_sq: 1.0,
            suppression: 1.0,
            nu_c_span: 100.0,
            alpha_b_min: 1.0,
            alpha_b_max: 200.0,
            mode: GateMode::TwoQubit,
            phi: std::f64::consts::PI,
            alpha_c_over_alpha_b: 10.0,
            gamma_30_over_gamma_10: 0.0,
            error_measure: ErrorMeasure::ConditionalOverlap,
            truncation_eps: DEFAULT_TRUNCATION_EPS,
        }
    }
}

impl OptimizationConstraints {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_a_over_gamma_20", self.omega_a_over_gamma_20),
            ("omega_b_sq_over_omega_c_sq", self.omega_b_sq_over_omega_c_sq),
            ("suppression", self.suppression),
            ("phi", self.phi),
            ("alpha_c_over_alpha_b", self.alpha_c_over_alpha_b),
            ("alpha_b_min", self.alpha_b_min),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "constraint {name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.nu_c_span.is_finite() && self.nu_c_span > 1.0) {
            return Err(Error::InvalidInput(format!(
                "constraint nu_c_span must exceed 1, got {}",
                self.nu_c_span
            )));
        }
        if !(self.alpha_b_max.is_finite() && self.alpha_b_max >= self.alpha_b_min + 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha_b range [{}, {}] must span at least one unit",
                self.alpha_b_min, self.alpha_b_max
            )));
        }
        if !(self.gamma_30_over_gamma_10.is_finite() && self.gamma_30_over_gamma_10 >= 0.0) {
            return Err(Error::InvalidInput(
                "constraint gamma_30_over_gamma_10 must be finite and >= 0".into(),
            ));
        }
        if !(self.truncation_eps > 0.0 && self.truncation_eps < 1.0) {
            return Err(Error::InvalidInput(
                "constraint truncation_eps must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Parameter set the constraints imply at dephasing `gamma_10`.
    ///
    /// `|Ω̃_a|`, `|Ω̃_c|`, `ν_a`, `ν_b` and `N` come from `template`; one photon
    /// is assumed in each of modes a and c.
    pub fn params_for(&self, template: &SystemParams, gamma_10: f64) -> SystemParams {
        let omega_a = template.omega_a_tilde;
        let gamma_20 = omega_a / self.omega_a_over_gamma_20;
        SystemParams {
            omega_a_tilde: omega_a,
            omega_b_tilde: template.omega_c_tilde * self.omega_b_sq_over_omega_c_sq.sqrt(),
            omega_c_tilde: template.omega_c_tilde,
            n_a: 1,
            n_c: 1,
            nu_a: template.nu_a,
            nu_b: template.nu_b,
            nu_c: template.nu_c,
            gamma_10,
            gamma_20,
            gamma_30: gamma_10 * self.gamma_30_over_gamma_10,
            gamma_40: gamma_20 * self.suppression,
            n_atoms: template.n_atoms,
        }
    }

    fn target(&self) -> PhaseTarget {
        PhaseTarget::new(self.phi)
    }
}

/// Outcome of a design search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedDesign {
    /// Parameters at the optimum, with `nu_c` set.
    pub params: SystemParams,
    pub design: GateDesign,
    pub budget: ErrorBudget,
    pub warnings: Vec<RegimeWarning>,
}

// Mean-photon-number parameters: |Ω̃_b| absorbs α_b, |Ω̃_c| absorbs α_c.
fn mean_params(params: &SystemParams, alpha_b: f64, alpha_c: Option<f64>) -> SystemParams {
    let mut p = *params;
    p.omega_b_tilde *= alpha_b;
    if let Some(ac) = alpha_c {
        p.omega_c_tilde *= ac;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LineMin {
    x: f64,
    value: f64,
    bracketed: bool,
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

// Minimizes f(ν) over [seed/span, seed·span] on a log axis.
fn minimize_log_axis(f: impl Fn(f64) -> f64, seed: f64, span: f64, tol: f64) -> LineMin {
    let g = |u: f64| {
        let v = f(u.exp());
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (lo, hi) = (seed.ln() - span.ln(), seed.ln() + span.ln());
    let step = (hi - lo) / (NU_GRID_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..NU_GRID_POINTS)
        .map(|i| {
            let u = lo + step * i as f64;
            (u, g(u))
        })
        .collect();
    let (imin, &(u0, v0)) = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is non-empty");
    if imin == 0 || imin == NU_GRID_POINTS - 1 || !v0.is_finite() {
        return LineMin {
            x: u0.exp(),
            value: v0,
            bracketed: false,
        };
    }
    let (u, v) = golden_section(&g, grid[imin - 1].0, grid[imin + 1].0, tol);
    if v <= v0 {
        LineMin {
            x: u.exp(),
            value: v,
            bracketed: true,
        }
    } else {
        LineMin {
            x: u0.exp(),
            value: v0,
            bracketed: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    nu_c: f64,
    alpha_b: f64,
    delta: f64,
    bracketed: bool,
}

struct TwoQubitSearch<'a> {
    base: SystemParams,
    c: &'a OptimizationConstraints,
}

impl TwoQubitSearch<'_> {
    fn design(&self, nu_c: f64, alpha_b: f64) -> Result<GateDesign> {
        GateDesign::calibrated(&self.base, nu_c, alpha_b, self.c.phi, GateMode::TwoQubit, None)
    }

    fn budget(&self, nu_c: f64, alpha_b: f64) -> Result<ErrorBudget> {
        let d = self.design(nu_c, alpha_b)?;
        gate_error_with(&self.base, &d, self.c.error_measure, self.c.truncation_eps)
    }

    fn delta(&self, nu_c: f64, alpha_b: f64) -> f64 {
        self.budget(nu_c, alpha_b)
            .map(|b| b.delta_total)
            .unwrap_or(f64::INFINITY)
    }

    fn seed(&self, alpha_b: f64) -> Result<f64> {
        let nu = optimal_detuning(&mean_params(&self.base, alpha_b, None))?.value;
        if nu.is_finite() && nu > 0.0 {
            Ok(nu)
        } else {
            Err(Error::DegenerateParams(format!(
                "analytic detuning seed {nu} is not positive"
            )))
        }
    }

    // Damping-only error of the mean component at the analytic optimum.
    fn damping_floor(&self, alpha_b: f64) -> f64 {
        let p = mean_params(&self.base, alpha_b, None);
        self.seed(alpha_b)
            .and_then(|nu| tau_eff(&p.with_nu_c(nu), self.c.target()))
            .map(|tau| self.c.error_measure.damping_only(tau.max(0.0)))
            .unwrap_or(0.0)
    }

    fn at_alpha(&self, alpha_b: f64, tol: f64) -> Result<Candidate> {
        let seed = self.seed(alpha_b)?;
        let m = minimize_log_axis(|nu| self.delta(nu, alpha_b), seed, self.c.nu_c_span, tol);
        Ok(Candidate {
            nu_c: m.x,
            alpha_b,
            delta: m.value,
            bracketed: m.bracketed,
        })
    }

    fn scan(&self, alphas: impl Iterator<Item = f64>, tol: f64, best: &mut Option<Candidate>) -> Result<()> {
        for a in alphas {
            if let Some(b) = best {
                let floor = self.damping_floor(a);
                // Either bound alone fails near saturation or near zero error.
                if floor > PRUNE_FACTOR * b.delta || 1.0 - floor < (1.0 - b.delta) / PRUNE_FACTOR {
                    continue;
                }
            }
            let cand = self.at_alpha(a, tol)?;
            if best.is_none_or(|b| cand.delta < b.delta) {
                *best = Some(cand);
            }
        }
        Ok(())
    }

    fn refine(&self, center: f64, best: &mut Option<Candidate>) -> Result<()> {
        let (lo, hi) = (self.c.alpha_b_min, self.c.alpha_b_max);
        let alphas = (-10..=10)
            .map(move |k| ((center * 10.0).round() + k as f64) / 10.0)
            .filter(move |a| *a >= lo && *a <= hi);
        self.scan(alphas, NU_LOG_TOL, best)
    }

    fn search(&self) -> Result<Candidate> {
        let c = self.c;
        let mut best = None;
        let first = c.alpha_b_min.ceil() as u64;
        let last = c.alpha_b_max.floor() as u64;
        self.scan((first..=last).map(|a| a as f64), NU_LOG_TOL_SCAN, &mut best)?;
        let b = best.ok_or_else(|| Error::NoConvergence("empty alpha_b range".into()))?;
        self.refine(b.alpha_b, &mut best)?;

        for _ in 0..CERTIFICATE_ROUNDS {
            let b = best.expect("set above");
            let moves = [
                (b.nu_c * (1.0 + CERTIFICATE_STEP), b.alpha_b),
                (b.nu_c * (1.0 - CERTIFICATE_STEP), b.alpha_b),
                (b.nu_c, (b.alpha_b * (1.0 + CERTIFICATE_STEP)).min(c.alpha_b_max)),
                (b.nu_c, (b.alpha_b * (1.0 - CERTIFICATE_STEP)).max(c.alpha_b_min)),
            ];
            let improved = moves
                .iter()
                .map(|&(nu, a)| (a, self.delta(nu, a)))
                .filter(|(_, d)| *d < b.delta - CERTIFICATE_SLACK)
                .min_by(|x, y| x.1.total_cmp(&y.1));
            match improved {
                None => return Ok(b),
                Some((a, _)) => self.refine(a, &mut best)?,
            }
        }
        Err(Error::NoConvergence(format!(
            "local-minimum certificate still failing after {CERTIFICATE_ROUNDS} rounds"
        )))
    }

    fn finish(&self, cand: Candidate) -> Result<OptimizedDesign> {
        let design = self.design(cand.nu_c, cand.alpha_b)?;
        let budget = gate_error_with(&self.base, &design, self.c.error_measure, self.c.truncation_eps)?;
        let params = self.base.with_nu_c(cand.nu_c);
        let mut warnings = params.validate()?;
        warnings.extend(design.warnings());
        Ok(OptimizedDesign {
            params,
            design,
            budget,
            warnings,
        })
    }
}

fn check_gamma_10(gamma_10: f64) -> Result<()> {
    if gamma_10.is_finite() && gamma_10 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "gamma_10 must be finite and > 0, got {gamma_10}"
        )))
    }
}

// Best two-qubit point, also when it sits on the edge of a search range.
fn two_qubit_best(
    template: &SystemParams,
    gamma_10: f64,
    c: &OptimizationConstraints,
) -> Result<(Candidate, OptimizedDesign)> {
    let search = TwoQubitSearch {
        base: c.params_for(template, gamma_10),
        c,
    };
    let cand = search.search()?;
    Ok((cand, search.finish(cand)?))
}

fn edge_reason(cand: &Candidate, c: &OptimizationConstraints) -> Option<String> {
    if !cand.bracketed {
        return Some(format!(
            "nu_c optimum at alpha_b = {} lies on the search-range edge",
            cand.alpha_b
        ));
    }
    if cand.alpha_b <= c.alpha_b_min || cand.alpha_b >= c.alpha_b_max {
        return Some(format!(
            "alpha_b optimum {} lies on the search-range edge",
            cand.alpha_b
        ));
    }
    None
}

/// One-qubit operating point at dephasing `gamma_10`: `ν_c` minimizes the
/// decoherence of the mean component (with `α_c = k·α_b` the ratio
/// `|Ω_b|²/|Ω_c|²` is amplitude-independent), and the returned error is that
/// decoherence floor.
fn one_qubit_floor(
    template: &SystemParams,
    gamma_10: f64,
    c: &OptimizationConstraints,
) -> Result<(SystemParams, f64, bool)> {
    let base = c.params_for(template, gamma_10);
    let a_ref = c.alpha_b_max;
    let ac_ref = c.alpha_c_over_alpha_b * a_ref;
    let mean = mean_params(&base, a_ref, Some(ac_ref));
    let seed = optimal_detuning(&mean)?.value;
    let target = c.target();
    let m = minimize_log_axis(
        |nu| {
            tau_eff(&mean.with_nu_c(nu), target)
                .map(|t| c.error_measure.damping_only(t))
                .unwrap_or(f64::INFINITY)
        },
        seed,
        c.nu_c_span,
        NU_LOG_TOL,
    );
    Ok((base.with_nu_c(m.x), m.value, m.bracketed))
}

fn one_qubit_finish(params: SystemParams, delta_dec: f64, c: &OptimizationConstraints) -> Result<OptimizedDesign> {
    let alpha_b = min_alpha_b(
        &params,
        params.nu_c,
        c.phi,
        c.alpha_c_over_alpha_b,
        delta_dec,
        (c.alpha_b_min, c.alpha_b_max),
        c.error_measure,
        c.truncation_eps,
    )?;
    let alpha_c = c.alpha_c_over_alpha_b * alpha_b;
    let design = GateDesign::calibrated(&params, params.nu_c, alpha_b, c.phi, GateMode::OneQubit, Some(alpha_c))?;
    let spread = crate::gate::one_qubit_spread(
        &params,
        params.nu_c,
        c.phi,
        alpha_b,
        c.alpha_c_over_alpha_b,
        c.error_measure,
        c.truncation_eps,
    )?;
    let budget = ErrorBudget::new(delta_dec, delta_dec, spread);
    let mut warnings = params.validate()?;
    warnings.extend(design.warnings());
    Ok(OptimizedDesign {
        params,
        design,
        budget,
        warnings,
    })
}

/// Minimum-error design at dephasing `gamma_10` (absolute units).
///
/// Two-qubit mode minimizes the total error over `(ν_c, α_b)`. One-qubit mode
/// reports the decoherence floor at the best `ν_c` and the smallest `α_b`
/// whose coherent spread stays within it.
pub fn optimize_design(template: &SystemParams, gamma_10: f64, c: &OptimizationConstraints) -> Result<OptimizedDesign> {
    check_gamma_10(gamma_10)?;
    c.validate()?;
    match c.mode {
        GateMode::TwoQubit => {
            let (cand, out) = two_qubit_best(template, gamma_10, c)?;
            match edge_reason(&cand, c) {
                Some(reason) => Err(Error::NoConvergence(reason)),
                None => Ok(out),
            }
        }
        GateMode::OneQubit => {
            let (params, delta, bracketed) = one_qubit_floor(template, gamma_10, c)?;
            if !bracketed {
                return Err(Error::NoConvergence(
                    "one-qubit nu_c optimum lies on the search-range edge".into(),
                ));
            }
            one_qubit_finish(params, delta, c)
        }
    }
}

/// Largest tolerable dephasing for a target error, with its witnessing design.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDephasing {
    pub gamma_10: f64,
    pub optimized: OptimizedDesign,
}

// Largest γ in [lo, hi] with f(γ) ≤ target for nondecreasing f. Decades are
// scanned downward from `hi` so the expensive small-γ end is reached only when
// needed; the bracketing decade is then bisected on ln γ.
fn invert_monotone<T>(f: impl Fn(f64) -> Result<(f64, T)>, lo: f64, hi: f64, delta_target: f64) -> Result<(f64, T)> {
    let mut upper = hi;
    let mut g = hi;
    let (mut best_g, mut best) = loop {
        let (d, out) = f(g)?;
        if d <= delta_target {
            break (g, out);
        }
        if g <= lo {
            return Err(Error::NotAttainable { delta_target, floor: d });
        }
        upper = g;
        g = (g / 10.0).max(lo);
    };
    if best_g == upper {
        return Ok((best_g, best));
    }
    let mut hi = upper;
    while hi / best_g > 1.0 + GAMMA_10_REL_TOL {
        let mid = (best_g * hi).sqrt();
        let (d, out) = f(mid)?;
        if d <= delta_target {
            best_g = mid;
            best = out;
        } else {
            hi = mid;
        }
    }
    Ok((best_g, best))
}

/// Largest dephasing whose optimized error does not exceed `delta_target`,
/// relying on the optimized error being nondecreasing in `γ10`.
pub fn max_dephasing(template: &SystemParams, delta_target: f64, c: &OptimizationConstraints) -> Result<MaxDephasing> {
    if !(delta_target > 0.0 && delta_target < 0.5) {
        return Err(Error::InvalidInput(format!(
            "delta_target must lie in (0, 0.5), got {delta_target}"
        )));
    }
    c.validate()?;
    let omega_a = template.omega_a_tilde;
    if !(omega_a > 0.0) {
        return Err(Error::InvalidInput("max_dephasing needs |Omega_a| > 0".into()));
    }
    let (lo, hi) = (GAMMA_10_RANGE.0 * omega_a, GAMMA_10_RANGE.1 * omega_a);

    match c.mode {
        GateMode::TwoQubit => {
            let eval = |g: f64| two_qubit_best(template, g, c).map(|(_, out)| (out.budget.delta_total, out));
            let (gamma_10, optimized) = invert_monotone(eval, lo, hi, delta_target)?;
            Ok(MaxDephasing { gamma_10, optimized })
        }
        GateMode::OneQubit => {
            let eval = |g: f64| one_qubit_floor(template, g, c).map(|(p, d, _)| (d, (p, d)));
            let (gamma_10, (p, d)) = invert_monotone(eval, lo, hi, delta_target)?;
            Ok(MaxDephasing {
                gamma_10,
                optimized: one_qubit_finish(p, d, c)?,
            })
        }
    }
}
