//! Poisson photon statistics of the coherent drive and the idealized
//! Kerr-evolved coherent state.

use num_complex::Complex64 as C64;
use statrs::distribution::{DiscreteCDF, Poisson};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// Default Poisson mass allowed outside a truncated Fock sum.
pub const DEFAULT_TRUNCATION_EPS: f64 = 1e-10;

/// Slack on `Σ|amplitude|² + tail = 1`.
pub const NORMALIZATION_EPS: f64 = 1e-12;

/// Hard cap on the number of Fock components in a single sum.
const MAX_COMPONENTS: u64 = 50_000_000;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "truncation eps must lie in (0, 1), got {eps}"
        )))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "coherent amplitude must be finite and >= 0, got {alpha}"
        )))
    }
}

/// `P(N > n)` for `N ~ Poisson(mean)`.
pub fn poisson_upper_tail(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|d| d.sf(n)).unwrap_or(f64::NAN)
}

/// `P(N < n)` for `N ~ Poisson(mean)`.
pub fn poisson_lower_tail(mean: f64, n: u64) -> f64 {
    if n == 0 || mean == 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|d| d.cdf(n - 1)).unwrap_or(f64::NAN)
}

/// `P(N = n)`, evaluated in log space so large means do not overflow.
pub fn poisson_pmf(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - ln_factorial(n)).exp()
}

// Smallest n in [lo, hi] with pred(n) true; pred must be monotone false→true.
fn first_true(mut lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

fn upper_search_limit(mean: f64) -> u64 {
    // Far beyond any tail of interest: mean + 60σ + 60.
    (mean + 60.0 * mean.sqrt() + 60.0).ceil() as u64
}

/// Smallest `n_max` whose Poisson(`|α|²`) mass beyond `n_max` is at most `eps`.
pub fn truncation_bound(alpha: f64, eps: f64) -> Result<u64> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    let mean = alpha * alpha;
    if mean == 0.0 {
        return Ok(0);
    }
    let n = first_true(0, upper_search_limit(mean), |n| poisson_upper_tail(mean, n) <= eps);
    Ok(n)
}

/// Contiguous block of Poisson weights holding all but `excluded_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub start: u64,
    pub weights: Vec<f64>,
    pub excluded_mass: f64,
}

impl PoissonWindow {
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.start + i as u64, w))
    }

    pub fn end(&self) -> u64 {
        self.start + self.weights.len() as u64 - 1
    }
}

/// Two-sided truncation of Poisson(`mean`) with at most `eps` mass dropped
/// (half from each side).
pub fn poisson_window(mean: f64, eps: f64) -> Result<PoissonWindow> {
    check_eps(eps)?;
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "Poisson mean must be finite and >= 0, got {mean}"
        )));
    }
    if mean == 0.0 {
        return Ok(PoissonWindow {
            start: 0,
            weights: vec![1.0],
            excluded_mass: 0.0,
        });
    }
    let half = eps / 2.0;
    let mode = mean.floor() as u64;
    let hi = first_true(mode, upper_search_limit(mean), |n| poisson_upper_tail(mean, n) <= half);
    // Largest lo with P(N < lo) <= half.
    let lo = first_true(0, mode, |n| poisson_lower_tail(mean, n + 1) > half);
    if hi - lo + 1 > MAX_COMPONENTS {
        return Err(Error::TruncationNotConverged {
            tail_mass: poisson_upper_tail(mean, lo + MAX_COMPONENTS),
            eps,
        });
    }
    let excluded_mass = poisson_lower_tail(mean, lo) + poisson_upper_tail(mean, hi);
    if excluded_mass > eps {
        return Err(Error::TruncationNotConverged {
            tail_mass: excluded_mass,
            eps,
        });
    }
    let weights = poisson_weights(mean, lo, hi, 1.0 - excluded_mass);
    Ok(PoissonWindow {
        start: lo,
        weights,
        excluded_mass,
    })
}

/// Poisson weights on `lo..=hi` summing to `mass`. Built by the ratio
/// recurrence outward from the mode, which stays accurate for large means
/// where `n ln(mean) − ln n!` cancels catastrophically.
fn poisson_weights(mean: f64, lo: u64, hi: u64, mass: f64) -> Vec<f64> {
    let anchor = (mean.floor() as u64).clamp(lo, hi);
    let mut w = vec![0.0; (hi - lo + 1) as usize];
    let i0 = (anchor - lo) as usize;
    w[i0] = 1.0;
    for i in i0 + 1..w.len() {
        w[i] = w[i - 1] * mean / (lo + i as u64) as f64;
    }
    for i in (0..i0).rev() {
        w[i] = w[i + 1] * (lo + i as u64 + 1) as f64 / mean;
    }
    let total: f64 = w.iter().sum();
    let scale = mass / total;
    w.iter_mut().for_each(|x| *x *= scale);
    w
}

/// Truncated Fock-basis state of mode b.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    /// Amplitudes for `n_b = 0..=n_max`.
    pub amplitudes: Vec<C64>,
    pub n_max: u64,
    /// Poisson mass beyond `n_max`.
    pub tail_mass: f64,
}

impl FockExpansion {
    /// Truncated coherent state `|α⟩` with real amplitude `α`, times `e^{iθ}`.
    pub fn coherent(alpha: f64, global_phase: f64, eps: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n_max = truncation_bound(alpha, eps)?;
        let mean = alpha * alpha;
        let tail_mass = poisson_upper_tail(mean, n_max);
        let phase = C64::from_polar(1.0, global_phase);
        let amplitudes = if mean == 0.0 {
            vec![phase]
        } else {
            poisson_weights(mean, 0, n_max, 1.0 - tail_mass)
                .into_iter()
                .map(|p| phase * p.sqrt())
                .collect()
        };
        Ok(FockExpansion {
            amplitudes,
            n_max,
            tail_mass,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over the common truncated support.
    pub fn overlap(&self, other: &FockExpansion) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Idealized Kerr evolution of a coherent drive: component `n_b ≥ 1` acquires
/// `e^{−i n_a n_c φ |α_b|²/n_b}`; the vacuum component acquires no phase.
pub fn kerr_phase_state(alpha_b: f64, phi: f64, n_a: u64, n_c: u64, eps: f64) -> Result<FockExpansion> {
    check_alpha(alpha_b)?;
    if !phi.is_finite() {
        return Err(Error::InvalidInput(format!("phi must be finite, got {phi}")));
    }
    let mut state = FockExpansion::coherent(alpha_b, 0.0, eps)?;
    let mean = alpha_b * alpha_b;
    let coupling = (n_a * n_c) as f64 * phi * mean;
    for (n, amp) in state.amplitudes.iter_mut().enumerate().skip(1) {
        *amp *= C64::from_polar(1.0, -coupling / n as f64);
    }
    Ok(state)
}

/// `1 − |⟨ideal|ψ⟩|²` with the ideal output `e^{−iφ}|α_b⟩`.
pub fn kerr_spread_error(alpha_b: f64, phi: f64, eps: f64) -> Result<f64> {
    let evolved = kerr_phase_state(alpha_b, phi, 1, 1, eps)?;
    let ideal = FockExpansion::coherent(alpha_b, -phi, eps)?;
    Ok(1.0 - ideal.overlap(&evolved).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    // Brute-force cumulative summation of the pmf by recurrence.
    fn cumulative_bound(alpha: f64, eps: f64) -> u64 {
        let mean = alpha * alpha;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut n = 0u64;
        while 1.0 - cdf > eps {
            n += 1;
            p *= mean / n as f64;
            cdf += p;
        }
        n
    }

    #[test]
    fn vacuum_bound() {
        assert_eq!(truncation_bound(0.0, 1e-12).unwrap(), 0);
    }

    #[test]
    fn bound_matches_cumulative_oracle() {
        // Frozen from the cumulative-sum oracle.
        assert_eq!(cumulative_bound(2.0, 1e-12), 25);
        assert_eq!(truncation_bound(2.0, 1e-12).unwrap(), 25);
        for &(a, e) in &[(0.5, 1e-6), (1.0, 1e-9), (3.0, 1e-10), (5.0, 1e-8)] {
            assert_eq!(
                truncation_bound(a, e).unwrap(),
                cumulative_bound(a, e),
                "alpha={a} eps={e}"
            );
        }
    }

    #[test]
    fn bound_is_monotone() {
        let mut last = 0;
        for i in 0..40 {
            let n = truncation_bound(0.25 * i as f64, 1e-10).unwrap();
            assert!(n >= last);
            last = n;
        }
        assert!(truncation_bound(3.0, 1e-12).unwrap() >= truncation_bound(3.0, 1e-6).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        assert!(truncation_bound(-1.0, 1e-6).is_err());
        assert!(truncation_bound(1.0, 0.0).is_err());
        assert!(truncation_bound(1.0, 1.0).is_err());
        assert!(poisson_window(4.0, 2.0).is_err());
    }

    #[test]
    fn window_mass() {
        for &mean in &[0.3, 4.0, 100.0, 400.0, 250_000.0] {
            let w = poisson_window(mean, 1e-10).unwrap();
            let inside: f64 = w.weights.iter().sum();
            assert!(w.excluded_mass <= 1e-10);
            assert!((inside + w.excluded_mass - 1.0).abs() < 1e-12, "mean={mean}");
        }
    }

    #[test]
    fn window_weights_match_pmf() {
        let w = poisson_window(30.0, 1e-12).unwrap();
        for (n, p) in w.iter() {
            assert_relative_eq!(p, poisson_pmf(30.0, n), max_relative = 1e-11);
        }
    }

    #[test]
    fn expansion_normalized() {
        let s = kerr_phase_state(2.0, PI, 1, 1, 1e-12).unwrap();
        assert!(s.tail_mass <= 1e-12);
        assert!((s.norm_sqr() + s.tail_mass - 1.0).abs() < NORMALIZATION_EPS);
    }

    #[test]
    fn absent_photon_means_no_phase() {
        let plain = FockExpansion::coherent(2.0, 0.0, 1e-12).unwrap();
        assert_eq!(kerr_phase_state(2.0, PI, 0, 1, 1e-12).unwrap(), plain);
        assert_eq!(kerr_phase_state(2.0, PI, 1, 0, 1e-12).unwrap(), plain);
    }

    #[test]
    fn spread_error_small_amplitude() {
        // Direct summation with the pmf recurrence.
        let mean: f64 = 4.0;
        let mut p = (-mean).exp();
        // The vacuum keeps zero phase against the ideal e^{−iφ}.
        let mut s = C64::from_polar(p, PI);
        for n in 1..200u64 {
            p *= mean / n as f64;
            s += p * C64::from_polar(1.0, PI - PI * mean / n as f64);
        }
        let oracle = 1.0 - s.norm_sqr();
        assert_relative_eq!(kerr_spread_error(2.0, PI, 1e-12).unwrap(), oracle, max_relative = 1e-10);
    }

    #[test]
    fn large_amplitude_factors_out_phase() {
        // Spread error ≈ φ²/|α|²: ≈ 4e-3 at |α| = 50, below 1e-3 from |α| ≈ 100.
        let e50 = kerr_spread_error(50.0, PI, 1e-12).unwrap();
        assert!(e50 < 5e-3 && e50 > 3e-3);
        let e200 = kerr_spread_error(200.0, PI, 1e-12).unwrap();
        assert!(1.0 - e200 > 0.999);
    }
}
