//! Adaptive Dormand–Prince 5(4) integrator with dense output, for small
//! complex-valued systems `y' = f(t, y)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hard cap on accepted plus rejected steps for one integration.
pub const MAX_STEPS: u64 = 20_000_000;

// Steps taken before the projected step count is checked against the budget.
const PROJECTION_WARMUP: u64 = 100;

const SAFETY: f64 = 0.9;
const FACTOR_MIN: f64 = 0.2;
const FACTOR_MAX: f64 = 5.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type State<const D: usize> = [C64; D];

fn inf_norm<const D: usize>(y: &State<D>) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn combine<const D: usize>(y: &State<D>, h: f64, terms: &[(f64, &State<D>)]) -> State<D> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o += acc * h;
    }
    out
}

/// Integration output: states at the recorded times, plus step statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<State<D>>,
    pub accepted: u64,
    pub rejected: u64,
}

/// Integrates from `(0, y0)` to `t_final`.
///
/// The local error is measured relative to the state's infinity norm, so the
/// step sequence is invariant under scaling of `y0`; for linear `f` the
/// trajectory scales exactly. With `samples = None` every accepted step is
/// recorded; otherwise the states at the given ascending times in
/// `[0, t_final]` are interpolated with the fourth-order dense output.
pub fn dopri5<const D: usize>(
    f: impl Fn(f64, &State<D>) -> State<D>,
    y0: State<D>,
    t_final: f64,
    tol: f64,
    samples: Option<&[f64]>,
) -> Result<Solution<D>> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must be finite and > 0, got {t_final}"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput(format!("tol must lie in (0, 1), got {tol}")));
    }
    if let Some(s) = samples {
        if s.windows(2).any(|w| w[1] < w[0]) || s.iter().any(|&x| !(0.0..=t_final).contains(&x)) {
            return Err(Error::InvalidInput(
                "sample times must be ascending within [0, t_final]".into(),
            ));
        }
    }

    let mut sol = Solution {
        t: Vec::new(),
        y: Vec::new(),
        accepted: 0,
        rejected: 0,
    };
    let mut next_sample = 0usize;
    match samples {
        None => {
            sol.t.push(0.0);
            sol.y.push(y0);
        }
        Some(s) => {
            while next_sample < s.len() && s[next_sample] == 0.0 {
                sol.t.push(0.0);
                sol.y.push(y0);
                next_sample += 1;
            }
        }
    }

    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let f0 = inf_norm(&k1);
    let mut h = if f0 > 0.0 {
        (0.01 * inf_norm(&y) / f0).min(t_final)
    } else {
        t_final
    };
    if !(h > 0.0) {
        h = t_final;
    }

    while t < t_final {
        if sol.accepted + sol.rejected >= MAX_STEPS {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }

        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);
        let err_vec = combine(
            &[C64::new(0.0, 0.0); D],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );

        let scale = inf_norm(&y).max(inf_norm(&y_new));
        let err = if scale > 0.0 {
            inf_norm(&err_vec) / (tol * scale)
        } else {
            0.0
        };
        if !err.is_finite() {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let factor = if err == 0.0 {
            FACTOR_MAX
        } else {
            (SAFETY * err.powf(-0.2)).clamp(FACTOR_MIN, FACTOR_MAX)
        };

        if err <= 1.0 {
            let t_new = if last { t_final } else { t + h };
            if let Some(s) = samples {
                if next_sample < s.len() && s[next_sample] <= t_new {
                    let mut ydiff = y_new;
                    let mut bspl = [C64::new(0.0, 0.0); D];
                    let mut r4 = [C64::new(0.0, 0.0); D];
                    for i in 0..D {
                        ydiff[i] -= y[i];
                        bspl[i] = k1[i] * h - ydiff[i];
                        r4[i] = ydiff[i] - k7[i] * h - bspl[i];
                    }
                    let zero = [C64::new(0.0, 0.0); D];
                    let r5 = combine(
                        &zero,
                        h,
                        &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)],
                    );
                    while next_sample < s.len() && s[next_sample] <= t_new {
                        let ts = s[next_sample];
                        let theta = ((ts - t) / h).clamp(0.0, 1.0);
                        let theta1 = 1.0 - theta;
                        let mut ys = y;
                        for i in 0..D {
                            ys[i] += (ydiff[i] + (bspl[i] + (r4[i] + r5[i] * theta1) * theta) * theta1) * theta;
                        }
                        sol.t.push(ts);
                        sol.y.push(ys);
                        next_sample += 1;
                    }
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            sol.accepted += 1;
            if samples.is_none() {
                sol.t.push(t);
                sol.y.push(y);
            }
        } else {
            sol.rejected += 1;
        }
        h *= factor;

        let steps = sol.accepted + sol.rejected;
        if steps >= PROJECTION_WARMUP && t < t_final {
            let projected = (t_final - t) / h;
            if projected > (MAX_STEPS - steps) as f64 || t + h == t {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
    }
    Ok(sol)
}
