//! Trade-off tables: optimized designs over a grid of target errors or
//! dephasing rates, for several constraint sets.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::GateMode;
use crate::model::SystemParams;
use crate::optimizer::{max_dephasing, optimize_design, OptimizationConstraints, OptimizedDesign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Grid values are target errors; each row inverts to the largest tolerable `γ10`.
    DeltaTarget,
    /// Grid values are `γ10/|Ω̃_a|`; each row is a forward optimization.
    Gamma10,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(Error::InvalidInput(format!(
            "log grid needs 0 < lo <= hi and n >= 1, got ({lo}, {hi}, {n})"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// One table row; rates and detunings are relative to `|Ω̃_a|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma_10_over_omega_a: f64,
    pub delta_total: f64,
    pub delta_decoherence: f64,
    pub delta_spread: f64,
    pub nu_c_over_omega_a: f64,
    pub alpha_b: f64,
    pub time_norm: f64,
    pub suppression: f64,
    pub mode: GateMode,
    /// `ok`, or the error kind that stopped this point.
    pub status: String,
}

pub const STATUS_OK: &str = "ok";

impl SweepRow {
    // The series key comes from the constraints so rows of one series group exactly.
    fn from_design(gamma_10: f64, omega_a: f64, c: &OptimizationConstraints, out: &OptimizedDesign) -> Self {
        SweepRow {
            gamma_10_over_omega_a: gamma_10 / omega_a,
            delta_total: out.budget.delta_total,
            delta_decoherence: out.budget.delta_decoherence,
            delta_spread: out.budget.delta_coherent_spread,
            nu_c_over_omega_a: out.design.nu_c / omega_a,
            alpha_b: out.design.alpha_b,
            time_norm: out.design.time_norm,
            suppression: c.suppression,
            mode: c.mode,
            status: STATUS_OK.into(),
        }
    }

    fn failed(gamma_10_over_omega_a: f64, c: &OptimizationConstraints, err: &Error) -> Self {
        SweepRow {
            gamma_10_over_omega_a,
            delta_total: f64::NAN,
            delta_decoherence: f64::NAN,
            delta_spread: f64::NAN,
            nu_c_over_omega_a: f64::NAN,
            alpha_b: f64::NAN,
            time_norm: f64::NAN,
            suppression: c.suppression,
            mode: c.mode,
            status: err.kind().into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

/// Evaluates every grid point for every constraint set. Rows are ordered by
/// constraint set, then grid value, whatever the evaluation order; per-point
/// failures are recorded in the row's status.
pub fn sweep(template: &SystemParams, spec: &SweepSpec, series: &[OptimizationConstraints]) -> Result<Vec<SweepRow>> {
    if spec.values.is_empty() {
        return Err(Error::InvalidInput("sweep grid is empty".into()));
    }
    if series.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one constraint set".into()));
    }
    let omega_a = template.omega_a_tilde;
    if !(omega_a > 0.0) {
        return Err(Error::InvalidInput(
            "sweep needs |Omega_a| > 0 for normalization".into(),
        ));
    }
    let jobs: Vec<(&OptimizationConstraints, f64)> = series
        .iter()
        .flat_map(|c| spec.values.iter().map(move |&v| (c, v)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(c, v)| match spec.axis {
            SweepAxis::DeltaTarget => match max_dephasing(template, v, c) {
                Ok(m) => SweepRow::from_design(m.gamma_10, omega_a, c, &m.optimized),
                Err(e) => SweepRow::failed(f64::NAN, c, &e),
            },
            SweepAxis::Gamma10 => match optimize_design(template, v * omega_a, c) {
                Ok(out) => SweepRow::from_design(v * omega_a, omega_a, c, &out),
                Err(e) => SweepRow::failed(v, c, &e),
            },
        })
        .collect();
    Ok(rows)
}

/// A decrease of optimized `δ_total` with increasing `γ10` within one series.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub suppression: f64,
    pub mode: GateMode,
    pub gamma_10_over_omega_a: (f64, f64),
    pub delta_total: (f64, f64),
}

/// Checks that `δ_total` is nondecreasing in `γ10` within each
/// `(suppression, mode)` series. Failed rows are skipped.
pub fn audit_monotonicity(rows: &[SweepRow]) -> Vec<MonotonicityViolation> {
    let mut keys: Vec<(f64, GateMode)> = Vec::new();
    for r in rows {
        if !keys
            .iter()
            .any(|&(s, m)| s.to_bits() == r.suppression.to_bits() && m == r.mode)
        {
            keys.push((r.suppression, r.mode));
        }
    }
    let mut violations = Vec::new();
    for (s, m) in keys {
        let mut series: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.is_ok() && r.suppression.to_bits() == s.to_bits() && r.mode == m)
            .collect();
        series.sort_by(|a, b| a.gamma_10_over_omega_a.total_cmp(&b.gamma_10_over_omega_a));
        for w in series.windows(2) {
            if w[1].delta_total < w[0].delta_total {
                violations.push(MonotonicityViolation {
                    suppression: s,
                    mode: m,
                    gamma_10_over_omega_a: (w[0].gamma_10_over_omega_a, w[1].gamma_10_over_omega_a),
                    delta_total: (w[0].delta_total, w[1].delta_total),
                });
            }
        }
    }
    violations
}

pub const CSV_HEADER: [&str; 10] = [
    "gamma_10_over_omega_a",
    "delta_total",
    "delta_decoherence",
    "delta_spread",
    "nu_c_over_omega_a",
    "alpha_b",
    "time_norm",
    "suppression",
    "mode",
    "status",
];

/// Lossless real formatting: 17 significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("sweep CSV export: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        let reals = [
            r.gamma_10_over_omega_a,
            r.delta_total,
            r.delta_decoherence,
            r.delta_spread,
            r.nu_c_over_omega_a,
            r.alpha_b,
            r.time_norm,
            r.suppression,
        ];
        let mut rec: Vec<String> = reals.iter().map(|&x| format_real(x)).collect();
        rec.push(r.mode.as_str().into());
        rec.push(r.status.clone());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("sweep CSV export: {e}")))?;
    Ok(())
}

/// JSON array of rows. Non-finite numbers of failed rows become `null`.
pub fn to_json(rows: &[SweepRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::InvalidInput(format!("sweep JSON export: {e}")))
}
