//! The four subcommands. Each returns a table plus diagnostics; printing and
//! exit codes are left to the caller.

use eit_core::analytic::{
    asymptotic_design, aux_factors, decoherence_error, fock_dephasing_bound, gate_time, optimal_detuning, tau_eff,
    tau_eff_at_optimum, PhaseTarget, DUAL_RAIL_RHO10,
};
use eit_core::model::{kerr_approximation, w10};
use eit_core::optimizer::{max_dephasing, optimize_design, OptimizedDesign};
use eit_core::oracle::{default_t_final, transient_window, verify_qss_sampled, OracleReport, RegimeFlag};
use eit_core::sweep::{audit_monotonicity, sweep, SweepRow, CSV_HEADER};
use eit_core::{ErrorMeasure, RegimeWarning, SystemParams, C64};

use crate::config::RunConfig;
use crate::table::{Cell, Table};
use crate::{math, CliError};

/// `|Ω_a|/γ20` values of the oracle scan.
pub const ORACLE_SCAN: [f64; 3] = [0.1, 0.3, 1.0];

/// Largest deviation allowed at the first (dispersive) scan point.
pub const ORACLE_HARD_BOUND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Design,
    Sweep,
    CheckOracle,
}

#[derive(Debug)]
pub struct Report {
    pub table: Table,
    /// Human-readable diagnostics for stderr.
    pub notes: Vec<String>,
    /// A failure detected after the table was produced; the table is still emitted.
    pub outcome: Result<(), CliError>,
}

impl Report {
    fn ok(table: Table, notes: Vec<String>) -> Self {
        Report {
            table,
            notes,
            outcome: Ok(()),
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Eval => eval(cfg),
        Command::Design => design(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::CheckOracle => check_oracle(cfg),
    }
}

fn warning_notes(warnings: &[RegimeWarning]) -> Vec<String> {
    let mut notes: Vec<String> = Vec::new();
    for w in warnings {
        let line = format!("warning: {w}");
        if !notes.contains(&line) {
            notes.push(line);
        }
    }
    notes
}

/// Rate unit of the output: `|Ω̃_a|`, or 1 in raw mode.
pub fn rate_unit(cfg: &RunConfig) -> Result<f64, CliError> {
    if cfg.output.raw {
        return Ok(1.0);
    }
    let s = cfg.system.omega_a_tilde;
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(CliError::Config(format!(
            "normalized output needs system.omega_a_tilde > 0 (got {s}); use --raw"
        )))
    }
}

/// Quantities reported by `eval`, in output order.
pub fn eval_entries(cfg: &RunConfig) -> Result<(Vec<(String, f64)>, Vec<RegimeWarning>), CliError> {
    let p = &cfg.system;
    let mut warnings = p.validate().map_err(math("eval"))?;
    let s = rate_unit(cfg)?;
    let target = PhaseTarget::new(cfg.eval.phi);
    warnings.extend(target.warnings());
    let mut out: Vec<(String, f64)> = Vec::new();

    let kerr = if cfg.eval.kerr {
        Some(kerr_approximation(p).map_err(math("kerr_approximation"))?)
    } else {
        None
    };

    let w = w10(p).map_err(math("w10"))?;
    out.push(("re_w10".into(), w.value.re / s));
    out.push(("im_w10".into(), w.value.im / s));
    if let Some(k) = kerr {
        out.push(("kerr_re_w10".into(), k / s));
    }

    let aux = aux_factors(p).map_err(math("aux_factors"))?;
    out.push(("q_b_sq".into(), aux.q_b_sq / (s * s)));
    out.push(("q_c_sq".into(), aux.q_c_sq / (s * s)));
    out.push(("gamma_10_tilde".into(), aux.gamma_10_tilde / s));
    out.push(("gamma_20_tilde".into(), aux.gamma_20_tilde / s));

    let tau = tau_eff(p, target).map_err(math("tau_eff"))?;
    out.push(("tau_eff".into(), tau));

    let nu = optimal_detuning(p).map_err(math("optimal_detuning"))?;
    warnings.extend(nu.warnings.iter().cloned());
    out.push(("optimal_nu_c".into(), nu.value / s));
    let tau_opt = tau_eff_at_optimum(p, target).map_err(math("tau_eff_at_optimum"))?;
    warnings.extend(tau_opt.warnings.iter().cloned());
    out.push(("tau_eff_at_optimum".into(), tau_opt.value));

    let asym = asymptotic_design(p, target).map_err(math("asymptotic_design"))?;
    warnings.extend(asym.warnings.iter().cloned());
    out.push(("asymptotic_nu_c".into(), asym.value.nu_c / s));
    out.push(("asymptotic_tau_eff".into(), asym.value.tau_eff));

    let bound = fock_dephasing_bound(cfg.eval.delta, target, cfg.eval.n_b).map_err(math("fock_dephasing_bound"))?;
    let bound = if cfg.output.raw { bound * p.omega_a_tilde } else { bound };
    out.push(("fock_dephasing_bound_gamma_10".into(), bound));

    let time_norm = gate_time(p, target).map_err(math("gate_time"))?;
    let time = if cfg.output.raw {
        time_norm / (p.omega_a() * p.n_atoms as f64)
    } else {
        time_norm
    };
    out.push(("gate_time".into(), time));

    if cfg.output.verbose {
        let dual = decoherence_error(tau, C64::new(DUAL_RAIL_RHO10, 0.0)).map_err(math("decoherence_error"))?;
        out.push(("decoherence_error_dual_rail".into(), dual));
        out.push((
            "decoherence_error_conditional".into(),
            ErrorMeasure::ConditionalOverlap.damping_only(tau),
        ));
    }
    Ok((out, warnings))
}

fn eval(cfg: &RunConfig) -> Result<Report, CliError> {
    let (entries, warnings) = eval_entries(cfg)?;
    Ok(Report::ok(Table::key_value(entries), warning_notes(&warnings)))
}

/// Column names of design and sweep tables.
pub fn design_columns(raw: bool) -> Vec<&'static str> {
    let mut cols = CSV_HEADER.to_vec();
    if raw {
        cols[0] = "gamma_10";
        cols[4] = "nu_c";
        cols[6] = "time";
    }
    cols
}

// Converts a normalized row to raw units in place.
fn raw_row(row: &mut SweepRow, template: &SystemParams) {
    let s = template.omega_a_tilde;
    row.gamma_10_over_omega_a *= s;
    row.nu_c_over_omega_a *= s;
    row.time_norm /= s * template.n_atoms as f64;
}

fn row_cells(r: &SweepRow) -> Vec<Cell> {
    vec![
        r.gamma_10_over_omega_a.into(),
        r.delta_total.into(),
        r.delta_decoherence.into(),
        r.delta_spread.into(),
        r.nu_c_over_omega_a.into(),
        r.alpha_b.into(),
        r.time_norm.into(),
        r.suppression.into(),
        r.mode.as_str().into(),
        r.status.clone().into(),
    ]
}

/// The design row: the sweep schema plus `alpha_c`, `phi` and `fidelity`.
pub fn design_table(cfg: &RunConfig, gamma_10: f64, out: &OptimizedDesign) -> Result<Table, CliError> {
    let s = rate_unit(cfg)?;
    let d = &out.design;
    let mut row = SweepRow {
        gamma_10_over_omega_a: gamma_10 / s,
        delta_total: out.budget.delta_total,
        delta_decoherence: out.budget.delta_decoherence,
        delta_spread: out.budget.delta_coherent_spread,
        nu_c_over_omega_a: d.nu_c / s,
        alpha_b: d.alpha_b,
        time_norm: d.time_norm,
        suppression: cfg.constraints.suppression,
        mode: d.mode,
        status: eit_core::sweep::STATUS_OK.into(),
    };
    if cfg.output.raw {
        row.time_norm /= out.params.omega_a() * out.params.n_atoms as f64;
    }
    let mut cols = design_columns(cfg.output.raw);
    cols.extend(["alpha_c", "phi", "fidelity"]);
    let mut t = Table::new(cols);
    let mut cells = row_cells(&row);
    cells.push(d.alpha_c.unwrap_or(f64::NAN).into());
    cells.push(d.phi.into());
    cells.push(out.budget.fidelity.into());
    t.push(cells);
    Ok(t)
}

/// Runs the configured design search: `(γ10, design)`.
pub fn design_search(cfg: &RunConfig) -> Result<(f64, OptimizedDesign), CliError> {
    let template = &cfg.system;
    match (cfg.design.delta_target, cfg.design.gamma_10_over_omega_a) {
        (Some(delta), None) => {
            let m = max_dephasing(template, delta, &cfg.constraints).map_err(math("max_dephasing"))?;
            Ok((m.gamma_10, m.optimized))
        }
        (None, Some(g)) => {
            let gamma_10 = g * template.omega_a_tilde;
            let out = optimize_design(template, gamma_10, &cfg.constraints).map_err(math("optimize_design"))?;
            Ok((gamma_10, out))
        }
        (Some(_), Some(_)) => Err(CliError::Config(
            "design.delta_target and design.gamma_10_over_omega_a are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Config(
            "design needs design.delta_target (--delta) or design.gamma_10_over_omega_a (--gamma-10)".into(),
        )),
    }
}

fn design(cfg: &RunConfig) -> Result<Report, CliError> {
    rate_unit(cfg)?;
    let (gamma_10, out) = design_search(cfg)?;
    let table = design_table(cfg, gamma_10, &out)?;
    Ok(Report::ok(table, warning_notes(&out.warnings)))
}

/// Sweep rows in output units.
pub fn sweep_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let spec = cfg.sweep_spec()?;
    let series = cfg.sweep_series();
    let mut rows = sweep(&cfg.system, &spec, &series).map_err(math("sweep"))?;
    if cfg.output.raw {
        for r in &mut rows {
            raw_row(r, &cfg.system);
        }
    }
    Ok(rows)
}

fn run_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let rows = sweep_rows(cfg)?;
    let mut table = Table::new(design_columns(cfg.output.raw));
    for r in &rows {
        table.push(row_cells(r));
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    let mut notes = vec![format!("sweep: {} rows, {} failed", rows.len(), failed)];
    for r in rows.iter().filter(|r| !r.is_ok()) {
        notes.push(format!(
            "  suppression {:e}, {}: {}",
            r.suppression,
            r.mode.as_str(),
            r.status
        ));
    }
    let violations = audit_monotonicity(&rows);
    let outcome = if violations.is_empty() {
        Ok(())
    } else {
        let detail: Vec<String> = violations
            .iter()
            .map(|v| {
                format!(
                    "suppression {:e}, {}: delta_total {:e} -> {:e} between gamma_10 {:e} and {:e}",
                    v.suppression,
                    v.mode.as_str(),
                    v.delta_total.0,
                    v.delta_total.1,
                    v.gamma_10_over_omega_a.0,
                    v.gamma_10_over_omega_a.1
                )
            })
            .collect();
        Err(CliError::Audit(detail.join("; ")))
    };
    Ok(Report { table, notes, outcome })
}

/// One oracle point: label, nominal `|Ω_a|/γ20`, parameters.
pub fn oracle_points(p: &SystemParams) -> Vec<(&'static str, f64, SystemParams)> {
    let mut points = vec![("configured", p.omega_a() / p.gamma_20, *p)];
    for r in ORACLE_SCAN {
        let mut q = *p;
        q.omega_a_tilde = r * p.gamma_20 / (p.n_a as f64).sqrt();
        points.push(("scan", r, q));
    }
    points
}

/// Integration time of an oracle point. Points without phase accumulation
/// run for twice the transient window.
pub fn oracle_t_final(cfg: &RunConfig, p: &SystemParams) -> Result<f64, CliError> {
    if let Some(t) = cfg.oracle.t_final {
        return Ok(t);
    }
    match default_t_final(p) {
        Ok(t) => Ok(t),
        Err(eit_core::Error::ZeroPhaseRate) => {
            let t0 = transient_window(p);
            Ok(if t0 > 0.0 { 2.0 * t0 } else { 1.0 })
        }
        Err(e) => Err(math("default_t_final")(e)),
    }
}

pub fn oracle_reports(cfg: &RunConfig) -> Result<Vec<(&'static str, f64, OracleReport)>, CliError> {
    cfg.system.validate().map_err(math("check_oracle"))?;
    oracle_points(&cfg.system)
        .into_iter()
        .map(|(label, ratio, q)| {
            let t = oracle_t_final(cfg, &q)?;
            let r = verify_qss_sampled(&q, t, cfg.oracle.tol, cfg.oracle.samples).map_err(math("verify_qss"))?;
            Ok((label, ratio, r))
        })
        .collect()
}

fn check_oracle(cfg: &RunConfig) -> Result<Report, CliError> {
    let reports = oracle_reports(cfg)?;
    let mut table = Table::new([
        "point",
        "omega_a_over_gamma_20",
        "max_rel_deviation",
        "final_phase_error",
        "final_magnitude_ratio",
        "regime_flag",
        "bound",
        "status",
    ]);
    let mut outcome = Ok(());
    for (i, (label, ratio, r)) in reports.iter().enumerate() {
        // Only the first scan point carries a hard bound.
        let bounded = i == 1;
        let status = match (bounded, r.max_rel_deviation < ORACLE_HARD_BOUND) {
            (false, _) => "unbounded",
            (true, true) => "pass",
            (true, false) => {
                outcome = Err(CliError::OracleBound(format!(
                    "max_rel_deviation {:e} at |Omega_a|/gamma_20 = {ratio} exceeds {ORACLE_HARD_BOUND}",
                    r.max_rel_deviation
                )));
                "fail"
            }
        };
        table.push(vec![
            (*label).into(),
            (*ratio).into(),
            r.max_rel_deviation.into(),
            r.final_phase_error.into(),
            r.final_magnitude_ratio.into(),
            match r.regime_flag {
                RegimeFlag::In => "in",
                RegimeFlag::Out => "out",
            }
            .into(),
            (if bounded { ORACLE_HARD_BOUND } else { f64::NAN }).into(),
            status.into(),
        ]);
    }
    Ok(Report {
        table,
        notes: Vec::new(),
        outcome,
    })
}
