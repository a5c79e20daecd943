//! Run configuration: one TOML document per run.

use std::path::{Path, PathBuf};

use eit_core::gate::GateMode;
use eit_core::sweep::{log_grid, SweepAxis, SweepSpec};
use eit_core::{OptimizationConstraints, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemParams,
    pub constraints: OptimizationConstraints,
    pub eval: EvalConfig,
    pub design: DesignConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Target phase in radians.
    pub phi: f64,
    /// Also report the dispersive cross-Kerr limit of `Re W10`.
    pub kerr: bool,
    /// Target error for the Fock-input dephasing bound.
    pub delta: f64,
    /// Photon number of the Fock input for that bound.
    pub n_b: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            phi: std::f64::consts::PI,
            kerr: false,
            delta: 0.2,
            n_b: 100,
        }
    }
}

/// Exactly one of the two selects the mode: inverse (`delta_target`) or forward.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_target: Option<f64>,
    /// `γ10/|Ω̃_a|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_10_over_omega_a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// Per-series overrides of the `[constraints]` block.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suppression: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<GateMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_c_over_alpha_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_a_over_gamma_20: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    /// Explicit grid; mutually exclusive with `grid`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Logarithmic grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Empty means the single series given by `[constraints]`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesConfig>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axis: SweepAxis::DeltaTarget,
            values: Vec::new(),
            grid: None,
            series: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Integration time; defaults to a half turn of phase per point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    pub tol: f64,
    pub samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            t_final: None,
            tol: eit_core::oracle::DEFAULT_TOL,
            samples: eit_core::oracle::DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Report rates and times in the units of `[system]` instead of `|Ω̃_a|`.
    pub raw: bool,
    pub verbose: bool,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("config serialization: {e}")))
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let values = match (&self.sweep.values[..], self.sweep.grid) {
            ([], Some(g)) => log_grid(g.lo, g.hi, g.n).map_err(|e| CliError::Config(format!("sweep.grid: {e}")))?,
            ([], None) => return Err(CliError::Config("sweep needs sweep.values or sweep.grid".into())),
            (v, None) => v.to_vec(),
            (_, Some(_)) => {
                return Err(CliError::Config(
                    "sweep.values and sweep.grid are mutually exclusive".into(),
                ))
            }
        };
        Ok(SweepSpec {
            axis: self.sweep.axis,
            values,
        })
    }

    /// Constraint set of every sweep series, in configuration order.
    pub fn sweep_series(&self) -> Vec<OptimizationConstraints> {
        if self.sweep.series.is_empty() {
            return vec![self.constraints];
        }
        self.sweep
            .series
            .iter()
            .map(|s| {
                let mut c = self.constraints;
                if let Some(v) = s.suppression {
                    c.suppression = v;
                }
                if let Some(v) = s.mode {
                    c.mode = v;
                }
                if let Some(v) = s.alpha_c_over_alpha_b {
                    c.alpha_c_over_alpha_b = v;
                }
                if let Some(v) = s.omega_a_over_gamma_20 {
                    c.omega_a_over_gamma_20 = v;
                }
                c
            })
            .collect()
    }
}
