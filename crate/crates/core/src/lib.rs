//! Dispersive phase gate in a four-level EIT medium: closed-form response,
//! coherent-drive error model, a brute-force coherence-chain oracle and the
//! design optimizer.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod gate;
pub mod model;
pub mod ode;
pub mod optimizer;
pub mod oracle;
pub mod regime;
pub mod sweep;

pub use error::{Error, Result};
pub use gate::{ErrorBudget, ErrorMeasure, GateDesign, GateMode};
pub use model::{w10, ResponseW10, SystemParams};
pub use num_complex::Complex64 as C64;
pub use optimizer::{max_dephasing, optimize_design, OptimizationConstraints, OptimizedDesign};
pub use regime::{Flagged, RegimeWarning};
