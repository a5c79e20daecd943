use std::fmt;

/// Separation factor used to decide whether `a ≪ b` holds.
pub const MUCH_LESS_FACTOR: f64 = 100.0;

/// An approximation's validity condition that the parameters do not satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeWarning {
    pub condition: String,
    pub small: f64,
    pub large: f64,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "regime condition `{}` not satisfied ({:e} vs {:e}, factor {} required)",
            self.condition, self.small, self.large, MUCH_LESS_FACTOR
        )
    }
}

/// A computed value together with any regime warnings raised while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<RegimeWarning>,
}

impl<T> Flagged<T> {
    pub fn new(value: T, warnings: Vec<RegimeWarning>) -> Self {
        Flagged { value, warnings }
    }

    pub fn in_regime(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Flagged<U> {
        Flagged {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}

pub(crate) fn require_much_less(warnings: &mut Vec<RegimeWarning>, condition: &str, small: f64, large: f64) {
    if MUCH_LESS_FACTOR * small > large {
        warnings.push(RegimeWarning {
            condition: condition.to_string(),
            small,
            large,
        });
    }
}
