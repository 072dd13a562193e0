use serde::{Deserialize, Serialize};

/// One verified relation: a residual measured against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl Check {
    /// Passes iff `residual <= tolerance`. Non-finite residuals fail and are
    /// stored as `f64::MAX` so reports stay serializable.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let finite = residual.is_finite();
        Self {
            name: name.into(),
            residual: if finite { residual } else { f64::MAX },
            tolerance,
            pass: finite && residual <= tolerance,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// `|a - b| / (|b| + 1e-2)`: at tolerance `t` this is `|a - b| <= t |b| + t/100`.
pub fn value_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / (b.abs() + 1e-2)
}
