//! Derivative-free optimization and the multi-restart fitting driver.

mod cobyla;
mod fit;
mod subproblem;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use cobyla::{cobyla_minimize, cobyla_minimize_constrained, CobylaOutcome, Termination};
pub use fit::{fit, FailedRestart, FitResult, FitSettings};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub initial_trust_radius: f64,
    pub final_trust_radius: f64,
    pub max_evaluations: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            initial_trust_radius: 0.5,
            final_trust_radius: 1e-6,
            max_evaluations: 1000,
        }
    }
}

impl OptimizerOptions {
    /// Checks the radii and that the budget covers an initial simplex plus one step.
    pub fn validate(&self, dimension: usize) -> Result<()> {
        if dimension == 0 {
            return Err(domain("optimization needs at least one variable"));
        }
        let (rb, re) = (self.initial_trust_radius, self.final_trust_radius);
        if !(re > 0.0 && re < rb && rb.is_finite()) {
            return Err(domain(format!(
                "trust radii must satisfy 0 < final < initial, got final={re}, initial={rb}"
            )));
        }
        if self.max_evaluations < dimension + 2 {
            return Err(domain(format!(
                "max_evaluations {} is below dimension + 2 = {}",
                self.max_evaluations,
                dimension + 2
            )));
        }
        Ok(())
    }
}
