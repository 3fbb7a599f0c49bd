use serde::{Deserialize, Serialize};

use crate::beta::Beta;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;

/// Known a-priori bounds for a partition-ratio estimation task: `ln Q ≤ q`
/// and `E_{μ_{β_max}}[H] ≤ h` on the interval `[β_min, β_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub q: f64,
    pub h: f64,
    pub beta_min: Beta,
    pub beta_max: Beta,
}

impl Bounds {
    pub fn new(q: f64, h: f64, beta_min: Beta, beta_max: Beta) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::param(format!("q must be finite and positive, got {q}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param(format!("h must be finite and positive, got {h}")));
        }
        if beta_max.is_neg_infinite() {
            return Err(Error::param("beta_max must be finite"));
        }
        if beta_min >= beta_max {
            return Err(Error::param(format!(
                "beta_min ({beta_min}) must be below beta_max ({beta_max})"
            )));
        }
        Ok(Bounds {
            q,
            h,
            beta_min,
            beta_max,
        })
    }

    /// The tightest bounds for an explicit model: `q = z(β_min, β_max)`,
    /// `h = z'(β_max)`. Degenerate zero values are lifted to `f64::MIN_POSITIVE`.
    pub fn exact(model: &GrossGibbsModel, beta_min: Beta, beta_max: Beta) -> Result<Self> {
        let q = model.log_ratio(beta_min, beta_max)?;
        let h = model.mean_hamiltonian(beta_max)?;
        Bounds::new(q.max(f64::MIN_POSITIVE), h.max(f64::MIN_POSITIVE), beta_min, beta_max)
    }

    /// `h` lifted to at least 2, the smallest value the estimators' parameter
    /// formulas are stated for. Any larger `h` is still a valid bound.
    pub fn effective_h(&self) -> f64 {
        self.h.max(2.0)
    }

    /// Whether `x` lies in the open interval `(β_min, β_max)`.
    pub fn contains_open(&self, x: Beta) -> bool {
        self.beta_min < x && x < self.beta_max
    }
}
