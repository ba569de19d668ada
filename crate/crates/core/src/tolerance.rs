use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every pipeline in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Relative Hermiticity tolerance.
    pub eps_herm: f64,
    /// Relative singular-value cutoff for null spaces.
    pub eps_rank: f64,
    /// Absolute radius used to merge polynomial roots.
    pub eps_root_cluster: f64,
    /// Radius for snapping roots onto the real axis, the unit circle or +-1.
    pub eps_snap: f64,
    /// Unitarity tolerance for S-matrix samples on the unit circle.
    pub eps_unitary: f64,
    /// Absolute error target for adaptive quadrature.
    pub quad_target: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_herm: 1e-12,
            eps_rank: 1e-9,
            eps_root_cluster: 1e-8,
            eps_snap: 1e-8,
            eps_unitary: 1e-10,
            quad_target: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_herm", self.eps_herm),
            ("eps_rank", self.eps_rank),
            ("eps_root_cluster", self.eps_root_cluster),
            ("eps_snap", self.eps_snap),
            ("eps_unitary", self.eps_unitary),
            ("quad_target", self.quad_target),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Validation(format!(
                    "tolerance {name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.eps_snap < self.eps_root_cluster {
            return Err(Error::Validation(format!(
                "eps_snap ({}) must be at least eps_root_cluster ({})",
                self.eps_snap, self.eps_root_cluster
            )));
        }
        Ok(())
    }
}
