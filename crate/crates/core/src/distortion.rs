//! Concave distortion functions `ψ_γ : [0,1] → [0,1]`.
//!
//! A distortion inflates tail probabilities: `ψ_γ(x) ≥ x`, `ψ_γ(0) = 0`,
//! `ψ_γ(1) = 1`, and `ψ_0` is the identity. Its dual `1 − ψ_γ(1 − x)` is
//! convex and deflates them.
//!
//! ```text
//! minmaxvar: ψ_γ(x) = 1 − (1 − x^{1/(1+γ)})^{1+γ}
//! Wang:      ψ_γ(x) = Φ(Φ⁻¹(x) + γ)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CdsError, Result};
use crate::normal::{norm_cdf, norm_inv_cdf};

/// Upper end of the distortion-parameter search interval.
pub const GAMMA_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistortionFamily {
    #[default]
    MinMaxVar,
    Wang,
}

impl FromStr for DistortionFamily {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minmaxvar" => Ok(DistortionFamily::MinMaxVar),
            "wang" => Ok(DistortionFamily::Wang),
            other => Err(CdsError::invalid(format!(
                "unknown distortion family '{other}' (expected minmaxvar or wang)"
            ))),
        }
    }
}

impl fmt::Display for DistortionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistortionFamily::MinMaxVar => "minmaxvar",
            DistortionFamily::Wang => "wang",
        })
    }
}

/// A member `ψ_γ` of a parametric distortion family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    family: DistortionFamily,
    gamma: f64,
}

impl Distortion {
    pub fn new(family: DistortionFamily, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(CdsError::invalid(format!(
                "distortion gamma must be >= 0, got {gamma}"
            )));
        }
        Ok(Self { family, gamma })
    }

    pub fn family(&self) -> DistortionFamily {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.family, gamma)
    }

    /// `ψ_γ(x)`; `x` is assumed to lie in `[0, 1]`.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        if self.gamma == 0.0 {
            return x;
        }
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self.family {
            DistortionFamily::MinMaxVar => {
                let k = 1.0 + self.gamma;
                let root = (x.ln() / k).exp();
                -(k * (-root).ln_1p()).exp_m1()
            }
            DistortionFamily::Wang => norm_cdf(norm_inv_cdf(x) + self.gamma),
        }
    }

    /// Dual distortion `1 − ψ_γ(1 − x)`, evaluated without forming `1 − x`.
    #[inline]
    pub fn apply_dual(&self, x: f64) -> f64 {
        if self.gamma == 0.0 {
            return x;
        }
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self.family {
            DistortionFamily::MinMaxVar => {
                let k = 1.0 + self.gamma;
                let root_complement = -((-x).ln_1p() / k).exp_m1();
                (k * root_complement.ln()).exp()
            }
            DistortionFamily::Wang => norm_cdf(norm_inv_cdf(x) - self.gamma),
        }
    }
}

fn check_probability(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CdsError::invalid(format!(
            "probability must lie in [0, 1], got {x}"
        )));
    }
    Ok(())
}

/// `ψ_γ(x)` with argument validation.
pub fn distort(d: &Distortion, x: f64) -> Result<f64> {
    check_probability(x)?;
    Ok(d.apply(x))
}

/// `1 − ψ_γ(1 − x)` with argument validation.
pub fn dual_distort(d: &Distortion, x: f64) -> Result<f64> {
    check_probability(x)?;
    Ok(d.apply_dual(x))
}
