//! The generalized Pareto family G_{ξ,β} and its mean-excess closed form.

use serde::{Deserialize, Serialize};

use crate::error::{MeplotError, Result};

/// Below this |ξ| the exponential limit (with a first-order correction) is used.
pub const XI_SWITCH: f64 = 1e-8;

/// Shape ξ and scale β of a generalized Pareto distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    pub xi: f64,
    pub beta: f64,
}

impl GpdParams {
    pub fn new(xi: f64, beta: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(MeplotError::InvalidParameter {
                name: "xi",
                value: xi,
                reason: "shape must be finite",
            });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(MeplotError::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "scale must be positive and finite",
            });
        }
        Ok(Self { xi, beta })
    }

    /// Right end of the support: −β/ξ for ξ < 0, +∞ otherwise.
    pub fn right_endpoint(&self) -> f64 {
        if self.xi < 0.0 {
            -self.beta / self.xi
        } else {
            f64::INFINITY
        }
    }

    pub fn mean_exists(&self) -> bool {
        self.xi < 1.0
    }

    fn check(&self) -> Result<()> {
        Self::new(self.xi, self.beta).map(|_| ())
    }

    fn check_support(&self, x: f64) -> Result<()> {
        let upper = self.right_endpoint();
        if !(x >= 0.0 && x <= upper) || x.is_nan() {
            return Err(MeplotError::Domain {
                value: x,
                domain: format!("GPD support [0, {upper}]"),
            });
        }
        Ok(())
    }

    /// Tail 1 − G(x) for x in the support.
    pub(crate) fn tail_unchecked(&self, x: f64) -> f64 {
        let y = x / self.beta;
        if self.xi.abs() < XI_SWITCH {
            (-y + 0.5 * self.xi * y * y).exp()
        } else {
            (-(self.xi * y).ln_1p() / self.xi).exp()
        }
    }

    /// F←(1 − p) for a tail probability p ∈ (0, 1].
    pub(crate) fn tail_quantile_unchecked(&self, p: f64) -> f64 {
        let log_p = p.ln();
        if self.xi.abs() < XI_SWITCH {
            self.beta * (-log_p + 0.5 * self.xi * log_p * log_p)
        } else {
            self.beta * (-self.xi * log_p).exp_m1() / self.xi
        }
    }
}

/// Distribution function G_{ξ,β}(x).
pub fn gpd_cdf(p: &GpdParams, x: f64) -> Result<f64> {
    p.check()?;
    p.check_support(x)?;
    Ok(1.0 - p.tail_unchecked(x))
}

/// Inverse of [`gpd_cdf`] on (0, 1).
pub fn gpd_quantile(p: &GpdParams, u: f64) -> Result<f64> {
    p.check()?;
    if !(u > 0.0 && u < 1.0) {
        return Err(MeplotError::Domain {
            value: u,
            domain: "(0, 1)".into(),
        });
    }
    Ok(p.tail_quantile_unchecked(1.0 - u))
}

/// Mean excess β/(1−ξ) + ξu/(1−ξ) of a GPD above threshold `u`.
pub fn me_closed_form(p: &GpdParams, u: f64) -> Result<f64> {
    p.check()?;
    if !p.mean_exists() {
        return Err(MeplotError::MeanDoesNotExist {
            requirement: format!("xi < 1, got xi = {}", p.xi),
        });
    }
    p.check_support(u)?;
    if p.xi < 0.0 && u == p.right_endpoint() {
        return Ok(0.0);
    }
    Ok(p.beta / (1.0 - p.xi) + p.xi * u / (1.0 - p.xi))
}
