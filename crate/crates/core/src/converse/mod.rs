//! Converse statistics: quantities computed from the top k order statistics
//! whose limits identify the domain of attraction.
//!
//! | statistic                      | limit  | regime  |
//! |--------------------------------|--------|---------|
//! | [`slope_statistic_frechet`]    | γ      | Fréchet |
//! | [`v_statistic_frechet`]        | γ + 1  | Fréchet |
//! | [`endpoint_statistic_weibull`] | γ      | Weibull |
//! | [`z_statistic_weibull`]        | 1 − γ  | Weibull |
//! | [`gumbel_statistic`]           | 1      | Gumbel  |
//!
//! For Fréchet γ = ξ/(1−ξ); for Weibull γ = −ξ/(1−ξ) ∈ (0, 1).

mod auxiliary;
mod classify;
mod functionals;
mod identities;

pub use auxiliary::{auxiliary_from_f, AuxiliaryFunction};
pub use classify::{
    classify_regime, classify_regime_with, endpoint_candidate, ClassifierConfig, PerK,
    RegimeEstimate, Verdict,
};
pub use functionals::{h_frechet, h_gumbel, h_weibull, HForm};
pub use identities::{
    hall_wellner_bound, hall_wellner_gap, karamata_oracle, renyi_expectation, KaramataReport,
};

use crate::error::{MeplotError, Result};
use crate::sample::SortedSample;

/// γ = ξ/(1−ξ), defined for ξ < 1.
pub fn gamma_from_xi(xi: f64) -> f64 {
    xi / (1.0 - xi)
}

/// ξ = γ/(1+γ), the inverse of [`gamma_from_xi`], defined for γ > −1.
pub fn xi_from_gamma(gamma: f64) -> f64 {
    gamma / (1.0 + gamma)
}

/// ξ recovered from the Weibull endpoint statistic's limit γ = −ξ/(1−ξ).
pub fn xi_from_weibull_gamma(gamma: f64) -> f64 {
    -gamma / (1.0 - gamma)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(MeplotError::InvalidK {
            k,
            n,
            reason: "statistic needs 1 <= k < n".into(),
        });
    }
    Ok(())
}

/// Σ_{i≤k} (X_(i) − X_(k+1)).
fn excess_sum(s: &SortedSample, k: usize) -> f64 {
    let base = s.order_stat(k + 1);
    s.values()[..k].iter().map(|x| x - base).sum()
}

/// (1/(k·X_(k+1))) Σ_{i≤k} (X_(i) − X_(k+1)).
pub fn slope_statistic_frechet(s: &SortedSample, k: usize) -> Result<f64> {
    check_k(k, s.len())?;
    let base = s.order_stat(k + 1);
    if base <= 0.0 {
        return Err(MeplotError::NonPositiveThreshold {
            index: k + 1,
            value: base,
        });
    }
    Ok(excess_sum(s, k) / (k as f64 * base))
}

/// (1/k) Σ_{i≤k} X_(i)/X_(k+1) · 1[X_(k+1) > 1].
pub fn v_statistic_frechet(s: &SortedSample, k: usize) -> Result<f64> {
    check_k(k, s.len())?;
    let base = s.order_stat(k + 1);
    if base <= 1.0 {
        return Ok(0.0);
    }
    Ok(s.values()[..k].iter().map(|x| x / base).sum::<f64>() / k as f64)
}

/// (1/(k·(κ − X_(k+1)))) Σ_{i≤k} (X_(i) − X_(k+1)).
pub fn endpoint_statistic_weibull(s: &SortedSample, k: usize, kappa: f64) -> Result<f64> {
    check_k(k, s.len())?;
    if kappa < s.order_stat(1) {
        return Err(MeplotError::EndpointViolation {
            kappa,
            max: s.order_stat(1),
        });
    }
    let gap = kappa - s.order_stat(k + 1);
    if gap == 0.0 {
        return Err(MeplotError::ZeroNormalizer { index: k + 1 });
    }
    Ok(excess_sum(s, k) / (k as f64 * gap))
}

/// (Z_(k)/k) Σ_{i≤k} 1/Z_(i) with Z = (κ − X)^{−1}.
///
/// Z is increasing in X, so Z_(i) = 1/(κ − X_(i)) and the statistic is
/// (1/k) Σ_{i≤k} (κ − X_(i))/(κ − X_(k)).
pub fn z_statistic_weibull(s: &SortedSample, k: usize, kappa: f64) -> Result<f64> {
    if k == 0 || k > s.len() {
        return Err(MeplotError::InvalidK {
            k,
            n: s.len(),
            reason: "z statistic needs 1 <= k <= n".into(),
        });
    }
    if kappa <= s.order_stat(1) {
        return Err(MeplotError::EndpointViolation {
            kappa,
            max: s.order_stat(1),
        });
    }
    let denom = kappa - s.order_stat(k);
    let total: f64 = s.values()[..k].iter().map(|x| (kappa - x) / denom).sum();
    Ok(total / k as f64)
}

/// (1/(k·a(n/k))) Σ_{i≤k} (X_(i) − X_(k+1)), with n the sample size.
pub fn gumbel_statistic(s: &SortedSample, k: usize, a: &AuxiliaryFunction) -> Result<f64> {
    let n = s.len();
    check_k(k, n)?;
    let t = n as f64 / k as f64;
    let scale = a.eval(t);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(MeplotError::Auxiliary { t, value: scale });
    }
    Ok(excess_sum(s, k) / (k as f64 * scale))
}
