//! Decision layer over the converse statistics.
//!
//! The regimes are tried in order Fréchet, Weibull, Gumbel; the first whose
//! statistic is stable across the policy's k values wins.
//!
//! * Fréchet: every slope statistic is positive and their coefficient of
//!   variation is below `stability`. γ is the median, ξ = γ/(1+γ).
//! * Weibull: the sample maximum has stabilized, i.e.
//!   (X_(1) − X_(m+1)) / (X_(1) − X_(k_max+1)) < `max_stability` with
//!   m = `max_probe`, and the endpoint statistic at κ̂ is stable and inside
//!   (0, 1). κ̂ = X_(1)(1 + 1/n) for X_(1) > 0, else X_(1) + (X_(1) − X_(2)).
//! * Gumbel: with a fixed to the empirical mean excess at X_(k+1) for the
//!   middle k, every Gumbel statistic is within `gumbel_band` of 1.
//!
//! Statistics that fail to evaluate count against their regime.

use serde::Serialize;

use super::{
    endpoint_statistic_weibull, gumbel_statistic, slope_statistic_frechet, xi_from_gamma,
    xi_from_weibull_gamma, AuxiliaryFunction,
};
use crate::distmodel::{Regime, ThresholdPolicy};
use crate::error::{MeplotError, Result};
use crate::meplot::empirical_me;
use crate::sample::SortedSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierConfig {
    /// Largest accepted sd/|mean| of a statistic across k.
    pub stability: f64,
    /// Largest accepted |gumbel statistic − 1|.
    pub gumbel_band: f64,
    /// Largest accepted ratio of top spacing to the k_max range.
    pub max_stability: f64,
    /// Number of top spacings in the maximum-stability probe.
    pub max_probe: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            stability: 0.15,
            gumbel_band: 0.15,
            max_stability: 0.15,
            max_probe: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Frechet,
    Weibull,
    Gumbel,
    Inconclusive,
}

impl Verdict {
    pub fn regime(self) -> Option<Regime> {
        match self {
            Self::Frechet => Some(Regime::Frechet),
            Self::Weibull => Some(Regime::Weibull),
            Self::Gumbel => Some(Regime::Gumbel),
            Self::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerK {
    pub k: usize,
    /// `None` when the statistic could not be evaluated at this k.
    pub statistic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeEstimate {
    pub regime: Verdict,
    pub gamma: Option<f64>,
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Name of the statistic listed in `per_k`.
    pub statistic: &'static str,
    pub per_k: Vec<PerK>,
}

fn per_k(ks: &[usize], f: impl Fn(usize) -> Result<f64>) -> Vec<PerK> {
    ks.iter()
        .map(|&k| PerK {
            k,
            statistic: f(k).ok().filter(|v| v.is_finite()),
        })
        .collect()
}

/// All values when every k produced one.
fn complete(rows: &[PerK]) -> Option<Vec<f64>> {
    rows.iter().map(|r| r.statistic).collect()
}

fn coefficient_of_variation(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() / mean.abs()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Candidate right endpoint from the top two order statistics.
pub fn endpoint_candidate(s: &SortedSample) -> f64 {
    let x1 = s.order_stat(1);
    if x1 > 0.0 {
        x1 * (1.0 + 1.0 / s.len() as f64)
    } else {
        x1 + (x1 - s.order_stat(2))
    }
}

pub fn classify_regime(s: &SortedSample, policy: &ThresholdPolicy) -> Result<RegimeEstimate> {
    classify_regime_with(s, policy, ClassifierConfig::default())
}

pub fn classify_regime_with(
    s: &SortedSample,
    policy: &ThresholdPolicy,
    cfg: ClassifierConfig,
) -> Result<RegimeEstimate> {
    let n = s.len();
    let ks = policy.k_values(n)?;
    if ks.len() < 2 {
        return Err(MeplotError::Precondition(format!(
            "classification needs at least two k values, policy {policy} gives {ks:?} at n = {n}"
        )));
    }
    let k_max = *ks.last().unwrap_or(&1);

    let slopes = per_k(&ks, |k| slope_statistic_frechet(s, k));
    if let Some(v) = complete(&slopes) {
        if v.iter().all(|&x| x > 0.0) && coefficient_of_variation(&v) < cfg.stability {
            let gamma = median(&v);
            return Ok(RegimeEstimate {
                regime: Verdict::Frechet,
                gamma: Some(gamma),
                xi: Some(xi_from_gamma(gamma)),
                kappa: None,
                statistic: "slope",
                per_k: slopes,
            });
        }
    }

    let kappa = endpoint_candidate(s);
    let probe = cfg.max_probe.min(k_max);
    let top = s.order_stat(1);
    let max_ratio = (top - s.order_stat(probe + 1)) / (top - s.order_stat(k_max + 1));
    if max_ratio < cfg.max_stability {
        let ends = per_k(&ks, |k| endpoint_statistic_weibull(s, k, kappa));
        if let Some(v) = complete(&ends) {
            let inside = v.iter().all(|&x| x > 0.0 && x < 1.0);
            if inside && coefficient_of_variation(&v) < cfg.stability {
                let gamma = median(&v);
                return Ok(RegimeEstimate {
                    regime: Verdict::Weibull,
                    gamma: Some(gamma),
                    xi: Some(xi_from_weibull_gamma(gamma)),
                    kappa: Some(kappa),
                    statistic: "endpoint",
                    per_k: ends,
                });
            }
        }
    }

    let k_mid = ks[ks.len() / 2];
    if let Ok(a) = empirical_me(s, s.order_stat(k_mid + 1)) {
        let aux = AuxiliaryFunction::Constant(a);
        let gum = per_k(&ks, |k| gumbel_statistic(s, k, &aux));
        if let Some(v) = complete(&gum) {
            if v.iter().all(|x| (x - 1.0).abs() <= cfg.gumbel_band) {
                return Ok(RegimeEstimate {
                    regime: Verdict::Gumbel,
                    gamma: Some(1.0),
                    xi: Some(0.0),
                    kappa: None,
                    statistic: "gumbel",
                    per_k: gum,
                });
            }
        }
    }

    Ok(RegimeEstimate {
        regime: Verdict::Inconclusive,
        gamma: None,
        xi: None,
        kappa: None,
        statistic: "slope",
        per_k: slopes,
    })
}
