//! Distribution models that feed the sampler and serve as oracles.
//!
//! Every shipped model has a closed-form distribution function, tail, and
//! left-continuous inverse, plus a known maximal domain of attraction:
//!
//! | model              | tail F̄(x)                 | regime  | ξ      |
//! |--------------------|---------------------------|---------|--------|
//! | `gpd:xi,beta`      | (1 + ξx/β)^{−1/ξ}         | sign ξ  | ξ      |
//! | `pareto:alpha`     | x^{−α} on [1, ∞)          | Fréchet | 1/α    |
//! | `uniform`          | 1 − x on [0, 1]           | Weibull | −1     |
//! | `beta_tail:p`      | (1 − x)^p on [0, 1]       | Weibull | −1/p   |
//! | `exp:mean`         | e^{−x/mean}               | Gumbel  | 0      |
//! | `lognormal:mu,sigma` | Φ̄((ln x − μ)/σ)         | Gumbel  | 0      |

mod gpd;
mod policy;
mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{MeplotError, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadConfig};

pub use gpd::{gpd_cdf, gpd_quantile, me_closed_form, GpdParams, XI_SWITCH};
pub use policy::{ThresholdPolicy, ThresholdRule};
pub use sampling::{draw, draw_replicate, open_unit, sample, sample_replicate, UniformStream};

/// Maximal domain of attraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Frechet,
    Weibull,
    Gumbel,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Frechet => "frechet",
            Regime::Weibull => "weibull",
            Regime::Gumbel => "gumbel",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = MeplotError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "frechet" | "fréchet" => Ok(Regime::Frechet),
            "weibull" => Ok(Regime::Weibull),
            "gumbel" => Ok(Regime::Gumbel),
            other => Err(MeplotError::Parse {
                field: "regime".into(),
                reason: format!("unknown regime `{other}` (expected frechet, weibull or gumbel)"),
            }),
        }
    }
}

/// A named distribution with closed-form cdf, tail and quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionModel {
    Gpd(GpdParams),
    Pareto { alpha: f64 },
    Uniform,
    BetaTail { p: f64 },
    Exponential { mean: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MeplotError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// z with Φ(z) = p.
///
/// The library inverse is good to about 1e-10 relative; one Newton step on
/// Φ brings it to working precision.
fn normal_quantile(p: f64) -> f64 {
    if p > 0.5 {
        return -normal_quantile(1.0 - p);
    }
    let n = standard_normal();
    let z = n.inverse_cdf(p);
    if !z.is_finite() {
        return z;
    }
    let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 0.0 {
        z - (n.cdf(z) - p) / density
    } else {
        z
    }
}

impl DistributionModel {
    pub fn gpd(xi: f64, beta: f64) -> Result<Self> {
        Ok(Self::Gpd(GpdParams::new(xi, beta)?))
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        Ok(Self::Pareto {
            alpha: positive("alpha", alpha)?,
        })
    }

    pub fn uniform() -> Self {
        Self::Uniform
    }

    pub fn beta_tail(p: f64) -> Result<Self> {
        Ok(Self::BetaTail {
            p: positive("p", p)?,
        })
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Ok(Self::Exponential {
            mean: positive("mean", mean)?,
        })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(MeplotError::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must be finite",
            });
        }
        Ok(Self::LogNormal {
            mu,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gpd(_) => "gpd",
            Self::Pareto { .. } => "pareto",
            Self::Uniform => "uniform",
            Self::BetaTail { .. } => "beta_tail",
            Self::Exponential { .. } => "exp",
            Self::LogNormal { .. } => "lognormal",
        }
    }

    /// Left end of the support.
    pub fn left_endpoint(&self) -> f64 {
        match self {
            Self::Pareto { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// Right end of the support x_F (possibly +∞).
    pub fn right_endpoint(&self) -> f64 {
        match self {
            Self::Gpd(p) => p.right_endpoint(),
            Self::Uniform | Self::BetaTail { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Shape parameter of the domain of attraction.
    pub fn true_xi(&self) -> f64 {
        match self {
            Self::Gpd(p) => p.xi,
            Self::Pareto { alpha } => 1.0 / alpha,
            Self::Uniform => -1.0,
            Self::BetaTail { p } => -1.0 / p,
            Self::Exponential { .. } | Self::LogNormal { .. } => 0.0,
        }
    }

    pub fn regime(&self) -> Regime {
        let xi = self.true_xi();
        if xi > 0.0 {
            Regime::Frechet
        } else if xi < 0.0 {
            Regime::Weibull
        } else {
            Regime::Gumbel
        }
    }

    /// Whether E[X⁺] < ∞ (the mean-excess function is finite).
    pub fn positive_mean_exists(&self) -> bool {
        match self {
            Self::Gpd(p) => p.mean_exists(),
            Self::Pareto { alpha } => *alpha > 1.0,
            _ => true,
        }
    }

    /// Tail F̄(x) = 1 − F(x).
    pub fn tail(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < self.left_endpoint() {
            return 1.0;
        }
        if x >= self.right_endpoint() {
            return 0.0;
        }
        match self {
            Self::Gpd(p) => p.tail_unchecked(x),
            Self::Pareto { alpha } => x.powf(-alpha),
            Self::Uniform => 1.0 - x,
            Self::BetaTail { p } => (1.0 - x).powf(*p),
            Self::Exponential { mean } => (-x / mean).exp(),
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    standard_normal().sf((x.ln() - mu) / sigma)
                }
            }
        }
    }

    /// Distribution function F(x).
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.tail(x)
    }

    /// F←(1 − p) for a tail probability p ∈ (0, 1]; this is b(1/p).
    ///
    /// Evaluated directly in p so that extreme quantiles keep full precision.
    pub fn tail_quantile(&self, p: f64) -> f64 {
        match self {
            Self::Gpd(g) => g.tail_quantile_unchecked(p),
            Self::Pareto { alpha } => p.powf(-1.0 / alpha),
            Self::Uniform => 1.0 - p,
            Self::BetaTail { p: shape } => 1.0 - p.powf(1.0 / shape),
            Self::Exponential { mean } => -mean * p.ln(),
            Self::LogNormal { mu, sigma } => {
                if p >= 1.0 {
                    0.0
                } else {
                    (mu - sigma * normal_quantile(p)).exp()
                }
            }
        }
    }

    /// Left-continuous inverse F←(u) = inf{x : F(x) ≥ u} for u ∈ (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(MeplotError::Domain {
                value: u,
                domain: "(0, 1)".into(),
            });
        }
        Ok(match self {
            Self::Uniform => u,
            Self::BetaTail { p } => -((-u).ln_1p() / p).exp_m1(),
            Self::Exponential { mean } => -mean * (-u).ln_1p(),
            Self::LogNormal { mu, sigma } => (mu + sigma * normal_quantile(u)).exp(),
            _ => self.tail_quantile(1.0 - u),
        })
    }

    /// Tail quantile function b(t) = F←(1 − 1/t), t > 1.
    pub fn b(&self, t: f64) -> f64 {
        self.tail_quantile(1.0 / t)
    }

    /// x_F − F←(1 − p) for models with a finite right endpoint, evaluated
    /// without cancellation.
    pub fn endpoint_gap(&self, p: f64) -> Option<f64> {
        match self {
            Self::Gpd(g) if g.xi < 0.0 => Some(-g.beta * p.powf(-g.xi) / g.xi),
            Self::Uniform => Some(p),
            Self::BetaTail { p: shape } => Some(p.powf(1.0 / shape)),
            _ => None,
        }
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gpd(p) => write!(f, "gpd:xi={},beta={}", p.xi, p.beta),
            Self::Pareto { alpha } => write!(f, "pareto:alpha={alpha}"),
            Self::Uniform => write!(f, "uniform"),
            Self::BetaTail { p } => write!(f, "beta_tail:p={p}"),
            Self::Exponential { mean } => write!(f, "exp:mean={mean}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:mu={mu},sigma={sigma}"),
        }
    }
}

struct ParamList<'a> {
    entries: Vec<(&'a str, &'a str)>,
    allowed: &'static [&'static str],
}

impl<'a> ParamList<'a> {
    fn parse(text: &'a str, allowed: &'static [&'static str]) -> Result<Self> {
        let mut entries = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| MeplotError::Parse {
                field: item.to_string(),
                reason: "expected `param=value`".into(),
            })?;
            let key = key.trim();
            if !allowed.contains(&key) {
                return Err(MeplotError::Parse {
                    field: key.to_string(),
                    reason: format!("unknown parameter (expected one of {allowed:?})"),
                });
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(MeplotError::Parse {
                    field: key.to_string(),
                    reason: "parameter given twice".into(),
                });
            }
            entries.push((key, value.trim()));
        }
        Ok(Self { entries, allowed })
    }

    fn get(&self, key: &'static str, default: Option<f64>) -> Result<f64> {
        debug_assert!(self.allowed.contains(&key));
        match self.entries.iter().find(|(k, _)| *k == key) {
            Some((_, v)) => v.parse::<f64>().map_err(|_| MeplotError::Parse {
                field: key.to_string(),
                reason: format!("`{v}` is not a number"),
            }),
            None => default.ok_or_else(|| MeplotError::Parse {
                field: key.to_string(),
                reason: "required parameter missing".into(),
            }),
        }
    }
}

fn as_parse_error(field: &str, err: MeplotError) -> MeplotError {
    match err {
        MeplotError::InvalidParameter { name, value, reason } => MeplotError::Parse {
            field: name.to_string(),
            reason: format!("{value}: {reason}"),
        },
        other => MeplotError::Parse {
            field: field.to_string(),
            reason: other.to_string(),
        },
    }
}

impl FromStr for DistributionModel {
    type Err = MeplotError;

    /// Parses `name:param=value,param=value`, e.g. `gpd:xi=0.5,beta=1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim().to_ascii_lowercase();
        let model = match name.as_str() {
            "gpd" => {
                let ps = ParamList::parse(rest, &["xi", "beta"])?;
                Self::gpd(ps.get("xi", None)?, ps.get("beta", Some(1.0))?)
            }
            "pareto" => {
                let ps = ParamList::parse(rest, &["alpha"])?;
                Self::pareto(ps.get("alpha", None)?)
            }
            "uniform" => {
                ParamList::parse(rest, &[])?;
                Ok(Self::Uniform)
            }
            "beta_tail" | "betatail" => {
                let ps = ParamList::parse(rest, &["p"])?;
                Self::beta_tail(ps.get("p", None)?)
            }
            "exp" | "exponential" => {
                let ps = ParamList::parse(rest, &["mean"])?;
                Self::exponential(ps.get("mean", Some(1.0))?)
            }
            "lognormal" => {
                let ps = ParamList::parse(rest, &["mu", "sigma"])?;
                Self::lognormal(ps.get("mu", Some(0.0))?, ps.get("sigma", Some(1.0))?)
            }
            other => {
                return Err(MeplotError::Parse {
                    field: "name".into(),
                    reason: format!(
                        "unknown model `{other}` (expected gpd, pareto, uniform, beta_tail, exp, lognormal)"
                    ),
                })
            }
        };
        model.map_err(|e| as_parse_error(&name, e))
    }
}

/// ∫_u^{x_F} F̄(s) ds.
fn tail_integral(d: &DistributionModel, u: f64, cfg: QuadConfig) -> Result<f64> {
    let lower = d.left_endpoint();
    if u < lower {
        return Ok((lower - u) + tail_integral(d, lower, cfg)?);
    }
    let upper = d.right_endpoint();
    let tail = |s: f64| d.tail(s);
    if upper.is_finite() {
        return Ok(integrate(tail, u, upper, cfg)?.value);
    }
    // Near part directly, far part under s = s0·e^v.
    let s0 = u + 1.0 + 2.0 * u.abs();
    let near = integrate(tail, u, s0, cfg)?.value;
    let far = integrate_to_infinity(
        |v: f64| {
            let s = s0 * v.exp();
            if s.is_finite() {
                d.tail(s) * s
            } else {
                0.0
            }
        },
        0.0,
        700.0 - s0.ln(),
        cfg,
    )?
    .value;
    Ok(near + far)
}

/// Mean-excess function M(u) = ∫_u^{x_F} F̄(s) ds / F̄(u) by adaptive quadrature.
pub fn me_numeric(d: &DistributionModel, u: f64) -> Result<f64> {
    me_numeric_with(d, u, QuadConfig::default())
}

pub fn me_numeric_with(d: &DistributionModel, u: f64, cfg: QuadConfig) -> Result<f64> {
    if u.is_nan() {
        return Err(MeplotError::Domain {
            value: u,
            domain: "real thresholds".into(),
        });
    }
    let tail_u = d.tail(u);
    if u >= d.right_endpoint() || tail_u <= 0.0 {
        return Err(MeplotError::ThresholdAtEndpoint { threshold: u });
    }
    if !d.positive_mean_exists() {
        return Err(MeplotError::MeanDoesNotExist {
            requirement: match d {
                DistributionModel::Gpd(_) => "xi < 1".into(),
                _ => "alpha > 1".into(),
            },
        });
    }
    Ok(tail_integral(d, u, cfg)? / tail_u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_models() -> Vec<DistributionModel> {
        vec![
            DistributionModel::gpd(0.5, 1.0).unwrap(),
            DistributionModel::gpd(-0.5, 2.0).unwrap(),
            DistributionModel::gpd(0.0, 1.0).unwrap(),
            DistributionModel::pareto(2.0).unwrap(),
            DistributionModel::Uniform,
            DistributionModel::beta_tail(3.0).unwrap(),
            DistributionModel::exponential(1.0).unwrap(),
            DistributionModel::lognormal(0.0, 1.0).unwrap(),
        ]
    }

    #[test]
    fn quantile_is_left_continuous_inverse() {
        for d in all_models() {
            for i in 1..200 {
                let u = i as f64 / 200.0;
                let q = d.quantile(u).unwrap();
                assert!(d.cdf(q) >= u - 1e-12, "{d}: cdf(q({u})) < u");
                let delta = 1e-6 * (1.0 + q.abs());
                assert!(d.cdf(q - delta) < u, "{d}: cdf(q({u}) - δ) >= u");
                assert!(q <= d.right_endpoint());
                assert!((d.tail(q) + d.cdf(q) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tail_quantile_matches_quantile() {
        for d in all_models() {
            for &u in &[0.1, 0.5, 0.9, 0.999] {
                let a = d.quantile(u).unwrap();
                let b = d.tail_quantile(1.0 - u);
                assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{d} at {u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn endpoint_gap_is_consistent() {
        for d in all_models() {
            if let Some(g) = d.endpoint_gap(0.3) {
                let direct = d.right_endpoint() - d.tail_quantile(0.3);
                assert!((g - direct).abs() < 1e-12, "{d}");
            } else {
                assert!(d.right_endpoint().is_infinite());
            }
        }
    }

    #[test]
    fn regimes_and_shapes() {
        assert_eq!(DistributionModel::pareto(3.0).unwrap().regime(), Regime::Frechet);
        assert_eq!(DistributionModel::Uniform.regime(), Regime::Weibull);
        assert_eq!(DistributionModel::Uniform.true_xi(), -1.0);
        assert_eq!(DistributionModel::exponential(1.0).unwrap().regime(), Regime::Gumbel);
        assert_eq!(DistributionModel::gpd(-0.25, 1.0).unwrap().regime(), Regime::Weibull);
        assert_eq!(DistributionModel::beta_tail(2.0).unwrap().true_xi(), -0.5);
    }

    #[test]
    fn parse_round_trip_and_errors() {
        for d in all_models() {
            let parsed: DistributionModel = d.to_string().parse().unwrap();
            assert_eq!(parsed, d);
        }
        let d: DistributionModel = "gpd:xi=0.5,beta=1".parse().unwrap();
        assert_eq!(d, DistributionModel::gpd(0.5, 1.0).unwrap());
        let d: DistributionModel = "exp".parse().unwrap();
        assert_eq!(d, DistributionModel::exponential(1.0).unwrap());

        let field = |s: &str| match s.parse::<DistributionModel>() {
            Err(MeplotError::Parse { field, .. }) => field,
            other => panic!("expected parse error for {s}, got {other:?}"),
        };
        assert_eq!(field("gpd:beta=1"), "xi");
        assert_eq!(field("gpd:xi=abc"), "xi");
        assert_eq!(field("gpd:xi=0.1,beta=-1"), "beta");
        assert_eq!(field("pareto:alpha=2,gamma=1"), "gamma");
        assert_eq!(field("cauchy:x=1"), "name");
    }

    #[test]
    fn me_numeric_examples() {
        let exp = DistributionModel::exponential(1.0).unwrap();
        assert!((me_numeric(&exp, 3.0).unwrap() - 1.0).abs() < 1e-9);
        let pareto = DistributionModel::pareto(2.0).unwrap();
        assert!((me_numeric(&pareto, 2.0).unwrap() - 2.0).abs() < 1e-8);
        let g = DistributionModel::gpd(0.25, 1.0).unwrap();
        assert!((me_numeric(&g, 1.0).unwrap() - 5.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn me_numeric_errors() {
        let u = DistributionModel::Uniform;
        assert!(matches!(
            me_numeric(&u, 1.0),
            Err(MeplotError::ThresholdAtEndpoint { .. })
        ));
        let heavy = DistributionModel::pareto(0.8).unwrap();
        assert!(matches!(
            me_numeric(&heavy, 2.0),
            Err(MeplotError::MeanDoesNotExist { .. })
        ));
    }

    #[test]
    fn me_numeric_below_support() {
        // Exp(1) from u = -2: E[X + 2 | X > -2] = 3.
        let exp = DistributionModel::exponential(1.0).unwrap();
        assert!((me_numeric(&exp, -2.0).unwrap() - 3.0).abs() < 1e-9);
        // Lognormal mean e^{1/2} at u = 0.
        let ln = DistributionModel::lognormal(0.0, 1.0).unwrap();
        assert!((me_numeric(&ln, 0.0).unwrap() - 0.5f64.exp()).abs() < 1e-8);
    }
}
