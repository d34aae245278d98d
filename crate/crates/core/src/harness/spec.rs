use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::converse::{auxiliary_from_f, AuxiliaryFunction};
use crate::distmodel::{DistributionModel, Regime, ThresholdPolicy};
use crate::error::{MeplotError, Result};
use crate::setgeom::Window;

/// What each replicate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Windowed Hausdorff distance from the scaled set to its limit.
    Hausdorff,
    /// Distance from the minimal-abscissa point of the scaled set to the
    /// first point of the limit set.
    Concomitant,
    Slope,
    V,
    Endpoint,
    Z,
    Gumbel,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hausdorff => "hausdorff",
            Self::Concomitant => "concomitant",
            Self::Slope => "slope",
            Self::V => "v",
            Self::Endpoint => "endpoint",
            Self::Z => "z",
            Self::Gumbel => "gumbel",
        }
    }

    /// The regime a statistic target belongs to; set targets follow the spec.
    pub fn fixed_regime(self) -> Option<Regime> {
        match self {
            Self::Slope | Self::V => Some(Regime::Frechet),
            Self::Endpoint | Self::Z => Some(Regime::Weibull),
            Self::Gumbel => Some(Regime::Gumbel),
            Self::Hausdorff | Self::Concomitant => None,
        }
    }

    pub fn is_set_target(self) -> bool {
        matches!(self, Self::Hausdorff | Self::Concomitant)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = MeplotError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "hausdorff" => Self::Hausdorff,
            "concomitant" => Self::Concomitant,
            "slope" => Self::Slope,
            "v" => Self::V,
            "endpoint" => Self::Endpoint,
            "z" => Self::Z,
            "gumbel" => Self::Gumbel,
            other => {
                return Err(cfg_err(
                    "target",
                    format!(
                        "unknown target `{other}`; expected hausdorff, concomitant, slope, v, \
                         endpoint, z or gumbel"
                    ),
                ))
            }
        })
    }
}

/// Normalizer for the Gumbel target.
#[derive(Debug, Clone, PartialEq)]
pub enum AuxSpec {
    Constant(f64),
    /// a(t) = f(b(t)) tabulated from the model.
    FromF,
}

impl FromStr for AuxSpec {
    type Err = MeplotError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "from_f" {
            return Ok(Self::FromF);
        }
        let bad = || MeplotError::Config {
            key: "aux".into(),
            reason: format!("expected `constant:<a>` or `from_f`, got `{s}`"),
        };
        let v = s.strip_prefix("constant:").ok_or_else(bad)?;
        let a: f64 = v.trim().parse().map_err(|_| bad())?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(MeplotError::Config {
                key: "aux".into(),
                reason: format!("constant must be positive, got {a}"),
            });
        }
        Ok(Self::Constant(a))
    }
}

impl fmt::Display for AuxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(a) => write!(f, "constant:{a}"),
            Self::FromF => f.write_str("from_f"),
        }
    }
}

impl AuxSpec {
    pub fn build(&self, d: &DistributionModel) -> Result<AuxiliaryFunction> {
        match self {
            Self::Constant(a) => Ok(AuxiliaryFunction::Constant(*a)),
            Self::FromF => auxiliary_from_f(d),
        }
    }
}

/// File form of an experiment; every key is checked by [`ExperimentSpec::from_raw`].
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    model: String,
    n_grid: Vec<i64>,
    policy: String,
    replicates: i64,
    seed: u64,
    regime: Option<String>,
    target: String,
    window: Option<f64>,
    epsilon: Option<f64>,
    kappa: Option<f64>,
    aux: Option<String>,
    moment_epsilon: Option<f64>,
}

/// A validated Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub model: DistributionModel,
    pub n_grid: Vec<usize>,
    pub policy: ThresholdPolicy,
    pub replicates: usize,
    pub seed: u64,
    pub regime: Regime,
    pub target: Target,
    /// Used by set targets only.
    pub window: Window,
    /// `None` means max(0.05·|limit|, 0.02).
    pub epsilon: Option<f64>,
    /// Endpoint for Weibull targets; `None` means the model's endpoint.
    pub kappa: Option<f64>,
    pub aux: AuxSpec,
    /// ε in the growth condition n/k^{1+ε} → 0, logged per (n, k).
    pub moment_epsilon: f64,
}

fn cfg_err(key: &str, reason: impl Into<String>) -> MeplotError {
    MeplotError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

impl ExperimentSpec {
    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| {
            let reason = e.message().to_string();
            // Missing/unknown-field messages quote the key; otherwise use the
            // key on the line the parser pointed at.
            let quoted = reason.split('`').nth(1).filter(|_| reason.contains("field"));
            let spanned = e.span().and_then(|sp| {
                let line_start = text[..sp.start].rfind('\n').map_or(0, |i| i + 1);
                let line = text[line_start..].lines().next()?;
                line.split_once('=').map(|(k, _)| k.trim())
            });
            let key = quoted.or(spanned).unwrap_or("<file>").to_string();
            MeplotError::Config { key, reason }
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn from_raw(raw: RawSpec) -> Result<Self> {
        let model: DistributionModel = raw
            .model
            .parse()
            .map_err(|e: MeplotError| cfg_err("model", e.to_string()))?;
        if raw.n_grid.is_empty() {
            return Err(cfg_err("n_grid", "must list at least one sample size"));
        }
        if raw.n_grid.iter().any(|&n| n < 2) {
            return Err(cfg_err("n_grid", "sample sizes must be at least 2"));
        }
        if raw.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("n_grid", "must be strictly increasing"));
        }
        let n_grid: Vec<usize> = raw.n_grid.iter().map(|&n| n as usize).collect();
        let policy: ThresholdPolicy = raw
            .policy
            .parse()
            .map_err(|e: MeplotError| cfg_err("policy", e.to_string()))?;
        for &n in &n_grid {
            policy
                .k_values(n)
                .map_err(|e| cfg_err("policy", format!("at n = {n}: {e}")))?;
        }
        if raw.replicates < 1 {
            return Err(cfg_err("replicates", "must be at least 1"));
        }
        let target: Target = raw.target.parse()?;
        let regime = match (&raw.regime, target.fixed_regime()) {
            (Some(r), fixed) => {
                let r: Regime = r.parse().map_err(|e: MeplotError| cfg_err("regime", e.to_string()))?;
                if let Some(f) = fixed {
                    if f != r {
                        return Err(cfg_err(
                            "regime",
                            format!("target `{target}` is a {f} statistic, regime says {r}"),
                        ));
                    }
                }
                r
            }
            (None, Some(f)) => f,
            (None, None) => return Err(cfg_err("regime", "required for set targets")),
        };
        if model.regime() != regime {
            return Err(cfg_err(
                "regime",
                format!("model {model} lies in the {} domain, not {regime}", model.regime()),
            ));
        }
        let window = match raw.window {
            Some(m) => Window::new(m)
                .and_then(|w| w.check_for(regime))
                .map_err(|e| cfg_err("window", e.to_string()))?,
            None => Window::default_for(regime),
        };
        if let Some(eps) = raw.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(cfg_err("epsilon", "must be positive"));
            }
        }
        if let Some(kappa) = raw.kappa {
            if regime != Regime::Weibull {
                return Err(cfg_err("kappa", "only meaningful for Weibull targets"));
            }
            if kappa < model.right_endpoint() {
                return Err(cfg_err(
                    "kappa",
                    format!("{kappa} lies below the model endpoint {}", model.right_endpoint()),
                ));
            }
        }
        let aux = match &raw.aux {
            Some(a) => a.parse()?,
            None => AuxSpec::FromF,
        };
        let moment_epsilon = raw.moment_epsilon.unwrap_or(1.0);
        if !(moment_epsilon > 0.0) {
            return Err(cfg_err("moment_epsilon", "must be positive"));
        }
        Ok(Self {
            model,
            n_grid,
            policy,
            replicates: raw.replicates as usize,
            seed: raw.seed,
            regime,
            target,
            window,
            epsilon: raw.epsilon,
            kappa: raw.kappa,
            aux,
            moment_epsilon,
        })
    }
}
