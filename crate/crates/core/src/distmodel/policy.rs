use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{MeplotError, Result};

/// How the number of upper order statistics k is chosen for a sample size n.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdRule {
    /// k = ⌈n^a⌉, 0 < a < 1.
    Power(f64),
    /// k = ⌈c·n⌉, 0 < c < 1.
    Ratio(f64),
    /// Fixed k values, independent of n.
    Explicit(Vec<usize>),
    /// One k = ⌈n^a⌉ per listed exponent.
    PowerLadder(Vec<f64>),
}

/// Threshold-count policy k_n.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolicy {
    pub rule: ThresholdRule,
}

fn ceil_power(n: usize, a: f64) -> usize {
    let x = (n as f64).powf(a);
    let r = x.round();
    // n^a that is an integer up to rounding noise must not be bumped by ceil.
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn check_exponent(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(MeplotError::InvalidParameter {
            name: "exponent",
            value: a,
            reason: "power-rule exponent must lie in (0, 1)",
        })
    }
}

impl ThresholdPolicy {
    pub fn power(a: f64) -> Result<Self> {
        check_exponent(a)?;
        Ok(Self {
            rule: ThresholdRule::Power(a),
        })
    }

    pub fn ratio(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(MeplotError::InvalidParameter {
                name: "ratio",
                value: c,
                reason: "ratio must lie in (0, 1)",
            });
        }
        Ok(Self {
            rule: ThresholdRule::Ratio(c),
        })
    }

    pub fn explicit(ks: Vec<usize>) -> Result<Self> {
        if ks.is_empty() || ks.contains(&0) {
            return Err(MeplotError::Precondition(
                "explicit k list must be nonempty and positive".into(),
            ));
        }
        Ok(Self {
            rule: ThresholdRule::Explicit(ks),
        })
    }

    pub fn ladder(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(MeplotError::Precondition("ladder needs at least one exponent".into()));
        }
        for &a in &exponents {
            check_exponent(a)?;
        }
        Ok(Self {
            rule: ThresholdRule::PowerLadder(exponents),
        })
    }

    /// The k values for sample size `n`, ascending and deduplicated.
    ///
    /// Every returned k satisfies 1 ≤ k < n.
    pub fn k_values(&self, n: usize) -> Result<Vec<usize>> {
        let mut ks: Vec<usize> = match &self.rule {
            ThresholdRule::Power(a) => vec![ceil_power(n, *a)],
            ThresholdRule::Ratio(c) => vec![(c * n as f64).ceil() as usize],
            ThresholdRule::Explicit(ks) => ks.clone(),
            ThresholdRule::PowerLadder(exps) => exps.iter().map(|&a| ceil_power(n, a)).collect(),
        };
        ks.sort_unstable();
        ks.dedup();
        if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k >= n) {
            return Err(MeplotError::InvalidK {
                k: bad,
                n,
                reason: "policy must give 1 <= k < n".into(),
            });
        }
        Ok(ks)
    }

    /// Whether the rule has n/k^{1+ε} → 0, i.e. every exponent a > 1/(1+ε).
    ///
    /// Ratio rules grow linearly and always qualify; explicit lists never do.
    pub fn satisfies_moment_growth(&self, epsilon: f64) -> bool {
        let bound = 1.0 / (1.0 + epsilon);
        match &self.rule {
            ThresholdRule::Power(a) => *a > bound,
            ThresholdRule::PowerLadder(exps) => exps.iter().all(|&a| a > bound),
            ThresholdRule::Ratio(_) => true,
            ThresholdRule::Explicit(_) => false,
        }
    }

    /// n / k^{1+ε} at the given (n, k).
    pub fn growth_ratio(n: usize, k: usize, epsilon: f64) -> f64 {
        n as f64 / (k as f64).powf(1.0 + epsilon)
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(",");
        match &self.rule {
            ThresholdRule::Power(a) => write!(f, "power:{a}"),
            ThresholdRule::Ratio(c) => write!(f, "ratio:{c}"),
            ThresholdRule::Explicit(ks) => {
                write!(f, "explicit:{}", join(ks.iter().map(|k| k.to_string()).collect()))
            }
            ThresholdRule::PowerLadder(es) => {
                write!(f, "ladder:{}", join(es.iter().map(|a| a.to_string()).collect()))
            }
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = MeplotError;

    /// `power:0.45`, `ratio:0.01`, `explicit:10,20,40`, `ladder:0.55,0.65,0.75`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| MeplotError::Parse {
            field: "policy".into(),
            reason: format!("expected `kind:values`, got `{s}`"),
        })?;
        let floats = || -> Result<Vec<f64>> {
            rest.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| MeplotError::Parse {
                        field: "policy".into(),
                        reason: format!("`{v}` is not a number"),
                    })
                })
                .collect()
        };
        let single = |xs: Vec<f64>| -> Result<f64> {
            match xs.as_slice() {
                [x] => Ok(*x),
                _ => Err(MeplotError::Parse {
                    field: "policy".into(),
                    reason: format!("`{kind}` takes exactly one value"),
                }),
            }
        };
        let parsed = match kind.trim() {
            "power" => Self::power(single(floats()?)?),
            "ratio" => Self::ratio(single(floats()?)?),
            "ladder" => Self::ladder(floats()?),
            "explicit" => {
                let ks = rest
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<usize>().map_err(|_| MeplotError::Parse {
                            field: "policy".into(),
                            reason: format!("`{v}` is not a count"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::explicit(ks)
            }
            other => {
                return Err(MeplotError::Parse {
                    field: "policy".into(),
                    reason: format!("unknown rule `{other}`"),
                })
            }
        };
        parsed.map_err(|e| MeplotError::Parse {
            field: "policy".into(),
            reason: e.to_string(),
        })
    }
}

impl Serialize for ThresholdPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ThresholdPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
