use std::fmt;
use std::sync::Arc;

use crate::distmodel::{me_numeric, DistributionModel};
use crate::error::{MeplotError, Result};

/// First grid point of [`auxiliary_from_f`]; b(t) needs t > 1.
const GRID_START: f64 = 1.25;
const GRID_END: f64 = 1e12;
const POINTS_PER_DECADE: f64 = 8.0;

/// Positive normalizer a(t) on t > 1 for the Gumbel statistic.
#[derive(Clone)]
pub enum AuxiliaryFunction {
    Constant(f64),
    /// Linear interpolation in ln t, clamped at both ends.
    Table { ln_t: Vec<f64>, values: Vec<f64> },
    ClosedForm(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for AuxiliaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Table { ln_t, .. } => write!(f, "Table({} points)", ln_t.len()),
            Self::ClosedForm(_) => f.write_str("ClosedForm"),
        }
    }
}

impl AuxiliaryFunction {
    pub fn closed_form(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::ClosedForm(Arc::new(g))
    }

    pub fn form(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::Table { .. } => "table",
            Self::ClosedForm(_) => "closed-form",
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::ClosedForm(g) => g(t),
            Self::Table { ln_t, values } => {
                let x = t.ln();
                let last = ln_t.len() - 1;
                if x <= ln_t[0] {
                    return values[0];
                }
                if x >= ln_t[last] {
                    return values[last];
                }
                let j = ln_t.partition_point(|&g| g <= x) - 1;
                let w = (x - ln_t[j]) / (ln_t[j + 1] - ln_t[j]);
                values[j] + w * (values[j + 1] - values[j])
            }
        }
    }
}

/// a(t) = f(b(t)): the mean excess at the tail quantile b(t) = F←(1 − 1/t),
/// tabulated on a log-spaced grid over [1.25, 1e12].
pub fn auxiliary_from_f(d: &DistributionModel) -> Result<AuxiliaryFunction> {
    if !d.positive_mean_exists() {
        return Err(MeplotError::MeanDoesNotExist {
            requirement: format!("{d} has no finite positive-part mean"),
        });
    }
    let (lo, hi) = (GRID_START.ln(), GRID_END.ln());
    let steps = ((hi - lo) / std::f64::consts::LN_10 * POINTS_PER_DECADE).ceil() as usize;
    let ln_t: Vec<f64> = (0..=steps)
        .map(|j| lo + (hi - lo) * j as f64 / steps as f64)
        .collect();
    let values = ln_t
        .iter()
        .map(|&x| me_numeric(d, d.b(x.exp())))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuxiliaryFunction::Table { ln_t, values })
}
