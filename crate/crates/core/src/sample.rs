use serde::Serialize;

use crate::error::{MeplotError, Result};

/// Order statistics X_(1) ≥ X_(2) ≥ … ≥ X_(n) of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `values` into descending order. NaN entries are rejected.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| v.is_nan()) {
            return Err(MeplotError::Domain {
                value: f64::NAN,
                domain: format!("non-NaN sample values (entry {pos})"),
            });
        }
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// Wraps values that are already weakly decreasing.
    pub fn from_descending(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) || values.windows(2).any(|w| w[0] < w[1]) {
            return Err(MeplotError::Precondition(
                "values must be non-NaN and weakly decreasing".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// X_(i), 1-based.
    ///
    /// # Panics
    /// If `i` is 0 or exceeds the sample size.
    pub fn order_stat(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.values.len(), "order statistic index {i} out of range");
        self.values[i - 1]
    }

    pub fn max(&self) -> Option<f64> {
        self.values.first().copied()
    }

    /// Number of sample values strictly greater than `u`.
    pub fn count_above(&self, u: f64) -> usize {
        self.values.partition_point(|&x| x > u)
    }

    /// The sample multiplied by `c`. Order is preserved for c > 0.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(MeplotError::InvalidParameter {
                name: "c",
                value: c,
                reason: "scale factor must be positive",
            });
        }
        Self::from_unsorted(self.values.iter().map(|x| x * c).collect())
    }

    /// The sample shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::from_unsorted(self.values.iter().map(|x| x + c).collect())
    }
}
