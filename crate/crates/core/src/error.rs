use thiserror::Error;

/// Errors raised by the mean-excess machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeplotError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("mean does not exist for this model (requires {requirement})")]
    MeanDoesNotExist { requirement: String },

    #[error("threshold {threshold} sits at or beyond the right endpoint (tail is zero)")]
    ThresholdAtEndpoint { threshold: f64 },

    #[error("quadrature did not converge: estimate {estimate}, achieved relative error {achieved:e} (requested {requested:e})")]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("moment condition fails: integral diverges ({detail})")]
    MomentCondition { detail: String },

    #[error("no sample value exceeds the threshold {threshold}")]
    EmptyExcess { threshold: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid threshold count k = {k} for sample size n = {n}: {reason}")]
    InvalidK { k: usize, n: usize, reason: String },

    #[error("scaling normalizer {normalizer} is not positive ({detail})")]
    Scaling { normalizer: f64, detail: String },

    #[error("nonpositive threshold X_({index}) = {value}")]
    NonPositiveThreshold { index: usize, value: f64 },

    #[error("endpoint kappa = {kappa} is below the sample maximum {max}")]
    EndpointViolation { kappa: f64, max: f64 },

    #[error("zero normalizer: kappa equals X_({index})")]
    ZeroNormalizer { index: usize },

    #[error("auxiliary function value {value} at t = {t} is not positive")]
    Auxiliary { t: f64, value: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("parse error in field `{field}`: {reason}")]
    Parse { field: String, reason: String },

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, MeplotError>;
