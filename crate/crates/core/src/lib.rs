//! Mean-excess plot machinery for extreme-value diagnostics.
//!
//! * [`distmodel`]: distribution models, inverse-transform sampling, and the
//!   exact and numeric mean-excess functions used as oracles.
//! * [`meplot`]: the empirical mean-excess function, the ME plot, and the
//!   regime-scaled point sets.
//! * [`setgeom`]: limit sets and windowed Hausdorff distance.
//! * [`converse`]: slope/endpoint/auxiliary statistics, H-functionals,
//!   supporting identities, and the regime classifier.
//! * [`harness`]: seeded Monte Carlo convergence experiments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod converse;
pub mod distmodel;
pub mod error;
pub mod harness;
pub mod meplot;
pub mod quad;
pub mod sample;
pub mod setgeom;

pub use distmodel::{DistributionModel, GpdParams, Regime, ThresholdPolicy};
pub use error::{MeplotError, Result};
pub use sample::SortedSample;
