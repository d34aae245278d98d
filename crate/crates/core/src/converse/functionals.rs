//! H-functionals: integrals of the quantile function over (y, 1) whose
//! limits as y → 1 match the converse statistics.
//!
//! All three are evaluated after the substitution x = 1 − (1−y)e^{−w},
//! which maps (y, 1) to (0, ∞) and turns the (1−y)^{-1} weight into e^{−w}:
//!
//! ∫_y^1 g(x) dx / (1−y) = ∫_0^∞ g(1 − (1−y)e^{−w}) e^{−w} dw.

use crate::distmodel::DistributionModel;
use crate::error::{MeplotError, Result};
use crate::quad::{integrate_to_infinity, QuadConfig};

/// Past this w, (1−y)e^{−w} underflows.
const W_LIMIT: f64 = 700.0;

/// Which variant of the Gumbel H-functional to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HForm {
    /// (1/(1−x)) ∫_x^1 (F←(s) − F←(x)) ds, the mean excess at F←(x).
    #[default]
    MeanExcess,
    /// (1/(1−x)) ∫_x^1 F←(s) ds, without subtracting the level.
    Literal,
}

fn check_prob(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(MeplotError::Domain {
            value: y,
            domain: "(0, 1)".into(),
        });
    }
    Ok(1.0 - y)
}

/// ∫_0^∞ g(p0·e^{−w}) e^{−w} dw.
fn weighted_tail_integral(p0: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let limit = W_LIMIT + p0.ln();
    let f = |w: f64| {
        let e = (-w).exp();
        g(p0 * e) * e
    };
    integrate_to_infinity(f, 0.0, limit, QuadConfig::default()).map(|r| r.value)
}

/// ∫_y^1 F←(x) dx / (F←(y)(1−y)).
///
/// Equals α/(α−1) for Pareto(α) at every y and tends to γ + 1 as y → 1.
pub fn h_frechet(d: &DistributionModel, y: f64) -> Result<f64> {
    let p0 = check_prob(y)?;
    let level = d.tail_quantile(p0);
    if !(level > 0.0) {
        return Err(MeplotError::Domain {
            value: level,
            domain: "positive quantile F←(y)".into(),
        });
    }
    weighted_tail_integral(p0, |p| d.tail_quantile(p) / level).map_err(|e| match e {
        MeplotError::Quadrature { .. } => MeplotError::MomentCondition {
            detail: format!("∫ F← diverges near 1 for {d}: {e}"),
        },
        other => other,
    })
}

/// ∫_y^1 F_Z←(y)/F_Z←(x) dx / (1−y) with Z = (κ − X)^{−1}.
///
/// F_Z←(x) = 1/(κ − F←(x)), so the integrand is the ratio of endpoint gaps
/// (κ − F←(x))/(κ − F←(y)). Tends to 1 − γ as y → 1.
pub fn h_weibull(d: &DistributionModel, kappa: f64, y: f64) -> Result<f64> {
    let p0 = check_prob(y)?;
    let endpoint = d.right_endpoint();
    if !endpoint.is_finite() {
        return Err(MeplotError::Domain {
            value: endpoint,
            domain: format!("finite right endpoint for {d}"),
        });
    }
    if kappa < endpoint {
        return Err(MeplotError::EndpointViolation { kappa, max: endpoint });
    }
    let gap = |p: f64| match d.endpoint_gap(p) {
        Some(g) if kappa == endpoint => g,
        _ => kappa - d.tail_quantile(p),
    };
    let base = gap(p0);
    if !(base > 0.0) {
        return Err(MeplotError::Domain {
            value: base,
            domain: "positive gap κ − F←(y)".into(),
        });
    }
    weighted_tail_integral(p0, |p| gap(p) / base)
}

/// Gumbel H-functional at probability level x; see [`HForm`].
///
/// The mean-excess form equals 1 for every exponential(1) level; the
/// literal form gives 1 + ln t at x = 1 − 1/t.
pub fn h_gumbel(d: &DistributionModel, x: f64, form: HForm) -> Result<f64> {
    let p0 = check_prob(x)?;
    if !d.positive_mean_exists() {
        return Err(MeplotError::MeanDoesNotExist {
            requirement: format!("{d} has no finite positive-part mean"),
        });
    }
    match form {
        HForm::MeanExcess => {
            let level = d.tail_quantile(p0);
            weighted_tail_integral(p0, |p| d.tail_quantile(p) - level)
        }
        HForm::Literal => weighted_tail_integral(p0, |p| d.tail_quantile(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frechet_pareto_is_constant() {
        let d = DistributionModel::pareto(2.0).unwrap();
        for y in [0.1, 0.5, 0.9, 0.99, 0.999] {
            assert!((h_frechet(&d, y).unwrap() - 2.0).abs() < 1e-9, "y = {y}");
        }
        let d3 = DistributionModel::pareto(3.0).unwrap();
        assert!((h_frechet(&d3, 0.95).unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn frechet_gpd_approaches_gamma_plus_one() {
        let d = DistributionModel::gpd(0.5, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for y in [0.9, 0.99, 0.999, 0.9999, 0.99999] {
            let h = h_frechet(&d, y).unwrap();
            let dist = (h - 2.0).abs();
            assert!(dist < prev);
            prev = dist;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn frechet_moment_condition() {
        let d = DistributionModel::pareto(1.0).unwrap();
        assert!(matches!(h_frechet(&d, 0.9), Err(MeplotError::MomentCondition { .. })));
        let d = DistributionModel::pareto(2.0).unwrap();
        assert!(matches!(h_frechet(&d, 1.0), Err(MeplotError::Domain { .. })));
    }

    #[test]
    fn weibull_uniform_is_half() {
        let u = DistributionModel::uniform();
        let g = DistributionModel::gpd(-1.0, 1.0).unwrap();
        for y in [0.5, 0.9, 0.99, 0.999] {
            let a = h_weibull(&u, 1.0, y).unwrap();
            assert!((a - 0.5).abs() < 1e-12, "y = {y}");
            let b = h_weibull(&g, 1.0, y).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn weibull_beta_tail_limit() {
        // F̄(1 − s) = s^p: the gap ratio is e^{−w/p}, so H = p/(p+1) = 1 − γ.
        let d = DistributionModel::beta_tail(3.0).unwrap();
        assert!((h_weibull(&d, 1.0, 0.7).unwrap() - 0.75).abs() < 1e-12);
        assert!(h_weibull(&d, 0.9, 0.7).is_err());
        assert!(h_weibull(&DistributionModel::exponential(1.0).unwrap(), 1.0, 0.7).is_err());
    }

    #[test]
    fn gumbel_forms() {
        let e = DistributionModel::exponential(1.0).unwrap();
        for x in [0.1, 0.5, 0.9, 0.999] {
            assert!((h_gumbel(&e, x, HForm::MeanExcess).unwrap() - 1.0).abs() < 1e-10);
        }
        for t in [2.0, 10.0, 1e4] {
            let lit = h_gumbel(&e, 1.0 - 1.0 / t, HForm::Literal).unwrap();
            assert!((lit - (1.0 + t.ln())).abs() < 1e-9 * (1.0 + t.ln()));
        }
        let u = DistributionModel::uniform();
        assert!((h_gumbel(&u, 0.5, HForm::MeanExcess).unwrap() - 0.25).abs() < 1e-12);
        let heavy = DistributionModel::pareto(0.9).unwrap();
        assert!(h_gumbel(&heavy, 0.5, HForm::MeanExcess).is_err());
    }
}
