//! Closed-form identities used as numerical oracles.

use serde::Serialize;

use crate::error::{MeplotError, Result};

/// The stated value n/(k+1) of E[(1 − U_(k+1))^{−1}].
///
/// The product ∏_{i=1}^{n−k−1} (n−i+1)/(n−i) telescopes to n/(k+1), which is
/// the exact expectation for the (k+2)-th largest of n uniforms. For the
/// (k+1)-th largest, as used with X_(k+1) = F←(U_(k+1)), the product has
/// n−k factors and the expectation is n/k.
pub fn renyi_expectation(n: usize, k: usize) -> Result<f64> {
    if k + 1 > n {
        return Err(MeplotError::InvalidK {
            k,
            n,
            reason: "need k + 1 <= n".into(),
        });
    }
    Ok(n as f64 / (k + 1) as f64)
}

/// (2 + 1/n)e^{−2}/n.
pub fn hall_wellner_bound(n: usize) -> f64 {
    let n = n as f64;
    (2.0 + 1.0 / n) * (-2.0f64).exp() / n
}

/// (sup over `grid` of |(1 − y/n)^n·1[y ≤ n] − e^{−y}|, Hall–Wellner bound).
pub fn hall_wellner_gap(n: usize, grid: &[f64]) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(MeplotError::Precondition("n must be at least 1".into()));
    }
    let nf = n as f64;
    let mut sup = 0.0f64;
    for &y in grid {
        if !(y >= 0.0) {
            return Err(MeplotError::Domain {
                value: y,
                domain: "[0, inf)".into(),
            });
        }
        let approx = if y <= nf {
            (nf * (-y / nf).ln_1p()).exp()
        } else {
            0.0
        };
        sup = sup.max((approx - (-y).exp()).abs());
    }
    Ok((sup, hall_wellner_bound(n)))
}

/// Numeric regular-variation check of g ∈ RV_ρ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KaramataReport {
    pub rho: f64,
    /// (t, max over x of |g(tx)/g(t) − x^ρ|) for each t in the grid.
    pub per_t: Vec<(f64, f64)>,
    /// The deviation at the largest t.
    pub deviation: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// Evaluates |g(tx)/g(t) − x^ρ| over both grids and certifies when the
/// deviation at the largest t is within `tolerance`.
pub fn karamata_oracle(
    g: impl Fn(f64) -> f64,
    rho: f64,
    t_grid: &[f64],
    x_grid: &[f64],
    tolerance: f64,
) -> Result<KaramataReport> {
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(MeplotError::Precondition("empty t or x grid".into()));
    }
    let positive = |v: f64, at: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(MeplotError::Domain {
                value: v,
                domain: format!("positive finite g at {at}"),
            })
        }
    };
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut per_t = Vec::with_capacity(ts.len());
    for &t in &ts {
        let gt = positive(g(t), t)?;
        let mut worst = 0.0f64;
        for &x in x_grid {
            let gtx = positive(g(t * x), t * x)?;
            worst = worst.max((gtx / gt - x.powf(rho)).abs());
        }
        per_t.push((t, worst));
    }
    let deviation = per_t.last().map_or(f64::NAN, |p| p.1);
    Ok(KaramataReport {
        rho,
        per_t,
        deviation,
        tolerance,
        certified: deviation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionModel;

    #[test]
    fn renyi_values() {
        assert_eq!(renyi_expectation(10, 3).unwrap(), 2.5);
        assert_eq!(renyi_expectation(7, 6).unwrap(), 1.0);
        assert!(renyi_expectation(7, 7).is_err());
    }

    #[test]
    fn renyi_product_telescopes() {
        let (n, k) = (50usize, 7usize);
        let prod = |m: usize| (1..=m).map(|i| (n - i + 1) as f64 / (n - i) as f64).product::<f64>();
        assert!((prod(n - k - 1) - renyi_expectation(n, k).unwrap()).abs() < 1e-12);
        assert!((prod(n - k) - n as f64 / k as f64).abs() < 1e-12);
    }

    #[test]
    fn hall_wellner_examples() {
        let (gap, _) = hall_wellner_gap(1, &[0.0]).unwrap();
        assert_eq!(gap, 0.0);
        let grid: Vec<f64> = (0..=100_000).map(|j| 10.0 * j as f64 / 1e5).collect();
        let (gap, bound) = hall_wellner_gap(1, &grid).unwrap();
        assert!((bound - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(gap <= bound);
        // For n = 1 the sup is e^{-1}, attained at y = 1.
        assert!((gap - (-1.0f64).exp()).abs() < 1e-12);
        let grid: Vec<f64> = (0..=100_000).map(|j| 1010.0 * j as f64 / 1e5).collect();
        let (gap, bound) = hall_wellner_gap(1000, &grid).unwrap();
        assert!((bound - 2.708e-4).abs() < 1e-6);
        assert!(gap <= bound);
        assert!(hall_wellner_gap(3, &[-1.0]).is_err());
    }

    #[test]
    fn karamata_exact_power() {
        let r = karamata_oracle(|t: f64| t.sqrt(), 0.5, &[10.0, 1e6], &[2.0, 10.0], 1e-12).unwrap();
        assert!(r.certified);
        assert!(r.deviation < 1e-15);
        let d = DistributionModel::pareto(2.0).unwrap();
        let r = karamata_oracle(|t| d.b(t), 0.5, &[1e3, 1e6], &[2.0, 10.0], 1e-15).unwrap();
        assert!(r.certified);
    }

    #[test]
    fn karamata_log_is_slowly_varying() {
        let r = karamata_oracle(f64::ln, 0.0, &[1e2, 1e4, 1e6], &[2.0], 0.11).unwrap();
        assert!(r.certified);
        assert!((r.deviation - 2f64.ln() / 1e6f64.ln()).abs() < 1e-12);
        assert!(r.per_t.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn karamata_rejects_nonpositive() {
        assert!(karamata_oracle(|t: f64| 1.0 - t, 0.0, &[2.0], &[2.0], 1.0).is_err());
    }
}
