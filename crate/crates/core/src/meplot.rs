//! Empirical mean excess, the ME plot, and regime-scaled point sets.
//!
//! The empirical mean excess above `u` is
//! M̂(u) = Σ (X_i − u)·1[X_i > u] / Σ 1[X_i > u] (strict exceedance).
//! The ME plot is {(X_(i), M̂(X_(i)))} over order statistics below the
//! maximum; tied thresholds contribute one point.

use std::fmt::Write as _;

use serde::Serialize;

use crate::distmodel::Regime;
use crate::error::{MeplotError, Result};
use crate::setgeom::Point;

pub use crate::sample::SortedSample;

/// Points (X_(i), M̂(X_(i))) of an ME plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MePlotPoints {
    pub points: Vec<Point>,
}

/// The normalization applied to build a [`ScaledSet`].
///
/// Abscissae are (X_(i) − offset)/divisor and ordinates M̂(X_(i))/divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleMeta {
    pub divisor_label: &'static str,
    pub divisor: f64,
    pub offset: f64,
}

/// A regime-scaled ME point set S_n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledSet {
    pub regime: Regime,
    pub points: Vec<Point>,
    pub k: usize,
    pub scale: ScaleMeta,
}

/// M̂(u). Fails when no observation strictly exceeds `u`.
pub fn empirical_me(s: &SortedSample, u: f64) -> Result<f64> {
    let m = s.count_above(u);
    if m == 0 {
        return Err(MeplotError::EmptyExcess { threshold: u });
    }
    let total: f64 = s.values()[..m].iter().map(|x| x - u).sum();
    Ok(total / m as f64)
}

/// (i, X_(i), M̂(X_(i))) for the first index i of every distinct order
/// statistic among X_(2), …, X_(upto) that lies strictly below X_(1).
///
/// Uses E(x) = E(x') + #{X ≥ x'}·(x' − x) for consecutive distinct
/// thresholds x < x', which only ever adds differences.
fn mean_excess_profile(s: &SortedSample, upto: usize) -> Vec<(usize, f64, f64)> {
    let v = s.values();
    let upto = upto.min(v.len());
    let mut out = Vec::with_capacity(upto.saturating_sub(1));
    if upto < 2 {
        return out;
    }
    let mut prev = v[0];
    let mut excess = 0.0;
    for (idx, &x) in v.iter().enumerate().take(upto).skip(1) {
        if x == prev {
            continue;
        }
        // idx values (X_(1)..X_(idx)) are >= prev > x.
        excess += idx as f64 * (prev - x);
        out.push((idx + 1, x, excess / idx as f64));
        prev = x;
    }
    out
}

/// The ME plot over all order statistics.
pub fn me_plot(s: &SortedSample) -> Result<MePlotPoints> {
    if s.len() < 2 {
        return Err(MeplotError::DegenerateSample(format!(
            "ME plot needs at least 2 observations, got {}",
            s.len()
        )));
    }
    let points: Vec<Point> = mean_excess_profile(s, s.len())
        .into_iter()
        .map(|(_, x, m)| Point::new(x, m))
        .collect();
    if points.is_empty() {
        return Err(MeplotError::DegenerateSample("all observations are identical".into()));
    }
    Ok(MePlotPoints { points })
}

/// Regime-scaled set built from the top `k` order statistics.
///
/// * Fréchet: (X_(i), M̂(X_(i))) / X_(k)
/// * Weibull: (X_(i) − X_(k), M̂(X_(i))) / (X_(1) − X_(k))
/// * Gumbel: (X_(i) − X_(k), M̂(X_(i))) / (X_(⌈k/2⌉) − X_(k))
///
/// for i = 2, …, k.
pub fn scaled_set(s: &SortedSample, k: usize, regime: Regime) -> Result<ScaledSet> {
    let n = s.len();
    if k < 2 || k >= n {
        return Err(MeplotError::InvalidK {
            k,
            n,
            reason: "scaled set needs 2 <= k < n".into(),
        });
    }
    let xk = s.order_stat(k);
    let scale = match regime {
        Regime::Frechet => ScaleMeta {
            divisor_label: "X_(k)",
            divisor: xk,
            offset: 0.0,
        },
        Regime::Weibull => ScaleMeta {
            divisor_label: "X_(1) - X_(k)",
            divisor: s.order_stat(1) - xk,
            offset: xk,
        },
        Regime::Gumbel => ScaleMeta {
            divisor_label: "X_(ceil(k/2)) - X_(k)",
            divisor: s.order_stat(k.div_ceil(2)) - xk,
            offset: xk,
        },
    };
    if !(scale.divisor > 0.0) {
        return Err(MeplotError::Scaling {
            normalizer: scale.divisor,
            detail: format!("{} with k = {k}", scale.divisor_label),
        });
    }
    let points = mean_excess_profile(s, k)
        .into_iter()
        .map(|(_, x, m)| Point::new((x - scale.offset) / scale.divisor, m / scale.divisor))
        .collect();
    Ok(ScaledSet {
        regime,
        points,
        k,
        scale,
    })
}

/// The point of minimal abscissa (ties: smallest ordinate).
pub fn extract_min_x_concomitant(set: &ScaledSet) -> Option<Point> {
    set.points
        .iter()
        .copied()
        .min_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)))
}

fn push_rows(out: &mut String, points: &[Point]) {
    for p in points {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
}

impl MePlotPoints {
    /// CSV with a two-line `#` header followed by `x,y` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# regime=none\n# normalizer=none\n");
        push_rows(&mut out, &self.points);
        out
    }
}

impl ScaledSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# regime={} k={}", self.regime, self.k);
        let _ = writeln!(
            out,
            "# normalizer={} value={} offset={}",
            self.scale.divisor_label, self.scale.divisor, self.scale.offset
        );
        push_rows(&mut out, &self.points);
        out
    }
}

/// Reads `x,y` rows, skipping `#` lines and blank lines.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || MeplotError::Parse {
            field: format!("line {}", lineno + 1),
            reason: format!("expected `x,y`, got `{line}`"),
        };
        let (x, y) = line.split_once(',').ok_or_else(bad)?;
        let x = x.trim().parse::<f64>().map_err(|_| bad())?;
        let y = y.trim().parse::<f64>().map_err(|_| bad())?;
        points.push(Point::new(x, y));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SortedSample {
        SortedSample::from_unsorted(v.to_vec()).unwrap()
    }

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn empirical_me_examples() {
        assert_eq!(empirical_me(&sample(&[5.0, 4.0, 2.0, 1.0]), 2.0).unwrap(), 2.5);
        let c = sample(&[3.5; 6]);
        assert_eq!(empirical_me(&c, 1.25).unwrap(), 2.25);
        assert!(matches!(
            empirical_me(&c, 3.5),
            Err(MeplotError::EmptyExcess { .. })
        ));
    }

    #[test]
    fn me_plot_examples() {
        assert_eq!(me_plot(&sample(&[3.0, 1.0])).unwrap().points, pts(&[(1.0, 2.0)]));
        let p = me_plot(&sample(&[5.0, 4.0, 2.0, 1.0])).unwrap();
        assert_eq!(p.points[..2], pts(&[(4.0, 1.0), (2.0, 2.5)])[..]);
        assert_eq!(p.points[2].x, 1.0);
        assert!((p.points[2].y - 8.0 / 3.0).abs() < 1e-15);
        // Tie at the maximum: index 2 has no exceedance.
        assert_eq!(me_plot(&sample(&[2.0, 2.0, 1.0])).unwrap().points, pts(&[(1.0, 1.0)]));
    }

    #[test]
    fn me_plot_errors() {
        assert!(matches!(me_plot(&sample(&[1.0])), Err(MeplotError::DegenerateSample(_))));
        assert!(matches!(
            me_plot(&sample(&[4.0, 4.0, 4.0])),
            Err(MeplotError::DegenerateSample(_))
        ));
    }

    #[test]
    fn interior_ties_emit_one_point() {
        let p = me_plot(&sample(&[6.0, 3.0, 3.0, 3.0, 1.0])).unwrap();
        assert_eq!(p.points, pts(&[(3.0, 3.0), (1.0, 2.75)]));
    }

    #[test]
    fn frechet_scaled_set_example() {
        // M̂(4) = 4 and M̂(2) = ((8 − 2) + (4 − 2))/2 = 4, divided by X_(3) = 2.
        let set = scaled_set(&sample(&[8.0, 4.0, 2.0, 1.0]), 3, Regime::Frechet).unwrap();
        assert_eq!(set.points, pts(&[(2.0, 2.0), (1.0, 2.0)]));
        assert_eq!(set.scale.divisor, 2.0);
        assert_eq!(extract_min_x_concomitant(&set), Some(Point::new(1.0, 2.0)));
    }

    #[test]
    fn weibull_k2_single_point_at_zero() {
        let s = sample(&[0.9, 0.7, 0.4, 0.1]);
        let set = scaled_set(&s, 2, Regime::Weibull).unwrap();
        assert_eq!(set.points.len(), 1);
        assert_eq!(set.points[0].x, 0.0);
        assert!((set.points[0].y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gumbel_scaled_set_uses_half_k_normalizer() {
        let s = sample(&[10.0, 7.0, 5.0, 4.0, 2.0, 0.0]);
        let set = scaled_set(&s, 4, Regime::Gumbel).unwrap();
        // divisor X_(2) − X_(4) = 3, offset 4
        assert_eq!(set.scale.divisor, 3.0);
        assert_eq!(set.points[0], Point::new(1.0, 1.0));
        assert_eq!(set.points[2].x, 0.0);
        assert!((set.points[2].y - (6.0 + 3.0 + 1.0) / 3.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_errors() {
        let s = sample(&[3.0, 0.0, -1.0, -2.0]);
        assert!(matches!(
            scaled_set(&s, 2, Regime::Frechet),
            Err(MeplotError::Scaling { .. })
        ));
        let flat = sample(&[5.0, 5.0, 5.0, 1.0]);
        assert!(matches!(
            scaled_set(&flat, 3, Regime::Weibull),
            Err(MeplotError::Scaling { .. })
        ));
        assert!(matches!(
            scaled_set(&flat, 4, Regime::Weibull),
            Err(MeplotError::InvalidK { .. })
        ));
        assert!(matches!(
            scaled_set(&flat, 1, Regime::Weibull),
            Err(MeplotError::InvalidK { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample(&[9.25, 3.0 / 7.0, 1.0 / 3.0, 1e-9, -2.5e12]);
        let plot = me_plot(&s).unwrap();
        let text = plot.to_csv();
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 2);
        assert_eq!(parse_points_csv(&text).unwrap(), plot.points);
    }
}
