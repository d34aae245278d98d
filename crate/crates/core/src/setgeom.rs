//! Limit sets of the scaled ME point sets and windowed Hausdorff distance.
//!
//! Every limit set is a piece of the line y = c·t + d:
//!
//! | regime  | set                     | c          | d  | t range  |
//! |---------|-------------------------|------------|----|----------|
//! | Fréchet | {(t, c·t)}              | ξ/(1−ξ) > 0 | 0  | [1, ∞)   |
//! | Weibull | {(t, c·(t−1))}          | ξ/(1−ξ) < 0 | −c | [0, 1]   |
//! | Gumbel  | {(t, 1)}                | 0          | 1  | [0, ∞)   |
//!
//! Distances are Euclidean and restricted to the box [0, M]².

use serde::{Deserialize, Serialize};

use crate::distmodel::Regime;
use crate::error::{MeplotError, Result};

/// Number of discretization intervals per window side length.
pub const PITCH_DIVISOR: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn in_box(self, m: f64) -> bool {
        (0.0..=m).contains(&self.x) && (0.0..=m).contains(&self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Ray,
    Segment,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSet {
    pub regime: Regime,
    /// ξ/(1−ξ), or 1 for Gumbel.
    pub slope_param: f64,
    pub geometry: Geometry,
}

impl LimitSet {
    /// (slope, intercept) of the supporting line.
    fn line(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::Ray => (self.slope_param, 0.0),
            Geometry::Segment => (self.slope_param, -self.slope_param),
            Geometry::Horizontal => (0.0, 1.0),
        }
    }

    fn t_range(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::Ray => (1.0, f64::INFINITY),
            Geometry::Segment => (0.0, 1.0),
            Geometry::Horizontal => (0.0, f64::INFINITY),
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        let (c, d) = self.line();
        Point::new(t, c * t + d)
    }

    /// Parameter interval of the part inside [0, M]², if any.
    pub fn clip(&self, w: Window) -> Option<(f64, f64)> {
        let (c, d) = self.line();
        let (t0, t1) = self.t_range();
        let m = w.m;
        let (mut lo, mut hi) = (t0.max(0.0), t1.min(m));
        if c == 0.0 {
            if !(0.0..=m).contains(&d) {
                return None;
            }
        } else {
            let (a, b) = ((0.0 - d) / c, (m - d) / c);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// The truncation box [0, M]².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub m: f64,
}

impl Window {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(MeplotError::InvalidParameter {
                name: "window",
                value: m,
                reason: "window side M must be positive and finite",
            });
        }
        Ok(Self { m })
    }

    /// M = 5 for Fréchet and Gumbel, M = 1 for Weibull.
    pub fn default_for(regime: Regime) -> Self {
        match regime {
            Regime::Weibull => Self { m: 1.0 },
            Regime::Frechet | Regime::Gumbel => Self { m: 5.0 },
        }
    }

    /// Rejects Fréchet windows with M ≤ 1, which miss the ray's start.
    pub fn check_for(self, regime: Regime) -> Result<Self> {
        if regime == Regime::Frechet && self.m <= 1.0 {
            return Err(MeplotError::Window(format!(
                "Fréchet window needs M > 1, got {}",
                self.m
            )));
        }
        Ok(self)
    }

    pub fn pitch(self) -> f64 {
        self.m / PITCH_DIVISOR
    }
}

/// The limit set for `regime`; ξ must match the regime's sign.
pub fn limit_set(regime: Regime, xi: f64) -> Result<LimitSet> {
    let mismatch = |need: &str| {
        Err(MeplotError::RegimeMismatch(format!(
            "{regime} limit needs {need}, got xi = {xi}"
        )))
    };
    match regime {
        Regime::Frechet => {
            if !(xi > 0.0 && xi < 1.0) {
                return mismatch("0 < xi < 1");
            }
            Ok(LimitSet {
                regime,
                slope_param: xi / (1.0 - xi),
                geometry: Geometry::Ray,
            })
        }
        Regime::Weibull => {
            if !(xi < 0.0 && xi.is_finite()) {
                return mismatch("finite xi < 0");
            }
            Ok(LimitSet {
                regime,
                slope_param: xi / (1.0 - xi),
                geometry: Geometry::Segment,
            })
        }
        Regime::Gumbel => Ok(LimitSet {
            regime,
            slope_param: 1.0,
            geometry: Geometry::Horizontal,
        }),
    }
}

fn clipped_limit(limit: &LimitSet, w: Window) -> Result<(f64, f64)> {
    limit.clip(w).ok_or_else(|| {
        MeplotError::Window(format!(
            "limit side: {} limit set does not meet [0, {}]^2",
            limit.regime, w.m
        ))
    })
}

fn project(p: Point, limit: &LimitSet, lo: f64, hi: f64) -> f64 {
    let (c, d) = limit.line();
    let t = (p.x + c * (p.y - d)) / (1.0 + c * c);
    p.dist(limit.point_at(t.clamp(lo, hi)))
}

/// Exact distance from `p` to the part of the limit set inside [0, M]².
pub fn point_to_limit_distance(p: Point, limit: &LimitSet, w: Window) -> Result<f64> {
    let (lo, hi) = clipped_limit(limit, w)?;
    Ok(project(p, limit, lo, hi))
}

/// Nearest-neighbour queries against a fixed point set, sorted by x.
struct SweepIndex {
    pts: Vec<Point>,
}

impl SweepIndex {
    fn new(mut pts: Vec<Point>) -> Self {
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        Self { pts }
    }

    fn nearest(&self, q: Point) -> f64 {
        let start = self.pts.partition_point(|p| p.x < q.x);
        let mut best = f64::INFINITY;
        for p in &self.pts[start..] {
            if p.x - q.x >= best {
                break;
            }
            best = best.min(q.dist(*p));
        }
        for p in self.pts[..start].iter().rev() {
            if q.x - p.x >= best {
                break;
            }
            best = best.min(q.dist(*p));
        }
        best
    }
}

/// Windowed Hausdorff distance together with its one-sided parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hausdorff {
    pub distance: f64,
    /// sup over clipped points of the distance to the clipped limit.
    pub point_side: f64,
    /// sup over the discretized clipped limit of the distance to the points.
    pub limit_side: f64,
    /// Arc-length spacing of the limit discretization; bounds its error.
    pub pitch: f64,
    pub points_in_window: usize,
}

/// Hausdorff distance between the points inside [0, M]² and the clipped
/// limit set.
pub fn hausdorff_windowed(points: &[Point], limit: &LimitSet, w: Window) -> Result<Hausdorff> {
    let w = w.check_for(limit.regime)?;
    let (lo, hi) = clipped_limit(limit, w)?;
    let inside: Vec<Point> = points.iter().copied().filter(|p| p.in_box(w.m)).collect();
    if inside.is_empty() {
        return Err(MeplotError::Window(format!(
            "point side: none of the {} points lies in [0, {}]^2",
            points.len(),
            w.m
        )));
    }
    let point_side = inside
        .iter()
        .map(|&p| project(p, limit, lo, hi))
        .fold(0.0, f64::max);

    let pitch = w.pitch();
    let (c, _) = limit.line();
    let arc = (hi - lo) * (1.0 + c * c).sqrt();
    let steps = (arc / pitch).ceil().max(1.0) as usize;
    let index = SweepIndex::new(inside.clone());
    let limit_side = (0..=steps)
        .map(|j| {
            let t = if j == steps {
                hi
            } else {
                lo + (hi - lo) * (j as f64 / steps as f64)
            };
            index.nearest(limit.point_at(t))
        })
        .fold(0.0, f64::max);

    Ok(Hausdorff {
        distance: point_side.max(limit_side),
        point_side,
        limit_side,
        pitch,
        points_in_window: inside.len(),
    })
}

/// Hausdorff distance between two finite point sets (no windowing).
pub fn hausdorff_points(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(MeplotError::Window("Hausdorff distance of an empty point set".into()));
    }
    let one_sided = |from: &[Point], to: &[Point]| {
        let index = SweepIndex::new(to.to_vec());
        from.iter().map(|&p| index.nearest(p)).fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(m: f64) -> Window {
        Window::new(m).unwrap()
    }

    #[test]
    fn limit_set_examples() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        assert_eq!(f.slope_param, 1.0);
        assert_eq!(f.point_at(2.0), Point::new(2.0, 2.0));
        let wb = limit_set(Regime::Weibull, -1.0).unwrap();
        assert_eq!(wb.point_at(0.0), Point::new(0.0, 0.5));
        assert_eq!(wb.point_at(1.0), Point::new(1.0, 0.0));
        let g = limit_set(Regime::Gumbel, 123.0).unwrap();
        assert_eq!(g.point_at(7.0), Point::new(7.0, 1.0));
    }

    #[test]
    fn regime_mismatch() {
        for (r, xi) in [
            (Regime::Frechet, 0.0),
            (Regime::Frechet, 1.0),
            (Regime::Frechet, -0.2),
            (Regime::Weibull, 0.0),
            (Regime::Weibull, 0.3),
        ] {
            assert!(matches!(limit_set(r, xi), Err(MeplotError::RegimeMismatch(_))));
        }
    }

    #[test]
    fn clipping() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        assert_eq!(f.clip(w(3.0)), Some((1.0, 3.0)));
        // Slope 3: ordinate reaches 6 at t = 2.
        let steep = limit_set(Regime::Frechet, 0.75).unwrap();
        assert_eq!(steep.clip(w(6.0)), Some((1.0, 2.0)));
        assert_eq!(steep.clip(w(2.0)), None);
        let g = limit_set(Regime::Gumbel, 0.0).unwrap();
        assert_eq!(g.clip(w(0.5)), None);
        let wb = limit_set(Regime::Weibull, -1.0).unwrap();
        assert_eq!(wb.clip(w(1.0)), Some((0.0, 1.0)));
        assert_eq!(wb.clip(w(0.5)), Some((0.0, 0.5)));
    }

    #[test]
    fn point_to_limit_examples() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        assert_eq!(point_to_limit_distance(Point::new(1.0, 1.0), &f, w(1.5)).unwrap(), 0.0);
        let d = point_to_limit_distance(Point::new(2.0, 0.0), &f, w(3.0)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let g = limit_set(Regime::Gumbel, 0.0).unwrap();
        for m in [1.0, 5.0, 100.0] {
            assert_eq!(point_to_limit_distance(Point::new(0.0, 0.0), &g, w(m)).unwrap(), 1.0);
        }
    }

    #[test]
    fn hausdorff_single_point_example() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        let h = hausdorff_windowed(&[Point::new(2.0, 0.0)], &f, w(3.0)).unwrap();
        assert!((h.distance - 10f64.sqrt()).abs() < 1e-12);
        assert!((h.point_side - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(h.pitch, 3e-4);
    }

    #[test]
    fn hausdorff_zero_for_dense_points_on_limit() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        let pts: Vec<Point> = (0..=4000).map(|j| f.point_at(1.0 + 4.0 * j as f64 / 4000.0)).collect();
        let h = hausdorff_windowed(&pts, &f, w(5.0)).unwrap();
        // Point spacing is √2·1e-3; the nearest point is at most half that away.
        assert!(h.distance <= 2f64.sqrt() * 5e-4 + 1e-12);
        assert!(h.point_side < 1e-15);
    }

    #[test]
    fn hausdorff_window_errors_name_side() {
        let f = limit_set(Regime::Frechet, 0.5).unwrap();
        let e = hausdorff_windowed(&[Point::new(9.0, 9.0)], &f, w(5.0)).unwrap_err();
        assert!(e.to_string().contains("point side"));
        let steep = limit_set(Regime::Frechet, 0.9).unwrap();
        let e = hausdorff_windowed(&[Point::new(1.0, 1.0)], &steep, w(5.0)).unwrap_err();
        assert!(e.to_string().contains("limit side"));
        assert!(hausdorff_windowed(&[Point::new(0.5, 0.5)], &f, w(1.0)).is_err());
    }

    #[test]
    fn weibull_and_gumbel_distances() {
        let wb = limit_set(Regime::Weibull, -1.0).unwrap();
        let h = hausdorff_windowed(&[Point::new(0.0, 0.5), Point::new(1.0, 0.0)], &wb, w(1.0))
            .unwrap();
        // Farthest limit point from both endpoints is the midpoint (0.5, 0.25).
        let expect = Point::new(0.5, 0.25).dist(Point::new(0.0, 0.5));
        assert!((h.distance - expect).abs() < h.pitch);
        let g = limit_set(Regime::Gumbel, 0.0).unwrap();
        let h = hausdorff_windowed(&[Point::new(0.0, 1.0)], &g, w(2.0)).unwrap();
        assert!((h.distance - 2.0).abs() < 1e-12);
    }

    fn arb_points() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), 1..40)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    }

    proptest! {
        #[test]
        fn finite_hausdorff_is_symmetric(a in arb_points(), b in arb_points()) {
            prop_assert_eq!(hausdorff_points(&a, &b).unwrap(), hausdorff_points(&b, &a).unwrap());
        }

        #[test]
        fn one_sided_parts_bounded(a in arb_points(), xi in 0.05..0.8f64) {
            let f = limit_set(Regime::Frechet, xi).unwrap();
            if let Ok(h) = hausdorff_windowed(&a, &f, w(5.0)) {
                prop_assert!(h.point_side <= h.distance && h.limit_side <= h.distance);
            }
        }

        #[test]
        fn limit_side_monotone_in_window(a in arb_points(), m in 1.5..5.0f64, grow in 0.0..5.0f64) {
            let inside: Vec<Point> = a.into_iter().filter(|p| p.in_box(m)).collect();
            prop_assume!(!inside.is_empty());
            let g = limit_set(Regime::Gumbel, 0.0).unwrap();
            let small = hausdorff_windowed(&inside, &g, w(m)).unwrap();
            let big = hausdorff_windowed(&inside, &g, w(m + grow)).unwrap();
            prop_assert!(big.limit_side >= small.limit_side - small.pitch);
        }

        #[test]
        fn exact_and_discretized_agree(px in 0.0..5.0f64, py in 0.0..5.0f64, xi in 0.1..0.8f64) {
            let f = limit_set(Regime::Frechet, xi).unwrap();
            let win = w(5.0);
            let exact = point_to_limit_distance(Point::new(px, py), &f, win).unwrap();
            let (lo, hi) = f.clip(win).unwrap();
            let disc = (0..=10_000)
                .map(|j| f.point_at(lo + (hi - lo) * j as f64 / 1e4).dist(Point::new(px, py)))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(disc >= exact - 1e-12);
            prop_assert!(disc - exact <= win.pitch() * (1.0 + xi / (1.0 - xi)));
        }
    }
}
