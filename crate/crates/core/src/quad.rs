//! Adaptive Gauss–Kronrod quadrature.
//!
//! The 7-point Gauss / 15-point Kronrod pair drives a globally adaptive
//! bisection scheme: the interval with the largest error estimate is split
//! until the summed error meets the requested tolerance. Semi-infinite
//! integrals whose integrand decays at least exponentially are handled by
//! [`integrate_to_infinity`], which integrates over geometrically growing
//! chunks until the remainder is negligible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{MeplotError, Result};

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the abscissae XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }
}

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the G7/K15 pair on [a, b].
///
/// Returns the Kronrod estimate and the QUADPACK-style scaled error.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_kronrod - res_gauss) * half).abs();

    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Adaptive integration of `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(MeplotError::Domain {
            value: if a.is_finite() { b } else { a },
            domain: "finite integration limits".into(),
        });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut evaluations = 15;
    if !value.is_finite() {
        return Err(MeplotError::Quadrature {
            estimate: value,
            achieved: f64::INFINITY,
            requested: cfg.rel_tol,
        });
    }

    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    // Pieces too narrow to split further in floating point.
    let mut frozen: Vec<Piece> = Vec::new();
    let mut total_value = value;
    let mut total_error = error;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tol {
            break;
        }
        if heap.len() + frozen.len() >= cfg.max_subdivisions {
            return Err(MeplotError::Quadrature {
                estimate: total_value,
                achieved: total_error / total_value.abs(),
                requested: cfg.rel_tol,
            });
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, worst.b);
        evaluations += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(MeplotError::Quadrature {
                estimate: total_value,
                achieved: f64::INFINITY,
                requested: cfg.rel_tol,
            });
        }
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum in interval order so the result does not depend on heap history.
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.extend(frozen);
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let abs_error: f64 = pieces.iter().map(|p| p.error).sum();
    Ok(Integral {
        value,
        abs_error,
        evaluations,
    })
}

/// Integrates `f` over [start, ∞) for integrands that eventually decay at
/// least exponentially.
///
/// The range is covered by chunks of width 1, 1, 2, 4, ... and the sweep stops
/// once a chunk contributes less than `rel_tol / 100` of the running total.
/// Reaching `limit` without that happening yields a quadrature error whose
/// `achieved` field is the relative size of the last chunk.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    limit: f64,
    cfg: QuadConfig,
) -> Result<Integral> {
    let mut lo = start;
    let mut width = 1.0;
    let mut total = Integral {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
    };
    let mut chunks = 0usize;
    let mut last = f64::INFINITY;

    while lo < limit {
        let hi = (lo + width).min(limit);
        let piece = integrate(&f, lo, hi, cfg)?;
        total.value += piece.value;
        total.abs_error += piece.abs_error;
        total.evaluations += piece.evaluations;
        chunks += 1;
        last = piece.value.abs();
        if chunks >= 3 && last <= 0.01 * cfg.rel_tol * total.value.abs() {
            return Ok(total);
        }
        if chunks >= 2 {
            width *= 2.0;
        }
        lo = hi;
    }

    if last == 0.0 {
        return Ok(total);
    }
    Err(MeplotError::Quadrature {
        estimate: total.value,
        achieved: last / total.value.abs(),
        requested: cfg.rel_tol,
    })
}
