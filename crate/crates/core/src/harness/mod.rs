//! Seeded Monte Carlo convergence experiments.
//!
//! Replicate r at sample size n draws from the uniform stream keyed by
//! (seed, n) with stream id r, so replicates are independent of each other
//! and of the thread schedule. Per-replicate results are collected in
//! replicate order before any aggregation.

mod spec;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

pub use spec::{AuxSpec, ExperimentSpec, Target};

use crate::converse::{
    endpoint_statistic_weibull, gamma_from_xi, gumbel_statistic, slope_statistic_frechet,
    v_statistic_frechet, z_statistic_weibull, AuxiliaryFunction,
};
use crate::distmodel::{sample_replicate, Regime, ThresholdPolicy};
use crate::error::{MeplotError, Result};
use crate::meplot::{extract_min_x_concomitant, scaled_set};
use crate::sample::SortedSample;
use crate::setgeom::{hausdorff_windowed, limit_set, LimitSet};

/// Aggregates for one (n, k) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub n: usize,
    pub k: usize,
    pub replicates: usize,
    /// Replicates whose statistic could not be evaluated.
    pub failures: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    /// P̂(|stat − limit| > ε), failures counted as exceedances.
    pub exceedance: f64,
    pub q10: Option<f64>,
    pub median: Option<f64>,
    pub q90: Option<f64>,
    pub k_over_n: f64,
    /// n/k^{1+ε} with ε = `moment_epsilon`.
    pub growth_ratio: f64,
    /// First distinct failure message, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub model: String,
    pub target: Target,
    pub regime: Regime,
    pub policy: String,
    pub replicates: usize,
    pub seed: u64,
    /// Replicate r of size n uses the stream keyed by (seed, n), stream id r.
    pub seed_derivation: &'static str,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<String>,
    pub limit: f64,
    pub limit_provenance: String,
    pub moment_epsilon: f64,
    pub cells: Vec<CellReport>,
}

/// Everything a replicate needs, built once per experiment.
struct Evaluator {
    target: Target,
    regime: Regime,
    limit_set: Option<LimitSet>,
    window: crate::setgeom::Window,
    kappa: f64,
    aux: Option<AuxiliaryFunction>,
}

impl Evaluator {
    fn eval(&self, s: &SortedSample, k: usize) -> Result<f64> {
        match self.target {
            Target::Slope => slope_statistic_frechet(s, k),
            Target::V => v_statistic_frechet(s, k),
            Target::Endpoint => endpoint_statistic_weibull(s, k, self.kappa),
            Target::Z => z_statistic_weibull(s, k, self.kappa),
            Target::Gumbel => {
                let aux = self.aux.as_ref().ok_or_else(|| {
                    MeplotError::Precondition("gumbel target without auxiliary function".into())
                })?;
                gumbel_statistic(s, k, aux)
            }
            Target::Hausdorff | Target::Concomitant => {
                let limit = self.limit_set.as_ref().ok_or_else(|| {
                    MeplotError::Precondition("set target without limit set".into())
                })?;
                let set = scaled_set(s, k, self.regime)?;
                if self.target == Target::Hausdorff {
                    return Ok(hausdorff_windowed(&set.points, limit, self.window)?.distance);
                }
                let p = extract_min_x_concomitant(&set).ok_or_else(|| {
                    MeplotError::DegenerateSample("scaled set has no points".into())
                })?;
                let (t0, _) = limit.clip(self.window).ok_or_else(|| {
                    MeplotError::Window("limit side: empty in window".into())
                })?;
                Ok(p.dist(limit.point_at(t0)))
            }
        }
    }
}

/// (limit, provenance) for the target under the model's true ξ.
fn target_limit(spec: &ExperimentSpec) -> Result<(f64, String)> {
    let xi = spec.model.true_xi();
    let model = spec.model.to_string();
    let gamma_f = || {
        if xi > 0.0 && xi < 1.0 {
            Ok(gamma_from_xi(xi))
        } else {
            Err(MeplotError::Config {
                key: "model".into(),
                reason: format!("Fréchet statistics need 0 < xi < 1, {model} has xi = {xi}"),
            })
        }
    };
    let gamma_w = -gamma_from_xi(xi);
    Ok(match spec.target {
        Target::Hausdorff | Target::Concomitant => (0.0, "distance to the limit set".into()),
        Target::Slope => (gamma_f()?, format!("gamma = xi/(1-xi), true xi = {xi} of {model}")),
        Target::V => (
            gamma_f()? + 1.0,
            format!("gamma + 1, gamma = xi/(1-xi), true xi = {xi} of {model}"),
        ),
        Target::Endpoint => (gamma_w, format!("gamma = -xi/(1-xi), true xi = {xi} of {model}")),
        Target::Z => (
            1.0 - gamma_w,
            format!("1 - gamma, gamma = -xi/(1-xi), true xi = {xi} of {model}"),
        ),
        Target::Gumbel => (1.0, format!("normalized limit 1, true xi = {xi} of {model}")),
    })
}

/// Type-7 quantile of sorted data.
fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn aggregate(
    n: usize,
    k: usize,
    results: &[Result<f64>],
    limit: f64,
    epsilon: f64,
    moment_epsilon: f64,
) -> CellReport {
    let mut values = Vec::with_capacity(results.len());
    let mut failures = 0;
    let mut first_failure = None;
    for r in results {
        match r {
            Ok(v) if v.is_finite() => values.push(*v),
            Ok(v) => {
                failures += 1;
                first_failure.get_or_insert_with(|| format!("non-finite statistic {v}"));
            }
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let exceed = values.iter().filter(|v| (*v - limit).abs() > epsilon).count() + failures;
    let m = values.len();
    let mean = (m > 0).then(|| values.iter().sum::<f64>() / m as f64);
    let sd = mean.filter(|_| m > 1).map(|mu| {
        (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
    });
    let mut sorted = values;
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| (m > 0).then(|| quantile_sorted(&sorted, p));
    CellReport {
        n,
        k,
        replicates: results.len(),
        failures,
        mean,
        sd,
        exceedance: exceed as f64 / results.len() as f64,
        q10: q(0.1),
        median: q(0.5),
        q90: q(0.9),
        k_over_n: k as f64 / n as f64,
        growth_ratio: ThresholdPolicy::growth_ratio(n, k, moment_epsilon),
        first_failure,
    }
}

/// Runs the experiment on the global thread pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    run_experiment_with_threads(spec, None)
}

/// Runs the experiment on a dedicated pool of `threads` workers when given.
///
/// The report does not depend on the number of threads.
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: Option<usize>,
) -> Result<ConvergenceReport> {
    match threads {
        None => run_inner(spec),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| MeplotError::Precondition(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(spec))
        }
    }
}

fn run_inner(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    let (limit, limit_provenance) = target_limit(spec)?;
    let epsilon = spec.epsilon.unwrap_or_else(|| (0.05 * limit.abs()).max(0.02));
    let set_target = spec.target.is_set_target();
    let limit_set = if set_target {
        Some(limit_set(spec.regime, spec.model.true_xi()).map_err(|e| MeplotError::Config {
            key: "regime".into(),
            reason: e.to_string(),
        })?)
    } else {
        None
    };
    let weibull = spec.regime == Regime::Weibull && !set_target;
    let kappa = spec.kappa.unwrap_or_else(|| spec.model.right_endpoint());
    let aux = if spec.target == Target::Gumbel {
        Some(spec.aux.build(&spec.model)?)
    } else {
        None
    };
    let eval = Evaluator {
        target: spec.target,
        regime: spec.regime,
        limit_set,
        window: spec.window,
        kappa,
        aux,
    };

    let mut cells = Vec::new();
    for &n in &spec.n_grid {
        let ks = spec.policy.k_values(n)?;
        let per_replicate: Vec<Vec<Result<f64>>> = (0..spec.replicates as u64)
            .into_par_iter()
            .map(|r| match sample_replicate(&spec.model, n, spec.seed, r) {
                Ok(s) => ks.iter().map(|&k| eval.eval(&s, k)).collect(),
                Err(e) => ks.iter().map(|_| Err(e.clone())).collect(),
            })
            .collect();
        for (j, &k) in ks.iter().enumerate() {
            let column: Vec<Result<f64>> =
                per_replicate.iter().map(|row| row[j].clone()).collect();
            cells.push(aggregate(n, k, &column, limit, epsilon, spec.moment_epsilon));
        }
    }

    Ok(ConvergenceReport {
        model: spec.model.to_string(),
        target: spec.target,
        regime: spec.regime,
        policy: spec.policy.to_string(),
        replicates: spec.replicates,
        seed: spec.seed,
        seed_derivation: "chacha8 key (seed, n), stream = replicate index",
        epsilon,
        window: set_target.then_some(spec.window.m),
        pitch: (spec.target == Target::Hausdorff).then(|| spec.window.pitch()),
        kappa: weibull.then_some(kappa),
        aux: (spec.target == Target::Gumbel).then(|| spec.aux.to_string()),
        limit,
        limit_provenance,
        moment_epsilon: spec.moment_epsilon,
        cells,
    })
}

impl ConvergenceReport {
    /// One row per (n, k, metric); absent values are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,metric,value\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for c in &self.cells {
            let rows: [(&str, String); 13] = [
                ("replicates", c.replicates.to_string()),
                ("failures", c.failures.to_string()),
                ("mean", opt(c.mean)),
                ("sd", opt(c.sd)),
                ("exceedance", c.exceedance.to_string()),
                ("q10", opt(c.q10)),
                ("median", opt(c.median)),
                ("q90", opt(c.q90)),
                ("limit", self.limit.to_string()),
                ("epsilon", self.epsilon.to_string()),
                ("k_over_n", c.k_over_n.to_string()),
                ("growth_ratio", c.growth_ratio.to_string()),
                ("seed", self.seed.to_string()),
            ];
            for (metric, value) in rows {
                let _ = writeln!(out, "{},{},{metric},{value}", c.n, c.k);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per cell for terminal output.
    pub fn summary_lines(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        self.cells
            .iter()
            .map(|c| {
                format!(
                    "{} n={} k={} median={} mean={} sd={} P(|stat-{}|>{})={:.3} failures={}",
                    self.target,
                    c.n,
                    c.k,
                    opt(c.median),
                    opt(c.mean),
                    opt(c.sd),
                    opt(Some(self.limit)),
                    self.epsilon,
                    c.exceedance,
                    c.failures
                )
            })
            .collect()
    }
}

/// (n, P̂(|stat − limit| > ε)) for every cell, in report order.
pub fn exceedance_curve(report: &ConvergenceReport) -> Result<Vec<(usize, f64)>> {
    let mut ns: Vec<usize> = report.cells.iter().map(|c| c.n).collect();
    ns.dedup();
    if ns.len() < 2 {
        return Err(MeplotError::Precondition(
            "exceedance curve needs at least two sample sizes".into(),
        ));
    }
    Ok(report.cells.iter().map(|c| (c.n, c.exceedance)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GUMBEL_ONE: &str = r#"
model = "exp:mean=1"
n_grid = [100]
policy = "power:0.45"
replicates = 1
seed = 17
target = "gumbel"
aux = "constant:1"
"#;

    #[test]
    fn single_replicate_is_reproducible() {
        let spec = ExperimentSpec::from_toml(GUMBEL_ONE).unwrap();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment_with_threads(&spec, Some(3)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.cells.len(), 1);
        let c = &a.cells[0];
        assert_eq!((c.n, c.k, c.replicates, c.failures), (100, 8, 1, 0));
        assert_eq!(c.mean, c.median);
        assert!(c.sd.is_none());
        // Cross-check the single value by hand.
        let s = sample_replicate(&spec.model, 100, 17, 0).unwrap();
        let direct = gumbel_statistic(&s, 8, &AuxiliaryFunction::Constant(1.0)).unwrap();
        assert_eq!(c.mean, Some(direct));
    }

    #[test]
    fn validation_names_the_key() {
        let bad = GUMBEL_ONE.replace("n_grid = [100]", "n_grid = [100, 50]");
        let e = ExperimentSpec::from_toml(&bad).unwrap_err();
        assert!(matches!(e, MeplotError::Config { ref key, .. } if key == "n_grid"), "{e}");
        let bad = GUMBEL_ONE.replace("replicates = 1", "replicates = 0");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "replicates"));
        let bad = format!("{GUMBEL_ONE}\ncolour = 3\n");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "colour"));
        let bad = GUMBEL_ONE.replace("replicates = 1", "replicates = \"many\"");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "replicates"));
        let bad = GUMBEL_ONE.replace("seed = 17\n", "");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "seed"));
        let bad = GUMBEL_ONE.replace("exp:mean=1", "pareto:alpha=2");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "regime"));
        let bad = GUMBEL_ONE.replace("\"gumbel\"", "\"median\"");
        assert!(matches!(ExperimentSpec::from_toml(&bad), Err(MeplotError::Config { key, .. }) if key == "target"));
    }

    #[test]
    fn exceedance_curve_needs_two_sizes() {
        let spec = ExperimentSpec::from_toml(GUMBEL_ONE).unwrap();
        let r = run_experiment(&spec).unwrap();
        assert!(exceedance_curve(&r).is_err());
    }

    #[test]
    fn exact_statistic_has_zero_exceedance() {
        let cells = [Ok(0.5), Ok(0.5), Ok(0.5)];
        let c = aggregate(10, 2, &cells, 0.5, 0.01, 1.0);
        assert_eq!(c.exceedance, 0.0);
        assert_eq!(c.sd, Some(0.0));
        let with_fail = [Ok(0.5), Err(MeplotError::ZeroNormalizer { index: 3 })];
        let c = aggregate(10, 2, &with_fail, 0.5, 0.01, 1.0);
        assert_eq!((c.failures, c.exceedance), (1, 0.5));
    }

    #[test]
    fn quantiles_type7() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert_eq!(quantile_sorted(&v, 0.1), 1.4);
        assert_eq!(quantile_sorted(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn csv_has_one_row_per_metric() {
        let spec = ExperimentSpec::from_toml(GUMBEL_ONE).unwrap();
        let r = run_experiment(&spec).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("n,k,metric,value\n"));
        assert_eq!(csv.lines().count(), 1 + 13);
        assert!(csv.contains("100,8,sd,\n"));
    }
}
