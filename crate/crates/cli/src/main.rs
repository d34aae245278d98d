//! `meplot`: mean-excess plots, regime diagnostics, and convergence
//! experiments from the command line.
//!
//! Exit codes: 0 success, 1 error, 2 inconclusive classification.

mod ingest;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use meplot_core::converse::{
    classify_regime_with, h_frechet, h_gumbel, h_weibull, hall_wellner_gap, karamata_oracle,
    renyi_expectation, ClassifierConfig, HForm, Verdict,
};
use meplot_core::distmodel::{draw, me_closed_form, me_numeric, GpdParams};
use meplot_core::harness::{run_experiment_with_threads, ExperimentSpec};
use meplot_core::meplot::{me_plot, scaled_set};
use meplot_core::setgeom::{hausdorff_windowed, limit_set, Window};
use meplot_core::{DistributionModel, Regime, SortedSample, ThresholdPolicy};

use svg::PlotDocument;

/// Default `--k auto` exponent: k = ⌈n^0.45⌉.
const AUTO_K_EXPONENT: f64 = 0.45;

#[derive(Parser)]
#[command(name = "meplot", version, about = "Mean excess plots and extreme-value regime diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the ME plot (or a regime-scaled set) of a one-column CSV.
    Meplot {
        input: PathBuf,
        /// Scale the top-k points for this regime (frechet, weibull, gumbel).
        #[arg(long)]
        regime: Option<Regime>,
        /// Number of upper order statistics, or `auto` for ⌈n^0.45⌉.
        #[arg(long, default_value = "auto")]
        k: String,
        /// Window side M; defaults to 5 (Fréchet, Gumbel) or 1 (Weibull).
        #[arg(long)]
        window: Option<f64>,
        /// Draw the limit set for this ξ over the scaled set.
        #[arg(long, requires = "regime")]
        overlay_xi: Option<f64>,
        /// Seed that produced the data, recorded in the SVG.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write `<stem>.meplot.svg`.
        #[arg(long)]
        svg: bool,
        /// Output directory; defaults to the input's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Classify the domain of attraction; prints a JSON verdict.
    Classify {
        input: PathBuf,
        /// k policy, e.g. `ladder:0.55,0.65,0.75` or `explicit:100,300,1000`.
        #[arg(long, default_value = "ladder:0.55,0.65,0.75")]
        policy: ThresholdPolicy,
        /// Largest accepted coefficient of variation across k.
        #[arg(long, default_value_t = 0.15)]
        stability: f64,
        /// Largest accepted |gumbel statistic − 1|.
        #[arg(long, default_value_t = 0.15)]
        gumbel_band: f64,
        /// Largest accepted top-spacing ratio for a finite endpoint.
        #[arg(long, default_value_t = 0.15)]
        max_stability: f64,
    },
    /// Run a Monte Carlo experiment from a TOML config.
    Experiment {
        config: PathBuf,
        /// Output directory; defaults to the current directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sample from a model, one value per line in draw order.
    Generate {
        /// Model spec, e.g. `gpd:xi=0.5,beta=1` or `pareto:alpha=2`.
        model: DistributionModel,
        /// Sample size.
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Refuse models without a finite mean.
        #[arg(long)]
        require_mean: bool,
    },
    /// Run fast numerical oracle checks.
    Selftest,
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "inconclusive".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Meplot {
            input,
            regime,
            k,
            window,
            overlay_xi,
            seed,
            svg,
            out_dir,
        } => cmd_meplot(&input, regime, &k, window, overlay_xi, seed, svg, out_dir),
        Command::Classify {
            input,
            policy,
            stability,
            gumbel_band,
            max_stability,
        } => {
            let cfg = ClassifierConfig {
                stability,
                gumbel_band,
                max_stability,
                ..ClassifierConfig::default()
            };
            cmd_classify(&input, &policy, cfg)
        }
        Command::Experiment { config, out_dir } => cmd_experiment(&config, out_dir),
        Command::Generate {
            model,
            n,
            seed,
            output,
            require_mean,
        } => cmd_generate(&model, n, seed, output, require_mean),
        Command::Selftest => cmd_selftest(),
    }
}

fn stem(path: &Path) -> Result<String> {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| anyhow!("{} has no file name", path.display()))
}

fn output_dir(input: &Path, out_dir: Option<PathBuf>) -> PathBuf {
    out_dir.unwrap_or_else(|| {
        input
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
    })
}

fn parse_k(k: &str, n: usize) -> Result<usize> {
    if k == "auto" {
        let ks = ThresholdPolicy::power(AUTO_K_EXPONENT)?.k_values(n)?;
        return Ok(ks[0]);
    }
    k.parse()
        .with_context(|| format!("--k expects a count or `auto`, got `{k}`"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_meplot(
    input: &Path,
    regime: Option<Regime>,
    k: &str,
    window: Option<f64>,
    overlay_xi: Option<f64>,
    seed: Option<u64>,
    want_svg: bool,
    out_dir: Option<PathBuf>,
) -> Result<ExitCode> {
    let sample = SortedSample::from_unsorted(ingest::read_values(input)?)?;
    let n = sample.len();
    let dir = output_dir(input, out_dir);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let base = stem(input)?;
    let csv_path = dir.join(format!("{base}.meplot.csv"));

    let mut notes = vec![
        ("seed".to_string(), seed.map_or("none".into(), |s| s.to_string())),
        ("n".to_string(), n.to_string()),
    ];
    let doc = match regime {
        None => {
            let plot = me_plot(&sample)?;
            std::fs::write(&csv_path, plot.to_csv())?;
            PlotDocument {
                title: format!("ME plot of {base}"),
                x_label: "threshold u = X_(i)".into(),
                y_label: "mean excess".into(),
                points: plot.points,
                overlay: None,
                bounds: None,
                width: 640,
                height: 480,
                notes,
                command_line: String::new(),
            }
        }
        Some(regime) => {
            let k = parse_k(k, n)?;
            let w = match window {
                Some(m) => Window::new(m)?.check_for(regime)?,
                None => Window::default_for(regime),
            };
            let set = scaled_set(&sample, k, regime)?;
            std::fs::write(&csv_path, set.to_csv())?;
            notes.push(("regime".into(), regime.to_string()));
            notes.push(("k".into(), k.to_string()));
            notes.push(("window".into(), w.m.to_string()));
            let overlay = match overlay_xi {
                Some(xi) => {
                    let limit = limit_set(regime, xi)?;
                    match hausdorff_windowed(&set.points, &limit, w) {
                        Ok(hd) => {
                            notes.push(("hausdorff".into(), hd.distance.to_string()));
                            notes.push(("pitch".into(), hd.pitch.to_string()));
                        }
                        Err(e) => notes.push(("hausdorff".into(), format!("unavailable ({e})"))),
                    }
                    notes.push(("overlay_xi".into(), xi.to_string()));
                    limit
                        .clip(w)
                        .map(|(lo, hi)| vec![limit.point_at(lo), limit.point_at(hi)])
                }
                None => None,
            };
            PlotDocument {
                title: format!("{regime} scaled ME set of {base}, k = {k}"),
                x_label: "scaled threshold".into(),
                y_label: "scaled mean excess".into(),
                points: set.points,
                overlay,
                bounds: Some(((0.0, w.m), (0.0, w.m))),
                width: 640,
                height: 640,
                notes,
                command_line: String::new(),
            }
        }
    };
    println!("{}", csv_path.display());

    if want_svg {
        let svg_path = dir.join(format!("{base}.meplot.svg"));
        let doc = PlotDocument {
            command_line: command_line(),
            ..doc
        };
        std::fs::write(&svg_path, doc.render())?;
        println!("{}", svg_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn command_line() -> String {
    std::env::args()
        .map(|a| {
            if a.is_empty() || a.contains(char::is_whitespace) {
                format!("'{}'", a.replace('\'', r"'\''"))
            } else {
                a
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_classify(input: &Path, policy: &ThresholdPolicy, cfg: ClassifierConfig) -> Result<ExitCode> {
    let sample = SortedSample::from_unsorted(ingest::read_values(input)?)?;
    let est = classify_regime_with(&sample, policy, cfg)?;
    println!("{}", serde_json::to_string(&est)?);
    Ok(if est.regime == Verdict::Inconclusive {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("MEPLOT_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            let t: usize = v
                .trim()
                .parse()
                .with_context(|| format!("MEPLOT_THREADS must be a positive count, got `{v}`"))?;
            if t == 0 {
                bail!("MEPLOT_THREADS must be at least 1");
            }
            Ok(Some(t))
        }
        _ => Ok(None),
    }
}

fn cmd_experiment(config: &Path, out_dir: Option<PathBuf>) -> Result<ExitCode> {
    let spec = ExperimentSpec::load(config)?;
    let report = run_experiment_with_threads(&spec, threads_from_env()?)?;
    let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let base = stem(config)?;
    let csv_path = dir.join(format!("{base}.report.csv"));
    let json_path = dir.join(format!("{base}.report.json"));
    std::fs::write(&csv_path, report.to_csv())?;
    std::fs::write(&json_path, report.to_json() + "\n")?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    println!("{}", csv_path.display());
    println!("{}", json_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(
    model: &DistributionModel,
    n: usize,
    seed: u64,
    output: Option<PathBuf>,
    require_mean: bool,
) -> Result<ExitCode> {
    if require_mean && !model.positive_mean_exists() {
        match model {
            DistributionModel::Gpd(_) => bail!("mean does not exist for ξ ≥ 1 ({model})"),
            other => bail!("mean does not exist for {other}"),
        }
    }
    let values = draw(model, n, seed)?;
    let mut text = String::with_capacity(n * 20);
    for v in values {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    match output {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn check(name: &str, ok: bool, detail: String, failures: &mut usize) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        *failures += 1;
    }
}

fn cmd_selftest() -> Result<ExitCode> {
    let mut failures = 0;

    let mut worst = 0.0f64;
    for xi in [-0.9, -0.5, 0.0, 0.25, 0.5, 0.9] {
        let p = GpdParams::new(xi, 1.0)?;
        let d = DistributionModel::Gpd(p);
        for u in [0.0, 0.3, 1.0, 4.0] {
            if u >= p.right_endpoint() {
                continue;
            }
            let exact = me_closed_form(&p, u)?;
            let num = me_numeric(&d, u)?;
            worst = worst.max((num / exact - 1.0).abs());
        }
    }
    check("me_numeric vs closed form", worst <= 1e-8, format!("max rel err {worst:.2e}"), &mut failures);

    let pareto = DistributionModel::pareto(2.0)?;
    let hf = h_frechet(&pareto, 0.99)?;
    check("h_frechet pareto(2)", (hf - 2.0).abs() <= 1e-6, format!("{hf}"), &mut failures);
    let hw = h_weibull(&DistributionModel::uniform(), 1.0, 0.99)?;
    check("h_weibull uniform", (hw - 0.5).abs() <= 1e-8, format!("{hw}"), &mut failures);
    let hg = h_gumbel(&DistributionModel::exponential(1.0)?, 0.99, HForm::MeanExcess)?;
    check("h_gumbel exp(1)", (hg - 1.0).abs() <= 1e-8, format!("{hg}"), &mut failures);

    let r = renyi_expectation(10, 3)?;
    check("renyi n=10 k=3", r == 2.5, format!("{r}"), &mut failures);

    for n in [1usize, 10, 100, 1000] {
        let top = n as f64 + 10.0;
        let grid: Vec<f64> = (0..=10_000).map(|j| top * j as f64 / 1e4).collect();
        let (gap, bound) = hall_wellner_gap(n, &grid)?;
        check(&format!("hall-wellner n={n}"), gap <= bound, format!("{gap:.3e} <= {bound:.3e}"), &mut failures);
    }

    let gpd = DistributionModel::gpd(0.5, 1.0)?;
    let rep = karamata_oracle(|t| gpd.b(t), 0.5, &[1e2, 1e4, 1e6], &[2.0, 10.0], 0.01)?;
    check("karamata gpd(0.5) RV_1/2", rep.certified, format!("deviation {:.2e}", rep.deviation), &mut failures);

    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
