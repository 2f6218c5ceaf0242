//! `nbci`: confidence intervals for the negative binomial mean, plus the
//! Monte Carlo coverage/length harness and SVG reporting.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nbci::estimators::{mom_theta, select_k, THETA_FLOOR};
use nbci::intervals::{
    bernstein_ci, chisq_ci, gamma_ci, gba_ci, gbr_ci, normal_ci, ratio_diagnosis,
    ratio_statistic, BernsteinBounds, ConfidenceInterval, Method,
};
use nbci::nb::Sample;
use nbci::report::{
    coverage_vs_n, length_ratio_box, parse_csv, read_counts_file, rows_from_result, ResultRow,
};
use nbci::simulation::{run_experiment, ExperimentSpec, KPolicy};
use nbci::Error;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nbci",
    version,
    about = "Confidence intervals for the mean of negative binomial count data",
    long_about = "Computes normal, gamma, chi-square, Bernstein, growth-by-adjustment (GBA) and \
                  growth-by-removal (GBR) confidence intervals for the mean of overdispersed \
                  count data, and reproduces coverage/length simulation experiments."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute confidence intervals for counts read from a file
    Ci(CiArgs),
    /// Run simulation cells and write per-method results to a CSV
    Simulate(SimulateArgs),
    /// Render an SVG figure from a results CSV
    Plot(PlotArgs),
}

#[derive(Args)]
struct CiArgs {
    /// Input file with one non-negative integer count per line (blank
    /// lines are ignored)
    #[arg(long)]
    input: PathBuf,
    /// Interval method to compute, or `all`
    #[arg(long, default_value = "all", value_parser = parse_method_selector)]
    method: MethodSelector,
    /// Two-sided miscoverage level of the interval
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Zeros to discount in the growth methods (real-valued for GBA,
    /// floored for GBR); defaults to the dispersion-based selection rule
    #[arg(long)]
    k: Option<f64>,
    /// Bernstein upper bound as a multiple of the sample maximum
    #[arg(long, default_value_t = 1.0)]
    bernstein_multiplier: f64,
    /// Clip lower interval bounds at zero for presentation
    #[arg(long)]
    clip: bool,
}

#[derive(Clone, Copy, Debug)]
enum MethodSelector {
    All,
    One(Method),
}

fn parse_method_selector(s: &str) -> Result<MethodSelector, String> {
    if s == "all" {
        return Ok(MethodSelector::All);
    }
    s.parse::<Method>()
        .map(MethodSelector::One)
        .map_err(|e| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    /// Mean values, comma separated (default: 2,5,10)
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    /// Dispersion values, comma separated (default: 0.025,0.05,0.075,0.1,0.2,...,1)
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Sample sizes, comma separated (default: 5,10,...,250,300,400,...,1000)
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Two-sided miscoverage level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Monte Carlo trials per cell
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; every cell derives its own stream from it
    #[arg(long, default_value_t = 1729)]
    seed: u64,
    /// default | misspecified | aggressive | fixed:K
    #[arg(long, default_value = "default")]
    k_policy: KPolicy,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    /// Coverage probability against sample size, one curve per method
    CoverageVsN,
    /// Box summary of per-cell interval-length ratios per method
    LengthRatioBox,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV produced by `nbci simulate`
    #[arg(long)]
    input: PathBuf,
    /// Figure to draw
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Keep only rows with this mean
    #[arg(long)]
    mu: Option<f64>,
    /// Keep only rows with this dispersion
    #[arg(long)]
    theta: Option<f64>,
    /// Keep only rows with this k policy
    #[arg(long)]
    k_policy: Option<KPolicy>,
    /// Keep only rows with this method
    #[arg(long)]
    method: Option<Method>,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ci(args) => cmd_ci(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Plot(args) => cmd_plot(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn cmd_ci(args: CiArgs) -> nbci::Result<()> {
    let sample = read_counts_file(&args.input)?;
    if sample.n() < 2 {
        return Err(Error::DegenerateSample(format!(
            "n = {}: at least 2 observations are required",
            sample.n()
        )));
    }
    if sample.mean() == 0.0 {
        return Err(Error::DegenerateSample(
            "all-zero data: the dispersion and every non-normal interval are undefined".into(),
        ));
    }
    if let Some(k) = args.k {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k must be finite and >= 0, got {k}"
            )));
        }
    }

    let theta_hat = mom_theta(&sample, THETA_FLOOR)?;
    let k_gba = args.k.unwrap_or_else(|| select_k(theta_hat, sample.n()));
    let k_gbr = (k_gba.floor() as usize).min(sample.zero_count());
    let bounds = BernsteinBounds::new(0.0, args.bernstein_multiplier)?;

    println!(
        "n = {}  mean = {}  variance = {}  zeros = {}",
        sample.n(),
        sample.mean(),
        sample.variance()?,
        sample.zero_count()
    );
    println!("theta_hat = {theta_hat} (method of moments, floor {THETA_FLOOR:e})");
    let ratio = ratio_statistic(sample.mean(), sample.n(), theta_hat);
    println!("ratio statistic = {ratio:.4} ({})", ratio_diagnosis(ratio));
    println!("k = {k_gba} (gba), {k_gbr} (gbr)");
    println!();
    println!(
        "{:<10} {:>14} {:>14} {:>14} {:>14}",
        "method", "lower", "upper", "center", "half_width"
    );

    let methods: Vec<Method> = match args.method {
        MethodSelector::All => Method::ALL.to_vec(),
        MethodSelector::One(m) => vec![m],
    };
    let single = methods.len() == 1;
    for method in methods {
        let ci = compute_ci(&sample, method, args.alpha, k_gba, k_gbr, bounds);
        match ci {
            Ok(ci) => {
                let ci = if args.clip { ci.clipped() } else { ci };
                println!(
                    "{:<10} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
                    method.name(),
                    ci.lower(),
                    ci.upper(),
                    ci.center(),
                    ci.half_width()
                );
            }
            Err(e) if single => return Err(e),
            Err(e) => println!("{:<10} unavailable: {e}", method.name()),
        }
    }
    Ok(())
}

fn compute_ci(
    sample: &Sample,
    method: Method,
    alpha: f64,
    k_gba: f64,
    k_gbr: usize,
    bounds: BernsteinBounds,
) -> nbci::Result<ConfidenceInterval> {
    match method {
        Method::Normal => normal_ci(sample, alpha),
        Method::Gamma => gamma_ci(sample, alpha),
        Method::ChiSquare => chisq_ci(sample, alpha),
        Method::Bernstein => bernstein_ci(sample, alpha, bounds),
        Method::Gba => gba_ci(sample, alpha, Some(k_gba)),
        Method::Gbr => gbr_ci(sample, alpha, Some(k_gbr)),
    }
}

/// Simulation grid defaults: mu {2,5,10}, theta {0.025,0.05,0.075,0.1,
/// 0.2,...,1}, n {5,10,...,250} U {300,400,...,1000}.
fn default_mu() -> Vec<f64> {
    vec![2.0, 5.0, 10.0]
}

fn default_theta() -> Vec<f64> {
    let mut t = vec![0.025, 0.05, 0.075];
    for i in 1..=10 {
        t.push(i as f64 / 10.0);
    }
    t
}

fn default_n() -> Vec<usize> {
    let mut n: Vec<usize> = (1..=50).map(|i| 5 * i).collect();
    n.extend((3..=10).map(|i| 100 * i));
    n
}

fn cmd_simulate(args: SimulateArgs) -> nbci::Result<()> {
    let mus = if args.mu.is_empty() { default_mu() } else { args.mu.clone() };
    let thetas = if args.theta.is_empty() { default_theta() } else { args.theta.clone() };
    let ns = if args.n.is_empty() { default_n() } else { args.n.clone() };

    let mut grid = Vec::new();
    for &mu in &mus {
        for &theta in &thetas {
            for &n in &ns {
                grid.push(ExperimentSpec {
                    mu,
                    theta,
                    n,
                    alpha: args.alpha,
                    trials: args.trials as usize,
                    master_seed: args.seed,
                    k_policy: args.k_policy,
                });
            }
        }
    }
    for spec in &grid {
        spec.validate()?;
    }

    let mut rows: Vec<ResultRow> = Vec::with_capacity(grid.len() * 6);
    let total = grid.len();
    for (i, spec) in grid.iter().enumerate() {
        let result = run_experiment(spec)?;
        for m in &result.methods {
            if m.unavailable() {
                eprintln!(
                    "warning: method {} unavailable at (mu={}, theta={}, n={}): {}/{} trials failed",
                    m.method, spec.mu, spec.theta, spec.n, m.errored, m.trials
                );
            }
        }
        rows.extend(rows_from_result(&result));
        eprintln!(
            "cell {}/{total} done (mu={}, theta={}, n={})",
            i + 1,
            spec.mu,
            spec.theta,
            spec.n
        );
    }

    let mut file = std::fs::File::create(&args.out)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", args.out.display())))?;
    nbci::report::write_csv(&mut file, &rows)?;
    file.flush()?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> nbci::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.input.display())))?;
    let mut rows = parse_csv(&text)?;
    if let Some(mu) = args.mu {
        rows.retain(|r| r.mu == mu);
    }
    if let Some(theta) = args.theta {
        rows.retain(|r| r.theta == theta);
    }
    if let Some(policy) = args.k_policy {
        rows.retain(|r| r.k_policy == policy);
    }
    if let Some(method) = args.method {
        rows.retain(|r| r.method == method);
    }
    if rows.is_empty() {
        return Err(Error::Parse(
            "no rows left after filtering; relax --mu/--theta/--k-policy/--method".into(),
        ));
    }
    let svg = match args.kind {
        PlotKind::CoverageVsN => coverage_vs_n(&rows)?,
        PlotKind::LengthRatioBox => length_ratio_box(&rows)?,
    };
    std::fs::write(&args.out, svg)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", args.out.display())))?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
