//! Deterministic, parallel Monte Carlo engine for coverage and
//! interval-length experiments.
//!
//! Each (mu, theta, n, k-policy) cell derives its own seed from the master
//! seed, and each trial within a cell derives an independent ChaCha8
//! substream from the cell seed, so results are bit-identical regardless
//! of worker count and any cell can be re-run in isolation.

use crate::intervals::{
    bernstein_ci, chisq_ci, gamma_ci, gba_ci, gbr_ci, normal_ci, BernsteinBounds, Method,
};
use crate::estimators::{mom_theta, select_k, THETA_FLOOR};
use crate::nb::{sample, NBParams, Sample};
use crate::rng::{derive_seed, stream};
use crate::{Error, Result};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Rule for choosing how many zeros to discount in the growth methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KPolicy {
    /// min(15, n/10) under high estimated dispersion, min(5, n/10)
    /// otherwise.
    Default,
    /// min(15, n/5): deliberately overzealous removal for studying
    /// coverage loss at low dispersion.
    Misspecified,
    /// min(50, n/2): heavy removal for the extreme-dispersion regime.
    Aggressive,
    /// A fixed k for every trial.
    Fixed(f64),
}

impl KPolicy {
    /// Resolve the (real-valued) k for a concrete sample. The default
    /// policy needs the method-of-moments dispersion, which does not exist
    /// for an all-zero sample.
    pub fn k_for(&self, s: &Sample) -> Result<f64> {
        let n = s.n() as f64;
        match self {
            KPolicy::Default => Ok(select_k(mom_theta(s, THETA_FLOOR)?, s.n())),
            KPolicy::Misspecified => Ok((n / 5.0).min(15.0)),
            KPolicy::Aggressive => Ok((n / 2.0).min(50.0)),
            KPolicy::Fixed(k) => Ok(*k),
        }
    }

    /// Words mixed into the cell seed so different policies give
    /// independent cells.
    fn seed_words(&self) -> [u64; 2] {
        match self {
            KPolicy::Default => [0, 0],
            KPolicy::Misspecified => [1, 0],
            KPolicy::Aggressive => [2, 0],
            KPolicy::Fixed(k) => [3, k.to_bits()],
        }
    }
}

impl fmt::Display for KPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KPolicy::Default => f.write_str("default"),
            KPolicy::Misspecified => f.write_str("misspecified"),
            KPolicy::Aggressive => f.write_str("aggressive"),
            KPolicy::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for KPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(KPolicy::Default),
            "misspecified" => Ok(KPolicy::Misspecified),
            "aggressive" => Ok(KPolicy::Aggressive),
            other => {
                if let Some(v) = other.strip_prefix("fixed:") {
                    let k: f64 = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad fixed k '{v}'")))?;
                    if !(k >= 0.0 && k.is_finite()) {
                        return Err(Error::Parse(format!(
                            "fixed k must be finite and >= 0, got {k}"
                        )));
                    }
                    Ok(KPolicy::Fixed(k))
                } else {
                    Err(Error::Parse(format!(
                        "unknown k-policy '{other}' (expected default, misspecified, aggressive, or fixed:K)"
                    )))
                }
            }
        }
    }
}

/// One simulation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub mu: f64,
    pub theta: f64,
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub k_policy: KPolicy,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        NBParams::new(self.mu, self.theta)?;
        if self.n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if let KPolicy::Fixed(k) = self.k_policy {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "fixed k must be finite and >= 0, got {k}"
                )));
            }
        }
        Ok(())
    }

    /// Cell seed: hash(master, mu, theta, n, k_policy).
    pub fn cell_seed(&self) -> u64 {
        let pw = self.k_policy.seed_words();
        derive_seed(
            self.master_seed,
            &[
                self.mu.to_bits(),
                self.theta.to_bits(),
                self.n as u64,
                pw[0],
                pw[1],
            ],
        )
    }
}

/// Per-method tallies for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub method: Method,
    /// Trials attempted (the cell's trial count).
    pub trials: usize,
    /// Trials where this method failed (degenerate sample etc.); excluded
    /// from the coverage denominator.
    pub errored: usize,
    /// Covering trials among the successful ones.
    pub covered: usize,
    pub coverage: f64,
    pub median_length: f64,
    pub sd_length: f64,
    /// Median length relative to the normal method's median (1 for the
    /// normal method itself; 0 when undefined).
    pub length_ratio: f64,
    /// Length SD relative to the normal method's.
    pub sd_ratio: f64,
}

impl MethodStats {
    pub fn successes(&self) -> usize {
        self.trials - self.errored
    }

    /// A method that failed in more than half the trials is reported as
    /// unavailable for the cell.
    pub fn unavailable(&self) -> bool {
        2 * self.errored > self.trials
    }
}

/// Result of one cell: stats for each method in [`Method::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub methods: Vec<MethodStats>,
}

impl ExperimentResult {
    pub fn stats(&self, method: Method) -> &MethodStats {
        self.methods
            .iter()
            .find(|m| m.method == method)
            .expect("all methods are present")
    }

    pub fn coverage(&self, method: Method) -> f64 {
        self.stats(method).coverage
    }
}

type TrialOutcome = [Option<(bool, f64)>; 6];

fn run_trial(params: NBParams, spec: &ExperimentSpec, t: u64, cell_seed: u64) -> TrialOutcome {
    let mut rng = stream(derive_seed(cell_seed, &[t]));
    let s = sample(params, spec.n, &mut rng);
    let alpha = spec.alpha;
    let mu = spec.mu;
    let k_real = spec.k_policy.k_for(&s).ok();

    let mut out: TrialOutcome = [None; 6];
    for (i, method) in Method::ALL.iter().enumerate() {
        let ci = match method {
            Method::Normal => normal_ci(&s, alpha),
            Method::Gamma => gamma_ci(&s, alpha),
            Method::ChiSquare => chisq_ci(&s, alpha),
            Method::Bernstein => bernstein_ci(&s, alpha, BernsteinBounds::default()),
            Method::Gba => match k_real {
                Some(k) => gba_ci(&s, alpha, Some(k)),
                None => Err(Error::DegenerateSample("k policy undefined".into())),
            },
            Method::Gbr => match k_real {
                Some(k) => {
                    let k_int = (k.floor() as usize).min(s.zero_count());
                    gbr_ci(&s, alpha, Some(k_int))
                }
                None => Err(Error::DegenerateSample("k policy undefined".into())),
            },
        };
        out[i] = ci.ok().map(|ci| (ci.covers(mu), ci.length()));
    }
    out
}

/// Run one cell: draw `trials` samples, build all six intervals on each
/// (counting per-method failures), and tally coverage and lengths.
/// Deterministic given the spec, independent of thread count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let params = NBParams::new(spec.mu, spec.theta)?;
    let cell_seed = spec.cell_seed();

    let outcomes: Vec<TrialOutcome> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(params, spec, t, cell_seed))
        .collect();

    // reduce in trial order so the aggregation is order-independent of the
    // worker schedule
    let mut methods = Vec::with_capacity(6);
    let mut normal_median = 0.0;
    let mut normal_sd = 0.0;
    for (i, &method) in Method::ALL.iter().enumerate() {
        let mut covered = 0usize;
        let mut lengths: Vec<f64> = Vec::with_capacity(spec.trials);
        for outcome in &outcomes {
            if let Some((covers, length)) = outcome[i] {
                if covers {
                    covered += 1;
                }
                lengths.push(length);
            }
        }
        let errored = spec.trials - lengths.len();
        let coverage = if lengths.is_empty() {
            0.0
        } else {
            covered as f64 / lengths.len() as f64
        };
        let median_length = median(&mut lengths);
        let sd_length = sample_sd(&lengths);
        if method == Method::Normal {
            normal_median = median_length;
            normal_sd = sd_length;
        }
        let (length_ratio, sd_ratio) = if method == Method::Normal {
            (1.0, 1.0)
        } else {
            (
                if normal_median > 0.0 {
                    median_length / normal_median
                } else {
                    0.0
                },
                if normal_sd > 0.0 {
                    sd_length / normal_sd
                } else {
                    0.0
                },
            )
        };
        methods.push(MethodStats {
            method,
            trials: spec.trials,
            errored,
            covered,
            coverage,
            median_length,
            sd_length,
            length_ratio,
            sd_ratio,
        });
    }

    Ok(ExperimentResult {
        spec: *spec,
        methods,
    })
}

/// Run every cell of a grid, in grid order. Per-cell seeds make the
/// outcome independent of the ordering or partitioning of the grid.
pub fn run_grid(grid: &[ExperimentSpec]) -> Result<Vec<ExperimentResult>> {
    grid.iter().map(run_experiment).collect()
}

/// Distribution summary of the per-cell length ratios for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSummary {
    pub method: Method,
    /// Quartiles (q1, median, q3) of the per-cell median-length ratios.
    pub median_ratio_quartiles: (f64, f64, f64),
    /// Quartiles of the per-cell length-SD ratios.
    pub sd_ratio_quartiles: (f64, f64, f64),
    /// Cells contributing (unavailable methods and undefined ratios are
    /// excluded).
    pub cells: usize,
}

/// Summarize per-cell length ratios across many cells.
pub fn summarize_lengths(results: &[ExperimentResult]) -> Vec<LengthSummary> {
    Method::ALL
        .iter()
        .map(|&method| {
            let mut med_ratios: Vec<f64> = Vec::new();
            let mut sd_ratios: Vec<f64> = Vec::new();
            for r in results {
                let stats = r.stats(method);
                if stats.unavailable() || stats.length_ratio <= 0.0 {
                    continue;
                }
                med_ratios.push(stats.length_ratio);
                sd_ratios.push(stats.sd_ratio);
            }
            med_ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
            sd_ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
            LengthSummary {
                method,
                median_ratio_quartiles: quartiles(&med_ratios),
                sd_ratio_quartiles: quartiles(&sd_ratios),
                cells: med_ratios.len(),
            }
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("lengths are finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ssq: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ssq / (n - 1.0)).sqrt()
}

/// Linear-interpolation quartiles of sorted data.
fn quartiles(sorted: &[f64]) -> (f64, f64, f64) {
    (
        quantile(sorted, 0.25),
        quantile(sorted, 0.5),
        quantile(sorted, 0.75),
    )
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let idx = pos.floor() as usize;
            let frac = pos - idx as f64;
            if idx + 1 < n {
                sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac
            } else {
                sorted[n - 1]
            }
        }
    }
}
