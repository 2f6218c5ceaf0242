//! Negative binomial model in the mean/dispersion parameterization.
//!
//! `NB(mu, theta)` has mean `mu` and variance `mu + mu^2/theta`; small
//! `theta` means heavy dispersion. Sampling goes through the gamma-Poisson
//! mixture (lambda ~ Gamma(shape theta, scale mu/theta), X ~ Poisson(lambda)),
//! which is valid for real-valued `theta` where a geometric composition
//! would not be.

use crate::rng::open01;
use crate::special::log_gamma;
use crate::{Error, Result};
use rand_core::RngCore;

/// Mean/dispersion parameters of a negative binomial distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NBParams {
    mu: f64,
    theta: f64,
}

impl NBParams {
    /// Both parameters must be strictly positive and finite.
    pub fn new(mu: f64, theta: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and > 0, got {mu}"
            )));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be finite and > 0, got {theta}"
            )));
        }
        Ok(Self { mu, theta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// An immutable sample of non-negative integer counts with cached
/// summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<u64>,
    mean: f64,
    /// Sum of squared deviations about the mean, accumulated in element
    /// order. The unbiased variance is `sum_sq_dev / (n - 1)`.
    sum_sq_dev: f64,
    zero_count: usize,
}

impl Sample {
    /// Wraps a nonempty vector of counts.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("sample must be nonempty".into()));
        }
        let n = values.len() as f64;
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let mean = sum as f64 / n;
        let mut sum_sq_dev = 0.0;
        let mut zero_count = 0usize;
        for &v in &values {
            if v == 0 {
                zero_count += 1;
            }
            let d = v as f64 - mean;
            sum_sq_dev += d * d;
        }
        Ok(Self {
            values,
            mean,
            sum_sq_dev,
            zero_count,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; requires n >= 2.
    pub fn variance(&self) -> Result<f64> {
        if self.values.len() < 2 {
            return Err(Error::DegenerateSample(
                "variance requires at least 2 observations".into(),
            ));
        }
        Ok(self.sum_sq_dev / (self.values.len() as f64 - 1.0))
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    pub fn max(&self) -> u64 {
        *self.values.iter().max().expect("sample is nonempty")
    }
}

/// Log of the probability mass at x, evaluated through log-gamma
/// differences so it stays finite far into the tail.
pub fn log_pmf(params: NBParams, x: u64) -> f64 {
    let mu = params.mu();
    let theta = params.theta();
    let xf = x as f64;
    log_gamma(theta + xf) - log_gamma(theta) - log_gamma(xf + 1.0)
        + xf * (mu.ln() - (mu + theta).ln())
        + theta * (theta.ln() - (mu + theta).ln())
}

/// Probability mass at x.
pub fn pmf(params: NBParams, x: u64) -> f64 {
    log_pmf(params, x).exp()
}

/// Mean and variance (mu, mu + mu^2/theta).
pub fn moments(params: NBParams) -> (f64, f64) {
    let mu = params.mu();
    (mu, mu + mu * mu / params.theta())
}

/// P(X = 0) = (1 + mu/theta)^(-theta), via ln_1p so the Poisson limit
/// theta -> infinity stays accurate.
pub fn zero_probability(params: NBParams) -> f64 {
    (-params.theta() * (params.mu() / params.theta()).ln_1p()).exp()
}

/// Draws n i.i.d. values through the gamma-Poisson mixture.
///
/// The output is a pure function of (params, n, rng state): the same seeded
/// stream yields bit-identical samples.
pub fn sample<R: RngCore>(params: NBParams, n: usize, rng: &mut R) -> Sample {
    assert!(n >= 1, "sample size must be at least 1");
    let scale = params.mu() / params.theta();
    let values = (0..n)
        .map(|_| {
            let lambda = gamma_draw(rng, params.theta()) * scale;
            poisson_draw(rng, lambda)
        })
        .collect();
    Sample::new(values).expect("n >= 1")
}

/// Standard normal draw via the Marsaglia polar method.
fn normal_draw<R: RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = 2.0 * open01(rng) - 1.0;
        let v = 2.0 * open01(rng) - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Unit-scale Gamma(shape) draw.
///
/// Marsaglia-Tsang squeeze/rejection for shape >= 1; for shape < 1 the
/// boost identity G(a) = G(a+1) * U^(1/a) is applied in log space, which
/// keeps tiny shapes (theta = 0.025 gives U^40) from underflowing
/// prematurely.
fn gamma_draw<R: RngCore>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        let boosted = gamma_draw_shape_ge1(rng, shape + 1.0);
        let u = open01(rng);
        return (boosted.ln() + u.ln() / shape).exp();
    }
    gamma_draw_shape_ge1(rng, shape)
}

fn gamma_draw_shape_ge1<R: RngCore>(rng: &mut R, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = normal_draw(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open01(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// The inversion/rejection crossover for Poisson sampling; inversion is
/// exact but O(lambda), rejection is O(1) and accurate for large rates.
const POISSON_INVERSION_CUTOFF: f64 = 30.0;

/// Poisson draw: sequential inversion below the cutoff, Atkinson's PA
/// rejection method above it.
fn poisson_draw<R: RngCore>(rng: &mut R, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        // gamma underflow maps here; Poisson(0) is identically 0
        return 0;
    }
    if lambda < POISSON_INVERSION_CUTOFF {
        let u = open01(rng);
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cum = p;
        // cum approaches 1; the cap only guards float saturation
        while u > cum && k < 1_000 {
            k += 1;
            p *= lambda / k as f64;
            cum += p;
        }
        return k;
    }
    // Atkinson PA
    let c = 0.767 - 3.36 / lambda;
    let beta = std::f64::consts::PI / (3.0 * lambda).sqrt();
    let alpha = beta * lambda;
    let k = c.ln() - lambda - beta.ln();
    let log_lambda = lambda.ln();
    loop {
        let u = open01(rng);
        let x = (alpha - ((1.0 - u) / u).ln()) / beta;
        let n = (x + 0.5).floor();
        if n < 0.0 {
            continue;
        }
        let v = open01(rng);
        let y = alpha - beta * x;
        let t = 1.0 + y.exp();
        let lhs = y + (v / (t * t)).ln();
        let rhs = k + n * log_lambda - log_gamma(n + 1.0);
        if lhs <= rhs {
            return n as u64;
        }
    }
}
