//! Point estimators and standard errors: sample moments, method-of-moments
//! dispersion, the growth factor/estimate, both growth standard errors, and
//! the default rule for how many zeros to discount.

use crate::nb::Sample;
use crate::{Error, Result};

/// Default truncation floor for the method-of-moments dispersion estimate.
pub const THETA_FLOOR: f64 = 1e-5;

/// How a growth correction is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthMode {
    /// Re-weight the mean by the growth factor (fractional k allowed).
    Adjustment,
    /// Physically remove k zeros (k must be an integer).
    Removal,
}

/// A validated growth correction: the number of zeros to discount and the
/// mode it is applied in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSpec {
    mode: GrowthMode,
    k: f64,
}

impl GrowthSpec {
    pub fn new(mode: GrowthMode, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k must be finite and >= 0, got {k}"
            )));
        }
        if mode == GrowthMode::Removal && k.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "removal requires an integer k, got {k}"
            )));
        }
        Ok(Self { mode, k })
    }

    pub fn mode(&self) -> GrowthMode {
        self.mode
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Checks the spec against a concrete sample: k < n always, and
    /// removal additionally requires k to not exceed the zero count.
    pub fn validate_for(&self, s: &Sample) -> Result<()> {
        if self.k >= s.n() as f64 {
            return Err(Error::InvalidParameter(format!(
                "k = {} must be smaller than the sample size {}",
                self.k,
                s.n()
            )));
        }
        if self.mode == GrowthMode::Removal && self.k > s.zero_count() as f64 {
            return Err(Error::InvalidParameter(format!(
                "cannot remove {} zeros from a sample containing {}",
                self.k,
                s.zero_count()
            )));
        }
        Ok(())
    }
}

/// Arithmetic mean of the sample.
pub fn sample_mean(s: &Sample) -> f64 {
    s.mean()
}

/// Unbiased sample variance; requires n >= 2.
pub fn sample_variance(s: &Sample) -> Result<f64> {
    s.variance()
}

/// Method-of-moments dispersion estimate, truncated below at `floor`.
///
/// The raw estimate is mean/((s^2/mean) - 1); underdispersed samples
/// (s^2 <= mean) produce a nonpositive or unbounded value and are mapped
/// to the floor. An all-zero sample has no identifiable dispersion.
pub fn mom_theta(s: &Sample, floor: f64) -> Result<f64> {
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "floor must be finite and > 0, got {floor}"
        )));
    }
    let xbar = s.mean();
    if xbar == 0.0 {
        return Err(Error::DegenerateSample(
            "all-zero sample: dispersion is unidentifiable".into(),
        ));
    }
    let s2 = s.variance()?;
    let ratio = s2 / xbar;
    if ratio <= 1.0 {
        return Ok(floor);
    }
    Ok((xbar / (ratio - 1.0)).max(floor))
}

/// Growth factor G = n/(n-k) for 0 <= k < n.
pub fn growth_factor(n: usize, k: f64) -> Result<f64> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "k must be finite and >= 0, got {k}"
        )));
    }
    let nf = n as f64;
    if k >= nf {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than the sample size {n}"
        )));
    }
    Ok(nf / (nf - k))
}

/// Growth estimate G * mean; equals (sum of values)/(n-k).
pub fn growth_estimate(s: &Sample, k: f64) -> Result<f64> {
    Ok(growth_factor(s.n(), k)? * s.mean())
}

/// Standard error shared by the normal interval and both growth methods at
/// k = 0: sqrt(s^2/n) computed along a single expression tree so the k = 0
/// degenerations are bit-identical.
fn se_base(s: &Sample) -> Result<f64> {
    Ok((s.variance()? / s.n() as f64).sqrt())
}

/// Growth-by-adjustment standard error: G times the full-sample standard
/// error of the mean.
pub fn se_gba(s: &Sample, k: f64) -> Result<f64> {
    Ok(growth_factor(s.n(), k)? * se_base(s)?)
}

/// Growth-by-removal standard error.
///
/// With the sample sorted in decreasing order and the last k entries (all
/// zeros, by the k <= zero-count precondition) dropped, this is
/// sqrt(sum_i (X_i - G*mean)^2 / ((n-k-1)(n-k))). The trimmed sum is
/// computed as the full-sample sum of squared deviations about G*mean
/// minus the k dropped zeros' contribution k*(G*mean)^2, which is exactly
/// the same quantity.
pub fn se_gbr(s: &Sample, k: usize) -> Result<f64> {
    let n = s.n();
    if k > s.zero_count() {
        return Err(Error::InvalidParameter(format!(
            "cannot remove {k} zeros from a sample containing {}",
            s.zero_count()
        )));
    }
    if n - k < 2 {
        return Err(Error::DegenerateSample(format!(
            "removal leaves {} value(s); at least 2 are required",
            n - k
        )));
    }
    let m = growth_factor(n, k as f64)? * s.mean();
    let mut dev = 0.0;
    for &v in s.values() {
        let d = v as f64 - m;
        dev += d * d;
    }
    dev -= k as f64 * (m * m);
    // rounding can push an exact zero slightly negative
    dev = dev.max(0.0);
    let nk = (n - k) as f64;
    Ok(((dev / (nk - 1.0)) / nk).sqrt())
}

/// Default number of zeros to discount: min(15, n/10) under high
/// dispersion (theta_hat <= 0.5), min(5, n/10) otherwise. n/10 is kept as
/// an exact real so fractional k reaches the adjustment method; removal
/// callers floor it and cap at the sample's zero count.
pub fn select_k(theta_hat: f64, n: usize) -> f64 {
    let tenth = n as f64 / 10.0;
    if theta_hat <= 0.5 {
        tenth.min(15.0)
    } else {
        tenth.min(5.0)
    }
}
