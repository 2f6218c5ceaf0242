//! The six confidence-interval constructions for the negative binomial
//! mean, plus the chi-square ratio diagnostic.
//!
//! All intervals are 1-alpha two-sided. None of them clips at zero by
//! default: normal, Bernstein, and both growth intervals may extend below
//! zero, exactly as the methods are defined. [`ConfidenceInterval::clipped`]
//! exists for presentation.

use crate::estimators::{
    growth_factor, mom_theta, se_gba, se_gbr, select_k, GrowthMode, GrowthSpec, THETA_FLOOR,
};
use crate::nb::Sample;
use crate::special::{chi_square_quantile, gamma_quantile, normal_quantile};
use crate::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Interval construction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Normal,
    Gamma,
    ChiSquare,
    Bernstein,
    Gba,
    Gbr,
}

impl Method {
    /// All methods in reporting order.
    pub const ALL: [Method; 6] = [
        Method::Normal,
        Method::Gamma,
        Method::ChiSquare,
        Method::Bernstein,
        Method::Gba,
        Method::Gbr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Normal => "normal",
            Method::Gamma => "gamma",
            Method::ChiSquare => "chisq",
            Method::Bernstein => "bernstein",
            Method::Gba => "gba",
            Method::Gbr => "gbr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Method::Normal),
            "gamma" => Ok(Method::Gamma),
            "chisq" => Ok(Method::ChiSquare),
            "bernstein" => Ok(Method::Bernstein),
            "gba" => Ok(Method::Gba),
            "gbr" => Ok(Method::Gbr),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// A two-sided confidence interval.
///
/// Symmetric methods are built from (center, half-width), which the struct
/// keeps verbatim so algebraic identities (e.g. the growth interval being
/// exactly G times the normal one) hold bit-for-bit; for quantile-based
/// methods the center and half-width are the midpoint and half-length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    lower: f64,
    upper: f64,
    center: f64,
    half_width: f64,
    method: Method,
    alpha: f64,
}

impl ConfidenceInterval {
    fn symmetric(method: Method, alpha: f64, center: f64, half_width: f64) -> Self {
        Self {
            lower: center - half_width,
            upper: center + half_width,
            center,
            half_width,
            method,
            alpha,
        }
    }

    fn from_quantiles(method: Method, alpha: f64, lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            center: 0.5 * (lower + upper),
            half_width: 0.5 * (upper - lower),
            method,
            alpha,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Interval length, upper minus lower (negative lower bounds count in
    /// full; nothing is clipped).
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Closed-interval membership.
    pub fn covers(&self, mu: f64) -> bool {
        self.lower <= mu && mu <= self.upper
    }

    /// Presentation-only variant with the lower bound clipped at zero.
    pub fn clipped(&self) -> Self {
        let mut out = *self;
        out.lower = out.lower.max(0.0);
        out
    }
}

/// Whether an interval contains the true mean.
pub fn covers(ci: &ConfidenceInterval, mu: f64) -> bool {
    ci.covers(mu)
}

/// Bounds assumed by the Bernstein interval: data in (a, b) with
/// b = multiplier times the sample maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinBounds {
    pub a: f64,
    pub b_multiplier: f64,
}

impl Default for BernsteinBounds {
    fn default() -> Self {
        Self {
            a: 0.0,
            b_multiplier: 1.0,
        }
    }
}

impl BernsteinBounds {
    pub fn new(a: f64, b_multiplier: f64) -> Result<Self> {
        if !(b_multiplier > 0.0 && b_multiplier.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bernstein multiplier must be finite and > 0, got {b_multiplier}"
            )));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter("bernstein lower bound must be finite".into()));
        }
        Ok(Self { a, b_multiplier })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// Shared construction for the normal interval and growth-by-adjustment:
/// center G*mean, half-width G times the normal half-width. Both the
/// normal interval (G = 1) and the k = 0 growth degenerations fall out of
/// the same arithmetic, so they agree bit-for-bit.
fn growth_adjusted(method: Method, s: &Sample, alpha: f64, k: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let g = growth_factor(s.n(), k)?;
    let half0 = z * se_gba(s, 0.0)?;
    Ok(ConfidenceInterval::symmetric(
        method,
        alpha,
        g * s.mean(),
        g * half0,
    ))
}

/// Normal-approximation interval: mean +/- z * s/sqrt(n).
pub fn normal_ci(s: &Sample, alpha: f64) -> Result<ConfidenceInterval> {
    growth_adjusted(Method::Normal, s, alpha, 0.0)
}

/// Gamma-approximation interval.
///
/// The sample mean estimates a Gamma(shape, rate) limit with shape
/// theta*n and rate theta*n/mu; the method-of-moments dispersion (floored
/// at 1e-5) and the sample mean are plugged in.
pub fn gamma_ci(s: &Sample, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let theta_hat = mom_theta(s, THETA_FLOOR)?;
    let shape = theta_hat * s.n() as f64;
    let rate = shape / s.mean();
    let lower = gamma_quantile(shape, rate, alpha / 2.0)?;
    let upper = gamma_quantile(shape, rate, 1.0 - alpha / 2.0)?;
    Ok(ConfidenceInterval::from_quantiles(
        Method::Gamma,
        alpha,
        lower,
        upper,
    ))
}

/// Chi-square approximation interval.
///
/// The limit is chi-square with mu degrees of freedom; the sample mean is
/// the plug-in estimate of mu. (The source method leaves the df estimate
/// implicit; the sample mean is the consistent choice and matches the
/// plug-ins used by the ratio diagnostic.)
pub fn chisq_ci(s: &Sample, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    if s.n() < 2 {
        return Err(Error::DegenerateSample(
            "chi-square interval requires at least 2 observations".into(),
        ));
    }
    if s.mean() <= 0.0 {
        return Err(Error::DegenerateSample(
            "all-zero sample: chi-square df estimate is zero".into(),
        ));
    }
    let df = s.mean();
    let lower = chi_square_quantile(df, alpha / 2.0)?;
    let upper = chi_square_quantile(df, 1.0 - alpha / 2.0)?;
    Ok(ConfidenceInterval::from_quantiles(
        Method::ChiSquare,
        alpha,
        lower,
        upper,
    ))
}

/// Ratio statistic mu/(2 n theta): near 1 marks the regime where the
/// chi-square approximation is calibrated.
pub fn ratio_statistic(mu_hat: f64, n: usize, theta_hat: f64) -> f64 {
    mu_hat / (2.0 * n as f64 * theta_hat)
}

/// Diagnostic label for the ratio statistic: above 1 the chi-square
/// interval is too wide, below 1 too narrow.
pub fn ratio_diagnosis(ratio: f64) -> &'static str {
    if ratio > 1.0 {
        "chi-square interval too wide"
    } else if ratio < 1.0 {
        "chi-square interval too narrow"
    } else {
        "chi-square interval calibrated"
    }
}

/// Half-width of the Bernstein interval for n observations with variance
/// estimate `s2`, assumed bounded in (a, b):
/// [-(2/3)(b-a)ln(alpha/2) + sqrt((4/9)(b-a)^2 ln^2(alpha/2)
///   - 8 n s^2 ln(alpha/2))] / (2n).
pub fn bernstein_half_width(n: usize, s2: f64, a: f64, b: f64, alpha: f64) -> f64 {
    let width = b - a;
    let nf = n as f64;
    let log_term = (alpha / 2.0).ln(); // negative
    (-(2.0 / 3.0) * width * log_term
        + ((4.0 / 9.0) * width * width * log_term * log_term - 8.0 * nf * s2 * log_term).sqrt())
        / (2.0 * nf)
}

/// Bernstein-inequality interval for data assumed to lie in (a, b), with
/// b taken as a multiple of the sample maximum and the sample variance
/// substituted for the true variance.
pub fn bernstein_ci(
    s: &Sample,
    alpha: f64,
    bounds: BernsteinBounds,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let s2 = s.variance()?;
    let b = bounds.b_multiplier * s.max() as f64;
    if b <= bounds.a || b.is_nan() {
        return Err(Error::DegenerateSample(format!(
            "bernstein bounds are degenerate: b = {b} must exceed a = {}",
            bounds.a
        )));
    }
    let half = bernstein_half_width(s.n(), s2, bounds.a, b, alpha);
    Ok(ConfidenceInterval::symmetric(
        Method::Bernstein,
        alpha,
        s.mean(),
        half,
    ))
}

/// Growth-by-adjustment interval: G*mean +/- z*G*s/sqrt(n).
///
/// When k is not given it defaults to `select_k` at the method-of-moments
/// dispersion, keeping the fractional part.
pub fn gba_ci(s: &Sample, alpha: f64, k: Option<f64>) -> Result<ConfidenceInterval> {
    let k = match k {
        Some(k) => k,
        None => select_k(mom_theta(s, THETA_FLOOR)?, s.n()),
    };
    growth_adjusted(Method::Gba, s, alpha, k)
}

/// Growth-by-removal interval: G*mean +/- z*se_gbr.
///
/// When k is not given it defaults to floor(select_k) capped at the
/// sample's zero count, so a sample without zeros degenerates to the
/// normal interval.
pub fn gbr_ci(s: &Sample, alpha: f64, k: Option<usize>) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let k = match k {
        Some(k) => k,
        None => {
            let raw = select_k(mom_theta(s, THETA_FLOOR)?, s.n()).floor() as usize;
            raw.min(s.zero_count())
        }
    };
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let g = growth_factor(s.n(), k as f64)?;
    let se = se_gbr(s, k)?;
    Ok(ConfidenceInterval::symmetric(
        Method::Gbr,
        alpha,
        g * s.mean(),
        z * se,
    ))
}

/// Dispatch on a validated [`GrowthSpec`].
pub fn growth_ci(s: &Sample, alpha: f64, spec: &GrowthSpec) -> Result<ConfidenceInterval> {
    spec.validate_for(s)?;
    match spec.mode() {
        GrowthMode::Adjustment => gba_ci(s, alpha, Some(spec.k())),
        GrowthMode::Removal => gbr_ci(s, alpha, Some(spec.k() as usize)),
    }
}
