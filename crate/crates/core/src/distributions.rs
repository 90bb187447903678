//! Univariate continuous laws with density, distribution function, inverse
//! distribution function and seeded sampling.
//!
//! | Law | Support | CDF |
//! |-----|---------|-----|
//! | [`ContinuousDistribution::Gaussian`] | ℝ | Φ((x−μ)/σ) |
//! | [`ContinuousDistribution::UniformInterval`] | [lo, hi] | (x−lo)/(hi−lo) |
//! | [`ContinuousDistribution::SdReference`] | [0, ½] | 1 − √(1−2z) |
//!
//! `SdReference` is the law of the simplicial depth of a point drawn from its
//! own distribution; twice such a variable is Beta(1, ½).
//!
//! # Sampling
//!
//! Draws use ChaCha20 ([`rand_chacha::ChaCha20Rng`]) seeded through
//! `SeedableRng::seed_from_u64`. Each draw takes the top 53 bits `k` of one
//! `next_u64()` output, forms the open-interval uniform `(k + 0.5) · 2⁻⁵³` and
//! maps it through the quantile function. The stream is stable across
//! platforms, so `(law, n, seed)` reproduces bit-exactly.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance, in x, of the bisection used for quantiles.
pub const QUANTILE_TOL: f64 = 1e-12;

/// A user-supplied law. Implementations must be internally consistent:
/// `cdf` nondecreasing, `pdf` its derivative, `quantile` its inverse on `[0, 1]`
/// (returning the support endpoints at 0 and 1).
pub trait CustomLaw: Send + Sync + fmt::Debug {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, u: f64) -> f64;
    fn support(&self) -> (f64, f64);
}

/// A univariate continuous distribution.
///
/// The parametric variants serialize as tagged JSON objects:
/// `{"kind":"gaussian","mu":0.0,"sigma":1.0}`, `{"kind":"uniform","lo":0.0,"hi":0.5}`
/// and `{"kind":"sd_reference"}`. `Affine` and `Custom` are in-process only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousDistribution {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    #[serde(rename = "uniform")]
    UniformInterval {
        lo: f64,
        hi: f64,
    },
    SdReference,
    /// Law of `scale · X + shift` for `X` drawn from `base`; `scale != 0`.
    #[serde(skip)]
    Affine {
        base: Box<ContinuousDistribution>,
        scale: f64,
        shift: f64,
    },
    #[serde(skip)]
    Custom(Arc<dyn CustomLaw>),
}

/// Structural equality; custom laws compare by identity.
impl PartialEq for ContinuousDistribution {
    fn eq(&self, other: &Self) -> bool {
        use ContinuousDistribution::*;
        match (self, other) {
            (Gaussian { mu: a, sigma: b }, Gaussian { mu: c, sigma: d }) => a == c && b == d,
            (UniformInterval { lo: a, hi: b }, UniformInterval { lo: c, hi: d }) => a == c && b == d,
            (SdReference, SdReference) => true,
            (
                Affine { base: a, scale: b, shift: c },
                Affine { base: d, scale: e, shift: f },
            ) => a == d && b == e && c == f,
            (Custom(a), Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl ContinuousDistribution {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        let d = ContinuousDistribution::Gaussian { mu, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = ContinuousDistribution::UniformInterval { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn sd_reference() -> Self {
        ContinuousDistribution::SdReference
    }

    pub fn custom(law: Arc<dyn CustomLaw>) -> Self {
        ContinuousDistribution::Custom(law)
    }

    /// Parse a JSON descriptor and check its parameters.
    pub fn from_json(text: &str) -> Result<Self> {
        let d: ContinuousDistribution = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ContinuousDistribution::Gaussian { mu, sigma } => {
                if !mu.is_finite() || !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian requires finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
                    )));
                }
            }
            ContinuousDistribution::UniformInterval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::InvalidParameter(format!(
                        "uniform requires finite lo < hi, got lo={lo}, hi={hi}"
                    )));
                }
            }
            ContinuousDistribution::Affine { base, scale, shift } => {
                if !scale.is_finite() || *scale == 0.0 || !shift.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "affine map requires finite nonzero scale, got scale={scale}, shift={shift}"
                    )));
                }
                base.validate()?;
            }
            ContinuousDistribution::SdReference | ContinuousDistribution::Custom(_) => {}
        }
        Ok(())
    }

    /// Law of `scale · X + shift`. Gaussian and uniform laws stay in closed form.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        let d = match self {
            ContinuousDistribution::Gaussian { mu, sigma } => ContinuousDistribution::Gaussian {
                mu: scale * mu + shift,
                sigma: scale.abs() * sigma,
            },
            ContinuousDistribution::UniformInterval { lo, hi } => {
                let (a, b) = (scale * lo + shift, scale * hi + shift);
                ContinuousDistribution::UniformInterval {
                    lo: a.min(b),
                    hi: a.max(b),
                }
            }
            other => ContinuousDistribution::Affine {
                base: Box::new(other.clone()),
                scale,
                shift,
            },
        };
        d.validate()?;
        Ok(d)
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            ContinuousDistribution::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ContinuousDistribution::UniformInterval { lo, hi } => (*lo, *hi),
            ContinuousDistribution::SdReference => (0.0, 0.5),
            ContinuousDistribution::Affine { base, scale, shift } => {
                let (lo, hi) = base.support();
                let (a, b) = (scale * lo + shift, scale * hi + shift);
                (a.min(b), a.max(b))
            }
            ContinuousDistribution::Custom(law) => law.support(),
        }
    }

    /// Density at `x`; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            ContinuousDistribution::Gaussian { mu, sigma } => {
                std_normal_pdf((x - mu) / sigma) / sigma
            }
            ContinuousDistribution::UniformInterval { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ContinuousDistribution::SdReference => {
                if (0.0..0.5).contains(&x) {
                    1.0 / (1.0 - 2.0 * x).sqrt()
                } else {
                    0.0
                }
            }
            ContinuousDistribution::Affine { base, scale, shift } => {
                base.pdf((x - shift) / scale) / scale.abs()
            }
            ContinuousDistribution::Custom(law) => law.pdf(x).max(0.0),
        }
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ContinuousDistribution::Gaussian { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            ContinuousDistribution::UniformInterval { lo, hi } => {
                if x <= *lo {
                    0.0
                } else if x >= *hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            ContinuousDistribution::SdReference => {
                if x <= 0.0 {
                    0.0
                } else if x >= 0.5 {
                    1.0
                } else {
                    1.0 - (1.0 - 2.0 * x).sqrt()
                }
            }
            ContinuousDistribution::Affine { base, scale, shift } => {
                let t = (x - shift) / scale;
                if *scale > 0.0 {
                    base.cdf(t)
                } else {
                    // continuous base: P(X >= t) = 1 - F(t)
                    1.0 - base.cdf(t)
                }
            }
            ContinuousDistribution::Custom(law) => law.cdf(x).clamp(0.0, 1.0),
        }
    }

    /// Inverse distribution function. `u = 0` and `u = 1` map to the support
    /// endpoints, which are `∓∞` for unbounded laws.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        Ok(self.quantile_unchecked(u))
    }

    /// [`quantile`](Self::quantile) for a level already known to lie in `[0, 1]`.
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u));
        match self {
            ContinuousDistribution::Gaussian { mu, sigma } => mu + sigma * std_normal_quantile(u),
            ContinuousDistribution::UniformInterval { lo, hi } => {
                if u >= 1.0 {
                    *hi
                } else {
                    lo + u * (hi - lo)
                }
            }
            ContinuousDistribution::SdReference => {
                let v = 1.0 - u;
                0.5 * (1.0 - v * v)
            }
            ContinuousDistribution::Affine { base, scale, shift } => {
                let t = if *scale > 0.0 {
                    base.quantile_unchecked(u)
                } else {
                    base.quantile_unchecked(1.0 - u)
                };
                scale * t + shift
            }
            ContinuousDistribution::Custom(law) => law.quantile(u),
        }
    }

    /// `n` i.i.d. draws, sorted. See the module docs for the generator.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SortedSample> {
        if n == 0 {
            return Err(Error::DegenerateInput("cannot draw an empty sample".into()));
        }
        SortedSample::from_unsorted(self.draw(n, seed))
    }

    /// `n` i.i.d. draws in generation order.
    pub fn draw(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.quantile_unchecked(open_unit_uniform(&mut rng)))
            .collect()
    }
}

/// Uniform on (0, 1) from the top 53 bits of one 64-bit output.
fn open_unit_uniform(rng: &mut ChaCha20Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    ((rng.next_u64() >> 11) as f64 + 0.5) * SCALE
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal quantile: bisection on [`std_normal_cdf`] down to
/// [`QUANTILE_TOL`], then one Newton step. Acklam's rational approximation only
/// seeds the starting bracket.
pub fn std_normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    if u > 0.5 {
        return -std_normal_quantile(1.0 - u);
    }
    if u == 0.5 {
        return 0.0;
    }

    let guess = acklam(u);
    let mut step = 1e-6 * (1.0 + guess.abs());
    let mut lo = guess - step;
    while std_normal_cdf(lo) > u {
        lo -= step;
        step *= 2.0;
    }
    step = 1e-6 * (1.0 + guess.abs());
    let mut hi = guess + step;
    while std_normal_cdf(hi) < u {
        hi += step;
        step *= 2.0;
    }

    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if std_normal_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let x = 0.5 * (lo + hi);
    let d = std_normal_pdf(x);
    if d > 0.0 {
        let refined = x - (std_normal_cdf(x) - u) / d;
        if refined >= lo && refined <= hi {
            return refined;
        }
    }
    x
}

// Acklam's approximation, relative error ~1.2e-9. Valid for 0 < u < 1.
fn acklam(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    if u < P_LOW {
        tail(u)
    } else if u <= 1.0 - P_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(1.0 - u)
    }
}

/// A nondecreasing, finite, nonempty sample: the carrier of an empirical law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SortedSample(Vec<f64>);

impl SortedSample {
    /// Wrap values that must already be sorted.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite_nonempty(&values)?;
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "sample values are not in nondecreasing order".into(),
            ));
        }
        Ok(SortedSample(values))
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        check_finite_nonempty(&values)?;
        values.sort_by(f64::total_cmp);
        Ok(SortedSample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// `#{X_i ≤ x}`
    pub fn count_le(&self, x: f64) -> usize {
        self.0.partition_point(|&v| v <= x)
    }

    /// `#{X_i < x}`
    pub fn count_lt(&self, x: f64) -> usize {
        self.0.partition_point(|&v| v < x)
    }

    /// `#{X_i ≥ x}`
    pub fn count_ge(&self, x: f64) -> usize {
        self.0.len() - self.count_lt(x)
    }

    /// `#{X_i > x}`
    pub fn count_gt(&self, x: f64) -> usize {
        self.0.len() - self.count_le(x)
    }

    /// The sample `scale · X_i + shift`, re-sorted.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        SortedSample::from_unsorted(self.0.iter().map(|v| scale * v + shift).collect())
    }
}

impl TryFrom<Vec<f64>> for SortedSample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        SortedSample::from_unsorted(values)
    }
}

impl From<SortedSample> for Vec<f64> {
    fn from(s: SortedSample) -> Vec<f64> {
        s.0
    }
}

fn check_finite_nonempty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::DegenerateInput("sample is empty".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sample contains non-finite value {bad}"
        )));
    }
    Ok(())
}
