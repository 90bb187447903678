//! Univariate depth functions against an analytic law or an empirical sample.
//!
//! - halfspace depth `HD(x; P) = min(F(x), 1 − F(x))`
//! - simplicial depth `SD(x; P) = 2 F(x) (1 − F(x))`
//! - quantile transform `QT(x; P) = F(x)`
//! - kernel depth `KD_k(x; P) = E_P[k(x, X)]`
//!
//! Empirical evaluators binary-search the sorted reference, so each point costs
//! `O(log N)` (kernel depth is `O(N)`).

use serde::{Deserialize, Serialize};

use crate::distributions::{ContinuousDistribution, SortedSample};
use crate::error::{Error, Result};

/// Gaussian kernel `k(x, y) = exp(−(x − y)² / (2h²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel bandwidth must be finite and positive, got {bandwidth}"
            )));
        }
        Ok(KernelSpec { bandwidth })
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = (x - y) / self.bandwidth;
        (-0.5 * d * d).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DepthKind {
    #[serde(rename = "hd")]
    Halfspace,
    #[serde(rename = "sd")]
    Simplicial,
    #[serde(rename = "qt")]
    Quantile,
    #[serde(rename = "kd")]
    Kernel(KernelSpec),
}

impl DepthKind {
    /// Range of the depth values.
    pub fn support(&self) -> (f64, f64) {
        match self {
            DepthKind::Halfspace | DepthKind::Simplicial => (0.0, 0.5),
            DepthKind::Quantile | DepthKind::Kernel(_) => (0.0, 1.0),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DepthKind::Halfspace => "hd",
            DepthKind::Simplicial => "sd",
            DepthKind::Quantile => "qt",
            DepthKind::Kernel(_) => "kd",
        }
    }
}

pub fn hd_analytic(x: f64, reference: &ContinuousDistribution) -> f64 {
    let f = reference.cdf(x);
    f.min(1.0 - f)
}

pub fn sd_analytic(x: f64, reference: &ContinuousDistribution) -> f64 {
    let f = reference.cdf(x);
    2.0 * f * (1.0 - f)
}

pub fn qt_analytic(x: f64, reference: &ContinuousDistribution) -> f64 {
    reference.cdf(x)
}

/// `min(#{X_i ≤ x}, #{X_i ≥ x}) / N`, capped at ½. A point equal to a sample
/// value counts on both sides.
pub fn hd_empirical(x: f64, reference: &SortedSample) -> f64 {
    let n = reference.len() as f64;
    let count = reference.count_le(x).min(reference.count_ge(x));
    (count as f64 / n).min(0.5)
}

/// `2 · (#{X_i ≤ x}/N) · (#{X_i > x}/N)`.
pub fn sd_empirical(x: f64, reference: &SortedSample) -> f64 {
    let n = reference.len() as f64;
    let le = reference.count_le(x) as f64 / n;
    let gt = reference.count_gt(x) as f64 / n;
    2.0 * le * gt
}

/// `#{X_i ≤ x} / N`.
pub fn qt_empirical(x: f64, reference: &SortedSample) -> f64 {
    reference.count_le(x) as f64 / reference.len() as f64
}

/// `(1/N) Σ k(x, X_i)`.
pub fn kd_empirical(x: f64, reference: &SortedSample, kernel: &KernelSpec) -> f64 {
    let values = reference.values();
    values.iter().map(|&v| kernel.eval(x, v)).sum::<f64>() / values.len() as f64
}

/// Kernel depth against an analytic law, `E_P[k(x, X)]`. Only the Gaussian
/// law has a closed form here.
pub fn kd_analytic(x: f64, reference: &ContinuousDistribution, kernel: &KernelSpec) -> Result<f64> {
    match reference {
        ContinuousDistribution::Gaussian { mu, sigma } => {
            let h2 = kernel.bandwidth * kernel.bandwidth;
            let s2 = sigma * sigma;
            let d = x - mu;
            Ok((h2 / (h2 + s2)).sqrt() * (-0.5 * d * d / (h2 + s2)).exp())
        }
        other => Err(Error::InvalidParameter(format!(
            "analytic kernel depth is only available for gaussian references, got {other:?}"
        ))),
    }
}

/// What a depth sample was computed against.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Analytic(&'a ContinuousDistribution),
    Empirical(&'a SortedSample),
}

impl Reference<'_> {
    fn describe(&self) -> String {
        match self {
            Reference::Analytic(d) => match serde_json::to_string(d) {
                Ok(s) => s,
                Err(_) => format!("{d:?}"),
            },
            Reference::Empirical(s) => format!("empirical(n={})", s.len()),
        }
    }
}

/// Depth values of a batch of points, sorted, with the range they live in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSample {
    values: Vec<f64>,
    support: (f64, f64),
    kind: DepthKind,
    reference: String,
}

impl DepthSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn kind(&self) -> DepthKind {
        self.kind
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Build from values that are already depth observations (e.g. read back
    /// from CSV). Values are sorted and checked against the kind's range.
    pub fn from_values(values: Vec<f64>, kind: DepthKind, reference: &str) -> Result<Self> {
        let support = kind.support();
        let sorted = SortedSample::from_unsorted(values)?;
        if let Some(v) = sorted
            .values()
            .iter()
            .find(|&&v| v < support.0 || v > support.1)
        {
            return Err(Error::Domain(format!(
                "depth value {v} outside [{}, {}]",
                support.0, support.1
            )));
        }
        Ok(DepthSample {
            values: sorted.into_values(),
            support,
            kind,
            reference: reference.to_string(),
        })
    }

    pub fn to_sorted_sample(&self) -> SortedSample {
        SortedSample::new(self.values.clone()).expect("depth samples are sorted and finite")
    }
}

/// Depth of every point against the reference, returned sorted.
pub fn transform_sample(points: &SortedSample, reference: Reference<'_>, kind: &DepthKind) -> DepthSample {
    let xs = points.values();
    let mut values: Vec<f64> = match (reference, kind) {
        (Reference::Analytic(d), DepthKind::Halfspace) => xs.iter().map(|&x| hd_analytic(x, d)).collect(),
        (Reference::Analytic(d), DepthKind::Simplicial) => xs.iter().map(|&x| sd_analytic(x, d)).collect(),
        (Reference::Analytic(d), DepthKind::Quantile) => xs.iter().map(|&x| qt_analytic(x, d)).collect(),
        (Reference::Analytic(d), DepthKind::Kernel(k)) => match d {
            ContinuousDistribution::Gaussian { .. } => xs
                .iter()
                .map(|&x| kd_analytic(x, d, k).expect("gaussian reference"))
                .collect(),
            // no closed form: use a deterministic quantile-grid approximation of E_P[k(x, X)]
            _ => {
                let grid = quantile_grid(d, 4096);
                xs.iter().map(|&x| kd_empirical(x, &grid, k)).collect()
            }
        },
        (Reference::Empirical(s), DepthKind::Halfspace) => xs.iter().map(|&x| hd_empirical(x, s)).collect(),
        (Reference::Empirical(s), DepthKind::Simplicial) => xs.iter().map(|&x| sd_empirical(x, s)).collect(),
        (Reference::Empirical(s), DepthKind::Quantile) => xs.iter().map(|&x| qt_empirical(x, s)).collect(),
        (Reference::Empirical(s), DepthKind::Kernel(k)) => xs.iter().map(|&x| kd_empirical(x, s, k)).collect(),
    };
    values.sort_by(f64::total_cmp);
    DepthSample {
        values,
        support: kind.support(),
        kind: *kind,
        reference: reference.describe(),
    }
}

// midpoint quantiles (k + ½)/n of the law
fn quantile_grid(d: &ContinuousDistribution, n: usize) -> SortedSample {
    let values = (0..n)
        .map(|k| d.quantile_unchecked((k as f64 + 0.5) / n as f64))
        .collect();
    SortedSample::new(values).expect("quantiles are sorted")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> SortedSample {
        SortedSample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn analytic_examples() {
        let g = ContinuousDistribution::gaussian(0.0, 1.0).unwrap();
        assert_eq!(hd_analytic(0.0, &g), 0.5);
        assert_eq!(hd_analytic(f64::NEG_INFINITY, &g), 0.0);
        assert!((hd_analytic(1.0, &g) - 0.158_655).abs() < 1e-6);
        assert_eq!(sd_analytic(0.0, &g), 0.5);
        assert_eq!(sd_analytic(f64::INFINITY, &g), 0.0);
        assert!((sd_analytic(1.0, &g) - 0.266_967_5).abs() < 1e-6);
        assert_eq!(qt_analytic(0.0, &g), 0.5);
        assert_eq!(qt_analytic(f64::NEG_INFINITY, &g), 0.0);
        assert!((qt_analytic(1.0, &g) - 0.841_345).abs() < 1e-6);
    }

    #[test]
    fn empirical_examples() {
        let s = four();
        assert_eq!(hd_empirical(0.0, &s), 0.0);
        assert_eq!(hd_empirical(2.5, &s), 0.5);
        assert_eq!(hd_empirical(2.0, &s), 0.5);
        assert_eq!(sd_empirical(0.0, &s), 0.0);
        assert_eq!(sd_empirical(2.5, &s), 0.5);
        assert_eq!(sd_empirical(2.0, &s), 0.5);
        assert_eq!(qt_empirical(4.0, &s), 1.0);
        assert_eq!(qt_empirical(0.0, &s), 0.0);
        assert_eq!(qt_empirical(2.5, &s), 0.5);
    }

    #[test]
    fn hd_empirical_is_capped_at_half() {
        // odd N: the median is counted on both sides
        let s = SortedSample::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(hd_empirical(2.0, &s), 0.5);
        let tied = SortedSample::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(hd_empirical(1.0, &tied), 0.5);
    }

    #[test]
    fn kernel_depth_examples() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let single = SortedSample::new(vec![3.0]).unwrap();
        assert_eq!(kd_empirical(3.0, &single, &k), 1.0);
        let pair = SortedSample::new(vec![0.0, 2.0]).unwrap();
        assert!((kd_empirical(1.0, &pair, &k) - (-0.5f64).exp()).abs() < 1e-15);
        assert!(kd_empirical(100.0, &pair, &k) < 1e-10);
        assert!(KernelSpec::gaussian(0.0).is_err());
    }

    #[test]
    fn kernel_is_symmetric_and_bounded() {
        let k = KernelSpec::gaussian(0.7).unwrap();
        for (x, y) in [(0.0, 0.3), (-2.0, 5.0), (1.5, 1.5)] {
            assert_eq!(k.eval(x, y), k.eval(y, x));
            assert!(k.eval(x, y) <= 1.0);
        }
        assert_eq!(k.eval(0.4, 0.4), 1.0);
    }

    #[test]
    fn analytic_kernel_depth_matches_large_sample() {
        let g = ContinuousDistribution::gaussian(0.5, 1.2).unwrap();
        let k = KernelSpec::gaussian(0.8).unwrap();
        let grid = quantile_grid(&g, 200_000);
        for x in [-1.0, 0.5, 2.0] {
            let exact = kd_analytic(x, &g, &k).unwrap();
            assert!((exact - kd_empirical(x, &grid, &k)).abs() < 1e-6);
        }
    }

    #[test]
    fn self_transform_quantile_is_uniform_grid() {
        let g = ContinuousDistribution::gaussian(0.0, 1.0).unwrap();
        let s = g.sample(37, 3).unwrap();
        let d = transform_sample(&s, Reference::Empirical(&s), &DepthKind::Quantile);
        let expected: Vec<f64> = (1..=37).map(|k| k as f64 / 37.0).collect();
        assert_eq!(d.values(), expected.as_slice());
    }

    #[test]
    fn analytic_transform_respects_range() {
        let g = ContinuousDistribution::gaussian(1.0, 2.0).unwrap();
        let pts = ContinuousDistribution::gaussian(0.0, 5.0).unwrap().sample(500, 9).unwrap();
        for kind in [DepthKind::Halfspace, DepthKind::Simplicial] {
            let d = transform_sample(&pts, Reference::Analytic(&g), &kind);
            assert!(d.values().iter().all(|&v| (0.0..=0.5).contains(&v)));
            assert!(d.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn depth_sample_from_values_checks_range() {
        assert!(DepthSample::from_values(vec![0.1, 0.6], DepthKind::Halfspace, "x").is_err());
        let d = DepthSample::from_values(vec![0.3, 0.1], DepthKind::Halfspace, "x").unwrap();
        assert_eq!(d.values(), &[0.1, 0.3]);
    }

    #[test]
    fn sd_is_function_of_hd() {
        let g = ContinuousDistribution::gaussian(0.3, 0.9).unwrap();
        for k in 0..1000 {
            let x = -5.0 + 10.0 * k as f64 / 999.0;
            let h = hd_analytic(x, &g);
            assert!((sd_analytic(x, &g) - 2.0 * h * (1.0 - h)).abs() < 1e-15);
        }
    }
}
