//! Seeded reproduction of the Gaussian experiment: raw and depth-induced
//! LV-TVD estimates, refined-grid and one-sided variants, analytic truths and
//! histogram data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::depth::{transform_sample, DepthKind, DepthSample, Reference};
use crate::distributions::{ContinuousDistribution, SortedSample};
use crate::divergence::{induced_tvd, tvd_between, InducedDivergenceResult, QuadratureConfig};
use crate::error::{Error, Result};
use crate::io::write_text;
use crate::lvtvd::{lvtvd_one_sided_uniform, lvtvd_two_sample, refined_uniform_sample};

/// Mixed into the base seed to get the Q-sample stream.
pub const SEED_Y_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed used by the default configuration.
pub const DEFAULT_SEED: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(alias = "distP")]
    pub dist_p: ContinuousDistribution,
    #[serde(alias = "distQ")]
    pub dist_q: ContinuousDistribution,
    pub n: usize,
    pub seed: u64,
    pub l_raw: f64,
    pub l_depth: f64,
    pub refinement_factors: Vec<usize>,
    pub histogram_bins: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dist_p: ContinuousDistribution::Gaussian { mu: 0.0, sigma: 1.0 },
            dist_q: ContinuousDistribution::Gaussian { mu: 0.0, sigma: 1.5 },
            n: 1000,
            seed: DEFAULT_SEED,
            l_raw: 4.0,
            l_depth: 20.0,
            refinement_factors: vec![2, 4],
            histogram_bins: 20,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist_p.validate()?;
        self.dist_q.validate()?;
        self.quadrature.validate()?;
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        for (name, l) in [("l_raw", self.l_raw), ("l_depth", self.l_depth)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {l}")));
            }
        }
        if self.refinement_factors.iter().any(|&r| r < 1) {
            return Err(Error::InvalidParameter("refinement factors must be at least 1".into()));
        }
        if self.histogram_bins < 1 {
            return Err(Error::InvalidParameter("histogram_bins must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Seeds {
        Seeds {
            seed_x: self.seed,
            seed_y: self.seed ^ SEED_Y_MIX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub seed_x: u64,
    pub seed_y: u64,
}

/// Population values the estimators target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticInduced {
    pub hd: InducedDivergenceResult,
    pub sd: InducedDivergenceResult,
    pub qt: InducedDivergenceResult,
}

/// Forward estimates compare the depths of the P sample in `Q_N`, backward
/// ones the depths of the Q sample in `P_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub ground_truth_tvd: f64,
    pub raw_lvtvd: f64,
    pub hd_forward: f64,
    pub hd_backward: f64,
    pub hd_symmetrized: f64,
    pub sd_forward: f64,
    pub sd_backward: f64,
    pub sd_symmetrized: f64,
    pub qt_forward: f64,
    pub qt_backward: f64,
    pub qt_symmetrized: f64,
    /// Keyed by the refinement factor `M / N`.
    pub refined: BTreeMap<String, InducedDivergenceResult>,
    pub one_sided: InducedDivergenceResult,
    pub analytic_induced: AnalyticInduced,
    pub config: ExperimentConfig,
    pub seeds: Seeds,
}

/// Depth samples of the experiment, kept for histogram output.
#[derive(Debug, Clone)]
pub struct DepthSamples {
    /// `HD(X; Q_N)`, `HD(Y; Q_N)`, `HD(Y; P_N)`, `HD(X; P_N)` and the same for
    /// SD and QT, keyed `"{kind}_{points}_in_{reference}"`.
    pub samples: BTreeMap<String, DepthSample>,
}

struct Transforms {
    x_in_q: SortedSample,
    y_in_q: SortedSample,
    y_in_p: SortedSample,
    x_in_p: SortedSample,
}

fn transforms(
    x: &SortedSample,
    y: &SortedSample,
    kind: DepthKind,
    keep: &mut BTreeMap<String, DepthSample>,
) -> Transforms {
    let mut run = |points: &SortedSample, reference: &SortedSample, name: &str| {
        let d = transform_sample(points, Reference::Empirical(reference), &kind);
        let s = d.to_sorted_sample();
        keep.insert(format!("{}_{name}", kind.label()), d);
        s
    };
    Transforms {
        x_in_q: run(x, y, "x_in_q"),
        y_in_q: run(y, y, "y_in_q"),
        y_in_p: run(y, x, "y_in_p"),
        x_in_p: run(x, x, "x_in_p"),
    }
}

fn two_sample_pair(t: &Transforms, l: f64) -> Result<InducedDivergenceResult> {
    Ok(InducedDivergenceResult::new(
        lvtvd_two_sample(&t.x_in_q, &t.y_in_q, l)?.objective,
        lvtvd_two_sample(&t.y_in_p, &t.x_in_p, l)?.objective,
    ))
}

/// Runs the full pipeline and also returns the depth samples it built.
pub fn run_reference_experiment_with_samples(cfg: &ExperimentConfig) -> Result<(ExperimentReport, DepthSamples)> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    let x = cfg.dist_p.sample(cfg.n, seeds.seed_x)?;
    let y = cfg.dist_q.sample(cfg.n, seeds.seed_y)?;

    let ground_truth_tvd = tvd_between(&cfg.dist_p, &cfg.dist_q, &cfg.quadrature)?;
    let raw_lvtvd = lvtvd_two_sample(&x, &y, cfg.l_raw)?.objective;

    let mut kept = BTreeMap::new();
    let hd_t = transforms(&x, &y, DepthKind::Halfspace, &mut kept);
    let sd_t = transforms(&x, &y, DepthKind::Simplicial, &mut kept);
    let qt_t = transforms(&x, &y, DepthKind::Quantile, &mut kept);
    let hd = two_sample_pair(&hd_t, cfg.l_depth)?;
    let sd = two_sample_pair(&sd_t, cfg.l_depth)?;
    let qt = two_sample_pair(&qt_t, cfg.l_depth)?;

    let mut refined = BTreeMap::new();
    for &factor in &cfg.refinement_factors {
        let grid = refined_uniform_sample(factor * cfg.n + (factor * cfg.n) % 2, 0.5)?;
        let r = InducedDivergenceResult::new(
            lvtvd_two_sample(&hd_t.x_in_q, &grid, cfg.l_depth)?.objective,
            lvtvd_two_sample(&hd_t.y_in_p, &grid, cfg.l_depth)?.objective,
        );
        refined.insert(factor.to_string(), r);
    }
    let one_sided = InducedDivergenceResult::new(
        lvtvd_one_sided_uniform(&hd_t.x_in_q, 0.0, 0.5, cfg.l_depth)?.objective,
        lvtvd_one_sided_uniform(&hd_t.y_in_p, 0.0, 0.5, cfg.l_depth)?.objective,
    );

    let analytic_induced = AnalyticInduced {
        hd: induced_tvd(DepthKind::Halfspace, &cfg.dist_p, &cfg.dist_q, &cfg.quadrature)?,
        sd: induced_tvd(DepthKind::Simplicial, &cfg.dist_p, &cfg.dist_q, &cfg.quadrature)?,
        qt: induced_tvd(DepthKind::Quantile, &cfg.dist_p, &cfg.dist_q, &cfg.quadrature)?,
    };

    let report = ExperimentReport {
        ground_truth_tvd,
        raw_lvtvd,
        hd_forward: hd.forward,
        hd_backward: hd.backward,
        hd_symmetrized: hd.symmetrized,
        sd_forward: sd.forward,
        sd_backward: sd.backward,
        sd_symmetrized: sd.symmetrized,
        qt_forward: qt.forward,
        qt_backward: qt.backward,
        qt_symmetrized: qt.symmetrized,
        refined,
        one_sided,
        analytic_induced,
        config: cfg.clone(),
        seeds,
    };
    Ok((report, DepthSamples { samples: kept }))
}

pub fn run_reference_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(run_reference_experiment_with_samples(cfg)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParameter(format!("unknown report format {other:?}"))),
        }
    }
}

impl ExperimentReport {
    /// `(name, forward, backward, symmetrized)` rows. Scalars repeat their
    /// value in all three columns.
    pub fn rows(&self) -> Vec<(String, f64, f64, f64)> {
        let pair = |name: &str, r: &InducedDivergenceResult| (name.to_string(), r.forward, r.backward, r.symmetrized);
        let scalar = |name: &str, v: f64| (name.to_string(), v, v, v);
        let mut rows = vec![
            scalar("ground_truth_tvd", self.ground_truth_tvd),
            scalar("raw_lvtvd", self.raw_lvtvd),
            pair("hd_self_transform", &InducedDivergenceResult::new(self.hd_forward, self.hd_backward)),
            pair("sd_self_transform", &InducedDivergenceResult::new(self.sd_forward, self.sd_backward)),
            pair("qt_self_transform", &InducedDivergenceResult::new(self.qt_forward, self.qt_backward)),
        ];
        for (factor, r) in &self.refined {
            rows.push(pair(&format!("hd_refined_m{factor}n"), r));
        }
        rows.push(pair("hd_one_sided_uniform", &self.one_sided));
        rows.push(pair("analytic_hd", &self.analytic_induced.hd));
        rows.push(pair("analytic_sd", &self.analytic_induced.sd));
        rows.push(pair("analytic_qt", &self.analytic_induced.qt));
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,forward,backward,symmetrized\n");
        for (name, f, b, s) in self.rows() {
            let _ = writeln!(out, "{name},{f},{b},{s}");
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report.to_csv(),
    };
    write_text(path, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub normalized_density: f64,
}

/// Equal-width bins over the depth support. Bins are closed on the left; the
/// last one also holds its right edge.
pub fn histogram(values: &DepthSample, bins: usize) -> Result<Vec<HistogramBin>> {
    if bins < 1 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let (lo, hi) = values.support();
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values.values() {
        let k = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = values.len().max(1) as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            bin_left: lo + k as f64 * width,
            bin_right: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
            count,
            normalized_density: count as f64 / (total * width),
        })
        .collect())
}

pub fn histogram_csv(values: &DepthSample, bins: usize) -> Result<String> {
    let mut out = String::from("bin_left,bin_right,count,normalized_density\n");
    for b in histogram(values, bins)? {
        let _ = writeln!(out, "{},{},{},{}", b.bin_left, b.bin_right, b.count, b.normalized_density);
    }
    Ok(out)
}

pub fn emit_histogram(values: &DepthSample, bins: usize, path: &Path) -> Result<()> {
    write_text(path, &histogram_csv(values, bins)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 200,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_json_aliases_and_validation() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"distP":{"kind":"gaussian","mu":0,"sigma":1},"distQ":{"kind":"uniform","lo":-1,"hi":1},"n":50}"#,
        )
        .unwrap();
        assert_eq!(cfg.n, 50);
        assert_eq!(cfg.l_depth, 20.0);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
        let bad = ExperimentConfig { n: 1, ..small() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { l_raw: 0.0, ..small() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn symmetrized_fields_are_means() {
        let r = run_reference_experiment(&small()).unwrap();
        assert_eq!(r.hd_symmetrized, (r.hd_forward + r.hd_backward) / 2.0);
        assert_eq!(r.sd_symmetrized, (r.sd_forward + r.sd_backward) / 2.0);
        for v in r.refined.values().chain([&r.one_sided]) {
            assert_eq!(v.symmetrized, (v.forward + v.backward) / 2.0);
        }
        assert_eq!(r.seeds.seed_y, r.seeds.seed_x ^ SEED_Y_MIX);
    }

    #[test]
    fn report_is_deterministic_and_roundtrips() {
        let a = run_reference_experiment(&small()).unwrap();
        let b = run_reference_experiment(&small()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let back: ExperimentReport = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        let csv = a.to_csv();
        assert!(csv.starts_with("name,forward,backward,symmetrized\n"));
        assert!(csv.contains("\nhd_refined_m2n,") && csv.contains("\nhd_one_sided_uniform,"));
    }

    #[test]
    fn histogram_edges() {
        let d = DepthSample::from_values(vec![0.0, 0.1, 0.25, 0.5, 0.5], DepthKind::Halfspace, "t").unwrap();
        let h = histogram(&d, 2).unwrap();
        assert_eq!((h[0].count, h[1].count), (2, 3));
        assert_eq!(h[1].bin_right, 0.5);
        assert!((h[0].normalized_density - 2.0 / (5.0 * 0.25)).abs() < 1e-15);
        assert!(histogram(&d, 0).is_err());
    }
}
