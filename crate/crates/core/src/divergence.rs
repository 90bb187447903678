//! Total variation and f-divergences between densities, depth-induced TVDs,
//! the equality-condition checker and the two MMD estimators.

use serde::{Deserialize, Serialize};

use crate::depth::{kd_empirical, DepthKind, KernelSpec};
use crate::distributions::{std_normal_cdf, std_normal_quantile, ContinuousDistribution, SortedSample};
use crate::error::{Error, Result};
use crate::laws::{CrossDepthLaw, LEVEL_CLAMP};
use crate::quadrature::{integrate_pieces, sign_change_brackets, sign_changes};

/// Width to which sign-change roots are bisected.
const ROOT_TOL: f64 = 1e-12;

/// Tail mass dropped on each side when an unbounded support is truncated.
const TAIL_MASS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub sign_change_bracket_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-8,
            max_subdivisions: 2000,
            sign_change_bracket_grid: 4096,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be positive".into()));
        }
        if self.sign_change_bracket_grid < 2 {
            return Err(Error::InvalidParameter("sign_change_bracket_grid must be at least 2".into()));
        }
        Ok(())
    }
}

/// Forward `D(P‖Q)`, backward `D(Q‖P)` and their mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedDivergenceResult {
    pub forward: f64,
    pub backward: f64,
    pub symmetrized: f64,
}

impl InducedDivergenceResult {
    pub fn new(forward: f64, backward: f64) -> Self {
        InducedDivergenceResult {
            forward,
            backward,
            symmetrized: (forward + backward) / 2.0,
        }
    }
}

/// Convex generator `φ` with `φ(1) = 0`. `recession` is `lim φ(t)/t` as
/// `t → ∞`, which prices mass of `p` where `q` vanishes.
#[derive(Debug, Clone, Copy)]
pub struct FGenerator {
    pub name: &'static str,
    pub phi: fn(f64) -> f64,
    pub recession: f64,
}

fn tv_phi(t: f64) -> f64 {
    0.5 * (t - 1.0).abs()
}

fn kl_phi(t: f64) -> f64 {
    if t > 0.0 {
        t * t.ln()
    } else {
        0.0
    }
}

impl FGenerator {
    pub const TOTAL_VARIATION: FGenerator = FGenerator {
        name: "tv",
        phi: tv_phi,
        recession: 0.5,
    };

    pub const KULLBACK_LEIBLER: FGenerator = FGenerator {
        name: "kl",
        phi: kl_phi,
        recession: f64::INFINITY,
    };
}

fn check_support(support: (f64, f64)) -> Result<()> {
    let (lo, hi) = support;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "integration support must be a finite interval, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

fn uniform_grid(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    (0..=cells)
        .map(|k| if k == cells { hi } else { lo + (hi - lo) * k as f64 / cells as f64 })
        .collect()
}

/// Pieces of `support` on which `p − q` keeps one sign class. Each sign change
/// leaves a gap of width at most 1e-12 between neighbouring pieces, so every
/// piece sees `p − q` continuous up to its endpoints even when a density
/// jumps at the change.
fn difference_pieces(
    p: &impl Fn(f64) -> f64,
    q: &impl Fn(f64) -> f64,
    support: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, f64)>> {
    let grid = uniform_grid(support.0, support.1, cfg.sign_change_bracket_grid);
    let brackets = sign_change_brackets(|x| Ok(p(x) - q(x)), &grid, ROOT_TOL)?;
    let mut pieces = Vec::with_capacity(brackets.len() + 1);
    let mut start = support.0;
    for (lo, hi) in brackets {
        pieces.push((start, lo));
        start = hi;
    }
    pieces.push((start, support.1));
    Ok(pieces)
}

fn integrate_over_pieces(
    f: impl Fn(f64) -> f64,
    pieces: &[(f64, f64)],
    abs_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let tol = abs_tol / pieces.len() as f64;
    let mut total = 0.0;
    for &(a, b) in pieces {
        if b > a {
            total += integrate_pieces(&f, &[a, b], tol, cfg.max_subdivisions)?.value;
        }
    }
    Ok(total)
}

/// `½ ∫ |p − q|` over a finite `support`, split at the sign changes of `p − q`.
pub fn tvd_between_densities(
    p: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> f64,
    support: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_support(support)?;
    let pieces = difference_pieces(&p, &q, support, cfg)?;
    let total = integrate_over_pieces(|x| (p(x) - q(x)).abs(), &pieces, 2.0 * cfg.abs_tol, cfg)?;
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Smallest interval holding all but `1e-15` of each law's mass in each tail.
pub fn effective_support(p: &ContinuousDistribution, q: &ContinuousDistribution) -> (f64, f64) {
    let bounds = |d: &ContinuousDistribution| {
        let (lo, hi) = d.support();
        let lo = if lo.is_finite() { lo } else { d.quantile_unchecked(TAIL_MASS) };
        let hi = if hi.is_finite() { hi } else { d.quantile_unchecked(1.0 - TAIL_MASS) };
        (lo, hi)
    };
    let (a, b) = bounds(p);
    let (c, d) = bounds(q);
    (a.min(c), b.max(d))
}

/// [`tvd_between_densities`] for two distributions over their
/// [`effective_support`].
pub fn tvd_between(p: &ContinuousDistribution, q: &ContinuousDistribution, cfg: &QuadratureConfig) -> Result<f64> {
    tvd_between_densities(|x| p.pdf(x), |x| q.pdf(x), effective_support(p, q), cfg)
}

/// `∫ φ(p/q) q`. Where `q` vanishes the integrand is `p · recession`, so the
/// result is `+∞` when that mass is positive and the recession is infinite.
pub fn f_divergence_between_densities(
    generator: &FGenerator,
    p: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> f64,
    support: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_support(support)?;
    let integrand = |x: f64| {
        let (px, qx) = (p(x), q(x));
        if qx > 0.0 {
            (generator.phi)(px / qx) * qx
        } else if px > 0.0 {
            px * generator.recession
        } else {
            0.0
        }
    };
    // any infinite sample point means the mismatch carries mass
    let probe = uniform_grid(support.0, support.1, cfg.sign_change_bracket_grid);
    if probe.iter().any(|&x| integrand(x).is_infinite()) {
        return Ok(f64::INFINITY);
    }
    let pieces = difference_pieces(&p, &q, support, cfg)?;
    let total = integrate_over_pieces(integrand, &pieces, cfg.abs_tol, cfg)?;
    if total.is_nan() {
        return Ok(f64::INFINITY);
    }
    Ok(total.max(0.0))
}

/// Closed-form TVD between `N(mu1, sigma1²)` and `N(mu2, sigma2²)`.
pub fn gaussian_tvd_exact(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    for s in [sigma1, sigma2] {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be finite and positive, got {s}")));
        }
    }
    // log densities agree where A x² + B x + C = 0
    let (v1, v2) = (sigma1 * sigma1, sigma2 * sigma2);
    let a = 0.5 / v1 - 0.5 / v2;
    let b = mu2 / v2 - mu1 / v1;
    let c = 0.5 * mu1 * mu1 / v1 - 0.5 * mu2 * mu2 / v2 + (sigma1 / sigma2).ln();
    let mut roots = Vec::with_capacity(2);
    if a == 0.0 {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc > 0.0 {
            let h = -0.5 * (b + b.signum() * disc.sqrt());
            if h != 0.0 {
                roots.push(h / a);
                roots.push(c / h);
            } else {
                let r = (-c / a).sqrt();
                roots.extend([-r, r]);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    let cdf1 = |x: f64| std_normal_cdf((x - mu1) / sigma1);
    let cdf2 = |x: f64| std_normal_cdf((x - mu2) / sigma2);
    let mut total = 0.0;
    let (mut prev1, mut prev2) = (0.0, 0.0);
    for &r in &roots {
        let (f1, f2) = (cdf1(r), cdf2(r));
        total += ((f1 - prev1) - (f2 - prev2)).abs();
        prev1 = f1;
        prev2 = f2;
    }
    // upper tails taken from the survival function to keep precision
    let sf1 = |x: f64| std_normal_cdf(-(x - mu1) / sigma1);
    let sf2 = |x: f64| std_normal_cdf(-(x - mu2) / sigma2);
    total += match roots.last() {
        Some(&r) => (sf1(r) - sf2(r)).abs(),
        None => 0.0,
    };
    Ok((0.5 * total).clamp(0.0, 1.0))
}

fn depth_of_level(kind: DepthKind, u: f64) -> f64 {
    match kind {
        DepthKind::Simplicial => 2.0 * u * (1.0 - u),
        _ => u,
    }
}

/// TVD between a cross-distribution depth law and the matching reference law.
///
/// The density ratio against the reference is bracketed on a grid of
/// quantile levels `u = Φ(s)`, uniform in `s`, which resolves the endpoint
/// behaviour of the law. Between consecutive sign changes the TVD contribution
/// is the absolute difference of cdf increments, so no density is integrated
/// and endpoint singularities do not matter. Atoms at either end of the
/// support count in full.
pub fn tvd_to_reference(law: &CrossDepthLaw, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let kind = law.kind();
    let reference = law.reference_law();
    let (lo, hi) = law.support();
    let s_lo = std_normal_quantile(LEVEL_CLAMP);
    let s_hi = match kind {
        DepthKind::Quantile => -s_lo,
        _ => 0.0,
    };
    let grid = uniform_grid(s_lo, s_hi, cfg.sign_change_bracket_grid);
    let excess = |s: f64| law.reference_ratio(depth_of_level(kind, std_normal_cdf(s))).map(|r| r - 1.0);
    let roots = sign_changes(excess, &grid, ROOT_TOL)?;

    let atom_lo = law.cdf(lo)?;
    let mut total = atom_lo;
    let (mut prev_f, mut prev_r) = (atom_lo, reference.cdf(lo));
    for s in roots {
        let z = depth_of_level(kind, std_normal_cdf(s));
        let (f, r) = (law.cdf(z)?, reference.cdf(z));
        total += ((f - prev_f) - (r - prev_r)).abs();
        prev_f = f;
        prev_r = r;
    }
    let top = law.cdf_below_top();
    total += ((top - prev_f) - (reference.cdf(hi) - prev_r)).abs();
    total += 1.0 - top;
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Depth-induced TVDs: forward is the law of the depth of `X ~ P` in `Q`
/// against the reference, backward swaps the roles.
pub fn induced_tvd(
    kind: DepthKind,
    p: &ContinuousDistribution,
    q: &ContinuousDistribution,
    cfg: &QuadratureConfig,
) -> Result<InducedDivergenceResult> {
    let forward = tvd_to_reference(&CrossDepthLaw::new(kind, p.clone(), q.clone())?, cfg)?;
    let backward = tvd_to_reference(&CrossDepthLaw::new(kind, q.clone(), p.clone())?, cfg)?;
    Ok(InducedDivergenceResult::new(forward, backward))
}

/// Products of density differences tolerated as non-negative.
const CONDITION_TOL: f64 = -1e-12;

fn condition_holds(
    x: &ContinuousDistribution,
    y: &ContinuousDistribution,
    grid: &[f64],
) -> bool {
    let diff = |u: f64| {
        let t = y.quantile_unchecked(u.clamp(LEVEL_CLAMP, 1.0 - LEVEL_CLAMP));
        x.pdf(t) - y.pdf(t)
    };
    grid.iter().all(|&z| diff(z) * diff(1.0 - z) >= CONDITION_TOL)
}

/// Equality conditions for the HD-induced TVD, checked on a uniform grid of
/// `[0, ½]` with `X ~ P`, `Y ~ Q`. The first compares the densities at the
/// `z` and `1 − z` quantiles of `Q`, the second at those of `P`.
pub fn check_equality_conditions(
    p: &ContinuousDistribution,
    q: &ContinuousDistribution,
    grid_size: usize,
) -> Result<(bool, bool)> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!("grid_size must be at least 2, got {grid_size}")));
    }
    p.validate()?;
    q.validate()?;
    let grid = uniform_grid(0.0, 0.5, grid_size - 1);
    Ok((condition_holds(p, q, &grid), condition_holds(q, p, &grid)))
}

fn nonempty(s: &SortedSample, name: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::DegenerateInput(format!("{name} is empty")));
    }
    Ok(())
}

fn mean_kernel(a: &[f64], b: &[f64], kernel: &KernelSpec) -> f64 {
    let mut sum = 0.0;
    for &x in a {
        for &y in b {
            sum += kernel.eval(x, y);
        }
    }
    sum / (a.len() as f64 * b.len() as f64)
}

/// Plug-in V-statistic `mean k(X, X') + mean k(Y, Y') − 2 mean k(X, Y)`.
pub fn mmd_squared_direct(sx: &SortedSample, sy: &SortedSample, kernel: &KernelSpec) -> Result<f64> {
    nonempty(sx, "sx")?;
    nonempty(sy, "sy")?;
    let (x, y) = (sx.values(), sy.values());
    Ok(mean_kernel(x, x, kernel) + mean_kernel(y, y, kernel) - 2.0 * mean_kernel(x, y, kernel))
}

/// The same statistic written as differences of empirical kernel depths.
pub fn mmd_squared_via_depth(sx: &SortedSample, sy: &SortedSample, kernel: &KernelSpec) -> Result<f64> {
    nonempty(sx, "sx")?;
    nonempty(sy, "sy")?;
    let mean_depth = |points: &SortedSample, reference: &SortedSample| {
        points.values().iter().map(|&v| kd_empirical(v, reference, kernel)).sum::<f64>() / points.len() as f64
    };
    Ok((mean_depth(sx, sx) - mean_depth(sx, sy)) + (mean_depth(sy, sy) - mean_depth(sy, sx)))
}
