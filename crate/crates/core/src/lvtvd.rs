//! Lipschitz-variational TVD estimators.
//!
//! Both estimators are chain LPs: maximise `½ (Σ c_i a_i + offset)` over node
//! values `a_i ∈ [−1, 1]` with `|a_{i+1} − a_i| ≤ l (Z_{i+1} − Z_i)`.
//!
//! [`solve_chain_lp`] solves them exactly by dynamic programming. The best
//! value of the prefix objective as a function of the last node value,
//! `V_i(a)`, is concave and piecewise linear. `V_{i+1}` is a sliding-window
//! maximum of `V_i` (radius `l · gap`) plus `c_{i+1} a`, and the window
//! maximum of a concave function just pulls its two sides apart around the
//! argmax plateau. A backward pass then picks the smallest optimal value at
//! every node.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distributions::SortedSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLp {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    offset: f64,
    lipschitz: f64,
}

impl ChainLp {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, offset: f64, lipschitz: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::DegenerateInput("chain LP needs at least one node".into()));
        }
        if nodes.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::InvalidParameter(format!("lipschitz constant must be positive, got {lipschitz}")));
        }
        if !offset.is_finite() || nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("chain LP data must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("chain LP nodes must be nondecreasing".into()));
        }
        Ok(ChainLp {
            nodes,
            weights,
            offset,
            lipschitz,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `½ (Σ c_i a_i + offset)`.
    pub fn objective(&self, values: &[f64]) -> f64 {
        let dot: f64 = self.weights.iter().zip(values).map(|(c, a)| c * a).sum();
        0.5 * (dot + self.offset)
    }

    /// Largest violation of the box and chain constraints by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let boxed = values.iter().map(|a| (a.abs() - 1.0).max(0.0)).fold(0.0, f64::max);
        let chain = self
            .nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(z, a)| ((a[1] - a[0]).abs() - self.lipschitz * (z[1] - z[0])).max(0.0))
            .fold(0.0, f64::max);
        boxed.max(chain)
    }

    /// Plain-text dump: a header `l <l> offset <offset>`, then one `Z_i c_i`
    /// line per node. Values are written in shortest round-trip form.
    pub fn to_debug_text(&self) -> String {
        let mut out = format!("l {} offset {}\n", self.lipschitz, self.offset);
        for (z, c) in self.nodes.iter().zip(&self.weights) {
            let _ = writeln!(out, "{z} {c}");
        }
        out
    }

    pub fn from_debug_text(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            path: "<chain lp>".into(),
            detail,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty input".into()))?.split_whitespace().collect();
        let (l, offset) = match header.as_slice() {
            ["l", l, "offset", o] => (
                l.parse::<f64>().map_err(|e| bad(format!("header l: {e}")))?,
                o.parse::<f64>().map_err(|e| bad(format!("header offset: {e}")))?,
            ),
            _ => return Err(bad("header must read `l <l> offset <offset>`".into())),
        };
        let (mut nodes, mut weights) = (Vec::new(), Vec::new());
        for (k, line) in lines.enumerate() {
            let mut parts = line.split_whitespace().map(str::parse::<f64>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(z)), Some(Ok(c)), None) => {
                    nodes.push(z);
                    weights.push(c);
                }
                _ => return Err(bad(format!("node line {}: expected `Z c`", k + 1))),
            }
        }
        ChainLp::new(nodes, weights, offset, l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

/// Concave piecewise-linear function on `[−1, 1]` given by its breakpoints.
struct Concave {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Concave {
    fn linear(slope: f64) -> Concave {
        Concave {
            xs: vec![-1.0, 1.0],
            ys: vec![-slope, slope],
        }
    }

    /// Smallest and largest maximiser.
    fn argmax(&self) -> (f64, f64) {
        let best = self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first = self.ys.iter().position(|&y| y == best).unwrap_or(0);
        let last = self.ys.iter().rposition(|&y| y == best).unwrap_or(0);
        (self.xs[first], self.xs[last])
    }

    fn max(&self) -> f64 {
        self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `a ↦ max{f(b) : |b − a| ≤ delta, b ∈ [−1, 1]}` plus `slope · a`.
    fn window_max_plus(&self, delta: f64, slope: f64) -> Concave {
        let best = self.max();
        let first = self.ys.iter().position(|&y| y == best).unwrap_or(0);
        let last = self.ys.iter().rposition(|&y| y == best).unwrap_or(0);

        let mut xs = Vec::with_capacity(self.xs.len() + 2);
        let mut ys = Vec::with_capacity(self.xs.len() + 2);
        for k in 0..=first {
            xs.push(self.xs[k] - delta);
            ys.push(self.ys[k]);
        }
        for k in last..self.xs.len() {
            let x = self.xs[k] + delta;
            // a zero shift leaves the plateau ends coincident
            if k == last && xs.last() == Some(&x) {
                continue;
            }
            xs.push(x);
            ys.push(self.ys[k]);
        }
        let (xs, ys) = clip_to_box(&xs, &ys);
        let ys = xs.iter().zip(ys).map(|(x, y)| y + slope * x).collect();
        Concave { xs, ys }
    }
}

fn interpolate(x0: f64, y0: f64, x1: f64, y1: f64, x: f64) -> f64 {
    if x1 == x0 {
        return y0.max(y1);
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Restrict a piecewise-linear function whose breakpoints cover `[−1, 1]`.
fn clip_to_box(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut out_x = Vec::with_capacity(xs.len());
    let mut out_y = Vec::with_capacity(xs.len());
    let start = xs.iter().rposition(|&x| x <= -1.0).unwrap_or(0);
    let end = xs.iter().position(|&x| x >= 1.0).unwrap_or(xs.len() - 1);
    out_x.push(-1.0);
    out_y.push(if xs[start] == -1.0 || start + 1 >= xs.len() {
        ys[start]
    } else {
        interpolate(xs[start], ys[start], xs[start + 1], ys[start + 1], -1.0)
    });
    for k in start + 1..end {
        if xs[k] > -1.0 && xs[k] < 1.0 {
            out_x.push(xs[k]);
            out_y.push(ys[k]);
        }
    }
    out_x.push(1.0);
    out_y.push(if xs[end] == 1.0 || end == 0 {
        ys[end]
    } else {
        interpolate(xs[end - 1], ys[end - 1], xs[end], ys[end], 1.0)
    });
    (out_x, out_y)
}

/// Globally optimal solution of a chain LP. Among optimal solutions the
/// smallest value is taken at the last node, and then at each earlier node
/// given the later ones, so the output is deterministic.
pub fn solve_chain_lp(lp: &ChainLp) -> LpSolution {
    let n = lp.len();
    let deltas: Vec<f64> = lp.nodes.windows(2).map(|w| lp.lipschitz * (w[1] - w[0])).collect();

    let mut plateaus = Vec::with_capacity(n);
    let mut v = Concave::linear(lp.weights[0]);
    for i in 1..n {
        plateaus.push(v.argmax());
        v = v.window_max_plus(deltas[i - 1], lp.weights[i]);
    }

    let mut values = vec![0.0; n];
    values[n - 1] = v.argmax().0;
    for i in (1..n).rev() {
        let (lo, hi) = plateaus[i - 1];
        let (a, d) = (values[i], deltas[i - 1]);
        let prev = if a + d < lo {
            a + d
        } else if a - d > hi {
            a - d
        } else {
            lo.max(a - d)
        };
        values[i - 1] = prev.clamp(-1.0, 1.0);
    }
    let objective = lp.objective(&values);
    LpSolution { values, objective }
}

/// Two-sample LV-TVD: nodes are the merged sorted points, with weight `1/Nx`
/// for each X point and `−1/Ny` for each Y point.
pub fn lvtvd_two_sample(sx: &SortedSample, sy: &SortedSample, l: f64) -> Result<LpSolution> {
    if sx.is_empty() || sy.is_empty() {
        return Err(Error::DegenerateInput("two-sample LV-TVD needs two nonempty samples".into()));
    }
    let (wx, wy) = (1.0 / sx.len() as f64, -1.0 / sy.len() as f64);
    let (x, y) = (sx.values(), sy.values());
    let mut nodes = Vec::with_capacity(x.len() + y.len());
    let mut weights = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i] <= y[j]) {
            nodes.push(x[i]);
            weights.push(wx);
            i += 1;
        } else {
            nodes.push(y[j]);
            weights.push(wy);
            j += 1;
        }
    }
    Ok(solve_chain_lp(&ChainLp::new(nodes, weights, 0.0, l)?))
}

/// Chain LP comparing the empirical law of `sz` with the uniform law on
/// `[a, b]`. The test function is the linear interpolant of the node values,
/// held constant outside `[Z_1, Z_N]`, so its uniform mean is a trapezoid sum.
pub fn one_sided_uniform_lp(sz: &SortedSample, a: f64, b: f64, l: f64) -> Result<ChainLp> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    let z = sz.values();
    if let Some(&bad) = z.iter().find(|&&v| v < a || v > b) {
        return Err(Error::Domain(format!("sample value {bad} outside [{a}, {b}]")));
    }
    let n = z.len();
    let width = b - a;
    let mut weights = vec![1.0 / n as f64; n];
    weights[0] -= (z[0] - a) / width;
    weights[n - 1] -= (b - z[n - 1]) / width;
    for i in 0..n - 1 {
        let half = 0.5 * (z[i + 1] - z[i]) / width;
        weights[i] -= half;
        weights[i + 1] -= half;
    }
    ChainLp::new(z.to_vec(), weights, 0.0, l)
}

pub fn lvtvd_one_sided_uniform(sz: &SortedSample, a: f64, b: f64, l: f64) -> Result<LpSolution> {
    Ok(solve_chain_lp(&one_sided_uniform_lp(sz, a, b, l)?))
}

/// `{hi · 2k/M : k = 1..M/2}` with each value twice. For `hi = ½` this is the
/// multiset of halfspace depths of a sample of size `M` in itself.
pub fn refined_uniform_sample(m: usize, hi: f64) -> Result<SortedSample> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::Domain(format!("refined sample size must be even and at least 2, got {m}")));
    }
    if !(hi.is_finite() && hi > 0.0) {
        return Err(Error::InvalidParameter(format!("upper end must be positive, got {hi}")));
    }
    let values = (1..=m / 2)
        .flat_map(|k| {
            let v = hi * (2 * k) as f64 / m as f64;
            [v, v]
        })
        .collect();
    SortedSample::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SortedSample {
        SortedSample::from_unsorted(v.to_vec()).unwrap()
    }

    #[test]
    fn trivial_programs() {
        let lp = ChainLp::new(vec![0.0, 1.0, 2.0], vec![0.0; 3], 0.6, 1.0).unwrap();
        assert_eq!(solve_chain_lp(&lp).objective, 0.3);
        let lp = ChainLp::new(vec![3.0], vec![0.25], 0.1, 1.0).unwrap();
        let s = solve_chain_lp(&lp);
        assert_eq!(s.values, vec![1.0]);
        assert!((s.objective - 0.175).abs() < 1e-15);
    }

    #[test]
    fn two_point_samples() {
        let s = lvtvd_two_sample(&sample(&[0.0]), &sample(&[1.0]), 4.0).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-15);
        assert_eq!(s.values, vec![1.0, -1.0]);
        // slope binds: |a1 − a2| ≤ 0.5
        let s = lvtvd_two_sample(&sample(&[0.0]), &sample(&[1.0]), 0.5).unwrap();
        assert!((s.objective - 0.25).abs() < 1e-15);
        let x = sample(&[0.1, 0.5, 0.9]);
        assert!(lvtvd_two_sample(&x, &x, 20.0).unwrap().objective.abs() < 1e-15);
    }

    #[test]
    fn ties_force_equal_values() {
        let lp = ChainLp::new(vec![0.0, 0.0, 1.0], vec![1.0, -1.0, 0.5], 0.0, 3.0).unwrap();
        let s = solve_chain_lp(&lp);
        assert_eq!(s.values[0], s.values[1]);
        assert!((s.objective - 0.25).abs() < 1e-15);
    }

    #[test]
    fn refined_grid() {
        assert_eq!(refined_uniform_sample(4, 0.5).unwrap().values(), &[0.25, 0.25, 0.5, 0.5]);
        assert!(matches!(refined_uniform_sample(5, 0.5), Err(Error::Domain(_))));
        assert!(refined_uniform_sample(0, 0.5).is_err());
    }

    #[test]
    fn one_sided_domain_checked() {
        let z = sample(&[0.1, 0.6]);
        assert!(matches!(lvtvd_one_sided_uniform(&z, 0.0, 0.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn one_sided_all_mass_at_top() {
        // N = 2 at b = ½: weights (1/2 − 1, 1/2), the two nodes tie
        let z = sample(&[0.5, 0.5]);
        let s = lvtvd_one_sided_uniform(&z, 0.0, 0.5, 100.0).unwrap();
        assert!(s.objective.abs() < 1e-15, "{s:?}");
    }

    #[test]
    fn debug_text_roundtrip() {
        let lp = ChainLp::new(vec![-0.3, 0.1, 0.1], vec![0.5, -1.0 / 3.0, 0.2], 0.125, 4.0).unwrap();
        let text = lp.to_debug_text();
        assert!(text.starts_with("l 4 offset 0.125\n"));
        assert_eq!(ChainLp::from_debug_text(&text).unwrap(), lp);
        assert!(ChainLp::from_debug_text("l 1\n0 1\n").is_err());
    }
}
