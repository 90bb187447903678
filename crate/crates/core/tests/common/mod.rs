//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting; `None` when
/// the system is singular.
#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Best value of `½ (Σ c_i a_i + offset)` over the vertices of
/// `{a ∈ [−1, 1]^N : |a_{i+1} − a_i| ≤ l (Z_{i+1} − Z_i)}`, found by solving
/// every choice of N tight constraints out of the 4N − 2.
pub fn brute_force_chain_lp(nodes: &[f64], weights: &[f64], offset: f64, l: f64) -> f64 {
    let n = nodes.len();
    // rows (coefficients, rhs) of G a ≤ h
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e.clone(), 1.0));
        e[i] = -1.0;
        rows.push((e, 1.0));
    }
    for i in 0..n - 1 {
        let d = l * (nodes[i + 1] - nodes[i]);
        let mut e = vec![0.0; n];
        e[i + 1] = 1.0;
        e[i] = -1.0;
        rows.push((e.clone(), d));
        rows.push((e.iter().map(|v| -v).collect(), d));
    }
    let mut best = f64::NEG_INFINITY;
    combinations(rows.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&k| rows[k].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&k| rows[k].1).collect();
        if let Some(x) = solve_dense(a, b) {
            let feasible = rows
                .iter()
                .all(|(g, h)| g.iter().zip(&x).map(|(gi, xi)| gi * xi).sum::<f64>() <= h + 1e-9);
            if feasible {
                let v: f64 = weights.iter().zip(&x).map(|(c, a)| c * a).sum();
                best = best.max(0.5 * (v + offset));
            }
        }
    });
    best
}

/// Random chain LP with 1..=max_nodes nodes; nodes on a coarse grid so ties
/// (zero gaps) occur.
pub fn random_chain_lp(rng: &mut TestRng, max_nodes: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let n = 1 + rng.below(max_nodes);
    let mut nodes: Vec<f64> = (0..n).map(|_| (rng.range(0.0, 1.0) * 8.0).floor() / 8.0).collect();
    nodes.sort_by(f64::total_cmp);
    let weights = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
    let offset = rng.range(-0.5, 0.5);
    (nodes, weights, offset)
}

/// Kolmogorov-Smirnov statistic of `sorted` against the cdf `f`.
pub fn ks_statistic(sorted: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fx = f(x);
            (fx - i as f64 / n).abs().max(((i + 1) as f64 / n - fx).abs())
        })
        .fold(0.0, f64::max)
}
