//! Globally adaptive Simpson quadrature and sign-change bracketing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

struct Segment {
    a: f64,
    b: f64,
    // f at a, a+h/4, a+h/2, a+3h/4, b
    f: [f64; 5],
    value: f64,
    error: f64,
}

impl Segment {
    fn new(a: f64, b: f64, fa: f64, fm: f64, fb: f64, g: &impl Fn(f64) -> f64) -> Segment {
        let m = 0.5 * (a + b);
        let fl = g(0.5 * (a + m));
        let fr = g(0.5 * (m + b));
        let h = b - a;
        let coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        let fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let diff = fine - coarse;
        Segment {
            a,
            b,
            f: [fa, fl, fm, fr, fb],
            value: fine + diff / 15.0,
            error: diff.abs() / 15.0,
        }
    }

    fn split(&self, g: &impl Fn(f64) -> f64) -> (Segment, Segment) {
        let m = 0.5 * (self.a + self.b);
        let [fa, fl, fm, fr, fb] = self.f;
        (
            Segment::new(self.a, m, fa, fl, fm, g),
            Segment::new(m, self.b, fm, fr, fb, g),
        )
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // largest error first; ties broken by position for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, seeding one segment per
/// consecutive pair of breakpoints and repeatedly bisecting the segment with the
/// largest error estimate until the summed estimate is at most `abs_tol`.
pub fn integrate_pieces(
    f: impl Fn(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if breaks.len() < 2 {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            let s = Segment::new(a, b, f(a), f(0.5 * (a + b)), f(b), &f);
            heap.push(s);
        }
    }
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    let mut count = heap.len();

    while total_error > abs_tol {
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // cannot refine further in floating point
            total_error -= worst.error;
            done.push(worst);
            continue;
        }
        if count + 1 > max_subdivisions {
            heap.push(worst);
            let estimate: f64 = heap.iter().chain(done.iter()).map(|s| s.error).sum();
            return Err(Error::NonConvergence {
                estimate,
                tolerance: abs_tol,
                subdivisions: count,
            });
        }
        let (l, r) = worst.split(&f);
        total_error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        count += 1;
        if count % 64 == 0 {
            total_error = heap.iter().chain(done.iter()).map(|s| s.error).sum();
        }
    }

    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(done);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = neumaier_sum(segments.iter().map(|s| s.value));
    let error_estimate = segments.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error_estimate,
        subdivisions: count,
    })
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Integral> {
    integrate_pieces(f, &[a, b], abs_tol, max_subdivisions)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Three-way sign with an exact zero class.
pub fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Brackets `(lo, hi)` of width at most `tol` around each point in
/// `(grid[0], grid[last])` where the sign class of `g` changes. `g(lo)` keeps
/// the class on the left of the change and `g(hi)` the class on the right.
/// Sign changes inside a single cell that cancel out are not seen, so the grid
/// must resolve the features of `g`.
pub fn sign_change_brackets(
    g: impl Fn(f64) -> Result<f64>,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut brackets = Vec::new();
    if grid.len() < 2 {
        return Ok(brackets);
    }
    let mut prev_t = grid[0];
    let mut prev_s = sign(g(prev_t)?);
    for &t in &grid[1..] {
        let s = sign(g(t)?);
        if s != prev_s {
            let (mut lo, mut hi) = (prev_t, t);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sign(g(mid)?) == prev_s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            brackets.push((lo, hi));
        }
        prev_t = t;
        prev_s = s;
    }
    Ok(brackets)
}

/// Midpoints of [`sign_change_brackets`].
pub fn sign_changes(g: impl Fn(f64) -> Result<f64>, grid: &[f64], tol: f64) -> Result<Vec<f64>> {
    Ok(sign_change_brackets(g, grid, tol)?
        .into_iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect())
}
