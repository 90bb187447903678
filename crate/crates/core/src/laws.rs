//! Laws of depth values evaluated at a point drawn from one distribution
//! (`outer`) against another distribution (`inner`), e.g. `HD(Y; P)` with
//! `Y ~ Q`: outer = Q, inner = P.
//!
//! With `G = F_outer ∘ F_inner⁻¹` and `ρ(u) = f_outer(F_inner⁻¹(u)) / f_inner(F_inner⁻¹(u))`:
//!
//! | kind | cdf | pdf |
//! |------|-----|-----|
//! | HD | `1 + G(z) − G(1 − z)` | `ρ(z) + ρ(1 − z)` |
//! | SD | `1 − G(½ + s) + G(½ − s)`, `s = √(¼ − z/2)` | `(ρ(½ − s) + ρ(½ + s)) / (2√(1 − 2z))` |
//! | QT | `G(z)` | `ρ(z)` |
//!
//! Quantile levels strictly inside (0, 1) are clamped to `[1e-12, 1 − 1e-12]`
//! before inversion; levels exactly 0 or 1 use the inner support endpoints, so
//! endpoint cdf values are exact limits.

use crate::depth::DepthKind;
use crate::distributions::ContinuousDistribution;
use crate::error::{Error, Result};

/// Clamp applied to quantile levels before inversion.
pub const LEVEL_CLAMP: f64 = 1e-12;

/// Inner densities below this make the density ratio a singularity.
pub const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct CrossDepthLaw {
    kind: DepthKind,
    outer: ContinuousDistribution,
    inner: ContinuousDistribution,
}

impl CrossDepthLaw {
    /// `kind` must be halfspace, simplicial or quantile.
    pub fn new(kind: DepthKind, outer: ContinuousDistribution, inner: ContinuousDistribution) -> Result<Self> {
        if let DepthKind::Kernel(_) = kind {
            return Err(Error::InvalidParameter(
                "cross-distribution laws are defined for hd, sd and qt only".into(),
            ));
        }
        outer.validate()?;
        inner.validate()?;
        Ok(CrossDepthLaw { kind, outer, inner })
    }

    pub fn kind(&self) -> DepthKind {
        self.kind
    }

    pub fn outer(&self) -> &ContinuousDistribution {
        &self.outer
    }

    pub fn inner(&self) -> &ContinuousDistribution {
        &self.inner
    }

    pub fn support(&self) -> (f64, f64) {
        self.kind.support()
    }

    /// Law of the same depth evaluated at a draw from its own reference:
    /// U(0, ½) for HD, the SD reference law for SD, U(0, 1) for QT.
    pub fn reference_law(&self) -> ContinuousDistribution {
        match self.kind {
            DepthKind::Halfspace => ContinuousDistribution::UniformInterval { lo: 0.0, hi: 0.5 },
            DepthKind::Simplicial => ContinuousDistribution::SdReference,
            _ => ContinuousDistribution::UniformInterval { lo: 0.0, hi: 1.0 },
        }
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        match self.kind {
            DepthKind::Halfspace => hd_cross_cdf(&self.outer, &self.inner, z),
            DepthKind::Simplicial => sd_cross_cdf(&self.outer, &self.inner, z),
            _ => qt_cross_cdf(&self.outer, &self.inner, z),
        }
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        match self.kind {
            DepthKind::Halfspace => hd_cross_pdf(&self.outer, &self.inner, z),
            DepthKind::Simplicial => sd_cross_pdf(&self.outer, &self.inner, z),
            _ => qt_cross_pdf(&self.outer, &self.inner, z),
        }
    }

    /// `pdf(z) / reference_pdf(z)`. Bounded where `pdf` is singular only
    /// through the shared SD prefactor, so it is usable up to `z = ½`.
    pub fn reference_ratio(&self, z: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(z > lo && z <= hi) {
            return Err(Error::Domain(format!("ratio evaluated at {z}, outside ({lo}, {hi}]")));
        }
        match self.kind {
            DepthKind::Halfspace => {
                Ok(0.5 * (density_ratio(&self.outer, &self.inner, z)? + density_ratio(&self.outer, &self.inner, 1.0 - z)?))
            }
            DepthKind::Simplicial => {
                let w = sd_lower_level(z);
                Ok(0.5 * (density_ratio(&self.outer, &self.inner, w)? + density_ratio(&self.outer, &self.inner, 1.0 - w)?))
            }
            _ => density_ratio(&self.outer, &self.inner, z),
        }
    }

    /// `lim F(z)` as `z` approaches the top of the support from below. Falls
    /// short of 1 only for QT, when the outer law has mass above the inner
    /// support (that mass sits in an atom at 1).
    pub fn cdf_below_top(&self) -> f64 {
        match self.kind {
            DepthKind::Quantile => composed_cdf(&self.outer, &self.inner, 1.0).clamp(0.0, 1.0),
            _ => 1.0,
        }
    }

    /// Same law built from `(a·outer + b, a·inner + b)`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        CrossDepthLaw::new(self.kind, self.outer.affine(scale, shift)?, self.inner.affine(scale, shift)?)
    }
}

fn inner_quantile(inner: &ContinuousDistribution, u: f64) -> f64 {
    if u <= 0.0 {
        inner.quantile_unchecked(0.0)
    } else if u >= 1.0 {
        inner.quantile_unchecked(1.0)
    } else {
        inner.quantile_unchecked(u.clamp(LEVEL_CLAMP, 1.0 - LEVEL_CLAMP))
    }
}

// G(u) = F_outer(F_inner⁻¹(u))
fn composed_cdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, u: f64) -> f64 {
    outer.cdf(inner_quantile(inner, u))
}

/// `ρ(u) = f_outer(F_inner⁻¹(u)) / f_inner(F_inner⁻¹(u))`.
pub fn density_ratio(outer: &ContinuousDistribution, inner: &ContinuousDistribution, u: f64) -> Result<f64> {
    let x = inner_quantile(inner, u);
    let denom = inner.pdf(x);
    if denom.is_nan() || denom < DENSITY_FLOOR {
        return Err(Error::Singularity {
            at: u,
            detail: format!("inner density {denom:e} at x={x} underflows"),
        });
    }
    Ok(outer.pdf(x) / denom)
}

// ½ − √(¼ − z/2), rationalised to avoid cancellation for small z
fn sd_lower_level(z: f64) -> f64 {
    let s = (0.25 - 0.5 * z).max(0.0).sqrt();
    0.5 * z / (0.5 + s)
}

fn check_range(z: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&z) {
        return Err(Error::Domain(format!("depth level {z} outside [0, {hi}]")));
    }
    Ok(())
}

fn check_open(z: f64, hi: f64) -> Result<()> {
    if !(z > 0.0 && z < hi) {
        return Err(Error::Domain(format!("density evaluated at {z}, outside (0, {hi})")));
    }
    Ok(())
}

pub fn hd_cross_cdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_range(z, 0.5)?;
    if z == 0.5 {
        return Ok(1.0);
    }
    let v = 1.0 + composed_cdf(outer, inner, z) - composed_cdf(outer, inner, 1.0 - z);
    Ok(v.clamp(0.0, 1.0))
}

pub fn hd_cross_pdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_open(z, 0.5)?;
    Ok(density_ratio(outer, inner, z)? + density_ratio(outer, inner, 1.0 - z)?)
}

pub fn sd_cross_cdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_range(z, 0.5)?;
    if z == 0.5 {
        return Ok(1.0);
    }
    let w = sd_lower_level(z);
    let v = 1.0 - composed_cdf(outer, inner, 1.0 - w) + composed_cdf(outer, inner, w);
    Ok(v.clamp(0.0, 1.0))
}

/// Carries the `1 / (2√(1 − 2z))` prefactor, so `z` must stay below ½.
pub fn sd_cross_pdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_open(z, 0.5)?;
    let gap = 1.0 - 2.0 * z;
    if gap <= f64::EPSILON {
        return Err(Error::Singularity {
            at: z,
            detail: "simplicial density diverges at z = 1/2".into(),
        });
    }
    let w = sd_lower_level(z);
    let sum = density_ratio(outer, inner, w)? + density_ratio(outer, inner, 1.0 - w)?;
    Ok(sum / (2.0 * gap.sqrt()))
}

pub fn qt_cross_cdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_range(z, 1.0)?;
    if z == 1.0 {
        return Ok(1.0);
    }
    Ok(composed_cdf(outer, inner, z).clamp(0.0, 1.0))
}

pub fn qt_cross_pdf(outer: &ContinuousDistribution, inner: &ContinuousDistribution, z: f64) -> Result<f64> {
    check_open(z, 1.0)?;
    density_ratio(outer, inner, z)
}
