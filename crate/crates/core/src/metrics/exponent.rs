//! Neighbourhood volumes, the integral `I_p` and Marcinkiewicz exponent estimates.

use serde::{Deserialize, Serialize};

use super::scaling::{loglog_fit, CurveKind, ScalingCurve};
use crate::error::{Error, Result};
use crate::geometry::{Label, Shape, VoxelDomain};
use crate::scalar::par_tree_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Ω⁺`.
    Inner,
    /// `Ω* = Ω⁻ ∩ B(0, r)`.
    Outer,
}

/// Cells of one side of a voxel domain.
#[derive(Clone, Copy, Debug)]
pub struct SideRegion<'a> {
    pub domain: &'a VoxelDomain,
    pub side: Side,
    /// Radius of the ball truncating `Ω⁻`; unused for the inner side.
    pub r_star: f64,
}

/// Default `Ω*` radius: twice the diameter of the solid.
pub fn default_outer_radius(shape: &dyn Shape) -> f64 {
    2.0 * shape.bounding_box().diam()
}

impl<'a> SideRegion<'a> {
    pub fn inner(domain: &'a VoxelDomain) -> Self {
        Self { domain, side: Side::Inner, r_star: f64::INFINITY }
    }

    pub fn outer(domain: &'a VoxelDomain, r_star: f64) -> Self {
        Self { domain, side: Side::Outer, r_star }
    }

    pub fn new(domain: &'a VoxelDomain, side: Side, shape: &dyn Shape) -> Self {
        match side {
            Side::Inner => Self::inner(domain),
            Side::Outer => Self::outer(domain, default_outer_radius(shape)),
        }
    }

    #[inline]
    pub fn includes(&self, lin: usize) -> bool {
        let l = self.domain.labels[lin];
        match self.side {
            Side::Inner => l == Label::Interior as u8 || l == Label::BoundaryIn as u8,
            Side::Outer => {
                (l == Label::Exterior as u8 || l == Label::BoundaryOut as u8)
                    && self.domain.center(lin).norm() < self.r_star
            }
        }
    }

    /// The grid does not cover the whole of `B(0, r_star)`.
    pub fn truncated(&self) -> bool {
        if self.side == Side::Inner {
            return false;
        }
        let b = &self.domain.grid.bounds;
        (0..b.dim()).any(|a| b.lo[a] > -self.r_star || b.hi[a] < self.r_star)
    }

    /// Distances of the side's cells, sorted ascending.
    pub fn sorted_distances(&self) -> Vec<f32> {
        let mut d: Vec<f32> = (0..self.domain.len())
            .filter(|&lin| self.includes(lin))
            .map(|lin| self.domain.dist[lin])
            .collect();
        d.sort_by(|a, b| a.total_cmp(b));
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeSample {
    pub t: f64,
    pub volume: f64,
    /// `t` is below one cell edge, so the value is dominated by discretisation.
    pub below_resolution: bool,
}

/// `V(t) = |{x ∈ Ω^side : dist(x, S) < t}|` as a sum of cell volumes.
pub fn neighborhood_volume(region: &SideRegion<'_>, t: f64) -> Result<VolumeSample> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    let d = region.sorted_distances();
    Ok(volume_from_sorted(region.domain, &d, t))
}

fn volume_from_sorted(domain: &VoxelDomain, sorted: &[f32], t: f64) -> VolumeSample {
    let count = sorted.partition_point(|&x| (x as f64) < t);
    VolumeSample {
        t,
        volume: count as f64 * domain.grid.cell_volume(),
        below_resolution: t < domain.grid.h,
    }
}

/// `V(t)` at `t = 2^j h` for `j = 0..len`, returned with decreasing `t`.
pub fn volume_curve(region: &SideRegion<'_>, len: usize) -> Result<ScalingCurve> {
    let d = region.sorted_distances();
    let h = region.domain.grid.h;
    let mut samples = Vec::with_capacity(len);
    for j in (0..len).rev() {
        let t = h * (j as f64).exp2();
        let v = volume_from_sorted(region.domain, &d, t);
        samples.push((t, v.volume));
    }
    let curve = ScalingCurve { kind: CurveKind::Volume, samples };
    curve.validate()?;
    Ok(curve)
}

/// Truncated `I_p = Σ cellVol / dist(centre)^p` over side cells that do not meet `S`.
pub fn marcinkiewicz_integral(region: &SideRegion<'_>, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 0")));
    }
    let dom = region.domain;
    let vol = dom.grid.cell_volume();
    Ok(par_tree_sum(dom.len(), |lin| {
        let l = dom.labels[lin];
        if Label::from_u8(l).map(|l| l.is_boundary()).unwrap_or(true) || !region.includes(lin) {
            0.0
        } else {
            vol / (dom.dist[lin] as f64).powf(p)
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMethod {
    VolumeSlope,
    IpSweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentSide {
    Inner,
    Outer,
    Absolute,
}

impl From<Side> for ExponentSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Inner => ExponentSide::Inner,
            Side::Outer => ExponentSide::Outer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub side: ExponentSide,
    pub value: f64,
    pub method: ExponentMethod,
    pub stderr: f64,
    /// `(t_min, t_max)` of the volume fit, or the two depths of a sweep.
    pub window: (f64, f64),
    /// Diagnostics: poor power-law fit, outer ball truncated by the grid, …
    pub notes: Vec<String>,
}

/// Number of dyadic radii in the volume fit.
pub const VOLUME_WINDOW: usize = 4;

/// Fit `V(t) ~ t^γ` over `t ∈ {h, 2h, 4h, 8h}` and report `γ`.
pub fn marcinkiewicz_exponent(region: &SideRegion<'_>) -> Result<ExponentEstimate> {
    let curve = volume_curve(region, VOLUME_WINDOW)?;
    let fit = loglog_fit(&curve)?;
    let mut notes = Vec::new();
    if fit.slope_stderr > 0.05 {
        notes.push(format!("poor power-law fit: stderr {:.3}", fit.slope_stderr));
    }
    if region.truncated() {
        notes.push("outer ball not covered by the grid".into());
    }
    let value = fit.slope;
    if !(0.0..=(region.domain.n() + 1) as f64).contains(&value) {
        notes.push(format!("slope {value:.3} outside [0, n+1]"));
    }
    Ok(ExponentEstimate {
        side: region.side.into(),
        value,
        method: ExponentMethod::VolumeSlope,
        stderr: fit.slope_stderr,
        window: (curve.samples.last().unwrap().0, curve.samples[0].0),
        notes,
    })
}

/// Growth rate `log2(I_p(fine) / I_p(coarse)) / Δk`.
fn growth_rate(coarse: &SideRegion<'_>, fine: &SideRegion<'_>, p: f64) -> Result<f64> {
    let dk = fine.domain.grid.k as f64 - coarse.domain.grid.k as f64;
    let a = marcinkiewicz_integral(coarse, p)?;
    let b = marcinkiewicz_integral(fine, p)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InsufficientData("empty side region".into()));
    }
    Ok((b / a).log2() / dk)
}

/// Sweep on `p`: find `p*` where the cross-depth growth rate of `I_p` equals `delta`
/// and report `p* - delta` (for `V(t) ~ t^γ` the rate is `p - γ` once `p > γ`).
pub fn ip_sweep(coarse: &SideRegion<'_>, fine: &SideRegion<'_>, delta: f64) -> Result<ExponentEstimate> {
    if fine.domain.grid.k <= coarse.domain.grid.k {
        return Err(Error::InvalidParameter("ip_sweep needs two increasing depths".into()));
    }
    let top = (coarse.domain.n() + 2) as f64;
    let (mut lo, mut hi) = (0.0, top);
    if growth_rate(coarse, fine, lo)? > delta || growth_rate(coarse, fine, hi)? < delta {
        return Err(Error::InsufficientData("growth rate does not bracket delta".into()));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if growth_rate(coarse, fine, mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut notes = Vec::new();
    if coarse.truncated() {
        notes.push("outer ball not covered by the grid".into());
    }
    Ok(ExponentEstimate {
        side: coarse.side.into(),
        value: 0.5 * (lo + hi) - delta,
        method: ExponentMethod::IpSweep,
        stderr: hi - lo,
        window: (coarse.domain.grid.k as f64, fine.domain.grid.k as f64),
        notes,
    })
}

/// `m = max(m⁺, m⁻)`.
pub fn absolute_exponent(inner: &ExponentEstimate, outer: &ExponentEstimate) -> ExponentEstimate {
    let pick = if inner.value >= outer.value { inner } else { outer };
    let mut notes = pick.notes.clone();
    notes.push(format!("inner {:.4}, outer {:.4}", inner.value, outer.value));
    ExponentEstimate { side: ExponentSide::Absolute, notes, ..pick.clone() }
}
