//! Inner neighbourhood volume of the family solid, evaluated level by level.
//!
//! Inside a rectangle the distance to `S` is the distance to its faces other
//! than the bottom; inside `Q` it is the distance to the side and bottom faces
//! or to the part of the top face outside the open footprints. Both erosions
//! have closed forms except the region just under the footprints, which is a
//! one-dimensional integral per level.

use super::exponent::{ExponentEstimate, ExponentMethod, ExponentSide};
use super::scaling::{loglog_fit, CurveKind, ScalingCurve};
use crate::error::{Error, Result};
use crate::geometry::{FractalSurface, Level};
use crate::transforms::gauss_legendre;

const PANELS: usize = 64;
const NODES: usize = 4;

/// `|{x ∈ T : dist(x, S) < t}|` for `0 < t < 1/4`.
pub fn family_inner_volume(surface: &FractalSurface, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 0.25) {
        return Err(Error::InvalidParameter(format!("t = {t} outside (0, 1/4)")));
    }
    let n = surface.spec().n as i32;
    let mut total = 1.0;
    let mut eroded = (1.0 - 2.0 * t).powi(n) * (1.0 - 2.0 * t);
    for lv in surface.levels() {
        let bn = lv.base.powi(n);
        total += lv.count * lv.c * bn;
        eroded += lv.count
            * (lv.c - 2.0 * t).max(0.0)
            * (lv.base - 2.0 * t).max(0.0).powi(n - 1)
            * (lv.base - t).max(0.0);
        eroded += under_footprints(lv, n, t);
    }
    Ok(total - eroded)
}

/// Sum over `j` of the in-plane length `|(y_j - C + s, y_j - s) ∩ [t, 1 - t]|`.
fn axis0_length(lv: &Level, s: f64, t: f64) -> f64 {
    let width = lv.c - 2.0 * s;
    if width <= 0.0 {
        return 0.0;
    }
    let piece = |j: f64| -> f64 {
        if j < 1.0 || j > lv.count {
            return 0.0;
        }
        let y = lv.y(j);
        ((y - s).min(1.0 - t) - (y - lv.c + s).max(t)).max(0.0)
    };
    // indices whose piece is the full width: y_j >= t + C - s and y_j <= 1 - t + s
    let j_lo = ((t + lv.c - s - lv.base) / lv.a).ceil().max(1.0);
    let j_hi = ((1.0 - t + s - lv.base) / lv.a).floor().min(lv.count);
    if j_hi < j_lo {
        let mut sum = 0.0;
        let mut j = j_hi.max(1.0) - 1.0;
        while j <= j_lo + 1.0 {
            sum += piece(j);
            j += 1.0;
        }
        return sum;
    }
    (j_hi - j_lo + 1.0) * width + piece(j_lo - 1.0) + piece(j_hi + 1.0)
}

/// Volume of `{x ∈ Q : -t < x_n <= 0, proj(x) in a footprint eroded by sqrt(t² - x_n²)}`.
fn under_footprints(lv: &Level, n: i32, t: f64) -> f64 {
    if 2.0 * lv.base <= t {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(NODES);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let dtheta = half_pi / PANELS as f64;
    let mut sum = 0.0;
    for p in 0..PANELS {
        let a = p as f64 * dtheta;
        for (x, w) in nodes.iter().zip(&weights) {
            // x_n = -t cos θ, s = t sin θ, dx_n = t sin θ dθ
            let theta = a + 0.5 * dtheta * (x + 1.0);
            let s = t * theta.sin();
            let l0 = axis0_length(lv, s, t);
            if l0 == 0.0 {
                continue;
            }
            let l1 = (lv.base - s - s.max(t)).max(0.0);
            sum += w * 0.5 * dtheta * t * theta.sin() * l0 * l1.powi(n - 1);
        }
    }
    sum
}

/// Staircase period of the family volume in octaves of `t`: `α(1 + β)`.
pub fn staircase_period(surface: &FractalSurface) -> f64 {
    let s = surface.spec();
    s.alpha * (1.0 + s.beta)
}

/// Inner exponent from the exact volume over `t = 2^{-j}`, `j = j_min..=j_max`.
pub fn family_inner_exponent(surface: &FractalSurface, j_min: u32, j_max: u32) -> Result<ExponentEstimate> {
    if j_max < j_min + 3 || j_min < 3 {
        return Err(Error::InvalidParameter(format!("bad octave window {j_min}..={j_max}")));
    }
    let mut samples = Vec::new();
    for j in j_min..=j_max {
        let t = (-(j as f64)).exp2();
        samples.push((t, family_inner_volume(surface, t)?));
    }
    let curve = ScalingCurve { kind: CurveKind::Volume, samples };
    let fit = loglog_fit(&curve)?;
    let mut notes = vec![format!("exact family volume over t = 2^-{j_min}..2^-{j_max}")];
    let deepest = surface.levels().last().map(|l| l.c).unwrap_or(1.0);
    if deepest > (-(j_max as f64)).exp2() {
        notes.push("truncation level coarser than the smallest t".into());
    }
    Ok(ExponentEstimate {
        side: ExponentSide::Inner,
        value: fit.slope,
        method: ExponentMethod::VolumeSlope,
        stderr: fit.slope_stderr,
        window: (curve.samples.last().unwrap().0, curve.samples[0].0),
        notes,
    })
}

/// Truncation depth whose thinnest rectangles are below `2^{-j_max}`.
pub fn levels_for_octaves(alpha: f64, beta: f64, j_max: u32) -> u32 {
    let per_level = alpha * (1.0 + beta.floor());
    ((j_max as f64 + 2.0) / per_level).ceil() as u32 + 2
}
