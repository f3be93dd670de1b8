//! Far-field decay, Hölder ratios and probe reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::teodorescu::{QuadratureOptions, Teodorescu};
use super::DensityField;
use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::metrics::ols;

/// Directions sampled on each decay sphere.
pub const DECAY_DIRECTIONS: usize = 64;

/// `count` unit vectors in R^{n+1}: evenly spaced on the circle, seeded uniform otherwise.
pub fn unit_directions(n: usize, count: usize, seed: u64) -> Vec<Point> {
    if n == 1 {
        return (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                Point::from_f64(&[a.cos(), a.sin()])
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = Point::from_f64(&v);
        let r = p.norm();
        if r > 1e-3 && r <= 1.0 {
            out.push(p.scale(1.0 / r));
        }
    }
    out
}

/// Radius of the smallest origin-centred ball containing every cell of the field.
pub fn field_circumradius(u: &DensityField<'_>) -> f64 {
    let grid = &u.domain().grid;
    let m = grid.dim();
    let half = 0.5 * grid.h;
    u.centers
        .chunks(m)
        .map(|c| c.iter().map(|v| (v.abs() + half).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub r: f64,
    pub max_abs: f64,
}

/// `max |T^k u|` over [`DECAY_DIRECTIONS`] points of each sphere `|x| = r`.
pub fn decay_probe_order(u: &DensityField<'_>, k: usize, radii: &[f64]) -> Result<Vec<DecaySample>> {
    let rho = field_circumradius(u);
    let t = Teodorescu::new(u, k, QuadratureOptions::default())?;
    let dirs = unit_directions(u.n(), DECAY_DIRECTIONS, 0);
    radii
        .iter()
        .map(|&r| {
            if !(r > rho) {
                return Err(Error::InvalidParameter(format!("radius {r} inside the domain (circumradius {rho:.4})")));
            }
            let mut max_abs: f64 = 0.0;
            for d in &dirs {
                max_abs = max_abs.max(t.eval(&d.scale(r))?.norm());
            }
            Ok(DecaySample { r, max_abs })
        })
        .collect()
}

/// `max |T u|` on spheres of the given radii.
pub fn decay_probe(u: &DensityField<'_>, radii: &[f64]) -> Result<Vec<DecaySample>> {
    decay_probe_order(u, 1, radii)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub p: f64,
    /// `(p - n - 1) / p`.
    pub exponent: f64,
    /// `(|x - y|, ratio)` per pair.
    pub ratios: Vec<(f64, f64)>,
    pub max_ratio: f64,
    /// Log-log slope of ratio against pair distance; positive or flat means no growth as pairs shrink.
    pub trend: Option<f64>,
}

/// Ratios `|Tu(x) - Tu(y)| / |x - y|^{(p-n-1)/p}`.
pub fn holder_probe(u: &DensityField<'_>, pairs: &[(Point, Point)], p: f64) -> Result<HolderReport> {
    let n = u.n();
    if !(p > (n + 1) as f64) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed n + 1 = {}", n + 1)));
    }
    let exponent = (p - n as f64 - 1.0) / p;
    let t = Teodorescu::new(u, 1, QuadratureOptions::default())?;
    let mut ratios = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        let d = x.dist(y);
        if d == 0.0 {
            return Err(Error::InvalidParameter("coincident pair points".into()));
        }
        let diff = &t.eval(x)? - &t.eval(y)?;
        ratios.push((d, diff.norm() / d.powf(exponent)));
    }
    let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let pos: Vec<&(f64, f64)> = ratios.iter().filter(|r| r.1 > 0.0).collect();
    let trend = if pos.len() >= 2 {
        let xs: Vec<f64> = pos.iter().map(|r| r.0.ln()).collect();
        let ys: Vec<f64> = pos.iter().map(|r| r.1.ln()).collect();
        ols(&xs, &ys).ok().map(|f| f.slope)
    } else {
        None
    };
    Ok(HolderReport { p, exponent, ratios, max_ratio, trend })
}

/// One evaluation in a probe report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub x: Vec<f64>,
    pub value: Multivector<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// Evaluates `T^k u` at each probe; a failed evaluation is recorded as a zero value with a diagnostic.
pub fn probe_report(u: &DensityField<'_>, k: usize, probes: &[Point]) -> Result<Vec<ProbeRecord>> {
    let t = Teodorescu::new(u, k, QuadratureOptions::default())?;
    Ok(probes
        .iter()
        .map(|x| match t.eval(x) {
            Ok(value) => ProbeRecord { x: x.to_vec_f64(), value, diagnostics: Vec::new() },
            Err(e) => ProbeRecord { x: x.to_vec_f64(), value: Multivector::zero(u.n()), diagnostics: vec![e.to_string()] },
        })
        .collect())
}
