//! Jump verification: paired one-sided limits at boundary samples, far-field decay and
//! a finite-difference polymonogenicity check.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve::SolutionField;
use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::{Point, Shape};
use crate::metrics::Side;
use crate::transforms::{decay_probe_order, field_circumradius};
use crate::whitney::assemble_bold_f;

/// Half-width, in cells, of the lattice used for the smoothed normal.
const NORMAL_HALF_WIDTH: i64 = 3;

/// Largest admissible ratio `max|D^i Φ|(2r) / max|D^i Φ|(r)`.
pub const DECAY_LIMIT: f64 = 0.75;

/// Outward direction at `y` from a Gaussian-weighted gradient of the signed distance
/// sampled on a lattice of spacing `h`.
pub fn outward_normal(shape: &dyn Shape, y: &Point, h: f64) -> Result<Point> {
    let m = y.dim();
    let side = (2 * NORMAL_HALF_WIDTH + 1) as usize;
    let sigma = 1.5 * h;
    let mut num = vec![0.0; m];
    let mut den = vec![0.0; m];
    let mut off = vec![0i64; m];
    for w in 0..side.pow(m as u32) {
        let mut rem = w;
        for a in (0..m).rev() {
            off[a] = (rem % side) as i64 - NORMAL_HALF_WIDTH;
            rem /= side;
        }
        let mut x = *y;
        let mut r2 = 0.0;
        for a in 0..m {
            let d = off[a] as f64 * h;
            x[a] += d;
            r2 += d * d;
        }
        let weight = (-r2 / (2.0 * sigma * sigma)).exp();
        let (dist, _) = shape.nearest_boundary(&x);
        let sd = if shape.contains(&x) { -dist } else { dist };
        for a in 0..m {
            let d = off[a] as f64 * h;
            num[a] += weight * d * sd;
            den[a] += weight * d * d;
        }
    }
    let g: Vec<f64> = num.iter().zip(&den).map(|(a, b)| a / b).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Unresolvable(format!("no distance gradient at {:?}", y.to_vec_f64())));
    }
    Ok(Point::from_f64(&g.iter().map(|v| v / norm).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeSelection {
    /// This many carrier samples in seeded random order, skipping unresolvable ones.
    Count(usize),
    /// Carrier samples by index; an unresolvable one is an error.
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub probes: ProbeSelection,
    /// Approach offset; defaults to four cells.
    pub eps: Option<f64>,
    pub seed: u64,
    /// Largest admissible error relative to the jet scale.
    pub tolerance: f64,
    pub decay: bool,
    /// Points at which `D^k Φ` is differenced.
    pub monogenic_checks: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            probes: ProbeSelection::Count(50),
            eps: None,
            seed: 0,
            tolerance: 0.05,
            decay: true,
            monogenic_checks: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpProbe {
    pub y: Vec<f64>,
    pub i: usize,
    /// `2 J(ε) - J(2ε)` with `J(ε) = D^iΦ(y - ε ν̂) - D^iΦ(y + ε ν̂)`.
    pub jump: Multivector<f64>,
    pub target: Multivector<f64>,
    pub abs_err: f64,
    /// `abs_err` over the jet scale of row `i`.
    pub rel_err: f64,
    /// `J(ε)` before extrapolation.
    pub jump_eps: Multivector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub i: usize,
    pub r: f64,
    pub max_abs_r: f64,
    pub max_abs_2r: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSummary {
    /// Largest relative error over all probes and rows.
    pub max_err: f64,
    pub median_err: f64,
    /// `max_p |f^(i)_bold(p)|` per row, 1 for an all-zero row.
    pub jet_scale: Vec<f64>,
    pub decay: Vec<DecayRow>,
    pub requested: usize,
    pub resolved: usize,
    pub skipped: usize,
    /// Largest `|D^k Φ|` from finite differences, relative to the density scale.
    pub monogenic_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpConfig {
    pub depth: u32,
    pub eps: f64,
    pub side: Side,
    pub n: usize,
    pub k: usize,
    pub nu: f64,
    pub tolerance: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub probes: Vec<JumpProbe>,
    pub summary: JumpSummary,
    pub config: JumpConfig,
}

struct Pair {
    index: usize,
    y: Point,
    normal: Point,
}

fn resolve(sol: &SolutionField<'_>, index: usize, eps: f64) -> Result<Pair> {
    let setup = sol.setup();
    let shape = setup.shape.as_ref();
    let grid = &setup.domain.grid;
    let y = setup.spec.jet.points()[index];
    let normal = outward_normal(shape, &y, grid.h)?;
    for e in [eps, 2.0 * eps] {
        let inside = y - normal.scale(e);
        let outside = y + normal.scale(e);
        let (ci, co) = (grid.locate(&inside), grid.locate(&outside));
        if ci.is_none() || co.is_none() {
            return Err(Error::Unresolvable(format!("pair at {:?} leaves the grid", y.to_vec_f64())));
        }
        if ci == co {
            return Err(Error::Unresolvable(format!("pair at {:?} shares one cell", y.to_vec_f64())));
        }
        if !shape.contains(&inside) || shape.contains(&outside) {
            return Err(Error::Unresolvable(format!("pair at {:?} does not straddle S", y.to_vec_f64())));
        }
    }
    Ok(Pair { index, y, normal })
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Checks `D^iΦ⁺ - D^iΦ⁻ = f^(i)_bold` at carrier samples for `0 <= i <= k - 1`.
pub fn verify_jump(sol: &SolutionField<'_>, opts: &VerifyOptions) -> Result<JumpReport> {
    let setup = sol.setup();
    let spec = &setup.spec;
    let h = setup.h();
    let k = spec.k;
    let eps = opts.eps.unwrap_or(4.0 * h);
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    let jet = &spec.jet;
    let (pairs, requested, skipped) = match &opts.probes {
        ProbeSelection::Indices(idx) => {
            let pairs = idx
                .iter()
                .map(|&i| {
                    if i >= jet.len() {
                        return Err(Error::OutOfRange { index: i as i64, range: format!("0..{}", jet.len()) });
                    }
                    resolve(sol, i, eps)
                })
                .collect::<Result<Vec<_>>>()?;
            (pairs, idx.len(), 0)
        }
        ProbeSelection::Count(count) => {
            let mut order: Vec<usize> = (0..jet.len()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
            let mut pairs = Vec::with_capacity(*count);
            let mut skipped = 0;
            for i in order {
                if pairs.len() == *count {
                    break;
                }
                match resolve(sol, i, eps) {
                    Ok(p) => pairs.push(p),
                    Err(Error::Unresolvable(_)) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            (pairs, *count, skipped)
        }
    };
    if pairs.is_empty() && requested > 0 {
        return Err(Error::Unresolvable(format!("no boundary sample resolvable at eps = {eps}")));
    }

    let bold: Vec<Vec<Multivector<f64>>> = (0..k).map(|i| assemble_bold_f(jet, i)).collect::<Result<_>>()?;
    let jet_scale: Vec<f64> = bold
        .iter()
        .map(|row| {
            let s = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..pairs.len()).flat_map(|p| (0..k).map(move |i| (p, i))).collect();
    let probes: Vec<JumpProbe> = tasks
        .par_iter()
        .map(|&(p, i)| {
            let pair = &pairs[p];
            let jump_at = |e: f64| -> Result<Multivector<f64>> {
                let plus = sol.dirac_power(i, &(pair.y - pair.normal.scale(e)))?;
                let minus = sol.dirac_power(i, &(pair.y + pair.normal.scale(e)))?;
                Ok(&plus - &minus)
            };
            let j1 = jump_at(eps)?;
            let j2 = jump_at(2.0 * eps)?;
            let jump = &j1.scale(2.0) - &j2;
            let target = bold[i][pair.index].clone();
            let abs_err = jump.distance(&target);
            Ok(JumpProbe {
                y: pair.y.to_vec_f64(),
                i,
                jump,
                target,
                abs_err,
                rel_err: abs_err / jet_scale[i],
                jump_eps: j1,
            })
        })
        .collect::<Result<_>>()?;

    let decay = if opts.decay { decay_table(sol)? } else { Vec::new() };
    let monogenic_residual = if opts.monogenic_checks > 0 {
        Some(monogenic_residual(sol, &pairs, opts.monogenic_checks, &jet_scale)?)
    } else {
        None
    };

    let mut errs: Vec<f64> = probes.iter().map(|p| p.rel_err).collect();
    let max_err = errs.iter().copied().fold(0.0, f64::max);
    let median_err = median(&mut errs);
    let passed = max_err <= opts.tolerance && decay.iter().all(|d| d.ratio <= DECAY_LIMIT);
    Ok(JumpReport {
        probes,
        summary: JumpSummary {
            max_err,
            median_err,
            jet_scale,
            decay,
            requested,
            resolved: pairs.len(),
            skipped,
            monogenic_residual,
            passed,
        },
        config: JumpConfig {
            depth: setup.depth,
            eps,
            side: setup.side(),
            n: jet.n(),
            k,
            nu: spec.nu,
            tolerance: opts.tolerance,
            seed: opts.seed,
        },
    })
}

/// `max |D^i Φ|` on origin spheres of radius `r` and `2r`, `r` at least four diameters of the solid.
fn decay_table(sol: &SolutionField<'_>) -> Result<Vec<DecayRow>> {
    let setup = sol.setup();
    let k = setup.spec.k;
    let density = sol.density();
    let mut r = 4.0 * setup.shape.bounding_box().diam();
    if !density.cells().is_empty() {
        r = r.max(1.01 * field_circumradius(density));
    }
    (0..k)
        .map(|i| {
            let (a, b) = if density.is_zero() {
                (0.0, 0.0)
            } else {
                let s = decay_probe_order(density, k - i, &[r, 2.0 * r])?;
                (s[0].max_abs, s[1].max_abs)
            };
            let ratio = if a > 0.0 { b / a } else { 0.0 };
            Ok(DecayRow { i, r, max_abs_r: a, max_abs_2r: b, ratio })
        })
        .collect()
}

/// Largest `|D^k_fd Φ|` at cell centres about six cells off `S` along the probe normals, relative
/// to the density scale (or the top jet row when the density vanishes).
fn monogenic_residual(sol: &SolutionField<'_>, pairs: &[Pair], count: usize, jet_scale: &[f64]) -> Result<f64> {
    let setup = sol.setup();
    let h = setup.h();
    let k = setup.spec.k;
    let shape = setup.shape.as_ref();
    let mut points = Vec::new();
    for pair in pairs {
        for s in [-1.0, 1.0] {
            let grid = &setup.domain.grid;
            let Some(lin) = grid.locate(&(pair.y + pair.normal.scale(s * 6.0 * h))) else { continue };
            let x = grid.center(lin);
            if points.len() < count && shape.distance(&x) > 3.0 * h {
                points.push(x);
            }
        }
    }
    let scale = match sol.density().sup_norm() {
        s if s > 0.0 => s,
        _ => jet_scale[k - 1],
    };
    let res: Vec<f64> =
        points.par_iter().map(|x| sol.dirac_fd_power(x, k).map(|v| v.norm())).collect::<Result<_>>()?;
    Ok(res.into_iter().fold(0.0, f64::max) / scale)
}
