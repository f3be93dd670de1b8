//! `T^k_Ω u(x) = (-1)^k ∫_Ω E^k(y - x) u(y) dV` over the cells of a density field.

use serde::{Deserialize, Serialize};

use super::density::{sub_center, DensityField};
use super::quadrature::{duffy_box, tensor_box};
use crate::clifford::{BladeIndex, Multivector};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::kernels::{dirac_fd_power, PolyKernel};
use crate::scalar::par_chunked_fold;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Pyramid rule on the cell containing `x`, adaptive Gauss on its neighbours.
    Corrected,
    /// Midpoint rule everywhere; the cell containing `x` contributes nothing.
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub rule: QuadratureRule,
    /// Chebyshev radius, in cells, of the neighbourhood handled by Gauss rules.
    pub near_cells: usize,
    pub gauss_order: usize,
    pub singular_order: usize,
    /// Use the sub-cell values of a refined density on cells within four cells of `S`.
    pub refine_near_boundary: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::Corrected,
            near_cells: 2,
            gauss_order: 4,
            singular_order: 6,
            refine_near_boundary: true,
        }
    }
}

impl QuadratureOptions {
    pub fn midpoint() -> Self {
        Self { rule: QuadratureRule::Midpoint, ..Self::default() }
    }
}

const MAX_SPLIT: u32 = 4;

#[derive(Clone, Debug)]
struct NearBox {
    rect: Rect,
    slot: usize,
}

/// Quadrature layout fixed by an anchor point; reused for nearby evaluations
/// so that finite differences see one smooth function.
#[derive(Clone, Debug)]
pub struct Plan {
    /// Centre of the (possibly virtual) grid cell holding the anchor.
    center: Point,
    /// Far cells are those whose centre is at least this far from `center` in max-norm.
    skip_radius: f64,
    near: Vec<NearBox>,
    singular: Option<(usize, Rect)>,
}

/// `T^k` over a density field.
pub struct Teodorescu<'f, 'a> {
    field: &'f DensityField<'a>,
    k: usize,
    kernel: PolyKernel<f64>,
    opts: QuadratureOptions,
}

impl<'f, 'a> Teodorescu<'f, 'a> {
    pub fn new(field: &'f DensityField<'a>, k: usize, opts: QuadratureOptions) -> Result<Self> {
        let kernel = PolyKernel::new(field.n(), k)?;
        if opts.gauss_order == 0 || opts.singular_order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
        }
        Ok(Self { field, k, kernel, opts })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &'f DensityField<'a> {
        self.field
    }

    pub fn plan(&self, anchor: &Point) -> Result<Plan> {
        let grid = &self.field.domain.grid;
        let m = grid.dim();
        if anchor.dim() != m {
            return Err(Error::DimensionMismatch { left: m, right: anchor.dim() });
        }
        let h = grid.h;
        let mut idx = [0i64; 9];
        let mut center = *anchor;
        for a in 0..m {
            idx[a] = ((anchor[a] - grid.bounds.lo[a]) / h).floor() as i64;
            if anchor[a] == grid.bounds.hi[a] {
                idx[a] -= 1;
            }
            center[a] = grid.bounds.lo[a] + (idx[a] as f64 + 0.5) * h;
        }
        let radius = match self.opts.rule {
            QuadratureRule::Corrected => self.opts.near_cells as i64,
            QuadratureRule::Midpoint => 0,
        };
        let mut plan = Plan { center, skip_radius: (radius as f64 + 0.5) * h, near: Vec::new(), singular: None };
        let side = (2 * radius + 1) as usize;
        let mut off = [0usize; 9];
        let mut cell_idx = [0usize; 9];
        'window: for w in 0..side.pow(m as u32) {
            let mut rem = w;
            for a in (0..m).rev() {
                off[a] = rem % side;
                rem /= side;
            }
            for a in 0..m {
                let i = idx[a] + off[a] as i64 - radius;
                if i < 0 || i >= grid.counts[a] as i64 {
                    continue 'window;
                }
                cell_idx[a] = i as usize;
            }
            let lin = grid.linear(&cell_idx[..m]);
            let Some(slot) = self.field.slot_of(lin) else { continue };
            let rect = grid.cell_of(&cell_idx[..m]).rect();
            let is_anchor = (0..m).all(|a| off[a] as i64 == radius);
            match self.opts.rule {
                QuadratureRule::Midpoint => {}
                QuadratureRule::Corrected if is_anchor && rect.contains(anchor) => plan.singular = Some((slot, rect)),
                QuadratureRule::Corrected => split_near(&rect, slot, anchor, 0, &mut plan.near),
            }
        }
        Ok(plan)
    }

    /// Evaluation with the plan anchored at `x`.
    pub fn eval(&self, x: &Point) -> Result<Multivector<f64>> {
        let plan = self.plan(x)?;
        self.eval_planned(&plan, x)
    }

    pub fn eval_planned(&self, plan: &Plan, x: &Point) -> Result<Multivector<f64>> {
        let f = self.field;
        let n = f.n();
        if x.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: x.n() });
        }
        if f.is_zero() {
            return Ok(Multivector::zero(n));
        }
        let grid = &f.domain.grid;
        let m = grid.dim();
        let h = grid.h;
        let width = f.width;
        let vol = grid.cell_volume();
        let refine = self.opts.refine_near_boundary && f.is_refined();
        let sub_vol = vol / (1u32 << m) as f64;
        let all: Vec<usize> = (0..width).collect();
        let size = m * width;

        let (mut acc, mut bad) = par_chunked_fold(
            f.cells.len(),
            || (vec![0.0; size], false),
            |(acc, bad), i| {
                let c = &f.centers[i * m..(i + 1) * m];
                let mut cheb: f64 = 0.0;
                for a in 0..m {
                    cheb = cheb.max((c[a] - plan.center[a]).abs());
                }
                if cheb < plan.skip_radius {
                    return;
                }
                if refine && f.sub_slot[i] != u32::MAX {
                    let base = f.sub_slot[i] as usize;
                    for corner in 0..(1usize << m) {
                        let y = sub_center(c, corner, h);
                        let u = &f.sub_values[(base + corner) * width..(base + corner + 1) * width];
                        *bad |= !self.add_point(&y, x, sub_vol, u, &f.blades, acc);
                    }
                } else {
                    let mut d = [0.0; 9];
                    let mut r2 = 0.0;
                    for a in 0..m {
                        d[a] = c[a] - x[a];
                        r2 += d[a] * d[a];
                    }
                    *bad |= !self.add_raw(&d[..m], r2, vol, &f.values[i * width..(i + 1) * width], &f.blades, acc);
                }
            },
            |(mut a, bad_a), (b, bad_b)| {
                for (p, q) in a.iter_mut().zip(&b) {
                    *p += q;
                }
                (a, bad_a || bad_b)
            },
        );
        let mut buf = vec![0.0; width];
        for nb in &plan.near {
            if nb.rect.distance(x) < nb.rect.extent(0) {
                bad |= !self.add_box_adaptive(&nb.rect, nb.slot, x, &mut buf, &mut acc);
                continue;
            }
            tensor_box(&nb.rect, self.opts.gauss_order, |y, w| {
                f.value_into(nb.slot, y, &mut buf);
                bad |= !self.add_point(y, x, w, &buf, &all, &mut acc);
            });
        }
        if let Some((slot, rect)) = &plan.singular {
            bad |= !self.add_box_adaptive(rect, *slot, x, &mut buf, &mut acc);
        }
        if bad {
            return Err(Error::Singularity);
        }
        let sign = if self.k % 2 == 1 { -1.0 } else { 1.0 };
        let mut out = Multivector::zero(n);
        for (j, block) in acc.chunks(width).enumerate() {
            let part = Multivector::from_coeffs(n, block.to_vec())?;
            if j == 0 {
                part.add_scaled_into(sign, &mut out);
            } else {
                part.left_blade_acc(BladeIndex::generator(j), sign, &mut out);
            }
        }
        Ok(out)
    }

    /// Duffy rule about `x` when the box holds it, dyadic splitting towards `x` otherwise.
    fn add_box_adaptive(&self, rect: &Rect, slot: usize, x: &Point, buf: &mut [f64], acc: &mut [f64]) -> bool {
        let f = self.field;
        let all: Vec<usize> = (0..f.width).collect();
        let mut ok = true;
        if rect.contains(x) {
            let tpow = x.dim() as i32 - 1;
            duffy_box(rect, x, self.opts.singular_order, |y, w, t| {
                if *y == *x {
                    return;
                }
                f.value_into(slot, y, buf);
                self.add_point(y, x, w * t.powi(tpow), buf, &all, acc);
            });
            return ok;
        }
        let mut boxes = Vec::new();
        split_near(rect, slot, x, 0, &mut boxes);
        for nb in &boxes {
            if nb.rect.contains(x) {
                ok &= self.add_box_adaptive(&nb.rect, nb.slot, x, buf, acc);
                continue;
            }
            tensor_box(&nb.rect, self.opts.gauss_order, |y, w| {
                f.value_into(nb.slot, y, buf);
                ok &= self.add_point(y, x, w, buf, &all, acc);
            });
        }
        ok
    }

    #[inline]
    fn add_point(&self, y: &Point, x: &Point, w: f64, u: &[f64], blades: &[usize], acc: &mut [f64]) -> bool {
        let m = x.dim();
        let mut d = [0.0; 9];
        let mut r2 = 0.0;
        for a in 0..m {
            d[a] = y[a] - x[a];
            r2 += d[a] * d[a];
        }
        self.add_raw(&d[..m], r2, w, u, blades, acc)
    }

    /// `acc[j][b] += w E^k_j(d) u_b`; false when `d = 0`.
    #[inline]
    fn add_raw(&self, d: &[f64], r2: f64, w: f64, u: &[f64], blades: &[usize], acc: &mut [f64]) -> bool {
        if r2 == 0.0 {
            return false;
        }
        let width = u.len();
        let s = self.kernel.radial_factor(d[0], r2) * w;
        for (j, &dj) in d.iter().enumerate() {
            let e = if j == 0 { s * dj } else { -s * dj };
            let row = &mut acc[j * width..(j + 1) * width];
            for &b in blades {
                row[b] += e * u[b];
            }
        }
        true
    }

    /// Finite-difference `D^times (T^k u)` at `x` with step `h/8` and the plan anchored at `x`.
    pub fn dirac_fd(&self, x: &Point, times: usize) -> Result<Multivector<f64>> {
        let plan = self.plan(x)?;
        let step = self.field.domain.grid.h / 8.0;
        dirac_fd_power(&|y: &Point| self.eval_planned(&plan, y), x, step, times)
    }
}

fn split_near(rect: &Rect, slot: usize, x: &Point, depth: u32, out: &mut Vec<NearBox>) {
    let edge = rect.extent(0);
    if depth >= MAX_SPLIT || rect.distance(x) >= edge {
        out.push(NearBox { rect: *rect, slot });
        return;
    }
    let m = rect.dim();
    let mid = rect.center();
    for corner in 0..(1usize << m) {
        let mut lo = rect.lo;
        let mut hi = rect.hi;
        for a in 0..m {
            if (corner >> a) & 1 == 1 {
                lo[a] = mid[a];
            } else {
                hi[a] = mid[a];
            }
        }
        split_near(&Rect { lo, hi }, slot, x, depth + 1, out);
    }
}

/// `T_Ω u(x)`.
pub fn teodorescu(u: &DensityField<'_>, x: &Point) -> Result<Multivector<f64>> {
    poly_teodorescu(u, 1, x)
}

/// `T^k_Ω u(x)` with default quadrature.
pub fn poly_teodorescu(u: &DensityField<'_>, k: usize, x: &Point) -> Result<Multivector<f64>> {
    Teodorescu::new(u, k, QuadratureOptions::default())?.eval(x)
}
