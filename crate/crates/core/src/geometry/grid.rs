//! Dyadic grids `M_k` with cell edge `2^{-k}`.
//!
//! Cells are half-open `[i h, (i + 1) h)` except the last cell along each axis,
//! which is closed so that the grid partitions its closed bounds.

use serde::{Deserialize, Serialize};

use super::{Point, Rect};
use crate::clifford::MAX_AXES;
use crate::error::{Error, Result};

/// Default cap on the number of cells in a materialised grid.
pub const DEFAULT_MAX_CELLS: usize = 1 << 26;

/// Cell cap, overridable through `CLIFFRAC_MAX_CELLS`.
pub fn max_cells() -> usize {
    std::env::var("CLIFFRAC_MAX_CELLS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

/// One grid cell with per-axis closedness of its upper faces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBox {
    pub lo: Point,
    pub hi: Point,
    pub closed_hi: [bool; MAX_AXES],
}

impl CellBox {
    pub fn rect(&self) -> Rect {
        Rect { lo: self.lo, hi: self.hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    /// The `2^{dim}` children one level finer, in mask order.
    pub fn children(&self) -> impl Iterator<Item = CellBox> + '_ {
        let d = self.dim();
        let mid = (self.lo + self.hi).scale(0.5);
        (0..1usize << d).map(move |mask| {
            let mut c = *self;
            for a in 0..d {
                if mask & (1 << a) != 0 {
                    c.lo[a] = mid[a];
                } else {
                    c.hi[a] = mid[a];
                    c.closed_hi[a] = false;
                }
            }
            c
        })
    }

    /// Whether the cell (with its half-open convention) meets the closed box `b`.
    pub fn meets_closed(&self, b: &Rect) -> bool {
        (0..self.dim()).all(|a| {
            self.lo[a] <= b.hi[a] && (b.lo[a] < self.hi[a] || (self.closed_hi[a] && b.lo[a] <= self.hi[a]))
        })
    }

    /// Whether the cell lies inside the open box `(b.lo, b.hi)`.
    pub fn inside_open(&self, b: &Rect) -> bool {
        (0..self.dim()).all(|a| {
            b.lo[a] < self.lo[a] && (self.hi[a] < b.hi[a] || (!self.closed_hi[a] && self.hi[a] <= b.hi[a]))
        })
    }
}

/// Uniform dyadic grid over snapped bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub k: u32,
    pub h: f64,
    pub bounds: Rect,
    pub counts: Vec<usize>,
}

impl Grid {
    /// Snaps `bounds` outward to multiples of `h = 2^{-k}`; a degenerate axis gets one cell.
    pub fn new(bounds: &Rect, k: u32) -> Self {
        let h = (-(k as f64)).exp2();
        let mut lo = bounds.lo;
        let mut hi = bounds.hi;
        let mut counts = Vec::with_capacity(bounds.dim());
        for a in 0..bounds.dim() {
            let l = (bounds.lo[a] / h).floor();
            let mut u = (bounds.hi[a] / h).ceil();
            if u <= l {
                u = l + 1.0;
            }
            lo[a] = l * h;
            hi[a] = u * h;
            counts.push((u - l) as usize);
        }
        Self { k, h, bounds: Rect { lo, hi }, counts }
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> usize {
        self.dim() - 1
    }

    pub fn cell_count(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).product()
    }

    pub fn check_cap(&self, cap: usize) -> Result<usize> {
        let cells = self.cell_count();
        if cells > cap as u128 {
            return Err(Error::GridTooLarge { cells, cap });
        }
        Ok(cells as usize)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    /// Row-major linear index, last axis fastest.
    pub fn linear(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn unravel(&self, mut lin: usize, idx: &mut [usize]) {
        for a in (0..self.dim()).rev() {
            idx[a] = lin % self.counts[a];
            lin /= self.counts[a];
        }
    }

    pub fn cell_of(&self, idx: &[usize]) -> CellBox {
        let mut lo = self.bounds.lo;
        let mut hi = self.bounds.lo;
        let mut closed_hi = [false; MAX_AXES];
        for a in 0..self.dim() {
            lo[a] = self.bounds.lo[a] + idx[a] as f64 * self.h;
            hi[a] = lo[a] + self.h;
            closed_hi[a] = idx[a] + 1 == self.counts[a];
        }
        CellBox { lo, hi, closed_hi }
    }

    pub fn cell(&self, lin: usize) -> CellBox {
        let mut idx = [0usize; MAX_AXES];
        self.unravel(lin, &mut idx[..self.dim()]);
        self.cell_of(&idx[..self.dim()])
    }

    pub fn center(&self, lin: usize) -> Point {
        let mut idx = [0usize; MAX_AXES];
        self.unravel(lin, &mut idx[..self.dim()]);
        let mut c = self.bounds.lo;
        for a in 0..self.dim() {
            c[a] = self.bounds.lo[a] + (idx[a] as f64 + 0.5) * self.h;
        }
        c
    }

    /// Per-axis cell indices of `x` under the half-open convention; `None` outside.
    pub fn locate_index(&self, x: &Point) -> Option<[usize; MAX_AXES]> {
        let mut idx = [0usize; MAX_AXES];
        for a in 0..self.dim() {
            let t = (x[a] - self.bounds.lo[a]) / self.h;
            if t < 0.0 || x[a] > self.bounds.hi[a] {
                return None;
            }
            idx[a] = (t.floor() as usize).min(self.counts[a] - 1);
        }
        Some(idx)
    }

    pub fn locate(&self, x: &Point) -> Option<usize> {
        self.locate_index(x).map(|idx| self.linear(&idx[..self.dim()]))
    }
}
