//! Calibration solids with smooth or piecewise-flat boundaries.

use super::{CellBox, Point, Rect, Shape};
use crate::error::{Error, Result};

/// Closed ball of radius `radius` centred at the origin of R^{n+1}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub n: usize,
    pub radius: f64,
}

impl Ball {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || n < 1 {
            return Err(Error::InvalidParameter(format!("ball needs n >= 1 and radius > 0, got {n}, {radius}")));
        }
        Ok(Self { n, radius })
    }

    pub fn unit(n: usize) -> Self {
        Self { n, radius: 1.0 }
    }
}

impl Shape for Ball {
    fn n(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &Point) -> bool {
        x.norm() <= self.radius
    }

    fn nearest_boundary(&self, x: &Point) -> (f64, Point) {
        let r = x.norm();
        let p = if r > 0.0 { x.scale(self.radius / r) } else { Point::axis(self.n, 0).scale(self.radius) };
        ((r - self.radius).abs(), p)
    }

    fn cell_meets_boundary(&self, cell: &CellBox) -> bool {
        let origin = Point::zero(self.n);
        let rect = cell.rect();
        let near = rect.distance(&origin);
        let far = rect.max_distance(&origin);
        let all_closed = (0..cell.dim()).all(|a| cell.closed_hi[a]);
        near <= self.radius && (self.radius < far || (all_closed && self.radius <= far))
    }

    fn bounding_box(&self) -> Rect {
        Rect::centered_cube(self.n, self.radius)
    }

    fn circumradius(&self) -> f64 {
        self.radius
    }

    fn describe(&self) -> String {
        format!("ball(n={}, r={})", self.n, self.radius)
    }
}

/// Closed axis-aligned box as a solid; its boundary is the union of its faces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolidBox {
    pub rect: Rect,
}

impl SolidBox {
    pub fn new(rect: Rect) -> Result<Self> {
        if (0..rect.dim()).any(|a| !(rect.extent(a) > 0.0)) {
            return Err(Error::InvalidParameter("solid box needs positive extents".into()));
        }
        Ok(Self { rect })
    }

    /// `[0, 1]^{n+1}`.
    pub fn unit(n: usize) -> Self {
        let lo = Point::zero(n);
        let hi = Point::from_f64(&vec![1.0; n + 1]);
        Self { rect: Rect { lo, hi } }
    }
}

impl Shape for SolidBox {
    fn n(&self) -> usize {
        self.rect.n()
    }

    fn contains(&self, x: &Point) -> bool {
        self.rect.contains(x)
    }

    fn nearest_boundary(&self, x: &Point) -> (f64, Point) {
        let r = &self.rect;
        if !r.contains(x) {
            return (r.distance(x), r.clamp(x));
        }
        let mut best = (f64::INFINITY, *x);
        for a in 0..r.dim() {
            for face in [r.lo[a], r.hi[a]] {
                let d = (x[a] - face).abs();
                if d < best.0 {
                    let mut p = *x;
                    p[a] = face;
                    best = (d, p);
                }
            }
        }
        best
    }

    fn cell_meets_boundary(&self, cell: &CellBox) -> bool {
        cell.meets_closed(&self.rect) && !cell.inside_open(&self.rect)
    }

    fn bounding_box(&self) -> Rect {
        self.rect
    }

    fn describe(&self) -> String {
        format!("box({:?}..{:?})", self.rect.lo, self.rect.hi)
    }
}
