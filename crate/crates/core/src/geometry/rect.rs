//! Axis-aligned boxes in R^{n+1}.

use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl Rect {
    /// Box with `lo <= hi` componentwise; degenerate (face) boxes are allowed.
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.n() != hi.n() {
            return Err(Error::DimensionMismatch { left: lo.dim(), right: hi.dim() });
        }
        if (0..lo.dim()).any(|a| !(lo[a] <= hi[a])) {
            return Err(Error::InvalidParameter(format!("box corners {lo:?} > {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn from_slices(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(Point::from_f64(lo), Point::from_f64(hi))
    }

    /// The cube `[-r, r]^{n+1}`.
    pub fn centered_cube(n: usize, r: f64) -> Self {
        let lo = Point::from_f64(&vec![-r; n + 1]);
        Self { lo, hi: lo.scale(-1.0) }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn n(&self) -> usize {
        self.lo.n()
    }

    pub fn extent(&self, a: usize) -> f64 {
        self.hi[a] - self.lo[a]
    }

    pub fn center(&self) -> Point {
        (self.lo + self.hi).scale(0.5)
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.extent(a)).product()
    }

    pub fn diam(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= x[a] && x[a] <= self.hi[a])
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    /// Closed boxes share at least one point.
    pub fn intersects(&self, other: &Rect) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= other.hi[a] && other.lo[a] <= self.hi[a])
    }

    /// Nearest point of the closed box.
    pub fn clamp(&self, x: &Point) -> Point {
        let mut p = *x;
        for a in 0..self.dim() {
            p[a] = p[a].clamp(self.lo[a], self.hi[a]);
        }
        p
    }

    /// Euclidean distance from `x` to the closed box (0 inside).
    pub fn distance(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim() {
            let d = (self.lo[a] - x[a]).max(x[a] - self.hi[a]).max(0.0);
            s += d * d;
        }
        s.sqrt()
    }

    /// Distance between two closed boxes.
    pub fn distance_to_rect(&self, other: &Rect) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim() {
            let d = (self.lo[a] - other.hi[a]).max(other.lo[a] - self.hi[a]).max(0.0);
            s += d * d;
        }
        s.sqrt()
    }

    /// Largest distance from `x` to a point of the box.
    pub fn max_distance(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for a in 0..self.dim() {
            let d = (x[a] - self.lo[a]).abs().max((self.hi[a] - x[a]).abs());
            s += d * d;
        }
        s.sqrt()
    }

    /// Box scaled about its center by `factor`.
    pub fn expanded(&self, factor: f64) -> Rect {
        let c = self.center();
        let half = (self.hi - self.lo).scale(0.5 * factor);
        Rect { lo: c - half, hi: c + half }
    }

    /// The corners, `2^{n+1}` of them.
    pub fn corners(&self) -> Vec<Point> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                let mut p = self.lo;
                for a in 0..d {
                    if mask & (1 << a) != 0 {
                        p[a] = self.hi[a];
                    }
                }
                p
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_distances() {
        let r = Rect::from_slices(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.distance(&Point::from_f64(&[0.5, 1.0])), 0.0);
        assert_eq!(r.distance(&Point::from_f64(&[4.0, 6.0])), 5.0);
        assert_eq!(r.clamp(&Point::from_f64(&[-1.0, 1.0])).to_vec_f64(), vec![0.0, 1.0]);
        assert!((r.max_distance(&Point::from_f64(&[0.0, 0.0])) - 5f64.sqrt()).abs() < 1e-15);
        assert!(Rect::from_slices(&[1.0, 0.0], &[0.0, 1.0]).is_err());
    }
}
