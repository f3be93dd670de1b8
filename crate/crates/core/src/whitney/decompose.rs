//! Whitney decomposition of `bounds \ E` into dyadic cubes.

use super::kdtree::KdTree;
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

/// The closed set `E` off which the decomposition is built.
#[derive(Clone, Debug)]
pub enum Carrier {
    Points(KdTree),
    /// A closed box.
    Region(Rect),
}

impl Carrier {
    pub fn points(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("empty carrier".into()));
        }
        Ok(Carrier::Points(KdTree::new(points)))
    }

    pub fn region(r: Rect) -> Self {
        Carrier::Region(r)
    }

    pub fn distance(&self, x: &Point) -> f64 {
        match self {
            Carrier::Points(t) => t.nearest(x).map(|p| p.1).unwrap_or(f64::INFINITY),
            Carrier::Region(r) => r.distance(x),
        }
    }

    pub fn distance_to_rect(&self, q: &Rect) -> f64 {
        match self {
            Carrier::Points(t) => t.nearest_to_rect(q).map(|p| p.1).unwrap_or(f64::INFINITY),
            Carrier::Region(r) => r.distance_to_rect(q),
        }
    }

    /// Index of the nearest carrier point; `None` for a region.
    pub fn nearest(&self, x: &Point) -> Option<(usize, f64)> {
        match self {
            Carrier::Points(t) => t.nearest(x),
            Carrier::Region(_) => None,
        }
    }

    /// `q ⊂ E`.
    fn covers(&self, q: &Rect) -> bool {
        match self {
            Carrier::Points(_) => false,
            Carrier::Region(r) => r.contains_rect(q),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WhitneyCube {
    pub cell: Rect,
    pub level: u32,
    /// Nearest carrier point to the cube centre, lowest index on ties.
    pub anchor: Option<usize>,
    /// Edge length.
    pub scale: f64,
    /// At the depth limit and closer to `E` than its diameter.
    pub collar: bool,
}

/// Dyadic cubes obtained by bisecting the smallest cube containing `bounds`.
#[derive(Clone, Debug)]
pub struct DyadicFrame {
    pub root: Rect,
    pub bounds: Rect,
    pub max_level: u32,
}

impl DyadicFrame {
    pub fn new(bounds: &Rect, max_level: u32) -> Result<Self> {
        if max_level > 40 {
            return Err(Error::InvalidParameter(format!("decomposition depth {max_level} > 40")));
        }
        let m = bounds.dim();
        let edge = (0..m).map(|a| bounds.extent(a)).fold(0.0, f64::max);
        if !(edge > 0.0) {
            return Err(Error::InvalidParameter("degenerate bounds".into()));
        }
        let mut hi = bounds.lo;
        for a in 0..m {
            hi[a] = bounds.lo[a] + edge;
        }
        Ok(Self { root: Rect { lo: bounds.lo, hi }, bounds: *bounds, max_level })
    }

    /// Depth limit whose finest edge is at most `h / 4`.
    pub fn for_grid_step(bounds: &Rect, h: f64) -> Result<Self> {
        let edge = (0..bounds.dim()).map(|a| bounds.extent(a)).fold(0.0, f64::max);
        let level = (edge / h).log2().ceil().max(0.0) as u32 + 2;
        Self::new(bounds, level)
    }

    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    pub fn edge(&self, level: u32) -> f64 {
        self.root.extent(0) * (-(level as f64)).exp2()
    }

    pub fn cube(&self, level: u32, coords: &[i64]) -> Rect {
        let e = self.edge(level);
        let mut lo = self.root.lo;
        let mut hi = self.root.lo;
        for a in 0..self.dim() {
            lo[a] = self.root.lo[a] + coords[a] as f64 * e;
            hi[a] = lo[a] + e;
        }
        Rect { lo, hi }
    }

    fn accepted(&self, carrier: &Carrier, q: &Rect, hint: Option<(&Point, f64)>) -> bool {
        if let (Some((x, d)), Carrier::Points(_)) = (hint, carrier) {
            // dist(q, E) lies in [d - max|x - q|, d + dist(x, q)]
            let diam = q.diam();
            if d - q.max_distance(x) > diam * (1.0 + 1e-9) {
                return true;
            }
            if d + q.distance(x) < diam * (1.0 - 1e-9) {
                return false;
            }
        }
        !carrier.covers(q) && carrier.distance_to_rect(q) >= q.diam()
    }

    /// The cube `(level, coords)` if it belongs to the decomposition.
    pub fn classify(&self, carrier: &Carrier, level: u32, coords: &[i64]) -> Option<WhitneyCube> {
        self.classify_near(carrier, level, coords, None)
    }

    /// [`classify`](Self::classify) given a point `x` with `dist(x, E) = d`, which settles
    /// most distance tests without a search.
    pub fn classify_near(
        &self,
        carrier: &Carrier,
        level: u32,
        coords: &[i64],
        hint: Option<(&Point, f64)>,
    ) -> Option<WhitneyCube> {
        let m = self.dim();
        let side = 1i64 << level;
        if coords[..m].iter().any(|&c| c < 0 || c >= side) {
            return None;
        }
        let q = self.cube(level, coords);
        if !q.intersects(&self.bounds) || carrier.covers(&q) {
            return None;
        }
        if level > 0 {
            let mut parent = [0i64; 9];
            for a in 0..m {
                parent[a] = coords[a].div_euclid(2);
            }
            if self.accepted(carrier, &self.cube(level - 1, &parent[..m]), hint) {
                return None;
            }
        }
        let collar = if self.accepted(carrier, &q, hint) {
            false
        } else if level == self.max_level {
            true
        } else {
            return None;
        };
        Some(WhitneyCube {
            cell: q,
            level,
            anchor: carrier.nearest(&q.center()).map(|p| p.0),
            scale: q.extent(0),
            collar,
        })
    }
}

/// Cubes covering `bounds \ E`, with the depth-limit layer flagged as collar.
pub fn whitney_decompose(bounds: &Rect, carrier: &Carrier, max_level: u32) -> Result<Vec<WhitneyCube>> {
    if let Carrier::Points(t) = carrier {
        if t.is_empty() {
            return Err(Error::InsufficientData("empty carrier".into()));
        }
    }
    let frame = DyadicFrame::new(bounds, max_level)?;
    let mut out = Vec::new();
    let mut stack = vec![(0u32, [0i64; 9])];
    let m = frame.dim();
    while let Some((level, coords)) = stack.pop() {
        let q = frame.cube(level, &coords[..m]);
        if !q.intersects(bounds) || carrier.covers(&q) {
            continue;
        }
        if frame.accepted(carrier, &q, None) || level == max_level {
            if let Some(c) = frame.classify(carrier, level, &coords[..m]) {
                out.push(c);
            }
            continue;
        }
        for corner in (0..(1usize << m)).rev() {
            let mut child = [0i64; 9];
            for a in 0..m {
                child[a] = 2 * coords[a] + ((corner >> a) & 1) as i64;
            }
            stack.push((level + 1, child));
        }
    }
    Ok(out)
}
