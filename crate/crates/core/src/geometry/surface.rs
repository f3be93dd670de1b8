//! The hypersurface family `S^{n+1}_{α,β}`: the boundary of a cube
//! `Q = [0,1]^n × [-1,0]` with dyadic stacks of thin rectangles on its top face.
//!
//! Coordinates `0..n` are in-plane (the rectangles are spread along axis 0) and
//! axis `n` points up.

use serde::{Deserialize, Serialize};

use super::{CellBox, Point, Rect, Shape};
use crate::error::{Error, Result};

/// Largest rectangle count materialised by [`SurfaceSpec::rectangle_list`].
const MAX_LISTED_RECTS: f64 = (1u64 << 24) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub m_max: u32,
}

/// Validated family member.
pub fn build_surface_spec(n: usize, alpha: f64, beta: f64, m_max: u32) -> Result<SurfaceSpec> {
    SurfaceSpec { n, alpha, beta, m_max }.validated()
}

/// Rectangle data of one level `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub m: u32,
    /// `2^{-m}`: height, in-plane width and x⁰ offset of the stack.
    pub base: f64,
    /// Spacing `a_m = 2^{-m-[mβ]}`.
    pub a: f64,
    /// Rectangle thickness `C_m = a_m^α / 2`.
    pub c: f64,
    /// Rectangle count `2^{[mβ]}` (as a float; it can exceed any integer type).
    pub count: f64,
}

impl Level {
    /// `y_{mj} = 2^{-m} + j a_m`.
    #[inline]
    pub fn y(&self, j: f64) -> f64 {
        self.base + j * self.a
    }

    /// Smallest `j` in `1..=count` with `y_j >= t`, if any.
    fn first_at_or_above(&self, t: f64) -> Option<f64> {
        let mut j = ((t - self.base) / self.a).ceil().max(1.0);
        if j > 1.0 && self.y(j - 1.0) >= t {
            j -= 1.0;
        }
        if self.y(j) < t {
            j += 1.0;
        }
        (j <= self.count).then_some(j)
    }

    /// Whether some `[y_j - C, y_j]` meets `[lo, hi)` (or `[lo, hi]` when `closed`).
    fn hits(&self, lo: f64, hi: f64, closed: bool) -> bool {
        match self.first_at_or_above(lo) {
            Some(j) => {
                let left = self.y(j) - self.c;
                left < hi || (closed && left <= hi)
            }
            None => false,
        }
    }

    /// Whether `[lo, hi)` (or `[lo, hi]`) lies inside some open `(y_j - C, y_j)`.
    fn inside_footprint(&self, lo: f64, hi: f64, closed: bool) -> bool {
        match self.first_at_or_above(lo) {
            Some(j) => {
                let y = self.y(j);
                y - self.c < lo && (hi < y || (!closed && hi <= y))
            }
            None => false,
        }
    }

    /// The open footprint `(y_j - C, y_j)` containing `t`, as its index.
    fn footprint_of(&self, t: f64) -> Option<f64> {
        let j = self.first_at_or_above(t)?;
        let y = self.y(j);
        (y - self.c < t && t < y).then_some(j)
    }

    /// The closed interval `[y_j - C, y_j]` containing `t`.
    fn rect_of(&self, t: f64) -> Option<f64> {
        let j = self.first_at_or_above(t)?;
        (self.y(j) - self.c <= t).then_some(j)
    }
}

impl SurfaceSpec {
    pub fn validated(self) -> Result<Self> {
        if self.n < 1 {
            return Err(Error::InvalidParameter(format!("n = {} must be >= 1", self.n)));
        }
        if self.n > crate::clifford::MAX_ALGEBRA_DIM {
            return Err(Error::DimensionTooLarge { n: self.n, max: crate::clifford::MAX_ALGEBRA_DIM });
        }
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha = {} must be >= 1", self.alpha)));
        }
        if !(self.beta >= self.n as f64) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta = {} must be >= n = {}", self.beta, self.n)));
        }
        if self.m_max < 1 {
            return Err(Error::InvalidParameter("m_max must be >= 1".into()));
        }
        // exponents below -1074 underflow
        if (self.m_max as f64) * (1.0 + self.beta) * self.alpha > 1000.0 {
            return Err(Error::InvalidParameter(format!(
                "m_max = {} too deep for alpha = {}, beta = {}",
                self.m_max, self.alpha, self.beta
            )));
        }
        Ok(self)
    }

    pub fn with_m_max(self, m_max: u32) -> Self {
        Self { m_max, ..self }
    }

    /// Level data; `m` is not checked against `m_max`.
    pub fn level(&self, m: u32) -> Level {
        let fl = (m as f64 * self.beta).floor();
        let base = (-(m as f64)).exp2();
        let a = (-(m as f64) - fl).exp2();
        Level { m, base, a, c: a.powf(self.alpha) / 2.0, count: fl.exp2() }
    }

    pub fn levels(&self) -> Vec<Level> {
        (1..=self.m_max).map(|m| self.level(m)).collect()
    }

    /// `R_{mj} = [y_{mj} - C_m, y_{mj}] × [0, 2^{-m}]^n` for `j = 1..2^{[mβ]}`.
    pub fn rectangle_list(&self, m: u32) -> Result<Vec<Rect>> {
        if m < 1 || m > self.m_max {
            return Err(Error::OutOfRange { index: m as i64, range: format!("1..={}", self.m_max) });
        }
        let lv = self.level(m);
        if lv.count > MAX_LISTED_RECTS {
            return Err(Error::InvalidParameter(format!("level {m} has {} rectangles", lv.count)));
        }
        let d = self.n + 1;
        Ok((1..=lv.count as u64)
            .map(|j| {
                let y = lv.y(j as f64);
                let mut lo = Point::zero(self.n);
                let mut hi = Point::from_f64(&vec![lv.base; d]);
                lo[0] = y - lv.c;
                hi[0] = y;
                Rect { lo, hi }
            })
            .collect())
    }

    /// The cube `Q = [0,1]^n × [-1,0]`.
    pub fn cube(&self) -> Rect {
        let mut lo = Point::zero(self.n);
        let mut hi = Point::from_f64(&vec![1.0; self.n + 1]);
        lo[self.n] = -1.0;
        hi[self.n] = 0.0;
        Rect { lo, hi }
    }
}

/// Exact solid `T = Q ∪ ⋃_{m ≤ m_max} R_{mj}` with arithmetic (per-level) queries.
#[derive(Clone, Debug)]
pub struct FractalSurface {
    spec: SurfaceSpec,
    levels: Vec<Level>,
    cube: Rect,
}

impl FractalSurface {
    pub fn new(spec: SurfaceSpec) -> Result<Self> {
        let spec = spec.validated()?;
        Ok(Self { levels: spec.levels(), cube: spec.cube(), spec })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn level_box(&self, lv: &Level, j: f64) -> Rect {
        let n = self.spec.n;
        let mut lo = Point::zero(n);
        let mut hi = Point::from_f64(&vec![lv.base; n + 1]);
        let y = lv.y(j);
        lo[0] = y - lv.c;
        hi[0] = y;
        Rect { lo, hi }
    }

    /// The rectangle containing `x`, as `(level, j)`.
    fn rect_containing(&self, x: &Point) -> Option<(Level, f64)> {
        let n = self.spec.n;
        for lv in &self.levels {
            if x[0] > 2.0 * lv.base || x[0] < lv.base {
                continue;
            }
            if x[n] < 0.0 || x[n] > lv.base || (1..n).any(|a| x[a] < 0.0 || x[a] > lv.base) {
                continue;
            }
            if let Some(j) = lv.rect_of(x[0]) {
                return Some((*lv, j));
            }
        }
        None
    }

    /// Open footprint containing the in-plane projection of `x`.
    fn footprint_containing(&self, x: &Point) -> Option<(Level, f64)> {
        let n = self.spec.n;
        for lv in &self.levels {
            if x[0] > 2.0 * lv.base || x[0] <= lv.base {
                continue;
            }
            if (1..n).any(|a| !(x[a] > 0.0 && x[a] < lv.base)) {
                continue;
            }
            if let Some(j) = lv.footprint_of(x[0]) {
                return Some((*lv, j));
            }
        }
        None
    }

    fn meets_solid(&self, cell: &CellBox) -> bool {
        if cell.meets_closed(&self.cube) {
            return true;
        }
        let n = self.spec.n;
        self.levels.iter().any(|lv| {
            let within = |a: usize| {
                cell.lo[a] <= lv.base && (0.0 < cell.hi[a] || (cell.closed_hi[a] && 0.0 <= cell.hi[a]))
            };
            (1..=n).all(within) && lv.hits(cell.lo[0], cell.hi[0], cell.closed_hi[0])
        })
    }

    fn inside_interior(&self, cell: &CellBox) -> bool {
        if cell.inside_open(&self.cube) {
            return true;
        }
        let n = self.spec.n;
        let open_below = |a: usize, lo: f64, top: f64| {
            lo < cell.lo[a] && (cell.hi[a] < top || (!cell.closed_hi[a] && cell.hi[a] <= top))
        };
        self.levels.iter().any(|lv| {
            open_below(n, -1.0, lv.base)
                && (1..n).all(|a| open_below(a, 0.0, lv.base))
                && lv.inside_footprint(cell.lo[0], cell.hi[0], cell.closed_hi[0])
        })
    }
}

impl Shape for FractalSurface {
    fn n(&self) -> usize {
        self.spec.n
    }

    fn contains(&self, x: &Point) -> bool {
        self.cube.contains(x) || self.rect_containing(x).is_some()
    }

    fn nearest_boundary(&self, x: &Point) -> (f64, Point) {
        let n = self.spec.n;
        let mut best = (f64::INFINITY, *x);
        let mut offer = |d: f64, p: Point| {
            if d < best.0 {
                best = (d, p);
            }
        };
        let in_cube = self.cube.contains(x);
        let in_rect = self.rect_containing(x);
        if !in_cube && in_rect.is_none() {
            offer(self.cube.distance(x), self.cube.clamp(x));
            for lv in &self.levels {
                let j0 = lv.first_at_or_above(x[0]).unwrap_or(lv.count);
                for j in [j0 - 1.0, j0] {
                    if j >= 1.0 && j <= lv.count {
                        let b = self.level_box(lv, j);
                        offer(b.distance(x), b.clamp(x));
                    }
                }
            }
            return best;
        }
        if in_cube {
            for a in 0..=n {
                let faces: &[f64] = if a == n { &[-1.0] } else { &[0.0, 1.0] };
                for &f in faces {
                    let mut p = *x;
                    p[a] = f;
                    offer((x[a] - f).abs(), p);
                }
            }
            let mut p = *x;
            p[n] = 0.0;
            match self.footprint_containing(x) {
                None => offer(x[n].abs(), p),
                Some((lv, j)) => {
                    let y = lv.y(j);
                    let mut edges: Vec<(usize, f64)> = vec![(0, y - lv.c), (0, y)];
                    for a in 1..n {
                        edges.push((a, 0.0));
                        edges.push((a, lv.base));
                    }
                    for (a, f) in edges {
                        let mut q = p;
                        q[a] = f;
                        let dp = (x[a] - f).abs();
                        offer((x[n] * x[n] + dp * dp).sqrt(), q);
                    }
                }
            }
        }
        if let Some((lv, j)) = in_rect {
            let y = lv.y(j);
            let mut faces: Vec<(usize, f64)> = vec![(0, y - lv.c), (0, y), (n, lv.base)];
            for a in 1..n {
                faces.push((a, 0.0));
                faces.push((a, lv.base));
            }
            for (a, f) in faces {
                let mut p = *x;
                p[a] = f;
                offer((x[a] - f).abs(), p);
            }
        }
        best
    }

    fn cell_meets_boundary(&self, cell: &CellBox) -> bool {
        self.meets_solid(cell) && !self.inside_interior(cell)
    }

    fn bounding_box(&self) -> Rect {
        let mut b = self.cube;
        b.hi[self.spec.n] = 0.5;
        b
    }

    fn default_bounds(&self) -> Rect {
        let n = self.spec.n;
        let mut lo = Point::from_f64(&vec![-0.5; n + 1]);
        let mut hi = Point::from_f64(&vec![1.5; n + 1]);
        lo[n] = -1.5;
        hi[n] = 0.5;
        Rect { lo, hi }
    }

    fn describe(&self) -> String {
        format!(
            "S(n={}, alpha={}, beta={}, m_max={})",
            self.spec.n, self.spec.alpha, self.spec.beta, self.spec.m_max
        )
    }
}
