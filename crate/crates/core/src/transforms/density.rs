//! Densities on one side of a voxel domain.

use std::sync::Arc;

use rayon::prelude::*;

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::{Point, VoxelDomain};
use crate::metrics::{Side, SideRegion};

/// Closed-form density.
pub type DensityFn = Arc<dyn Fn(&Point) -> Multivector<f64> + Send + Sync>;

/// `u` on the cells of `Ω⁺` or `Ω*`.
#[derive(Clone)]
pub struct DensityField<'a> {
    pub(crate) domain: &'a VoxelDomain,
    side: Side,
    r_star: f64,
    /// Linear indices of the side's cells, ascending.
    pub(crate) cells: Vec<usize>,
    /// Cell centres, `dim` coordinates per cell.
    pub(crate) centers: Vec<f64>,
    /// Position of each grid cell in `cells`, or `u32::MAX`.
    slot: Vec<u32>,
    /// Values at cell centres, one block of `2^n` coefficients per cell.
    pub(crate) values: Vec<f64>,
    /// Coefficients that are non-zero in some cell.
    pub(crate) blades: Vec<usize>,
    func: Option<DensityFn>,
    pub(crate) width: usize,
    /// Per cell: start of its `2^{n+1}` sub-cell blocks in `sub_values`, or `u32::MAX`.
    pub(crate) sub_slot: Vec<u32>,
    pub(crate) sub_values: Vec<f64>,
}

impl<'a> DensityField<'a> {
    fn skeleton(region: SideRegion<'a>) -> Self {
        let domain = region.domain;
        let cells: Vec<usize> = (0..domain.len()).filter(|&l| region.includes(l)).collect();
        let dim = domain.grid.dim();
        let mut centers = Vec::with_capacity(cells.len() * dim);
        let mut slot = vec![u32::MAX; domain.len()];
        for (i, &l) in cells.iter().enumerate() {
            let c = domain.center(l);
            centers.extend_from_slice(&c.components()[..dim]);
            slot[l] = i as u32;
        }
        let width = 1 << domain.n();
        Self {
            domain,
            side: region.side,
            r_star: region.r_star,
            values: vec![0.0; cells.len() * width],
            cells,
            centers,
            slot,
            blades: Vec::new(),
            func: None,
            width,
            sub_slot: Vec::new(),
            sub_values: Vec::new(),
        }
    }

    fn fill(&mut self, f: &(dyn Fn(&Point) -> Multivector<f64> + Sync)) -> Result<()> {
        let n = self.domain.n();
        let dim = n + 1;
        let centers = &self.centers;
        self.values
            .par_chunks_mut(self.width)
            .enumerate()
            .try_for_each(|(i, block)| {
                let v = f(&Point::from_f64(&centers[i * dim..(i + 1) * dim]));
                if v.n() != n {
                    return Err(Error::DimensionMismatch { left: n, right: v.n() });
                }
                block.copy_from_slice(v.coeffs());
                Ok(())
            })?;
        self.find_blades();
        Ok(())
    }

    fn find_blades(&mut self) {
        let w = self.width;
        self.blades = (0..w).filter(|&b| self.values.iter().skip(b).step_by(w).any(|&c| c != 0.0)).collect();
    }

    /// Density evaluated wherever the quadrature needs it; far cells use centre values.
    pub fn from_fn(region: SideRegion<'a>, f: DensityFn) -> Result<Self> {
        let mut d = Self::skeleton(region);
        d.fill(f.as_ref())?;
        d.func = Some(f);
        Ok(d)
    }

    /// Density sampled once at cell centres and held piecewise constant.
    pub fn cached(region: SideRegion<'a>, f: impl Fn(&Point) -> Multivector<f64> + Sync) -> Result<Self> {
        let mut d = Self::skeleton(region);
        d.fill(&f)?;
        Ok(d)
    }

    /// Per-cell values in the order of [`cells`](Self::cells).
    pub fn from_values(region: SideRegion<'a>, values: &[Multivector<f64>]) -> Result<Self> {
        let mut d = Self::skeleton(region);
        if values.len() != d.cells.len() {
            return Err(Error::DimensionMismatch { left: d.cells.len(), right: values.len() });
        }
        for (i, v) in values.iter().enumerate() {
            if v.n() != d.domain.n() {
                return Err(Error::DimensionMismatch { left: d.domain.n(), right: v.n() });
            }
            d.values[i * d.width..(i + 1) * d.width].copy_from_slice(v.coeffs());
        }
        d.find_blades();
        Ok(d)
    }

    /// Samples a closed-form density at the `2^{n+1}` sub-cell centres of every cell
    /// within four cells of `S`; the far-field sum then uses the finer midpoint rule there.
    pub fn with_boundary_refinement(self) -> Result<Self> {
        let Some(f) = self.func.clone() else {
            return Err(Error::InvalidParameter("boundary refinement needs a closed-form density".into()));
        };
        self.with_boundary_refinement_from(f.as_ref())
    }

    /// As [`with_boundary_refinement`](Self::with_boundary_refinement) for a cached field,
    /// sampling `f` at the sub-cell centres.
    pub fn with_boundary_refinement_from(mut self, f: &(dyn Fn(&Point) -> Multivector<f64> + Sync)) -> Result<Self> {
        let dim = self.domain.grid.dim();
        let h = self.domain.grid.h;
        let near = (4.0 * h) as f32;
        let subs = 1usize << dim;
        let marked: Vec<usize> = (0..self.cells.len()).filter(|&i| self.domain.dist[self.cells[i]] < near).collect();
        self.sub_slot = vec![u32::MAX; self.cells.len()];
        for (k, &i) in marked.iter().enumerate() {
            self.sub_slot[i] = (k * subs) as u32;
        }
        let width = self.width;
        let centers = &self.centers;
        let blocks: Vec<Vec<f64>> = marked
            .par_iter()
            .map(|&i| {
                let c = &centers[i * dim..(i + 1) * dim];
                let mut out = Vec::with_capacity(subs * width);
                for corner in 0..subs {
                    let y = sub_center(c, corner, h);
                    out.extend_from_slice(f(&y).coeffs());
                }
                out
            })
            .collect();
        self.sub_values = blocks.concat();
        for b in 0..width {
            if !self.blades.contains(&b) && self.sub_values.iter().skip(b).step_by(width).any(|&c| c != 0.0) {
                self.blades.push(b);
            }
        }
        self.blades.sort_unstable();
        Ok(self)
    }

    pub fn is_refined(&self) -> bool {
        !self.sub_slot.is_empty()
    }

    pub fn zero(region: SideRegion<'a>) -> Self {
        Self::skeleton(region)
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn domain(&self) -> &'a VoxelDomain {
        self.domain
    }

    pub fn region(&self) -> SideRegion<'a> {
        SideRegion { domain: self.domain, side: self.side, r_star: self.r_star }
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.func.is_none() && self.blades.is_empty()
    }

    pub fn is_callable(&self) -> bool {
        self.func.is_some()
    }

    /// Position of grid cell `lin` in [`cells`](Self::cells).
    pub fn slot_of(&self, lin: usize) -> Option<usize> {
        match self.slot.get(lin) {
            Some(&s) if s != u32::MAX => Some(s as usize),
            _ => None,
        }
    }

    pub fn cell_center(&self, slot: usize) -> Point {
        let dim = self.domain.grid.dim();
        Point::from_f64(&self.centers[slot * dim..(slot + 1) * dim])
    }

    /// Coefficients of `u(y)` for `y` in the cell at `slot`.
    #[inline]
    pub(crate) fn value_into(&self, slot: usize, y: &Point, buf: &mut [f64]) {
        match &self.func {
            Some(f) => buf.copy_from_slice(f(y).coeffs()),
            None => buf.copy_from_slice(&self.values[slot * self.width..(slot + 1) * self.width]),
        }
    }

    /// Value at cell centre `slot`.
    pub fn cell_value(&self, slot: usize) -> Multivector<f64> {
        Multivector::from_coeffs(self.n(), self.values[slot * self.width..(slot + 1) * self.width].to_vec())
            .expect("block width matches the algebra")
    }

    /// Midpoint `‖u‖_p = (Σ |u(y_c)|^p cellVol)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
        }
        let vol = self.domain.grid.cell_volume();
        let s = crate::scalar::par_tree_sum(self.cells.len(), |i| self.cell_value(i).norm().powf(p) * vol);
        Ok(s.powf(1.0 / p))
    }

    /// `max |u(y_c)|`.
    pub fn sup_norm(&self) -> f64 {
        (0..self.cells.len()).into_par_iter().map(|i| self.cell_value(i).norm()).reduce(|| 0.0, f64::max)
    }
}

/// Centre of sub-cell `corner` (bit `a` set: upper half on axis `a`) of the cell centred at `c`.
pub(crate) fn sub_center(c: &[f64], corner: usize, h: f64) -> Point {
    let mut y = Point::from_f64(c);
    for a in 0..c.len() {
        y[a] += if (corner >> a) & 1 == 1 { 0.25 * h } else { -0.25 * h };
    }
    y
}
