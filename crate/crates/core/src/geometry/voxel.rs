//! Voxel domains: per-cell side labels and distance to the boundary.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{max_cells, Grid, Point, Rect, Shape};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Label {
    /// In `Ω⁻`, away from `S`.
    Exterior = 0,
    /// In `Ω⁺`, away from `S`.
    Interior = 1,
    /// Meets `S`, side sample outside the solid.
    BoundaryOut = 2,
    /// Meets `S`, side sample inside the solid.
    BoundaryIn = 3,
}

impl Label {
    pub fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            0 => Label::Exterior,
            1 => Label::Interior,
            2 => Label::BoundaryOut,
            3 => Label::BoundaryIn,
            _ => return Err(Error::Format(format!("bad voxel label {v}"))),
        })
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Label::BoundaryOut | Label::BoundaryIn)
    }

    /// Counted as part of `Ω⁺`.
    pub fn is_inner(self) -> bool {
        matches!(self, Label::Interior | Label::BoundaryIn)
    }
}

#[derive(Clone, Debug)]
pub struct VoxelDomain {
    pub grid: Grid,
    pub labels: Vec<u8>,
    /// Distance from the cell centre to `S`; exactly 0 on boundary cells.
    pub dist: Vec<f32>,
}

/// JSON header of the voxel file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoxelHeader {
    pub n: usize,
    pub k: u32,
    pub bounds: Rect,
    pub counts: Vec<usize>,
    pub label_counts: [usize; 4],
    pub byte_order: String,
}

/// Off-lattice point of a cell used to give boundary cells a side; dyadic faces
/// can pass exactly through cell centres.
fn side_sample(centre: &Point, h: f64) -> Point {
    let shift = h * (std::f64::consts::SQRT_2 - 1.0) / 4.0;
    let mut p = *centre;
    for a in 0..p.dim() {
        p[a] += shift;
    }
    p
}

/// Labels and distances of `shape` on the grid of depth `k` over (snapped) `bounds`.
pub fn voxelize(shape: &dyn Shape, k: u32, bounds: &Rect) -> Result<VoxelDomain> {
    if k < 1 {
        return Err(Error::InvalidParameter("voxel depth k must be >= 1".into()));
    }
    if bounds.n() != shape.n() {
        return Err(Error::DimensionMismatch { left: bounds.n(), right: shape.n() });
    }
    let grid = Grid::new(bounds, k);
    let cells = grid.check_cap(max_cells())?;
    let mut labels = vec![0u8; cells];
    let mut dist = vec![0f32; cells];
    labels
        .par_chunks_mut(crate::scalar::REDUCE_CHUNK)
        .zip(dist.par_chunks_mut(crate::scalar::REDUCE_CHUNK))
        .enumerate()
        .for_each(|(c, (ls, ds))| {
            let start = c * crate::scalar::REDUCE_CHUNK;
            for (i, (l, d)) in ls.iter_mut().zip(ds.iter_mut()).enumerate() {
                let lin = start + i;
                let centre = grid.center(lin);
                let boundary = shape.cell_meets_boundary(&grid.cell(lin));
                let inside = if boundary {
                    shape.contains(&side_sample(&centre, grid.h))
                } else {
                    shape.contains(&centre)
                };
                *l = match (boundary, inside) {
                    (true, true) => Label::BoundaryIn,
                    (true, false) => Label::BoundaryOut,
                    (false, true) => Label::Interior,
                    (false, false) => Label::Exterior,
                } as u8;
                *d = if boundary { 0.0 } else { shape.distance(&centre) as f32 };
            }
        });
    Ok(VoxelDomain { grid, labels, dist })
}

impl VoxelDomain {
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, lin: usize) -> Label {
        Label::from_u8(self.labels[lin]).expect("valid label")
    }

    pub fn label_counts(&self) -> [usize; 4] {
        let mut c = [0usize; 4];
        for &l in &self.labels {
            c[l as usize] += 1;
        }
        c
    }

    pub fn boundary_count(&self) -> usize {
        let c = self.label_counts();
        c[2] + c[3]
    }

    pub fn center(&self, lin: usize) -> Point {
        self.grid.center(lin)
    }

    pub fn header(&self) -> VoxelHeader {
        VoxelHeader {
            n: self.n(),
            k: self.grid.k,
            bounds: self.grid.bounds,
            counts: self.grid.counts.clone(),
            label_counts: self.label_counts(),
            byte_order: "little-endian".into(),
        }
    }

    /// One JSON header line, then the label bytes, then the `f32` distances (little-endian).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header())?;
        w.write_all(b"\n")?;
        w.write_all(&self.labels)?;
        let mut buf = Vec::with_capacity(self.dist.len() * 4);
        for d in &self.dist {
            buf.extend_from_slice(&d.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: VoxelHeader = serde_json::from_str(line.trim_end())?;
        let grid = Grid::new(&header.bounds, header.k);
        if grid.counts != header.counts {
            return Err(Error::Format("voxel header counts disagree with bounds".into()));
        }
        let cells = grid.check_cap(max_cells())?;
        let mut labels = vec![0u8; cells];
        r.read_exact(&mut labels)?;
        if let Some(bad) = labels.iter().find(|&&l| l > 3) {
            return Err(Error::Format(format!("bad voxel label {bad}")));
        }
        let mut raw = vec![0u8; cells * 4];
        r.read_exact(&mut raw)?;
        let dist = raw.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        Ok(Self { grid, labels, dist })
    }
}
