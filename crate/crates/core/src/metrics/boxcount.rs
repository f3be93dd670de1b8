//! Grid counts `N_k(E)`: the number of `M_k` cells meeting a set.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{max_cells, CellBox, Grid, Rect, Shape, VoxelDomain};

/// A set that can be tested against grid cells.
pub trait CoverSet: Sync {
    fn meets(&self, cell: &CellBox) -> bool;
    fn bounding_box(&self) -> Rect;
}

/// The boundary `S` of a solid.
pub struct BoundaryOf<'a>(pub &'a dyn Shape);

impl CoverSet for BoundaryOf<'_> {
    fn meets(&self, cell: &CellBox) -> bool {
        self.0.cell_meets_boundary(cell)
    }

    fn bounding_box(&self) -> Rect {
        self.0.bounding_box()
    }
}

/// Finite union of closed (possibly degenerate) boxes: points, segments, faces.
#[derive(Clone, Debug)]
pub struct BoxUnion(pub Vec<Rect>);

impl CoverSet for BoxUnion {
    fn meets(&self, cell: &CellBox) -> bool {
        self.0.iter().any(|b| cell.meets_closed(b))
    }

    fn bounding_box(&self) -> Rect {
        let mut bb = self.0[0];
        for b in &self.0[1..] {
            for a in 0..bb.dim() {
                bb.lo[a] = bb.lo[a].min(b.lo[a]);
                bb.hi[a] = bb.hi[a].max(b.hi[a]);
            }
        }
        bb
    }
}

/// `N_k` on the grid over the bounding box of `set`.
pub fn box_count(set: &dyn CoverSet, k: u32) -> Result<u64> {
    Ok(box_counts(set, &set.bounding_box(), k, k)?[0])
}

/// `N_k` for `k = k_min..=k_max` on the grid whose bounds are `bounds` snapped at depth `k_min`.
///
/// Only cells meeting the set are refined, so the cost scales with the counts,
/// not with the full grid.
pub fn box_counts(set: &dyn CoverSet, bounds: &Rect, k_min: u32, k_max: u32) -> Result<Vec<u64>> {
    if k_min > k_max {
        return Err(Error::InvalidParameter(format!("empty depth range {k_min}..={k_max}")));
    }
    if k_max > 40 {
        return Err(Error::InvalidParameter(format!("depth {k_max} above 40")));
    }
    let root = Grid::new(bounds, k_min);
    let cells = root.check_cap(max_cells())?;
    let levels = (k_max - k_min + 1) as usize;
    let per_root: Vec<Vec<u64>> = (0..cells)
        .into_par_iter()
        .map(|lin| {
            let mut counts = vec![0u64; levels];
            descend(set, &root.cell(lin), 0, &mut counts);
            counts
        })
        .collect();
    let mut total = vec![0u64; levels];
    for c in per_root {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(total)
}

fn descend(set: &dyn CoverSet, cell: &CellBox, level: usize, counts: &mut [u64]) {
    if !set.meets(cell) {
        return;
    }
    counts[level] += 1;
    if level + 1 < counts.len() {
        for child in cell.children() {
            descend(set, &child, level + 1, counts);
        }
    }
}

/// Boundary-tagged cells of a voxel domain.
pub fn box_count_voxels(domain: &VoxelDomain) -> u64 {
    domain.boundary_count() as u64
}

/// `N_j` for `j = k_min..=k` from the boundary cells of a depth-`k` domain, by merging
/// cells into their dyadic ancestors.
pub fn box_counts_from_voxels(domain: &VoxelDomain, k_min: u32) -> Result<Vec<u64>> {
    let k = domain.grid.k;
    if k_min > k {
        return Err(Error::InvalidParameter(format!("k_min = {k_min} above the voxel depth {k}")));
    }
    let m = domain.grid.dim();
    let scale = (k as f64).exp2();
    let fine: Vec<Vec<i64>> = (0..domain.len())
        .filter(|&lin| domain.label(lin).is_boundary())
        .map(|lin| {
            let c = domain.center(lin);
            (0..m).map(|a| (c[a] * scale).floor() as i64).collect()
        })
        .collect();
    Ok((k_min..=k)
        .map(|j| {
            let div = 1i64 << (k - j);
            let set: HashSet<Vec<i64>> = fine.iter().map(|idx| idx.iter().map(|i| i.div_euclid(div)).collect()).collect();
            set.len() as u64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, SolidBox};

    fn rect(lo: &[f64], hi: &[f64]) -> Rect {
        Rect::from_slices(lo, hi).unwrap()
    }

    #[test]
    fn segment_point_and_square() {
        let seg = BoxUnion(vec![rect(&[0.0, 0.0], &[1.0, 0.0])]);
        for k in 1..=10 {
            assert_eq!(box_count(&seg, k).unwrap(), 1 << k);
        }
        let pt = BoxUnion(vec![rect(&[0.3, 0.7], &[0.3, 0.7])]);
        assert_eq!(box_count(&pt, 7).unwrap(), 1);
        let sq = SolidBox::unit(1);
        assert_eq!(box_count(&BoundaryOf(&sq), 3).unwrap(), 28);
        let faces = BoxUnion(vec![
            rect(&[0.0, 0.0], &[1.0, 0.0]),
            rect(&[0.0, 1.0], &[1.0, 1.0]),
            rect(&[0.0, 0.0], &[0.0, 1.0]),
            rect(&[1.0, 0.0], &[1.0, 1.0]),
        ]);
        assert_eq!(box_count(&faces, 3).unwrap(), 28);
    }

    #[test]
    fn voxel_counts_match_direct_counts() {
        let ball = Ball::unit(1);
        let bounds = ball.default_bounds();
        let dom = crate::geometry::voxelize(&ball, 8, &bounds).unwrap();
        let merged = box_counts_from_voxels(&dom, 4).unwrap();
        assert_eq!(merged, box_counts(&BoundaryOf(&ball), &bounds, 4, 8).unwrap());
        assert!(box_counts_from_voxels(&dom, 9).is_err());
    }

    #[test]
    fn counts_refine_consistently() {
        let ball = Ball::unit(1);
        let set = BoundaryOf(&ball);
        let all = box_counts(&set, &ball.bounding_box(), 2, 9).unwrap();
        for k in 2..=9u32 {
            assert_eq!(all[(k - 2) as usize], box_counts(&set, &ball.bounding_box(), k, k).unwrap()[0]);
        }
        for w in all.windows(2) {
            assert!(w[0] <= w[1] && w[1] <= 4 * w[0]);
        }
    }
}
