//! Solids, their boundaries and dyadic voxelisations.

mod grid;
mod rect;
mod shapes;
mod surface;
mod voxel;

pub use grid::{max_cells, CellBox, Grid, DEFAULT_MAX_CELLS};
pub use rect::Rect;
pub use shapes::{Ball, SolidBox};
pub use surface::{build_surface_spec, FractalSurface, Level, SurfaceSpec};
pub use voxel::{voxelize, Label, VoxelDomain, VoxelHeader};

use crate::clifford::Paravector;

/// Point of R^{n+1}.
pub type Point = Paravector<f64>;

/// A compact solid `T` with boundary `S = ∂T`; `Ω⁺` is the interior and `Ω⁻` the exterior.
pub trait Shape: Send + Sync {
    /// Algebra dimension; the ambient space is R^{n+1}.
    fn n(&self) -> usize;

    /// Closed-solid membership: boundary points are inside.
    fn contains(&self, x: &Point) -> bool;

    /// Nearest point of `S` and its distance.
    fn nearest_boundary(&self, x: &Point) -> (f64, Point);

    fn distance(&self, x: &Point) -> f64 {
        self.nearest_boundary(x).0
    }

    /// Whether a grid cell (half-open convention) meets `S`.
    fn cell_meets_boundary(&self, cell: &CellBox) -> bool;

    /// Bounding box of the solid.
    fn bounding_box(&self) -> Rect;

    /// Grid bounds used when none are supplied.
    fn default_bounds(&self) -> Rect {
        let b = self.bounding_box();
        b.expanded(1.5)
    }

    /// Radius of the smallest origin-centred ball containing the solid (upper bound).
    fn circumradius(&self) -> f64 {
        let b = self.bounding_box();
        b.corners().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn describe(&self) -> String;
}

/// `distance_to_boundary` for any shape.
pub fn distance_to_boundary(shape: &dyn Shape, x: &Point) -> f64 {
    shape.distance(x)
}

/// `membership` for any shape.
pub fn membership(shape: &dyn Shape, x: &Point) -> bool {
    shape.contains(x)
}
