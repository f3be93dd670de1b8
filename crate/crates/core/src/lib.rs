//! Clifford-algebra analysis on fractal hypersurfaces.
//!
//! The pipeline runs from the algebra `Cl(n)` and its Cauchy kernels, through
//! dyadic voxelisations of solids with fractal boundaries, box-counting and
//! Marcinkiewicz-exponent estimates, Whitney extension of Lipschitz jets and
//! Teodorescu volume transforms, to a solver and verifier for polymonogenic
//! jump problems.
//!
//! The algebra layer is generic over the scalar type; the numerical layers use `f64`.

pub mod clifford;
pub mod error;
pub mod scalar;
pub mod kernels;
pub mod taylor;
pub mod whitney;
pub mod geometry;
pub mod metrics;
pub mod transforms;
pub mod rbvp;

pub use error::{Error, Result};

pub type Multivector64 = clifford::Multivector<f64>;
pub type Multivector32 = clifford::Multivector<f32>;
pub type Paravector64 = clifford::Paravector<f64>;
pub type Paravector32 = clifford::Paravector<f32>;
pub use geometry::Point;
