//! Teodorescu transforms over voxelised domains.

mod density;
mod probes;
mod quadrature;
mod teodorescu;

pub use density::{DensityField, DensityFn};
pub use probes::{
    decay_probe, decay_probe_order, field_circumradius, holder_probe, probe_report, unit_directions, DecaySample,
    HolderReport, ProbeRecord, DECAY_DIRECTIONS,
};
pub use quadrature::gauss_legendre;
pub use teodorescu::{poly_teodorescu, teodorescu, Plan, QuadratureOptions, QuadratureRule, Teodorescu};
