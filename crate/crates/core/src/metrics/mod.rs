//! Box-counting dimension and Marcinkiewicz exponent estimators.

mod boxcount;
mod exponent;
mod family;
mod scaling;
mod theory;

pub use boxcount::{box_count, box_count_voxels, box_counts, box_counts_from_voxels, BoundaryOf, BoxUnion, CoverSet};
pub use exponent::{
    absolute_exponent, default_outer_radius, ip_sweep, marcinkiewicz_exponent, marcinkiewicz_integral,
    neighborhood_volume, volume_curve, ExponentEstimate, ExponentMethod, ExponentSide, Side, SideRegion,
    VolumeSample, VOLUME_WINDOW,
};
pub use family::{family_inner_exponent, family_inner_volume, levels_for_octaves, staircase_period};
pub use scaling::{
    loglog_fit, minkowski_dimension, ols, CurveKind, DimensionEstimate, LinearFit, ScalingCurve, MIN_FIT_SAMPLES,
};
pub use theory::{
    inequality_report, inequality_report_tol, theoretical_values, theoretical_values_exact, InequalityReport,
    TheoryValues, Verdict, EQUALITY_TOL,
};
