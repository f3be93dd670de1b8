//! Jets on closed sets and their Whitney extensions.

mod decompose;
mod extend;
mod jet;
mod kdtree;
mod multi_index;

pub use decompose::{whitney_decompose, Carrier, DyadicFrame, WhitneyCube};
pub use extend::{
    assemble_bold_f, bump, dirac_of_series, dirac_power_extension, estimate_lip_constant, extend, LipEstimate, LIP_SAMPLE_CAP, WhitneyExtension,
    EXPANSION,
};
pub use jet::{JetFile, JetPoint, LipschitzJet, Polynomial};
pub use kdtree::KdTree;
pub use multi_index::MultiIndex;
