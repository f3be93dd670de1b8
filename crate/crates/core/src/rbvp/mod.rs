//! The polymonogenic jump problem: solvability gate, solution formulas and verification.

mod gate;
mod problem;
mod solve;
mod verify;

pub use gate::{
    condition_comparison, condition_comparison_exact, cutoff_rho, smooth_step, solvability_check, uniqueness_band,
    ConditionComparison, Cutoff, Gate,
};
pub use problem::{
    boundary_samples, measure_exponents, select_side, JumpSetup, ProblemSpec, SetupOptions, ShapeSpec, SideChoice,
    SideSelection, SIDE_TIE,
};
pub use solve::{solve_jump, solve_jump_with, SolutionField, SolveDiagnostics, INTEGRABILITY_RATIO};
pub use verify::{
    outward_normal, verify_jump, DecayRow, ProbeSelection, DECAY_LIMIT, JumpConfig, JumpProbe, JumpReport, JumpSummary, VerifyOptions,
};
