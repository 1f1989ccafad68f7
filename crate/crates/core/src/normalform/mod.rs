//! Lindstedt–Poincaré normalization: fibered lifts, the cohomological equation with
//! its nilpotent correction, the quadratic Newton step and the Poincaré–Dulac oracle.

mod cohom;
mod newton;
mod pd;
mod state;

pub use cohom::{
    cohom_norm_bound_check, cohomological_residual, cohomological_solve, d_m_operator,
    fibered_solve, small_divisor, u_inverse, CohomBoundInputs, DIVISOR_FLOOR_MIN,
};
pub use newton::{
    apply_fibered_diffeo, current_field, fibered_lift, newton_step, normalize_to, StepOptions,
};
pub use pd::{
    graph_substitute, graph_substitute_field, poincare_dulac_normalize, PdResult,
    PD_RESONANCE_TOL,
};
pub use state::{
    extract_a_coeffs, good_perturbation_check, in_span, nf_field, span_residual, Extraction,
    FiberedDiffeo, NormalizationState, StepRecord, GOOD_TOL,
};
