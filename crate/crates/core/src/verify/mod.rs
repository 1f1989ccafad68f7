//! Scenario generators and numerical checks of conjugacy and invariance.

mod checks;
mod flow;
mod scenario;

pub use checks::{
    conjugacy_residual, fiber_samples, invariant_residual, oracle_equivalence, psi_point,
    theta_point, theta_series, ConjugacyResidual, InvariantStats, OracleComparison,
};
pub use flow::{flow, FlowOptions, Trajectory};
pub use scenario::{
    divergence_free_field, scenario_hamiltonian, scenario_volume, symplectic_gradient,
    PerturbationSpec, Potential, Scenario, TimeConvention, UPoly, XFieldTerms,
};
