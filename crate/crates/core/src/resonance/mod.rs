//! Weights, weight spaces, resonant monomials, the toric map `π` and nondegeneracy.

mod hilbert;
mod morphism;
mod nondegeneracy;
mod weights;

pub use hilbert::{dpi_minor_identity_check, first_integral_basis, hilbert_basis, invariant_exponents};
pub use morphism::{GaussRational, LinearMorphism, ResonantStructure, EPS_RES};
pub use nondegeneracy::{
    is_nondegenerate, nondegeneracy_index, NondegeneracyIndex, NondegeneracyOptions,
};
pub use weights::{
    is_resonant, nonzero_weights_in, omega_s, omega_s_with_budget, weight, weight_decomposition,
    weight_project, weight_vector, OmegaCertificate, OmegaValue, OmegaWindow, Weight, OMEGA_BUDGET,
};

