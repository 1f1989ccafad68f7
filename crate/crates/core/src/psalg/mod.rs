//! Truncated bi-graded power-series algebra: series, vector fields, Lie brackets,
//! majorant norms, diffeomorphisms and reduction modulo `Σ`.

mod diffeo;
mod field;
mod io;
mod key;
mod series;
mod sigma;

pub use diffeo::{
    compose_displacements, invert_diffeo, pushforward, substitute_all, substitute_x, time_one_displacement,
};
pub use field::{FiberedField, VectorField};
pub use io::{series_from_json, series_to_json, FieldRecord, SeriesHeader, SeriesRecord, TermRecord};
pub use key::{exponents_of_degree, MultiIndex, MAX_DEGREE, MAX_VARS};
pub use series::{Ring, TruncatedSeries, C64, INFINITE_ORDER, PRUNE_REL};
pub use sigma::{
    reduce_on_fiber, restrict_sigma, sigma_reduce, sigma_reduce_field,
    sigma_reduce_field_with_cofactors, sigma_reduce_truncating, sigma_reduce_with_cofactors,
    SigmaReduction,
};

