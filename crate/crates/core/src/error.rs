//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the normal-form, schedule and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands live in ambient spaces of different dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Operands expand their u-dependence around different base points.
    #[error("base point mismatch")]
    BasePointMismatch,

    /// A rewrite or product needed a u-degree above the configured truncation.
    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),

    /// A diffeomorphism generator has x-order below 2.
    #[error("generator is not tangent to the identity (x-order {order})")]
    NotTangentToIdentity {
        /// Observed x-order of the generator.
        order: u32,
    },

    /// No nonzero invariant monomial exists within the degree bound.
    #[error("the invariant ring is trivial up to degree {bound}")]
    EmptyRing {
        /// Degree bound used by the enumeration.
        bound: u32,
    },

    /// The invariant generators are algebraically dependent.
    #[error("invariant generators are dependent: {count} generators of rank {rank}")]
    DependentGenerators {
        /// Number of minimal generators found.
        count: usize,
        /// Rank of their exponent matrix.
        rank: usize,
    },

    /// The requested degree window contains only zero weights.
    #[error("no nonzero weights in degree window [{low}, {high}]")]
    NoNonzeroWeights {
        /// Lowest degree of the window.
        low: u32,
        /// Highest degree of the window.
        high: u32,
    },

    /// A point lies on a coordinate hyperplane where the minor identity is undefined.
    #[error("point lies on the coordinate hyperplane x_{index} = 0")]
    OnCoordinateHyperplane {
        /// Index of the vanishing coordinate.
        index: usize,
    },

    /// The frequency map stays degenerate up to the requested derivative order.
    #[error("map is degenerate up to derivative order {mu_max}")]
    DegenerateUpToMuMax {
        /// Largest derivative order tried.
        mu_max: u32,
    },

    /// The u-truncation is too small for the requested derivative.
    #[error("u-truncation degree {umax} is too small (need at least {needed})")]
    UMaxTooSmall {
        /// Configured truncation.
        umax: u32,
        /// Minimal truncation required.
        needed: u32,
    },

    /// A small divisor at the base point is below the admissible floor.
    #[error("small divisor |A(b)| = {value:.3e} below floor {floor:.3e} for weight generated by x^{q:?} d/dx_{i}")]
    ZeroSmallDivisor {
        /// Magnitude of the divisor at the base point.
        value: f64,
        /// Floor the divisor had to exceed.
        floor: f64,
        /// Exponent of the offending monomial.
        q: Vec<u32>,
        /// Direction index of the offending monomial (0-based).
        i: usize,
        /// Weight values on the generators.
        weight: Vec<(f64, f64)>,
    },

    /// A documented precondition of a routine failed.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The resonant part of a Newton step left the span of the S_j.
    #[error("not a good perturbation: resonant part leaves the span of S (relative residual {residual:.3e})")]
    NotGoodPerturbation {
        /// Relative least-squares residual.
        residual: f64,
    },

    /// A diagonal field could not be written as a combination of the S_j.
    #[error("field is not in the span of S (relative residual {residual:.3e})")]
    NotInSpan {
        /// Relative reconstruction residual.
        residual: f64,
    },

    /// A field expected to be diagonal-linear in x has another term.
    #[error("field is not diagonal-linear in x: term x^{q:?} in component {i}")]
    NotDiagonalLinear {
        /// Exponent of the offending term.
        q: Vec<u32>,
        /// Component index (0-based).
        i: usize,
    },

    /// The diophantine partial-sum cap was exceeded.
    #[error("schedule is not diophantine: partial sum {sum:.3e} exceeds cap {cap:.3e} at k = {k}")]
    ScheduleNotDiophantine {
        /// Index at which the cap was exceeded.
        k: u32,
        /// Partial sum reached.
        sum: f64,
        /// Configured cap.
        cap: f64,
    },

    /// The measure bound was requested outside its range of validity.
    #[error("epsilon {eps:.3e} exceeds beta/(2 mu0 + 2) = {limit:.3e}")]
    EpsilonTooLarge {
        /// Requested threshold.
        eps: f64,
        /// Largest admissible threshold.
        limit: f64,
    },

    /// The denominator of the first gamma-star branch is not positive.
    #[error("non-positive denominator {value:.3e} in gamma-star")]
    NonPositiveDenominator {
        /// Value of the bracketed combination.
        value: f64,
    },

    /// A Hamiltonian scenario received a perturbation that is not a Hamiltonian.
    #[error("perturbation is not presented as a Hamiltonian: {0}")]
    NotSymplecticPerturbation(String),

    /// A volume-preserving scenario received a field with nonzero divergence.
    #[error("perturbation is not divergence free (max coefficient {max_div:.3e})")]
    NotVolumePreserving {
        /// Largest divergence coefficient.
        max_div: f64,
    },

    /// The adaptive integrator could not meet the tolerance.
    #[error("step size underflow at t = {t:.6e}")]
    StepUnderflow {
        /// Time reached.
        t: f64,
    },

    /// A trajectory left the allowed polydisc.
    #[error("trajectory left the polydisc of radius {radius:.3e} at t = {t:.6e}")]
    FlowEscapedDomain {
        /// Time reached.
        t: f64,
        /// Radius of the polydisc.
        radius: f64,
    },

    /// Malformed input that does not fit another category.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
