//! Diophantine schedules, the constants of the Newton induction, the compact-set
//! filter on base points and the measure estimates.

mod grid;
mod measure;
mod schedule;

pub use grid::{filter_k, filter_k_with, filter_stages, CompactGrid, FilterStage, PointRecord, Rectangle};
pub use measure::{
    a_nf_transfer, gamma_star, norm_ball_checks, russmann_constant, russmann_measure_bound,
    strictly_diophantine_check, GammaStarInputs, NormBallReport, StrictDiophantine,
};
pub use schedule::{
    c1_constant, epsilon, gamma_k, m_r, radii_limit, schedule_coherence, t_m, theta_and_radii,
    CoherenceRow, DiophantineSchedule, OmegaPreset, RadiiLadder, RadiiLimit, DEFAULT_SUM_CAP,
    DEFAULT_SUM_TERMS,
};
