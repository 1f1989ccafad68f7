//! Strict diophantineness, the sublevel-set measure bound, `γ*` and the norm-ball
//! membership checks of the induction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalform::NormalizationState;
use crate::resonance::{omega_s, LinearMorphism, OmegaWindow};

use super::schedule::{t_m, DiophantineSchedule};

/// Result of [`strictly_diophantine_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrictDiophantine {
    /// `(2^k + n + 1)^{n+1} (ω_k / ω_k(S))^{2/μ_0}` for `k = 1..=k_max`.
    pub sequence: Vec<f64>,
    /// `ω_k(S)` for `k = 1..=k_max`.
    pub omega_s: Vec<f64>,
    /// First index from which the sequence decreases over the computed range.
    pub decreasing_since: Option<u32>,
    /// Whether the sequence decreases on the second half of the range and its last value is below its first.
    pub verified_on_range: bool,
    /// `M_{ω,ω(S),2/μ_0}`: supremum of the sequence over the range.
    pub m_pow: f64,
    /// `M_{ω,ω(S)}`: supremum of `ω_k / ω_k(S)` over the range.
    pub m_ratio: f64,
}

/// Evaluates the strict diophantine sequence up to `k_max`. The limit is only observed
/// on the computed range; `verified_on_range` is a heuristic, not a proof.
pub fn strictly_diophantine_check(
    sched: &DiophantineSchedule,
    s: &LinearMorphism,
    mu0: u32,
    k_max: u32,
    window: OmegaWindow,
) -> Result<StrictDiophantine> {
    if mu0 == 0 || k_max == 0 {
        return Err(Error::InvalidInput("need mu0 >= 1 and k_max >= 1".into()));
    }
    let n = s.n() as f64;
    let mut sequence = Vec::new();
    let mut oms = Vec::new();
    let mut m_ratio: f64 = 0.0;
    for k in 1..=k_max {
        let os = omega_s(s, k, window)?;
        let ratio = sched.omega(k) / os;
        m_ratio = m_ratio.max(ratio);
        oms.push(os);
        sequence.push((2f64.powi(k as i32) + n + 1.0).powf(n + 1.0) * ratio.powf(2.0 / mu0 as f64));
    }
    let m_pow = sequence.iter().copied().fold(0.0, f64::max);
    let last_increase = sequence.windows(2).rposition(|w| w[1] >= w[0]);
    let decreasing_since = match last_increase {
        None => Some(1),
        Some(i) if i + 2 < sequence.len() => Some(i as u32 + 2),
        Some(_) => None,
    };
    let half = k_max.div_ceil(2);
    let verified_on_range = sequence.len() >= 2
        && decreasing_since.is_some_and(|k| k <= half)
        && sequence.last() < sequence.first();
    Ok(StrictDiophantine { sequence, omega_s: oms, decreasing_since, verified_on_range, m_pow, m_ratio })
}

/// `B = 3 (2πe)^{n/2} (μ_0 + 1)^{μ_0 + 2} / (μ_0 + 1)!` for real dimension `n`.
pub fn russmann_constant(mu0: u32, n_real: u32) -> f64 {
    let fact: f64 = (1..=mu0 + 1).map(|v| v as f64).product();
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    3.0 * two_pi_e.powf(n_real as f64 / 2.0) * ((mu0 + 1) as f64).powi(mu0 as i32 + 2) / fact
}

/// `B d^{n-1} (1/√n + 2d + d/ϑ) (ε/β)^{1/μ_0} β^{-1} ‖g‖`; requires `0 ≤ ε ≤ β/(2μ_0 + 2)`.
pub fn russmann_measure_bound(
    eps: f64,
    beta: f64,
    mu0: u32,
    n_real: u32,
    d: f64,
    theta: f64,
    g_norm: f64,
) -> Result<f64> {
    if !(beta > 0.0 && d > 0.0 && theta > 0.0 && mu0 > 0 && n_real > 0) {
        return Err(Error::InvalidInput("beta, d, theta, mu0 and n must be positive".into()));
    }
    let limit = beta / (2.0 * mu0 as f64 + 2.0);
    if eps.is_nan() || eps < 0.0 || eps > limit {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    let n = n_real as f64;
    let b = russmann_constant(mu0, n_real);
    Ok(b * d.powf(n - 1.0) * (1.0 / n.sqrt() + 2.0 * d + d / theta) * (eps / beta).powf(1.0 / mu0 as f64) / beta
        * g_norm)
}

/// Inputs of [`gamma_star`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaStarInputs {
    /// Admissible measure loss `ε*`.
    pub eps_star: f64,
    /// Constant `M` of the sublevel estimate.
    pub m: f64,
    /// `a_1 = (ω_1/ω_1(S))^{2/μ_0}`.
    pub a1: f64,
    /// `a_2 = (ω_2/ω_2(S))^{2/μ_0}`.
    pub a2: f64,
    /// Nondegeneracy index `μ_0`.
    pub mu0: u32,
    /// Dimension `n`.
    pub n: u32,
    /// `M_{ω,ω(S)}`.
    pub m_ratio: f64,
    /// `M_{ω,ω(S),2/μ_0}`.
    pub m_pow: f64,
    /// Nondegeneracy amount `β`.
    pub beta: f64,
}

/// `γ* = min[(ε*(n-1)!/(M D))^{μ_0/2}, √(β/(2μ_0+2)) / M_{ω,ω(S)}]` with
/// `D = (2² + n)^n a_2 - (n+1) a_1 + (n/4) M_{ω,ω(S),2/μ_0}`.
pub fn gamma_star(inp: &GammaStarInputs) -> Result<f64> {
    let n = inp.n as f64;
    let denom = (4.0 + n).powf(n) * inp.a2 - (n + 1.0) * inp.a1 + n / 4.0 * inp.m_pow;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::NonPositiveDenominator { value: denom });
    }
    let fact: f64 = (1..inp.n.max(1)).map(|v| v as f64).product();
    let first = (inp.eps_star * fact / (inp.m * denom)).powf(inp.mu0 as f64 / 2.0);
    let second = (inp.beta / (2.0 * inp.mu0 as f64 + 2.0)).sqrt() / inp.m_ratio;
    Ok(first.min(second))
}

/// Norms and ball memberships of a normalization state at step `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormBallReport {
    /// Step index with `m = 2^k`.
    pub k: u32,
    /// Radius `r` in x.
    pub r: f64,
    /// Radius `t_m` in u.
    pub t_m: f64,
    /// `|NF^m|_{t_m, r}`.
    pub nf_norm: f64,
    /// `max_j |∂NF^m/∂u_j|_{t_m, r}`.
    pub du_nf_norm: f64,
    /// `|remainder|_{t_m, r}`.
    pub remainder_norm: f64,
    /// `1 - 1/m³`.
    pub nf_threshold: f64,
    /// `|NF^m| < 1 - 1/m³`.
    pub in_nf_ball: bool,
    /// `2⁵ n / m⁴`.
    pub b_threshold: f64,
    /// `|remainder| < 2⁵ n / m⁴`.
    pub in_b_ball: bool,
    /// `|L^{-1}|`, max row sum.
    pub l_inv_norm: f64,
    /// `max_{j,k} |∂a_j/∂u_k|_{t_m}` computed directly.
    pub du_a_direct: f64,
    /// `2 l |L^{-1}| max_j |∂NF^m/∂u_j|_{t_m,r}`.
    pub du_a_transferred: f64,
    /// Whether `‖D_u a^m‖ ≤ 1`.
    pub du_a_at_most_one: bool,
}

/// Evaluates the norms of `NF^m` and of the remainder at `(t_m, r)` and the derived bounds on `D_u a`.
pub fn norm_ball_checks(state: &NormalizationState, k: u32, r: f64, sched: &DiophantineSchedule) -> NormBallReport {
    let m = 2f64.powi(k as i32);
    let t = t_m(k, sched);
    let nf = state.nf();
    let p = state.ring().p();
    let du_nf_norm = (0..p)
        .map(|j| nf.map(|c| c.deriv_u(j)).majorant_norm(r, t))
        .fold(0.0, f64::max);
    let du_a_direct = state
        .a
        .iter()
        .flat_map(|a| (0..p).map(move |j| a.deriv_u(j).majorant_norm(r, t)))
        .fold(0.0, f64::max);
    let nf_norm = nf.majorant_norm(r, t);
    let remainder_norm = state.remainder.majorant_norm(r, t);
    let nf_threshold = 1.0 - 1.0 / (m * m * m);
    let b_threshold = 32.0 * state.s.n() as f64 / (m * m * m * m);
    let l_inv_norm = state.extraction.inverse_norm;
    NormBallReport {
        k,
        r,
        t_m: t,
        nf_norm,
        du_nf_norm,
        remainder_norm,
        nf_threshold,
        in_nf_ball: nf_norm < nf_threshold,
        b_threshold,
        in_b_ball: remainder_norm < b_threshold,
        l_inv_norm,
        du_a_direct,
        du_a_transferred: 2.0 * state.s.l() as f64 * l_inv_norm * du_nf_norm,
        du_a_at_most_one: du_a_direct <= 1.0,
    }
}

/// `(‖a^{2m} - a^m‖, 2 l |L^{-1}| |NF^{2m} - NF^m|)` at `(t, r)` for two consecutive states.
pub fn a_nf_transfer(prev: &NormalizationState, next: &NormalizationState, r: f64, t: f64) -> Result<(f64, f64)> {
    let mut direct: f64 = 0.0;
    for (a, b) in next.a.iter().zip(&prev.a) {
        direct = direct.max(a.try_sub(b)?.majorant_norm(r, t));
    }
    let dnf = next.nf().try_sub(&prev.nf())?.majorant_norm(r, t);
    Ok((direct, 2.0 * next.s.l() as f64 * next.extraction.inverse_norm * dnf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kam::schedule::OmegaPreset;
    use crate::psalg::{Ring, TruncatedSeries, VectorField, C64};
    use crate::resonance::ResonantStructure;

    fn one_pair() -> LinearMorphism {
        LinearMorphism::from_integers(&[vec![1, -1]]).unwrap()
    }

    #[test]
    fn strict_sequence_examples() {
        let s = one_pair();
        let mu0 = 1;
        let sigma = (2 + 2) as f64 * mu0 as f64;
        let sched = DiophantineSchedule::new(OmegaPreset::Geometric { c: 1.0, sigma }, 0.1, 1.0, 6.0, 1, 1.0, 1, 2).unwrap();
        let res = strictly_diophantine_check(&sched, &s, mu0, 10, OmegaWindow::Dyadic).unwrap();
        for (i, v) in res.sequence.iter().enumerate() {
            let k = i as i32 + 1;
            let direct = (2f64.powi(k) + 3.0).powi(3) * 2f64.powf(-2.0 * sigma * k as f64);
            assert!((v - direct).abs() <= 1e-12 * direct);
        }
        assert!(res.verified_on_range && res.sequence[9] < 1e-14);
        let flat = DiophantineSchedule::new(OmegaPreset::Constant, 0.1, 1.0, 6.0, 1, 1.0, 1, 2).unwrap();
        let res = strictly_diophantine_check(&flat, &s, mu0, 8, OmegaWindow::Dyadic).unwrap();
        assert!(!res.verified_on_range && res.decreasing_since.is_none());
        assert_eq!(res.m_ratio, 1.0);
        let one = strictly_diophantine_check(&flat, &s, mu0, 1, OmegaWindow::Dyadic).unwrap();
        assert_eq!(one.sequence.len(), 1);
        assert_eq!(one.m_pow, one.sequence[0]);
    }

    #[test]
    fn russmann_constant_and_bound() {
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        assert!((russmann_constant(1, 2) - 12.0 * two_pi_e).abs() < 1e-12);
        assert_eq!(russmann_measure_bound(0.0, 1.0, 1, 2, 1.0, 1.0, 1.0).unwrap(), 0.0);
        let a = russmann_measure_bound(0.1, 1.0, 2, 2, 1.0, 1.0, 1.0).unwrap();
        let b = russmann_measure_bound(0.15, 1.0, 2, 2, 1.0, 1.0, 1.0).unwrap();
        assert!(b > a);
        assert!(matches!(
            russmann_measure_bound(0.3, 1.0, 1, 2, 1.0, 1.0, 1.0),
            Err(Error::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn russmann_bound_dominates_linear_sublevel_set() {
        // g(y) = y_1 on [-1, 1]^2: β = 1 for μ_0 = 1 and mes{|g| ≤ ε} = 4ε.
        let d = 8f64.sqrt();
        for eps in [0.01, 0.05, 0.2] {
            let bound = russmann_measure_bound(eps, 1.0, 1, 2, d, 1.0, 1.0).unwrap();
            assert!(bound >= 4.0 * eps);
        }
    }

    fn star(eps_star: f64, beta: f64) -> GammaStarInputs {
        GammaStarInputs { eps_star, m: 1.0, a1: 1.0, a2: 1.0, mu0: 2, n: 2, m_ratio: 1.0, m_pow: 4.0, beta }
    }

    #[test]
    fn gamma_star_examples() {
        // D = 36 - 3 + 2 = 35; first branch (ε*/35)^{1}.
        let g = gamma_star(&star(0.7, 1e12)).unwrap();
        assert!((g - 0.02).abs() < 1e-15);
        let small = gamma_star(&star(1e-9, 1e12)).unwrap();
        assert!(small < 1e-10);
        let capped = gamma_star(&star(0.7, 6e-4)).unwrap();
        assert!((capped - 0.01).abs() < 1e-15);
        let bad = GammaStarInputs { a1: 100.0, ..star(0.7, 1.0) };
        assert!(matches!(gamma_star(&bad), Err(Error::NonPositiveDenominator { .. })));
    }

    fn state_with(a: Vec<TruncatedSeries>, ring: &std::sync::Arc<Ring>) -> NormalizationState {
        let s = one_pair();
        let r = ResonantStructure::new(&s, vec![vec![1, 1]]).unwrap();
        NormalizationState::new(s, r, a, VectorField::zero(ring), 8).unwrap()
    }

    #[test]
    fn nf_ball_threshold() {
        let ring = Ring::new(2, 1, 9, 4, vec![C64::new(0.0, 0.0)]).unwrap();
        let sched = DiophantineSchedule::new(OmegaPreset::Constant, 0.1, 1.0, 6.0, 1, 1.0, 1, 2).unwrap();
        // |S_1|_r = r, so a = 0.9/r puts |NF| at 0.9.
        let r = 0.75;
        let st = state_with(vec![TruncatedSeries::constant(&ring, C64::new(0.9 / r, 0.0))], &ring);
        let rep = norm_ball_checks(&st, 3, r, &sched);
        assert!((rep.nf_norm - 0.9).abs() < 1e-15);
        assert_eq!(rep.in_nf_ball, 0.9 < 1.0 - 1.0 / 512.0);
        assert!(rep.in_b_ball && rep.remainder_norm == 0.0);
    }

    #[test]
    fn a_nf_transfer_dominates_direct() {
        let ring = Ring::new(2, 1, 9, 4, vec![C64::new(0.0, 0.0)]).unwrap();
        let sched = DiophantineSchedule::new(OmegaPreset::Constant, 0.1, 1.0, 6.0, 1, 1.0, 1, 2).unwrap();
        let one = TruncatedSeries::constant(&ring, C64::new(1.0, 0.0));
        let a = one.try_add(&TruncatedSeries::u(&ring, 0).scale(C64::new(0.1, 0.0))).unwrap();
        let st = state_with(vec![a], &ring);
        let rep = norm_ball_checks(&st, 2, 0.75, &sched);
        assert!((rep.du_a_direct - 0.1).abs() < 1e-15);
        assert!(rep.du_a_direct <= rep.du_a_transferred && rep.du_a_at_most_one);
        let prev = state_with(vec![one], &ring);
        let (direct, transferred) = a_nf_transfer(&prev, &st, 0.75, 0.01).unwrap();
        assert!(direct <= transferred && direct > 0.0);
    }
}
