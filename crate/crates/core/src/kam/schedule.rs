//! Diophantine sequences and the constants driving the Newton induction:
//! `t_m`, `γ_k`, `θ_k`, the radii ladder, `ε` and `c_1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psalg::{Ring, TruncatedSeries};
use crate::resonance::{LinearMorphism, ResonantStructure};

/// Default number of terms summed when validating a schedule.
pub const DEFAULT_SUM_TERMS: u32 = 1000;

/// Default cap on the partial sums `Σ_k -ln ω_k / 2^k`.
pub const DEFAULT_SUM_CAP: f64 = 1000.0;

/// Generator of the sequence `ω_k`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaPreset {
    /// `ω_k = 1`, the integer-spectrum case.
    Constant,
    /// `ω_k = c / (k + 1)^τ`.
    Power {
        /// Prefactor `c ∈ (0, 1]`.
        c: f64,
        /// Exponent `τ ≥ 0`.
        tau: f64,
    },
    /// `ω_k = c · 2^{-σ k}`.
    Geometric {
        /// Prefactor `c ∈ (0, 1]`.
        c: f64,
        /// Rate `σ ≥ 0`.
        sigma: f64,
    },
    /// Explicit values `ω_1, ω_2, …`; the last value is repeated beyond the list.
    Explicit {
        /// The listed values.
        values: Vec<f64>,
    },
}

impl OmegaPreset {
    /// `ln ω_k`, computed without underflow for the closed-form presets.
    pub fn ln_value(&self, k: u32) -> f64 {
        match self {
            OmegaPreset::Constant => 0.0,
            OmegaPreset::Power { c, tau } => c.ln() - tau * (k as f64 + 1.0).ln(),
            OmegaPreset::Geometric { c, sigma } => c.ln() - sigma * k as f64 * std::f64::consts::LN_2,
            OmegaPreset::Explicit { .. } => self.value(k).ln(),
        }
    }

    /// `ω_k`; by convention `ω_0 = 1` for explicit lists.
    pub fn value(&self, k: u32) -> f64 {
        match self {
            OmegaPreset::Constant => 1.0,
            OmegaPreset::Power { c, tau } => c / (k as f64 + 1.0).powf(*tau),
            OmegaPreset::Geometric { c, sigma } => c * (-sigma * k as f64 * std::f64::consts::LN_2).exp(),
            OmegaPreset::Explicit { values } => match k {
                0 => 1.0,
                _ => values.get(k as usize - 1).or(values.last()).copied().unwrap_or(1.0),
            },
        }
    }
}

/// Diophantine sequence `ω` with the constants `γ`, `γ′`, `c_1`, `l`, `Λ`, `p`, `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophantineSchedule {
    /// The sequence `ω_k`.
    pub omega: OmegaPreset,
    /// Diophantine constant `γ`.
    pub gamma: f64,
    /// Cap `γ′ ≥ γ`.
    pub gamma_cap: f64,
    /// Constant `c_1` of the cohomological estimate.
    pub c1: f64,
    /// Number `l` of generators of the abelian algebra.
    pub l: usize,
    /// `Λ = max_{i,j} |λ_i(g_j)|`.
    pub lam_max: f64,
    /// Number `p` of resonant monomials.
    pub p: usize,
    /// Dimension `n`.
    pub n: usize,
    /// Cap on the partial sums `Σ_k -ln ω_k / 2^k`.
    pub sum_cap: f64,
    /// Number of terms checked by [`DiophantineSchedule::validate`].
    pub sum_terms: u32,
}

impl DiophantineSchedule {
    /// Builds and validates a schedule with the default partial-sum cap.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega: OmegaPreset,
        gamma: f64,
        gamma_cap: f64,
        c1: f64,
        l: usize,
        lam_max: f64,
        p: usize,
        n: usize,
    ) -> Result<Self> {
        let s = Self {
            omega,
            gamma,
            gamma_cap,
            c1,
            l,
            lam_max,
            p,
            n,
            sum_cap: DEFAULT_SUM_CAP,
            sum_terms: DEFAULT_SUM_TERMS,
        };
        s.validate()?;
        Ok(s)
    }

    /// Schedule for a morphism `S` with `p` resonant monomials; `c_1` from [`c1_constant`].
    pub fn for_morphism(omega: OmegaPreset, gamma: f64, gamma_cap: f64, s: &LinearMorphism, p: usize, m_r: f64) -> Result<Self> {
        let c1 = c1_constant(s.n(), p, s.l(), m_r, gamma_cap);
        Self::new(omega, gamma, gamma_cap, c1, s.l(), s.lam_max(), p, s.n())
    }

    /// `ω_k`.
    pub fn omega(&self, k: u32) -> f64 {
        self.omega.value(k)
    }

    /// Checks `0 ≤ γ ≤ γ′`, `0 < ω_{k+1} ≤ ω_k ≤ 1` and the partial-sum cap over `sum_terms` terms.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma <= self.gamma_cap && self.gamma_cap.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "need 0 <= gamma <= gamma_cap, got gamma = {}, gamma_cap = {}",
                self.gamma, self.gamma_cap
            )));
        }
        if !(self.c1 > 0.0 && self.lam_max > 0.0 && self.l > 0) {
            return Err(Error::InvalidInput("c1, Lambda and l must be positive".into()));
        }
        self.partial_sums(self.sum_terms).map(|_| ())
    }

    /// Partial sums `Σ_{j=1}^{k} -ln ω_j / 2^j` for `k = 1..=k_max`; fails once the cap is exceeded.
    pub fn partial_sums(&self, k_max: u32) -> Result<Vec<f64>> {
        let mut sums = Vec::with_capacity(k_max as usize);
        let mut acc = 0.0;
        let mut prev = self.omega.ln_value(0);
        for k in 1..=k_max {
            let lw = self.omega.ln_value(k);
            if !(lw.is_finite() && lw <= 0.0) {
                return Err(Error::InvalidInput(format!("omega_{k} = {} is not in (0, 1]", lw.exp())));
            }
            if lw > prev {
                return Err(Error::InvalidInput(format!("omega is increasing at k = {k}")));
            }
            prev = lw;
            acc += -lw / 2f64.powi(k as i32);
            if acc > self.sum_cap {
                return Err(Error::ScheduleNotDiophantine { k, sum: acc, cap: self.sum_cap });
            }
            sums.push(acc);
        }
        Ok(sums)
    }
}

fn m_of(k: u32) -> f64 {
    2f64.powi(k as i32)
}

/// `t_m = γ ω_{k+1} / (2 l Λ (2m + 1))` with `m = 2^k`.
pub fn t_m(k: u32, sched: &DiophantineSchedule) -> f64 {
    let m = m_of(k);
    sched.gamma * sched.omega(k + 1) / (2.0 * sched.l as f64 * sched.lam_max * (2.0 * m + 1.0))
}

/// `ε = γ ω_{k+1} / (24 l Λ (2m + 1))` with `m = 2^k`.
pub fn epsilon(k: u32, sched: &DiophantineSchedule) -> f64 {
    t_m(k, sched) / 12.0
}

/// `γ_k = (c_1 / (γ² ω_{k+1}²))^{-1/m}` clamped to at most 1.
pub fn gamma_k(k: u32, sched: &DiophantineSchedule) -> f64 {
    let m = m_of(k);
    let w = sched.omega(k + 1);
    let base = sched.gamma * sched.gamma * w * w / sched.c1;
    base.powf(1.0 / m).min(1.0)
}

/// `θ_k` and the ladder `r_i = θ_k^i r`, `i = 1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiiLadder {
    /// `θ_k = γ_k m^{-2/m}`.
    pub theta: f64,
    /// `r_1, …, r_5`.
    pub radii: [f64; 5],
}

/// `θ_k = γ_k m^{-2/m}` and `r_i = θ_k^i r`; requires `1/2 < r ≤ 1`.
pub fn theta_and_radii(k: u32, r: f64, sched: &DiophantineSchedule) -> Result<RadiiLadder> {
    if !(r > 0.5 && r <= 1.0) {
        return Err(Error::PreconditionViolated(format!("radius {r} is not in (1/2, 1]")));
    }
    let m = m_of(k);
    let theta = gamma_k(k, sched) * m.powf(-2.0 / m);
    let mut radii = [0.0; 5];
    let mut v = r;
    for ri in radii.iter_mut() {
        v *= theta;
        *ri = v;
    }
    Ok(RadiiLadder { theta, radii })
}

/// Result of [`radii_limit`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiiLimit {
    /// First index of the sequence.
    pub k_start: u32,
    /// `R_k` for `k = k_start..=k_max`.
    pub r: Vec<f64>,
    /// Limit estimate: the product continued until its factors equal 1 in double precision.
    pub limit: f64,
    /// Tail ratios `limit / R_k` for the listed `k`.
    pub tail_ratio: Vec<f64>,
    /// First index with `limit / R_k > 1/2`, hence `R_j > R_k / 2` for every `j > k`.
    pub k1: Option<u32>,
}

/// `R_{k+1} = γ_k^5 m^{-10/m} R_k` from `R_{k_start} = r0` up to `k_max`.
pub fn radii_limit(r0: f64, k_start: u32, k_max: u32, sched: &DiophantineSchedule) -> Result<RadiiLimit> {
    if k_max < k_start {
        return Err(Error::InvalidInput("k_max must be at least k_start".into()));
    }
    sched.partial_sums(k_max + 1)?;
    let factor = |k: u32| {
        let m = m_of(k);
        gamma_k(k, sched).powi(5) * m.powf(-10.0 / m)
    };
    let mut r = vec![r0];
    for k in k_start..k_max {
        let last = *r.last().expect("nonempty");
        r.push(last * factor(k));
    }
    let mut limit = *r.last().expect("nonempty");
    let mut k = k_max;
    while k < 1000 {
        let f = factor(k);
        if f == 1.0 {
            break;
        }
        limit *= f;
        k += 1;
    }
    let tail_ratio: Vec<f64> = r.iter().map(|v| limit / v).collect();
    let k1 = tail_ratio.iter().position(|t| *t > 0.5).map(|i| k_start + i as u32);
    Ok(RadiiLimit { k_start, r, limit, tail_ratio, k1 })
}

/// One row of the schedule-coherence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherenceRow {
    /// Index `k` with `m = 2^k`.
    pub k: u32,
    /// `t_m`.
    pub t_m: f64,
    /// `t_{2m}`.
    pub t_2m: f64,
    /// `ε`.
    pub eps: f64,
    /// Whether `t_{2m} + ε < t_m`.
    pub holds: bool,
}

/// Table of `t_{2m} + ε < t_m` for `k = 0..=k_max`, with the first index from which it holds throughout.
pub fn schedule_coherence(sched: &DiophantineSchedule, k_max: u32) -> (Vec<CoherenceRow>, Option<u32>) {
    let rows: Vec<CoherenceRow> = (0..=k_max)
        .map(|k| {
            let (tm, t2m, eps) = (t_m(k, sched), t_m(k + 1, sched), epsilon(k, sched));
            CoherenceRow { k, t_m: tm, t_2m: t2m, eps, holds: t2m + eps < tm }
        })
        .collect();
    let threshold = (0..rows.len()).find(|&i| rows[i..].iter().all(|r| r.holds)).map(|i| i as u32);
    (rows, threshold)
}

/// `c_1 = 4(γ′/2 + p n l m_r)`.
pub fn c1_constant(n: usize, p: usize, l: usize, m_r: f64, gamma_cap: f64) -> f64 {
    4.0 * (gamma_cap / 2.0 + (p * n * l) as f64 * m_r)
}

/// `m_r = max_j |S_j|_r · |Dπ|_r`, with `|Dπ|_r` the largest majorant norm of a partial derivative of some `x^{R_k}`.
pub fn m_r(s: &LinearMorphism, r_struct: &ResonantStructure, r: f64) -> Result<f64> {
    let dmax = (0..r_struct.p()).map(|k| r_struct.degree(k)).max().unwrap_or(1).max(1);
    let ring = Ring::new(s.n(), 0, dmax, 0, vec![])?;
    let s_norm = (0..s.l()).map(|j| s.s_field(&ring, j).majorant_norm(r, 0.0)).fold(0.0, f64::max);
    let mut dpi: f64 = 0.0;
    for k in 0..r_struct.p() {
        let mono = TruncatedSeries::x_monomial(&ring, r_struct.row(k));
        for i in 0..s.n() {
            dpi = dpi.max(mono.deriv_x(i).majorant_norm(r, 0.0));
        }
    }
    Ok(s_norm * dpi)
}
