//! Small divisors, the nilpotent operator `D_m` and the cohomological equation.

use serde::Serialize;

use super::state::NormalizationState;
use crate::error::{Error, Result};
use crate::psalg::{TruncatedSeries, VectorField, C64};
use crate::resonance::Weight;

/// Smallest admissible divisor threshold.
pub const DIVISOR_FLOOR_MIN: f64 = 1e-12;

/// `A_{m,α}(u) = Σ_j a_j^m(u) α(g_j)`.
pub fn small_divisor(alpha: &Weight, state: &NormalizationState) -> TruncatedSeries {
    let ring = state.ring();
    let mut acc = TruncatedSeries::zero(ring);
    for (aj, v) in state.a.iter().zip(&alpha.vals) {
        acc.add_scaled(aj, *v);
    }
    acc
}

/// Truncated inverse `1/A` of a u-series with `A(b) ≠ 0`, from the geometric expansion
/// `1/A = (1/A_0) Σ_k (-(A - A_0)/A_0)^k`, which terminates at the u-truncation.
pub fn u_inverse(a: &TruncatedSeries) -> TruncatedSeries {
    let ring = a.ring();
    let a0 = a.at_base().iter().map(|(_, c)| c).sum::<C64>();
    let inv0 = C64::new(1.0, 0.0) / a0;
    let h = (a - &TruncatedSeries::constant(ring, a0)).scale(-inv0);
    let mut acc = TruncatedSeries::constant(ring, inv0);
    let mut term = acc.clone();
    for _ in 0..ring.umax() {
        term = &term * &h;
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

fn divisor_inverse(
    alpha: &Weight,
    state: &NormalizationState,
    floor: f64,
) -> Result<(TruncatedSeries, f64)> {
    let a = small_divisor(alpha, state);
    let a0 = a.at_base().iter().map(|(_, c)| c).sum::<C64>();
    let floor = floor.max(DIVISOR_FLOOR_MIN);
    if a0.norm() < floor {
        let (q, i) = alpha.source();
        return Err(Error::ZeroSmallDivisor {
            value: a0.norm(),
            floor,
            q: q.to_vec(),
            i,
            weight: alpha.vals.iter().map(|v| (v.re, v.im)).collect(),
        });
    }
    Ok((u_inverse(&a), a0.norm()))
}

/// `D_m(U) = Σ_j (Σ_k ∂a_j^m/∂u_k · U(x^{R_k})) S_j`.
pub fn d_m_operator(u: &VectorField, state: &NormalizationState) -> Result<VectorField> {
    let ring = state.ring();
    if ring.umax() < 1 {
        return Err(Error::UMaxTooSmall { umax: ring.umax(), needed: 1 });
    }
    let p = state.r.p();
    let dpi_u: Vec<TruncatedSeries> = (0..p)
        .map(|k| u.lie_derivative(&state.r.monomial(ring, k)))
        .collect::<Result<_>>()?;
    let f: Vec<TruncatedSeries> = state
        .a
        .iter()
        .map(|aj| {
            let mut acc = TruncatedSeries::zero(ring);
            for (k, dk) in dpi_u.iter().enumerate() {
                let da = aj.deriv_u(k);
                if !da.is_zero() && !dk.is_zero() {
                    acc = &acc + &(&da * dk);
                }
            }
            acc
        })
        .collect();
    Ok(super::state::nf_field(&f, &state.s, ring))
}

/// Solution `U = (Id - D_m/A)(B/A)` of `[NF^m, U] + D_m(U) = B` for `B` in the
/// weight space of a nonzero weight `α`, with `A = A_{m,α}`.
pub fn cohomological_solve(
    b: &VectorField,
    alpha: &Weight,
    state: &NormalizationState,
    divisor_floor: f64,
) -> Result<VectorField> {
    solve_signed(b, alpha, state, divisor_floor, -1.0).map(|(u, _)| u)
}

/// Solution `U = (Id + D_m/A)(B/A)` of `[NF^m, U] - D_m(U) = B`, the equation whose
/// fibered lift `Ũ` satisfies `[ÑF, Ũ] = B̃` on the x-components.
/// Also returns `|A_{m,α}(b)|`.
pub fn fibered_solve(
    b: &VectorField,
    alpha: &Weight,
    state: &NormalizationState,
    divisor_floor: f64,
) -> Result<(VectorField, f64)> {
    solve_signed(b, alpha, state, divisor_floor, 1.0)
}

fn solve_signed(
    b: &VectorField,
    alpha: &Weight,
    state: &NormalizationState,
    divisor_floor: f64,
    sign: f64,
) -> Result<(VectorField, f64)> {
    if b.is_zero() {
        return Ok((VectorField::zero(state.ring()), f64::INFINITY));
    }
    let (inv, a0) = divisor_inverse(alpha, state, divisor_floor)?;
    let v = b.mul_fn(&inv);
    let dv = d_m_operator(&v, state)?.mul_fn(&inv);
    Ok((v.try_add(&dv.scale(C64::new(sign, 0.0)))?, a0))
}

/// Residual `[NF^m, U] + D_m(U) - B`, with the bracket taken in x only.
pub fn cohomological_residual(
    u: &VectorField,
    b: &VectorField,
    state: &NormalizationState,
) -> Result<VectorField> {
    let nf = state.nf();
    nf.lie_bracket(u)?.try_add(&d_m_operator(u, state)?)?.try_sub(b)
}

/// Inputs of the estimate `|U| ≤ (c_1/(γ² ω²)) |B|` on the radii `(r, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CohomBoundInputs {
    /// Constant `c_1`.
    pub c1: f64,
    /// Diophantine constant `γ`.
    pub gamma: f64,
    /// `ω_{k+1}`.
    pub omega: f64,
    /// x-radius.
    pub r: f64,
    /// u-radius.
    pub t: f64,
}

/// Both sides `(|U|_{t,r}, (c_1/(γ²ω²)) |B|_{t,r})` of the cohomological estimate.
/// Fails when `Σ_k |∂a_j/∂u_k|_t > 1` for some `j`.
pub fn cohom_norm_bound_check(
    u: &VectorField,
    b: &VectorField,
    state: &NormalizationState,
    inp: &CohomBoundInputs,
) -> Result<(f64, f64)> {
    for (j, aj) in state.a.iter().enumerate() {
        let d: f64 = (0..state.r.p()).map(|k| aj.deriv_u(k).majorant_norm(inp.r, inp.t)).sum();
        if d > 1.0 {
            return Err(Error::PreconditionViolated(format!(
                "|D_u a_{j}| = {d:.3e} exceeds 1 on the u-ball of radius {}",
                inp.t
            )));
        }
    }
    let lhs = u.majorant_norm(inp.r, inp.t);
    let rhs = inp.c1 / (inp.gamma * inp.omega).powi(2) * b.majorant_norm(inp.r, inp.t);
    Ok((lhs, rhs))
}
