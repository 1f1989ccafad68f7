//! Conjugacy, invariance and oracle cross-checks of a normalization.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::flow::{flow, FlowOptions};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::normalform::{
    graph_substitute_field, normalize_to, poincare_dulac_normalize, NormalizationState, StepOptions,
};
use crate::psalg::{compose_displacements, reduce_on_fiber, Ring, TruncatedSeries, VectorField, C64};
use crate::resonance::ResonantStructure;

/// Image `Θ_b(y)` of the chain `x = y + U_k(y, π(y))` applied from the last step to the first.
pub fn theta_point(state: &NormalizationState, y: &[C64]) -> Vec<C64> {
    let mut z = y.to_vec();
    for phi in state.psi.iter().rev() {
        let u = state.r.pi(&z);
        let d = phi.displacement().eval(&z, &u);
        for (zi, di) in z.iter_mut().zip(d) {
            *zi += di;
        }
    }
    z
}

/// Preimage `Ψ_b(x)` of `Θ_b` by the fixed point `y ← y + x - Θ_b(y)`.
pub fn psi_point(state: &NormalizationState, x: &[C64]) -> Vec<C64> {
    let mut y = x.to_vec();
    for _ in 0..100 {
        let t = theta_point(state, &y);
        let mut change: f64 = 0.0;
        for i in 0..y.len() {
            let d = x[i] - t[i];
            y[i] += d;
            change = change.max(d.norm());
        }
        if change <= 1e-17 * (1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max)) {
            break;
        }
    }
    y
}

/// Displacement `D` of `Θ_b = Id + D` as a polynomial map on the pure x-ring `out`.
pub fn theta_series(state: &NormalizationState, out: &std::sync::Arc<Ring>) -> Result<VectorField> {
    let mut d = VectorField::zero(out);
    for phi in state.psi.iter().rev() {
        let g = graph_substitute_field(phi.displacement(), &state.r, out)?;
        d = compose_displacements(&g, &d)?;
    }
    Ok(d)
}

/// Conjugacy defect on the fiber `π^{-1}(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjugacyResidual {
    /// Majorant norm at `ρ` of the fiber-reduced defect, terms of x-degree `≤` the order.
    pub residual: f64,
    /// Majorant norm at `ρ` of the unreduced defect terms above the order.
    pub tail: f64,
    /// Normalized order `m`.
    pub order: u32,
}

/// `DΘ_b · NF_b - X∘Θ_b`, reduced modulo `x^{R_k} = b_k`.
pub fn conjugacy_residual(
    scn: &Scenario,
    state: &NormalizationState,
    rho: f64,
) -> Result<ConjugacyResidual> {
    let xmax = state.ring().xmax();
    let out = Ring::new(scn.n(), 0, xmax, 0, vec![])?;
    let d = theta_series(state, &out)?;
    let nf = graph_substitute_field(&state.nf(), &state.r, &out)?;
    let x = scn.x_field(xmax)?;
    let n = scn.n();
    let args: Vec<TruncatedSeries> = (0..n).map(|i| &TruncatedSeries::x(&out, i) + d.comp(i)).collect();
    let mut defect = Vec::with_capacity(n);
    for i in 0..n {
        let mut lhs = nf.comp(i).clone();
        let grad: Vec<TruncatedSeries> = (0..n).map(|j| d.comp(i).deriv_x(j)).collect();
        for (j, g) in grad.iter().enumerate() {
            if !g.is_zero() {
                lhs = &lhs + &(g * nf.comp(j));
            }
        }
        let rhs = crate::psalg::substitute_x(x.comp(i), &args)?;
        defect.push(&lhs - &rhs);
    }
    let order = state.m;
    let low_ring = Ring::new(n, 0, order, 0, vec![])?;
    let b = state.base();
    let mut residual: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for f in &defect {
        residual = residual.max(reduce_on_fiber(f, &state.r, b, &low_ring).majorant_norm(rho, 1.0));
        tail = tail.max(f.jet_range(order + 1, xmax).majorant_norm(rho, 1.0));
    }
    Ok(ConjugacyResidual { residual, tail, order })
}

/// Orthonormal real basis of `ker R ⊂ R^n`.
fn kernel_basis(r: &ResonantStructure, n: usize) -> Vec<Vec<f64>> {
    let p = r.p();
    if p == 0 {
        return (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    }
    let m = DMatrix::from_fn(n, n, |i, j| if i < p { f64::from(r.row(i)[j]) } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-10 {
            out.push(vt.row(k).iter().copied().collect());
        }
    }
    out
}

/// Points of `π^{-1}(b)`: the minimal-norm logarithmic solution of `x^{R_k} = b_k`
/// (principal branch) moved by a grid of `n_samples` angles per kernel-torus direction.
pub fn fiber_samples(r: &ResonantStructure, n: usize, b: &[C64], n_samples: usize) -> Result<Vec<Vec<C64>>> {
    let p = r.p();
    if b.len() != p {
        return Err(Error::DimensionMismatch("base point length differs from p".into()));
    }
    if b.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::InvalidInput("fiber sampling needs b_k ≠ 0".into()));
    }
    let rm = DMatrix::from_fn(p, n, |k, j| f64::from(r.row(k)[j]));
    let rrt = &rm * rm.transpose();
    let inv = rrt.try_inverse().ok_or_else(|| Error::InvalidInput("R R^T is singular".into()))?;
    let lb_re = DMatrix::from_fn(p, 1, |k, _| b[k].ln().re);
    let lb_im = DMatrix::from_fn(p, 1, |k, _| b[k].ln().im);
    let s_re = rm.transpose() * &inv * lb_re;
    let s_im = rm.transpose() * &inv * lb_im;
    let x0: Vec<C64> = (0..n).map(|j| C64::new(s_re[j], s_im[j]).exp()).collect();
    let ker = kernel_basis(r, n);
    let mut pts = vec![x0];
    for dir in &ker {
        let mut next = Vec::with_capacity(pts.len() * n_samples);
        for pt in &pts {
            for k in 0..n_samples.max(1) {
                let th = 2.0 * PI * k as f64 / n_samples.max(1) as f64;
                next.push(pt.iter().zip(dir).map(|(z, d)| z * C64::from_polar(1.0, th * d)).collect());
            }
        }
        pts = next;
    }
    Ok(pts)
}

/// Drift statistics of conserved quantities along flows started on `Θ_b(π^{-1}(b))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantStats {
    /// `max |π(Ψ_b(x(t))) - b|` along flows started at `Θ_b(y)`.
    pub straightened: f64,
    /// `max |π(x(t)) - π(Θ_b(y))|` along the same flows.
    pub raw: f64,
    /// `max |π(x(t)) - b|` along flows started at `y` itself (no normalization).
    pub unnormalized: f64,
    /// `max |Θ_b(Ψ_b(x)) - x|` over the sampled initial points.
    pub inverse_error: f64,
    /// Number of sampled fiber points.
    pub samples: usize,
}

/// Invariance test of the analytic sets `V_b = Θ_b(π^{-1}(b))` under the flow of `X`.
pub fn invariant_residual(
    scn: &Scenario,
    state: &NormalizationState,
    rho: f64,
    t_end: f64,
    n_samples: usize,
    flow_opts: &FlowOptions,
) -> Result<InvariantStats> {
    let b = state.base().to_vec();
    let n = scn.n();
    let pts = fiber_samples(&state.r, n, &b, n_samples)?;
    if pts.iter().flatten().any(|v| v.norm() > rho * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("fiber over b is not inside the polydisc of radius {rho}")));
    }
    let x = scn.x_field(state.ring().xmax())?;
    let opts = FlowOptions { escape_radius: Some(2.0 * rho), ..*flow_opts };
    let dist = |a: &[C64], c: &[C64]| a.iter().zip(c).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    let mut stats = InvariantStats { straightened: 0.0, raw: 0.0, unnormalized: 0.0, inverse_error: 0.0, samples: pts.len() };
    for y in &pts {
        let x0 = theta_point(state, y);
        stats.inverse_error = stats.inverse_error.max(dist(&theta_point(state, &psi_point(state, &x0)), &x0));
        let p0 = state.r.pi(&x0);
        let tr = flow(&x, &x0, t_end, &opts)?;
        for s in &tr.states {
            let straight = state.r.pi(&psi_point(state, s));
            stats.straightened = stats.straightened.max(dist(&straight, &b));
            stats.raw = stats.raw.max(dist(&state.r.pi(s), &p0));
        }
        let tr0 = flow(&x, y, t_end, &opts)?;
        for s in &tr0.states {
            stats.unnormalized = stats.unnormalized.max(dist(&state.r.pi(s), &b));
        }
    }
    Ok(stats)
}

/// Comparison of the Newton and Poincaré–Dulac normal forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    /// Largest coefficient of the difference up to the order.
    pub discrepancy: f64,
    /// Largest coefficient of the Poincaré–Dulac normal form.
    pub scale: f64,
    /// Common order.
    pub order: u32,
    /// `xmax` used by the Newton run.
    pub xmax: u32,
    /// `umax` used by the Newton run.
    pub umax: u32,
}

/// Normalizes the scenario to `order` by Newton steps at base `b = 0` and by
/// Poincaré–Dulac, substitutes `u = π(x)` in the Newton normal form and compares
/// coefficients of x-degree at most `order`.
pub fn oracle_equivalence(scn: &Scenario, order: u32, b: &[C64], divisor_floor: f64) -> Result<OracleComparison> {
    if b.iter().any(|v| v.norm() != 0.0) {
        return Err(Error::InvalidInput(
            "the Poincaré–Dulac oracle expands around the origin; use b = 0".into(),
        ));
    }
    let xmax = scn.required_xmax(order);
    let dmin = scn.r.min_degree().max(1);
    let umax = order.div_ceil(dmin);
    let ring = scn.ring(xmax, umax, b.to_vec())?;
    let st = normalize_to(&scn.initial_state(&ring)?, order, &StepOptions { divisor_floor })?;
    let out = Ring::new(scn.n(), 0, order, 0, vec![])?;
    let newton = graph_substitute_field(&st.nf(), &scn.r, &out)?;
    let pd = poincare_dulac_normalize(&scn.x_field(order)?, order, divisor_floor)?;
    let discrepancy = newton.try_sub(&pd.normal_form)?.max_abs();
    Ok(OracleComparison { discrepancy, scale: pd.normal_form.max_abs(), order, xmax, umax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::scenario::{scenario_hamiltonian, PerturbationSpec, TimeConvention};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn quintic(eps: f64) -> Vec<(Vec<u32>, C64)> {
        vec![(vec![3, 2], c(eps / 4.0)), (vec![2, 3], c(eps / 4.0))]
    }

    #[test]
    fn fiber_points_lie_on_fiber() {
        let scn = scenario_hamiltonian(2, &[vec![1.0], vec![2.0]], &PerturbationSpec::Hamiltonian(vec![]), TimeConvention::Real)
            .unwrap();
        let b = [c(0.01), C64::new(0.0, 0.02)];
        let pts = fiber_samples(&scn.r, 4, &b, 4).unwrap();
        assert_eq!(pts.len(), 16);
        for p in &pts {
            let v = scn.r.pi(p);
            assert!((v[0] - b[0]).norm() < 1e-15 && (v[1] - b[1]).norm() < 1e-15);
        }
        assert!((pts[0][0].norm() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn unperturbed_scenario_is_trivially_normal() {
        let scn = scenario_hamiltonian(1, &[vec![1.0, 0.5]], &PerturbationSpec::Hamiltonian(vec![]), TimeConvention::Real)
            .unwrap();
        let ring = scn.ring(9, 4, vec![c(0.01)]).unwrap();
        let st = normalize_to(&scn.initial_state(&ring).unwrap(), 8, &StepOptions::default()).unwrap();
        assert!(st.psi.is_empty());
        let res = conjugacy_residual(&scn, &st, 0.1).unwrap();
        assert!(res.residual < 1e-15, "{res:?}");
        let cmp = oracle_equivalence(&scn, 8, &[c(0.0)], 1e-12).unwrap();
        assert!(cmp.discrepancy < 1e-14);
        let stats = invariant_residual(&scn, &st, 0.1, 1.0, 4, &FlowOptions::default()).unwrap();
        assert!(stats.straightened < 1e-10 && stats.unnormalized < 1e-10, "{stats:?}");
    }

    #[test]
    fn one_step_conjugacy_and_oracle() {
        let scn = scenario_hamiltonian(1, &[vec![1.0]], &PerturbationSpec::Hamiltonian(quintic(1.0)), TimeConvention::Real)
            .unwrap();
        let ring = scn.ring(9, 4, vec![c(0.01)]).unwrap();
        let st = normalize_to(&scn.initial_state(&ring).unwrap(), 8, &StepOptions::default()).unwrap();
        let res = conjugacy_residual(&scn, &st, 0.1).unwrap();
        assert!(res.residual < 1e-9, "{res:?}");
        let cmp = oracle_equivalence(&scn, 8, &[c(0.0)], 1e-12).unwrap();
        assert!(cmp.discrepancy < 1e-9, "{cmp:?}");
    }
}
