//! Fibered lifts, push-forward by fibered diffeomorphisms and the quadratic Newton step.

use super::cohom::fibered_solve;
use super::state::{extract_a_coeffs, span_residual, FiberedDiffeo, NormalizationState, StepRecord, GOOD_TOL};
use crate::error::{Error, Result};
use crate::psalg::{
    pushforward, sigma_reduce_field_with_cofactors, substitute_all, time_one_displacement,
    FiberedField, TruncatedSeries, VectorField,
};
use crate::resonance::{weight_decomposition, ResonantStructure};

/// Lift `X̃ = (X, π_*X)` with `u`-components `X(x^{R_k})`.
pub fn fibered_lift(x: &VectorField, r: &ResonantStructure) -> Result<FiberedField> {
    let ring = x.ring();
    let u = (0..r.p())
        .map(|k| x.lie_derivative(&r.monomial(ring, k)))
        .collect::<Result<Vec<_>>>()?;
    FiberedField::new(x.clone(), u)
}

/// Push-forward `Φ̃_* X̃ = (DΦ̃·X̃)∘Φ̃^{-1}` of a field on `C^n × C^p` by the fibered
/// extension of `Φ`, with `Φ̃^{-1}` obtained by fixed-point iteration.
pub fn apply_fibered_diffeo(
    x: &FiberedField,
    phi: &FiberedDiffeo,
    r: &ResonantStructure,
) -> Result<FiberedField> {
    let ring = x.ring().clone();
    let uu = phi.displacement().retruncate(&ring);
    let ord = uu.order();
    if ord < 2 {
        return Err(Error::NotTangentToIdentity { order: ord });
    }
    if uu.is_zero() {
        return Ok(x.clone());
    }
    let delta: Vec<TruncatedSeries> = phi.v_rule(r)?.iter().map(|d| d.retruncate(&ring)).collect();
    let gx: Vec<TruncatedSeries> = (0..ring.n())
        .map(|i| x.x.comp(i) + &x.apply(uu.comp(i)))
        .collect();
    let gu: Vec<TruncatedSeries> = (0..ring.p()).map(|k| &x.u[k] + &x.apply(&delta[k])).collect();

    // Inverse (ξ, η) of (x, w) ↦ (x + U, w + δ): ξ = y - U(ξ, η), η = w - δ(ξ, η).
    let ys: Vec<TruncatedSeries> = (0..ring.n()).map(|i| TruncatedSeries::x(&ring, i)).collect();
    let ws: Vec<TruncatedSeries> = (0..ring.p()).map(|k| TruncatedSeries::w(&ring, k)).collect();
    let (mut xi, mut eta) = (ys.clone(), ws.clone());
    for _ in 0..=ring.xmax() + 1 {
        let nxi: Vec<TruncatedSeries> = (0..ring.n())
            .map(|i| Ok(&ys[i] - &substitute_all(uu.comp(i), &xi, &eta)?))
            .collect::<Result<_>>()?;
        let neta: Vec<TruncatedSeries> = (0..ring.p())
            .map(|k| Ok(&ws[k] - &substitute_all(&delta[k], &xi, &eta)?))
            .collect::<Result<_>>()?;
        let same = nxi.iter().zip(&xi).all(|(a, b)| a == b) && neta.iter().zip(&eta).all(|(a, b)| a == b);
        xi = nxi;
        eta = neta;
        if same {
            break;
        }
    }
    let ox = gx.iter().map(|g| substitute_all(g, &xi, &eta)).collect::<Result<Vec<_>>>()?;
    let ou = gu.iter().map(|g| substitute_all(g, &xi, &eta)).collect::<Result<Vec<_>>>()?;
    FiberedField::new(VectorField::new(ox)?, ou)
}

/// Parameters of one Newton step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOptions {
    /// Threshold below which `|A_{m,α}(b)|` counts as zero.
    pub divisor_floor: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { divisor_floor: 1e-12 }
    }
}

/// One quadratic step `m → 2m`.
///
/// The remainder terms of x-degree `m+1 ..= 2m` are split by weight. Nonzero weights
/// are removed by a generator `W` solving `[NF^m, W] - D_m(W) = B_α`; the zero-weight
/// block is reduced modulo `Σ` and absorbed into the coefficients `a_j`. The lifted
/// field is then transported by the Lie series of the lifted generator.
pub fn newton_step(state: &NormalizationState, opts: &StepOptions) -> Result<NormalizationState> {
    let ring = state.ring().clone();
    let m = state.m;
    if 2 * m + 1 > ring.xmax() {
        return Err(Error::TruncationExceeded(format!(
            "a step from order {m} needs xmax ≥ {}, ring has {}",
            2 * m + 1,
            ring.xmax()
        )));
    }
    let b = state.remainder.jet_range(m + 1, 2 * m);

    let mut w = VectorField::zero(&ring);
    let mut b0 = VectorField::zero(&ring);
    let mut min_divisor = f64::INFINITY;
    let mut min_source = None;
    let mut weights_solved = 0;
    for (alpha, part) in weight_decomposition(&b, &state.s) {
        if alpha.is_zero() {
            b0 = b0.try_add(&part)?;
            continue;
        }
        let (u, a0) = fibered_solve(&part, &alpha, state, opts.divisor_floor)?;
        weights_solved += 1;
        if a0 < min_divisor {
            min_divisor = a0;
            let (q, i) = alpha.source();
            min_source = Some((q.to_vec(), i));
        }
        w = w.try_add(&u)?;
    }

    let (b0s, cof, dropped) = sigma_reduce_field_with_cofactors(&b0, &state.r)?;
    let span = span_residual(&b0s, &state.s);
    if span >= GOOD_TOL {
        return Err(Error::NotGoodPerturbation { residual: span });
    }
    let mut a = state.a.clone();
    if !b0s.is_zero() {
        let da = extract_a_coeffs(&b0s, &state.s, &state.extraction)?;
        for (aj, dj) in a.iter_mut().zip(&da) {
            *aj = &*aj + dj;
        }
    }

    let nf = state.nf();
    let mut psi = state.psi.clone();
    let (remainder, low) = if w.is_zero() {
        (state.remainder.jet_range(2 * m + 1, ring.xmax()), 0.0)
    } else {
        let y = fibered_lift(&nf.try_add(&state.remainder)?, &state.r)?;
        let wl = fibered_lift(&w, &state.r)?;
        let z = pushforward(&y, &wl)?;
        let rest = z.x.try_sub(&nf)?.try_sub(&b0)?;
        psi.push(FiberedDiffeo::new(time_one_displacement(&wl)?)?);
        (rest.jet_range(2 * m + 1, ring.xmax()), rest.jet(2 * m).max_abs())
    };

    let record = StepRecord {
        k: m.ilog2(),
        m,
        divisor_floor: opts.divisor_floor,
        min_divisor,
        min_divisor_source: min_source,
        weights_solved,
        generator_max: w.max_abs(),
        resonant_max: b0.max_abs(),
        low_degree_residual: low,
        sigma_dropped: dropped,
        span_residual: span,
        remainder_max: remainder.max_abs(),
    };
    let mut ledger = state.ledger.clone();
    ledger.push(record);
    Ok(NormalizationState {
        s: state.s.clone(),
        r: state.r.clone(),
        extraction: state.extraction.clone(),
        m: 2 * m,
        a,
        remainder,
        sigma_part: cof,
        resonant_part: b0s,
        psi,
        ledger,
    })
}

/// Runs Newton steps until the normalized order reaches at least `target`.
pub fn normalize_to(
    state: &NormalizationState,
    target: u32,
    opts: &StepOptions,
) -> Result<NormalizationState> {
    let mut st = state.clone();
    while st.m < target {
        st = newton_step(&st, opts)?;
    }
    Ok(st)
}

/// The field `NF^m + remainder` of a state, as a field on `C^n` with u as parameter.
pub fn current_field(state: &NormalizationState) -> Result<VectorField> {
    state.nf().try_add(&state.remainder)
}
