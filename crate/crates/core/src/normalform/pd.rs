//! Classical order-by-order Poincaré–Dulac normalization of pure x-fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::psalg::{
    compose_displacements, pushforward, time_one_displacement, FiberedField, Ring,
    TruncatedSeries, VectorField, C64,
};
use crate::resonance::ResonantStructure;

/// Weights of modulus at most this are treated as resonances.
pub const PD_RESONANCE_TOL: f64 = 1e-9;

/// Output of [`poincare_dulac_normalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct PdResult {
    /// Normal form up to the target order; every term is resonant.
    pub normal_form: VectorField,
    /// Homogeneous generators `W_2, …, W_N`, one per degree.
    pub generators: Vec<VectorField>,
    /// Displacement `D` of the normalizing coordinates: `x = y + D(y)`.
    pub displacement: VectorField,
    /// Eigenvalues of the linear part.
    pub eigenvalues: Vec<C64>,
}

fn linear_eigenvalues(x: &VectorField) -> Result<Vec<C64>> {
    let n = x.n();
    let mut lam = vec![C64::new(0.0, 0.0); n];
    for (i, m, c) in x.terms() {
        if m.xdeg() == 0 {
            return Err(Error::InvalidInput("field does not vanish at the origin".into()));
        }
        if m.xdeg() == 1 {
            if m.xexp[i] != 1 {
                return Err(Error::NotDiagonalLinear { q: m.xexp.clone(), i });
            }
            lam[i] = c;
        }
    }
    Ok(lam)
}

/// Normalizes a field `X = Λx + …` on a pure x-ring (`p = 0`) with diagonal linear
/// part degree by degree up to `target_order`.
///
/// At degree `d`, each term `c x^Q ∂_i` with weight `w = (Q, λ) - λ_i` is kept when
/// `|w| ≤` [`PD_RESONANCE_TOL`] and otherwise removed by the generator term
/// `(c/w) x^Q ∂_i`. Weights between the tolerance and `divisor_floor` are reported.
pub fn poincare_dulac_normalize(
    x: &VectorField,
    target_order: u32,
    divisor_floor: f64,
) -> Result<PdResult> {
    let ring = x.ring().clone();
    if ring.p() != 0 {
        return Err(Error::InvalidInput("the oracle works on pure x-series (p = 0)".into()));
    }
    if target_order > ring.xmax() {
        return Err(Error::TruncationExceeded(format!(
            "target order {target_order} exceeds xmax {}",
            ring.xmax()
        )));
    }
    let lam = linear_eigenvalues(x)?;
    let mut cur = FiberedField::new(x.clone(), vec![])?;
    let mut generators = Vec::new();
    let mut disp = VectorField::zero(&ring);
    for d in 2..=target_order {
        let block = cur.x.jet_range(d, d);
        let mut w = VectorField::zero(&ring);
        for (i, m, c) in block.terms() {
            let wt: C64 = m.xexp.iter().zip(&lam).map(|(&q, l)| l * q as f64).sum::<C64>() - lam[i];
            let size = wt.norm();
            if size <= PD_RESONANCE_TOL {
                continue;
            }
            if size < divisor_floor {
                return Err(Error::ZeroSmallDivisor {
                    value: size,
                    floor: divisor_floor,
                    q: m.xexp.clone(),
                    i,
                    weight: vec![(wt.re, wt.im)],
                });
            }
            w.comp_mut(i).insert(&m, c / wt)?;
        }
        if !w.is_zero() {
            let wf = FiberedField::new(w.clone(), vec![])?;
            cur = pushforward(&cur, &wf)?;
            disp = compose_displacements(&disp, &time_one_displacement(&wf)?)?;
        }
        generators.push(w);
    }
    Ok(PdResult { normal_form: cur.x.jet(target_order), generators, displacement: disp, eigenvalues: lam })
}

/// Replaces `u_k - b_k` by `x^{R_k} - b_k` in every term, producing a series on the
/// pure x-ring `out` (which must have `p = 0` and the same `n`).
pub fn graph_substitute(
    f: &TruncatedSeries,
    r: &ResonantStructure,
    out: &Arc<Ring>,
) -> Result<TruncatedSeries> {
    let ring = f.ring();
    if out.p() != 0 || out.n() != ring.n() {
        return Err(Error::DimensionMismatch("target ring must be a pure x-ring of equal n".into()));
    }
    let shifted: Vec<TruncatedSeries> = (0..r.p())
        .map(|k| {
            &TruncatedSeries::x_monomial(out, r.row(k))
                - &TruncatedSeries::constant(out, ring.base()[k])
        })
        .collect();
    let mut acc = TruncatedSeries::zero(out);
    for (m, c) in f.iter() {
        if m.xdeg() > out.xmax() {
            continue;
        }
        let mut t = TruncatedSeries::x_monomial(out, &m.xexp).scale(c);
        for (k, &e) in m.uexp.iter().enumerate() {
            if e > 0 {
                t = &t * &shifted[k].pow(e);
            }
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Field version of [`graph_substitute`].
pub fn graph_substitute_field(
    x: &VectorField,
    r: &ResonantStructure,
    out: &Arc<Ring>,
) -> Result<VectorField> {
    VectorField::new(x.comps().iter().map(|c| graph_substitute(c, r, out)).collect::<Result<_>>()?)
}
