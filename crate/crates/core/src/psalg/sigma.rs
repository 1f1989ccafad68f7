//! Reduction modulo the ideal `(x^{R_k} - u_k)` defining `Σ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::field::VectorField;
use super::key::{Key, MultiIndex, MAX_DEGREE};
use super::series::{merge_sorted, Ring, TruncatedSeries, C64};
use crate::error::{Error, Result};
use crate::resonance::ResonantStructure;

/// Outcome of a reduction: `f = reduced + Σ_k (x^{R_k} - u_k) cofactors[k] + dropped`.
#[derive(Clone, Debug)]
pub struct SigmaReduction {
    /// Canonical representative: no x-monomial divisible by any `x^{R_k}`.
    pub reduced: TruncatedSeries,
    /// Ideal coefficients `g_k`.
    pub cofactors: Vec<TruncatedSeries>,
    /// Sum of magnitudes of coefficients pushed beyond the u-truncation.
    pub dropped: f64,
}

/// Exponents `e_k` removed greedily by `R_1, …, R_p` in ascending order, and the remainder.
fn greedy_split(shape_x: &[u32], r: &ResonantStructure) -> (Vec<u32>, Vec<u32>) {
    let mut q = shape_x.to_vec();
    let mut e = vec![0u32; r.p()];
    for (k, ek) in e.iter_mut().enumerate() {
        let row = r.row(k);
        while row.iter().zip(&q).all(|(a, b)| a <= b) {
            for (qi, ri) in q.iter_mut().zip(row) {
                *qi -= ri;
            }
            *ek += 1;
        }
    }
    (e, q)
}

/// Reduces `f` modulo `(x^{R_k} - u_k)` with the fixed strategy (graded-lex terms,
/// rows in ascending order until no row divides), tracking ideal cofactors.
/// Terms pushed beyond the u-truncation are dropped and their mass reported.
pub fn sigma_reduce_with_cofactors(
    f: &TruncatedSeries,
    r: &ResonantStructure,
) -> Result<SigmaReduction> {
    let ring = f.ring().clone();
    if r.p() != ring.p() || r.rows().iter().any(|row| row.len() != ring.n()) {
        return Err(Error::DimensionMismatch(
            "resonant structure does not match the series dimensions".into(),
        ));
    }
    let shape = f.shape();
    let umax = ring.umax();
    let wide = ring.with_truncation(ring.xmax(), (umax + ring.xmax()).min(MAX_DEGREE));
    let rkeys: Vec<Key> = (0..r.p())
        .map(|k| shape.pack(&MultiIndex::x_only(r.row(k).to_vec(), ring.p())))
        .collect();
    let u_lin: Vec<TruncatedSeries> = (0..r.p()).map(|k| TruncatedSeries::u(&wide, k)).collect();

    let mut red: Vec<(Key, C64)> = Vec::new();
    let mut cof: Vec<Vec<(Key, C64)>> = vec![Vec::new(); r.p()];
    let mut dropped = 0.0;
    for (key, c) in f.map() {
        let xexp = shape.xexp(*key);
        let (e, _) = greedy_split(&xexp, r);
        if e.iter().all(|&v| v == 0) {
            red.push((*key, *c));
            continue;
        }
        let mut xkey = shape.x_part(*key);
        let ukey = shape.u_part(*key);
        let mut factor = TruncatedSeries::from_map(wide.clone(), BTreeMap::from([(ukey, *c)]));
        for k in 0..r.p() {
            for _ in 0..e[k] {
                xkey = xkey.sub(rkeys[k]);
                for (fk, fc) in factor.map() {
                    if shape.udeg(*fk) <= umax {
                        cof[k].push((xkey.add(*fk), *fc));
                    }
                }
                factor = &factor * &u_lin[k];
            }
        }
        for (fk, fc) in factor.map() {
            if shape.udeg(*fk) <= umax {
                red.push((xkey.add(*fk), *fc));
            } else {
                dropped += fc.norm();
            }
        }
    }
    let reduced = TruncatedSeries::from_map(ring.clone(), merge_sorted(red));
    let cofactors = cof
        .into_iter()
        .map(|v| TruncatedSeries::from_map(ring.clone(), merge_sorted(v)))
        .collect();
    Ok(SigmaReduction { reduced, cofactors, dropped })
}

/// Canonical representative modulo `Σ`; fails if a nonzero term would exceed `umax`.
pub fn sigma_reduce(f: &TruncatedSeries, r: &ResonantStructure) -> Result<TruncatedSeries> {
    let red = sigma_reduce_with_cofactors(f, r)?;
    if red.dropped > 0.0 {
        return Err(Error::TruncationExceeded(format!(
            "reduction needs u-degree above {} (dropped mass {:.3e})",
            f.ring().umax(),
            red.dropped
        )));
    }
    Ok(red.reduced)
}

/// Representative modulo `Σ` that silently truncates in u; returns the dropped mass.
pub fn sigma_reduce_truncating(
    f: &TruncatedSeries,
    r: &ResonantStructure,
) -> Result<(TruncatedSeries, f64)> {
    let red = sigma_reduce_with_cofactors(f, r)?;
    Ok((red.reduced, red.dropped))
}

/// Restriction `f_{|Σ}`: every `x^{R_k}` replaced by `u_k`.
pub fn restrict_sigma(f: &TruncatedSeries, r: &ResonantStructure) -> Result<TruncatedSeries> {
    sigma_reduce(f, r)
}

/// Componentwise reduction of a vector field, truncating in u.
pub fn sigma_reduce_field(v: &VectorField, r: &ResonantStructure) -> Result<(VectorField, f64)> {
    let mut comps = Vec::with_capacity(v.n());
    let mut dropped = 0.0;
    for c in v.comps() {
        let (s, d) = sigma_reduce_truncating(c, r)?;
        comps.push(s);
        dropped += d;
    }
    Ok((VectorField::new(comps)?, dropped))
}

/// Componentwise reduction of a vector field with ideal cofactors per component.
pub fn sigma_reduce_field_with_cofactors(
    v: &VectorField,
    r: &ResonantStructure,
) -> Result<(VectorField, Vec<VectorField>, f64)> {
    let mut comps = Vec::with_capacity(v.n());
    let mut cofs: Vec<Vec<TruncatedSeries>> = vec![Vec::new(); r.p()];
    let mut dropped = 0.0;
    for c in v.comps() {
        let red = sigma_reduce_with_cofactors(c, r)?;
        comps.push(red.reduced);
        for (k, g) in red.cofactors.into_iter().enumerate() {
            cofs[k].push(g);
        }
        dropped += red.dropped;
    }
    let cofs = cofs
        .into_iter()
        .map(VectorField::new)
        .collect::<Result<Vec<_>>>()?;
    Ok((VectorField::new(comps)?, cofs, dropped))
}

/// Reduces a pure x-series modulo `(x^{R_k} - b_k)`, i.e. restricts it to the fiber
/// `π^{-1}(b)`. The result keeps terms of x-degree at most `xmax_out`.
pub fn reduce_on_fiber(
    f: &TruncatedSeries,
    r: &ResonantStructure,
    b: &[C64],
    out: &Arc<Ring>,
) -> TruncatedSeries {
    let shape = f.shape();
    let out_shape = out.shape();
    let mut acc: Vec<(Key, C64)> = Vec::new();
    for (key, c) in f.map() {
        let xexp = shape.xexp(*key);
        let (e, q) = greedy_split(&xexp, r);
        let deg: u32 = q.iter().sum();
        if deg > out.xmax() {
            continue;
        }
        let mut v = *c;
        for (k, &ek) in e.iter().enumerate() {
            v *= b[k].powu(ek);
        }
        let m = MultiIndex::x_only(q, out.p());
        acc.push((out_shape.pack(&m), v));
    }
    TruncatedSeries::from_map(out.clone(), merge_sorted(acc))
}
