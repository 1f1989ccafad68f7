//! Substitution, Lie series and inversion of diffeomorphisms tangent to the identity.

use std::collections::HashMap;

use super::field::{FiberedField, VectorField};
use super::key::Key;
use super::series::{merge_sorted, TruncatedSeries, C64};
use crate::error::{Error, Result};

/// Evaluates `f` at `x_i = args[i]`, keeping the u-dependence of `f` as a factor.
/// The arguments must share the ring of `f` and have x-order at least 1 for
/// the truncated result to be exact.
pub fn substitute_x(f: &TruncatedSeries, args: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let ring = f.ring();
    if args.len() != ring.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} arguments for n = {}",
            args.len(),
            ring.n()
        )));
    }
    let shape = f.shape();
    let one = TruncatedSeries::constant(ring, C64::new(1.0, 0.0));
    let mut cache: HashMap<Key, TruncatedSeries> = HashMap::new();
    cache.insert(Key(0), one);

    fn value(
        k: Key,
        shape: &super::key::Shape,
        args: &[TruncatedSeries],
        cache: &mut HashMap<Key, TruncatedSeries>,
    ) -> TruncatedSeries {
        if let Some(v) = cache.get(&k) {
            return v.clone();
        }
        let i = (0..shape.n).find(|&i| shape.x(k, i) > 0).expect("nonzero key");
        let prev = value(k.sub(shape.x_unit(i)), shape, args, cache);
        let v = &prev * &args[i];
        cache.insert(k, v.clone());
        v
    }

    let umax = ring.umax();
    let mut acc: Vec<(Key, C64)> = Vec::new();
    for (key, c) in f.map() {
        let xk = shape.x_part(*key);
        let uk = shape.u_part(*key);
        let ud = shape.udeg(uk);
        let v = value(xk, &shape, args, &mut cache);
        for (vk, vc) in v.map() {
            if shape.udeg(*vk) + ud <= umax {
                acc.push((vk.add(uk), vc * c));
            }
        }
    }
    Ok(TruncatedSeries::from_map(ring.clone(), merge_sorted(acc)))
}

/// Evaluates `f` at `x_i = xargs[i]` and `u_k - b_k = wargs[k]`.
/// Arguments for `u - b` may depend on x; the result is exact up to the truncation
/// when every x-argument has x-order at least 1.
pub fn substitute_all(
    f: &TruncatedSeries,
    xargs: &[TruncatedSeries],
    wargs: &[TruncatedSeries],
) -> Result<TruncatedSeries> {
    let ring = f.ring();
    if wargs.len() != ring.p() {
        return Err(Error::DimensionMismatch(format!(
            "{} u-arguments for p = {}",
            wargs.len(),
            ring.p()
        )));
    }
    let shape = f.shape();
    let mut groups: std::collections::BTreeMap<Key, Vec<(Key, C64)>> = Default::default();
    for (key, c) in f.map() {
        groups.entry(shape.u_part(*key)).or_default().push((shape.x_part(*key), *c));
    }
    let mut out = TruncatedSeries::zero(ring);
    for (uk, terms) in groups {
        let xpart = TruncatedSeries::from_map(ring.clone(), terms.into_iter().collect());
        let inner = substitute_x(&xpart, xargs)?;
        let mut factor = TruncatedSeries::constant(ring, C64::new(1.0, 0.0));
        for (k, w) in wargs.iter().enumerate() {
            for _ in 0..shape.u(uk, k) {
                factor = &factor * w;
            }
        }
        out = &out + &(&inner * &factor);
    }
    Ok(out)
}

/// Composition `(Id + A) ∘ (Id + B)` written as `Id + C`, returning `C = B + A∘(Id + B)`.
pub fn compose_displacements(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    let ring = b.ring();
    let args: Vec<TruncatedSeries> = (0..b.n())
        .map(|i| &TruncatedSeries::x(ring, i) + b.comp(i))
        .collect();
    let mut comps = Vec::with_capacity(b.n());
    for i in 0..b.n() {
        comps.push(b.comp(i) + &substitute_x(a.comp(i), &args)?);
    }
    VectorField::new(comps)
}

/// Inverse of `Φ = Id + U` as `Id + V`, by the fixed point `V ← -U∘(Id + V)`.
pub fn invert_diffeo(u: &VectorField) -> Result<VectorField> {
    let ord = u.order();
    if ord < 2 {
        return Err(Error::NotTangentToIdentity { order: ord });
    }
    if u.is_zero() {
        return Ok(u.clone());
    }
    let ring = u.ring().clone();
    let mut v = u.scale(C64::new(-1.0, 0.0));
    for _ in 0..=ring.xmax() {
        let args: Vec<TruncatedSeries> = (0..u.n())
            .map(|i| &TruncatedSeries::x(&ring, i) + v.comp(i))
            .collect();
        let mut next = Vec::with_capacity(u.n());
        for i in 0..u.n() {
            next.push(substitute_x(u.comp(i), &args)?.scale(C64::new(-1.0, 0.0)));
        }
        let next = VectorField::new(next)?;
        let change = next.try_sub(&v)?.max_abs();
        v = next;
        if change == 0.0 {
            break;
        }
    }
    Ok(v)
}

/// Lie series `Σ_k ad_W^k X / k!` with `ad_W X = [W, X]`.
///
/// This is the field `(DΦ·X)∘Φ^{-1}` for `Φ` the time-one map of `-W`,
/// equivalently the pull-back of `X` by the time-one map of `W`.
pub fn pushforward(x: &FiberedField, w: &FiberedField) -> Result<FiberedField> {
    let ord = w.x.order();
    if ord < 2 {
        return Err(Error::NotTangentToIdentity { order: ord });
    }
    let mut acc = x.clone();
    let mut term = x.clone();
    let limit = x.ring().xmax() + 2;
    for k in 1..=limit {
        term = w.bracket(&term).scale(C64::new(1.0 / k as f64, 0.0));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// x-displacement `φ(x, u) - x` of the time-one map of `W`, from the Lie series
/// `x_i∘φ = Σ_j W^j(x_i) / j!` acting on coordinate functions.
pub fn time_one_displacement(w: &FiberedField) -> Result<VectorField> {
    let ord = w.x.order();
    if ord < 2 {
        return Err(Error::NotTangentToIdentity { order: ord });
    }
    let ring = w.ring().clone();
    let limit = ring.xmax() + 2;
    let mut comps = Vec::with_capacity(w.x.n());
    for i in 0..w.x.n() {
        let mut acc = TruncatedSeries::zero(&ring);
        let mut term = TruncatedSeries::x(&ring, i);
        for j in 1..=limit {
            term = w.apply(&term).scale(C64::new(1.0 / j as f64, 0.0));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        comps.push(acc);
    }
    VectorField::new(comps)
}
