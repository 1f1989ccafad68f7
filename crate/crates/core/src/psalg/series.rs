//! Truncated bi-graded power series `f(x, u) = Σ f_{Q,P} x^Q (u-b)^P`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::key::{Key, MultiIndex, Shape, MAX_DEGREE, MAX_VARS};
use crate::error::{Error, Result};

/// Complex double-precision scalar used for every coefficient.
pub type C64 = Complex64;

/// Relative magnitude below which coefficients are dropped.
pub const PRUNE_REL: f64 = 1e-14;

/// Order reported for the zero series; larger than any admissible truncation.
pub const INFINITE_ORDER: u32 = u32::MAX;

/// Ambient data shared by a family of series: dimensions, truncation and base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring {
    n: usize,
    p: usize,
    xmax: u32,
    umax: u32,
    base: Vec<C64>,
}

impl Ring {
    /// Creates the ambient data for series in `n` x-variables and `p` u-variables,
    /// truncated at x-degree `xmax` and u-degree `umax`, expanded around `base`.
    pub fn new(n: usize, p: usize, xmax: u32, umax: u32, base: Vec<C64>) -> Result<Arc<Ring>> {
        if n + p > MAX_VARS {
            return Err(Error::DimensionMismatch(format!(
                "n + p = {} exceeds the supported {MAX_VARS} variables",
                n + p
            )));
        }
        if xmax > MAX_DEGREE || umax > MAX_DEGREE {
            return Err(Error::InvalidInput(format!(
                "truncation degrees must not exceed {MAX_DEGREE}"
            )));
        }
        if base.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "base point has {} entries, expected {p}",
                base.len()
            )));
        }
        Ok(Arc::new(Ring { n, p, xmax, umax, base }))
    }

    /// Number of x-variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of u-variables.
    pub fn p(&self) -> usize {
        self.p
    }

    /// x-truncation degree.
    pub fn xmax(&self) -> u32 {
        self.xmax
    }

    /// u-truncation degree.
    pub fn umax(&self) -> u32 {
        self.umax
    }

    /// Base point of the u-expansion.
    pub fn base(&self) -> &[C64] {
        &self.base
    }

    /// Same ambient space with other truncation degrees.
    pub fn with_truncation(&self, xmax: u32, umax: u32) -> Arc<Ring> {
        Arc::new(Ring { xmax, umax, ..self.clone() })
    }

    /// Same dimensions and truncation, expanded around another base point.
    pub fn with_base(&self, base: Vec<C64>) -> Result<Arc<Ring>> {
        Ring::new(self.n, self.p, self.xmax, self.umax, base)
    }

    pub(crate) fn shape(&self) -> Shape {
        Shape { n: self.n, p: self.p }
    }

    /// Checks that two rings can be combined and returns the tighter one.
    pub fn join(a: &Arc<Ring>, b: &Arc<Ring>) -> Result<Arc<Ring>> {
        if Arc::ptr_eq(a, b) {
            return Ok(a.clone());
        }
        if a.n != b.n || a.p != b.p {
            return Err(Error::DimensionMismatch(format!(
                "(n, p) = ({}, {}) versus ({}, {})",
                a.n, a.p, b.n, b.p
            )));
        }
        if a.base != b.base {
            return Err(Error::BasePointMismatch);
        }
        if a.xmax <= b.xmax && a.umax <= b.umax {
            Ok(a.clone())
        } else if b.xmax <= a.xmax && b.umax <= a.umax {
            Ok(b.clone())
        } else {
            Ok(a.with_truncation(a.xmax.min(b.xmax), a.umax.min(b.umax)))
        }
    }
}

/// Finitely supported truncated series with complex coefficients.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    ring: Arc<Ring>,
    terms: BTreeMap<Key, C64>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for (m, c) in self.iter() {
            l.entry(&(m.xexp, m.uexp, c.re, c.im));
        }
        l.finish()
    }
}

impl TruncatedSeries {
    /// The zero series.
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self { ring: ring.clone(), terms: BTreeMap::new() }
    }

    /// A constant series.
    pub fn constant(ring: &Arc<Ring>, c: C64) -> Self {
        let mut s = Self::zero(ring);
        if c != C64::new(0.0, 0.0) {
            s.terms.insert(Key(0), c);
        }
        s
    }

    /// The coordinate function `x_i` (0-based).
    pub fn x(ring: &Arc<Ring>, i: usize) -> Self {
        let mut s = Self::zero(ring);
        if ring.xmax >= 1 {
            s.terms.insert(ring.shape().x_unit(i), C64::new(1.0, 0.0));
        }
        s
    }

    /// The shifted variable `u_k - b_k` (0-based).
    pub fn w(ring: &Arc<Ring>, k: usize) -> Self {
        let mut s = Self::zero(ring);
        if ring.umax >= 1 {
            s.terms.insert(ring.shape().u_unit(k), C64::new(1.0, 0.0));
        }
        s
    }

    /// The variable `u_k = b_k + (u_k - b_k)`.
    pub fn u(ring: &Arc<Ring>, k: usize) -> Self {
        let mut s = Self::w(ring, k);
        let b = ring.base[k];
        if b != C64::new(0.0, 0.0) {
            s.terms.insert(Key(0), b);
        }
        s
    }

    /// A single monomial `c x^Q (u-b)^P`, or zero if it exceeds the truncation.
    pub fn monomial(ring: &Arc<Ring>, m: &MultiIndex, c: C64) -> Result<Self> {
        let mut s = Self::zero(ring);
        s.insert(m, c)?;
        Ok(s)
    }

    /// The pure x-monomial `x^Q` with unit coefficient.
    pub fn x_monomial(ring: &Arc<Ring>, q: &[u32]) -> Self {
        let m = MultiIndex::x_only(q.to_vec(), ring.p);
        Self::monomial(ring, &m, C64::new(1.0, 0.0)).expect("dimensions are consistent")
    }

    /// Builds a series from explicit terms; repeated indices are summed.
    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut s = Self::zero(ring);
        for (m, c) in terms {
            s.insert(&m, c)?;
        }
        s.prune();
        Ok(s)
    }

    /// Adds `c` to the coefficient of `m`, ignoring monomials beyond the truncation.
    pub fn insert(&mut self, m: &MultiIndex, c: C64) -> Result<()> {
        if m.xexp.len() != self.ring.n || m.uexp.len() != self.ring.p {
            return Err(Error::DimensionMismatch(format!(
                "multi-index lengths ({}, {}) versus ({}, {})",
                m.xexp.len(),
                m.uexp.len(),
                self.ring.n,
                self.ring.p
            )));
        }
        if m.xdeg() > self.ring.xmax || m.udeg() > self.ring.umax {
            return Ok(());
        }
        let k = self.ring.shape().pack(m);
        *self.terms.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub(crate) fn from_map(ring: Arc<Ring>, terms: BTreeMap<Key, C64>) -> Self {
        let mut s = Self { ring, terms };
        s.prune();
        s
    }

    pub(crate) fn map(&self) -> &BTreeMap<Key, C64> {
        &self.terms
    }

    pub(crate) fn shape(&self) -> Shape {
        self.ring.shape()
    }

    /// Ambient data of the series.
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no term is stored.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term is stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order on `(xexp, uexp)`.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, C64)> + '_ {
        let s = self.shape();
        self.terms.iter().map(move |(k, c)| (s.unpack(*k), *c))
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &MultiIndex) -> C64 {
        if m.xexp.len() != self.ring.n || m.uexp.len() != self.ring.p {
            return C64::new(0.0, 0.0);
        }
        let k = self.shape().pack(m);
        self.terms.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients below `PRUNE_REL` times the largest magnitude, and exact zeros.
    pub fn prune(&mut self) {
        let tol = PRUNE_REL * self.max_abs();
        self.terms.retain(|_, c| c.norm() > tol && (c.re != 0.0 || c.im != 0.0));
    }

    /// Smallest x-degree carrying a coefficient, or `INFINITE_ORDER` for zero.
    pub fn order(&self) -> u32 {
        self.terms.keys().next().map(|k| k.xdeg()).unwrap_or(INFINITE_ORDER)
    }

    /// Largest stored x-degree (zero for the zero series).
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map(|k| k.xdeg()).unwrap_or(0)
    }

    /// Terms of x-degree at most `k`.
    pub fn jet(&self, k: u32) -> Self {
        self.jet_range(0, k)
    }

    /// Terms whose x-degree lies in `[lo, hi]`.
    pub fn jet_range(&self, lo: u32, hi: u32) -> Self {
        let hi = hi.min(MAX_DEGREE);
        let terms = if lo > hi {
            BTreeMap::new()
        } else {
            let start = if lo == 0 { Key(0) } else { Key::xdeg_bound(lo - 1) };
            self.terms.range(start..Key::xdeg_bound(hi)).map(|(k, c)| (*k, *c)).collect()
        };
        Self { ring: self.ring.clone(), terms }
    }

    /// Keeps the terms whose multi-index satisfies `pred`.
    pub fn filter<F: Fn(&MultiIndex) -> bool>(&self, pred: F) -> Self {
        let s = self.shape();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| pred(&s.unpack(**k)))
            .map(|(k, c)| (*k, *c))
            .collect();
        Self { ring: self.ring.clone(), terms }
    }

    /// Same coefficients in a ring with possibly smaller truncation degrees.
    pub fn truncate(&self, xmax: u32, umax: u32) -> Self {
        let ring = if xmax == self.ring.xmax && umax == self.ring.umax {
            self.ring.clone()
        } else {
            self.ring.with_truncation(xmax, umax)
        };
        self.retruncate(&ring)
    }

    /// Re-expresses the series in another ring of the same ambient dimensions
    /// and base, dropping terms beyond its truncation.
    pub fn retruncate(&self, ring: &Arc<Ring>) -> Self {
        let s = self.shape();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.xdeg() <= ring.xmax && s.udeg(**k) <= ring.umax)
            .map(|(k, c)| (*k, *c))
            .collect();
        Self { ring: ring.clone(), terms }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: C64) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        Self::from_map(self.ring.clone(), terms)
    }

    /// Multiplies every coefficient by a real number.
    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Checked sum.
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        let ring = Ring::join(&self.ring, &o.ring)?;
        Ok(self.combine(o, ring, C64::new(1.0, 0.0)))
    }

    /// Checked difference.
    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        let ring = Ring::join(&self.ring, &o.ring)?;
        Ok(self.combine(o, ring, C64::new(-1.0, 0.0)))
    }

    /// In-place `self += c * o`, with the truncation of `self`.
    pub fn add_scaled(&mut self, o: &Self, c: C64) {
        Ring::join(&self.ring, &o.ring).expect("incompatible series");
        let s = self.shape();
        let (xmax, umax) = (self.ring.xmax, self.ring.umax);
        for (k, v) in o.terms.range(..Key::xdeg_bound(xmax)) {
            if s.udeg(*k) <= umax {
                *self.terms.entry(*k).or_insert(C64::new(0.0, 0.0)) += v * c;
            }
        }
        self.prune();
    }

    fn combine(&self, o: &Self, ring: Arc<Ring>, c: C64) -> Self {
        let s = self.shape();
        let mut terms: BTreeMap<Key, C64> = BTreeMap::new();
        for (k, v) in self.terms.range(..Key::xdeg_bound(ring.xmax)) {
            if s.udeg(*k) <= ring.umax {
                terms.insert(*k, *v);
            }
        }
        for (k, v) in o.terms.range(..Key::xdeg_bound(ring.xmax)) {
            if s.udeg(*k) <= ring.umax {
                *terms.entry(*k).or_insert(C64::new(0.0, 0.0)) += v * c;
            }
        }
        Self::from_map(ring, terms)
    }

    /// Checked truncated Cauchy product.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        let ring = Ring::join(&self.ring, &o.ring)?;
        Ok(self.mul_in(o, ring))
    }

    fn mul_in(&self, o: &Self, ring: Arc<Ring>) -> Self {
        let s = self.shape();
        let (xmax, umax) = (ring.xmax, ring.umax);
        let (a, b) = if self.terms.len() <= o.terms.len() { (self, o) } else { (o, self) };
        let mut acc: Vec<(Key, C64)> = Vec::new();
        for (ka, ca) in a.terms.range(..Key::xdeg_bound(xmax)) {
            let ua = s.udeg(*ka);
            if ua > umax {
                continue;
            }
            let lim = xmax - ka.xdeg();
            for (kb, cb) in b.terms.range(..Key::xdeg_bound(lim)) {
                if ua + s.udeg(*kb) <= umax {
                    acc.push((ka.add(*kb), ca * cb));
                }
            }
        }
        Self::from_map(ring, merge_sorted(acc))
    }

    /// Partial derivative with respect to `x_i`.
    pub fn deriv_x(&self, i: usize) -> Self {
        let s = self.shape();
        let unit = s.x_unit(i);
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let q = s.x(*k, i);
            if q > 0 {
                terms.insert(k.sub(unit), c * q as f64);
            }
        }
        Self::from_map(self.ring.clone(), terms)
    }

    /// Partial derivative with respect to `u_k`.
    pub fn deriv_u(&self, j: usize) -> Self {
        let s = self.shape();
        let unit = s.u_unit(j);
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let q = s.u(*k, j);
            if q > 0 {
                terms.insert(k.sub(unit), c * q as f64);
            }
        }
        Self::from_map(self.ring.clone(), terms)
    }

    /// Multiplies by `x^Q` (with truncation).
    pub fn mul_x_monomial(&self, q: &[u32]) -> Self {
        let s = self.shape();
        let shift = s.pack(&MultiIndex::x_only(q.to_vec(), self.ring.p));
        let lim = self.ring.xmax.saturating_sub(shift.xdeg());
        if shift.xdeg() > self.ring.xmax {
            return Self::zero(&self.ring);
        }
        let terms = self
            .terms
            .range(..Key::xdeg_bound(lim))
            .map(|(k, c)| (k.add(shift), *c))
            .collect();
        Self { ring: self.ring.clone(), terms }
    }

    /// Evaluates the series at `x` and at absolute `u` (not shifted by the base).
    pub fn eval(&self, x: &[C64], u: &[C64]) -> C64 {
        let s = self.shape();
        let w: Vec<C64> = u.iter().zip(&self.ring.base).map(|(a, b)| a - b).collect();
        let xp = powers(x, self.ring.xmax);
        let wp = powers(&w, self.ring.umax);
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut v = *c;
            for (i, pw) in xp.iter().enumerate() {
                v *= pw[s.x(*k, i) as usize];
            }
            for (j, pw) in wp.iter().enumerate() {
                v *= pw[s.u(*k, j) as usize];
            }
            acc += v;
        }
        acc
    }

    /// Majorant norm `Σ_Q (Σ_P |c_{Q,P}| t^{|P|}) r^{|Q|}`.
    pub fn majorant_norm(&self, r: f64, t: f64) -> f64 {
        let s = self.shape();
        self.terms
            .iter()
            .map(|(k, c)| c.norm() * r.powi(k.xdeg() as i32) * t.powi(s.udeg(*k) as i32))
            .fold(0.0, |acc, v| acc + v)
    }

    /// Majorant norm of the x-monomial coefficients, maximized over the u-ball
    /// by the bound `Σ_P |c| t^{|P|}`, with a polyradius `r_i` per x-variable.
    pub fn majorant_norm_poly(&self, r: &[f64], t: f64) -> f64 {
        let s = self.shape();
        self.terms
            .iter()
            .map(|(k, c)| {
                let mut v = c.norm() * t.powi(s.udeg(*k) as i32);
                for (i, ri) in r.iter().enumerate() {
                    v *= ri.powi(s.x(*k, i) as i32);
                }
                v
            })
            .fold(0.0, |acc, v| acc + v)
    }

    /// Sets every u-variable to its base value, returning a series with the same ring.
    pub fn at_base(&self) -> Self {
        let s = self.shape();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| s.udeg(**k) == 0)
            .map(|(k, c)| (*k, *c))
            .collect();
        Self { ring: self.ring.clone(), terms }
    }

    /// Integer power with truncation.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.ring, C64::new(1.0, 0.0));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Powers `v_i^0 ..= v_i^d` of every entry of `v`.
pub(crate) fn powers(v: &[C64], d: u32) -> Vec<Vec<C64>> {
    v.iter()
        .map(|&z| {
            let mut p = Vec::with_capacity(d as usize + 1);
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=d {
                p.push(acc);
                acc *= z;
            }
            p
        })
        .collect()
}

/// Sorts `(key, value)` pairs and sums repeated keys.
pub(crate) fn merge_sorted(mut acc: Vec<(Key, C64)>) -> BTreeMap<Key, C64> {
    acc.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(Key, C64)> = Vec::with_capacity(acc.len());
    for (k, c) in acc {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc += c,
            _ => out.push((k, c)),
        }
    }
    out.into_iter().collect()
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Panics on incompatible operands; use `try_add` for a checked sum.
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(o).expect("incompatible series")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Panics on incompatible operands; use `try_sub` for a checked difference.
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_sub(o).expect("incompatible series")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    /// Panics on incompatible operands; use `try_mul` for a checked product.
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_mul(o).expect("incompatible series")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ring(n: usize, p: usize, xmax: u32, umax: u32) -> Arc<Ring> {
        Ring::new(n, p, xmax, umax, vec![C64::new(0.0, 0.0); p]).unwrap()
    }

    #[test]
    fn add_examples() {
        let r = ring(2, 1, 4, 2);
        let x1 = TruncatedSeries::x(&r, 0);
        let two = &x1 + &x1;
        assert_eq!(two.coeff(&MultiIndex::new(vec![1, 0], vec![0])), c(2.0));
        assert_eq!(&x1 + &TruncatedSeries::zero(&r), x1);
        let f = &(&x1 * &x1) + &TruncatedSeries::u(&r, 0);
        let g = &f - &(&x1 * &x1);
        assert_eq!(g, TruncatedSeries::u(&r, 0));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn mul_examples() {
        let r = ring(2, 0, 2, 0);
        let x1 = TruncatedSeries::x(&r, 0);
        let x2 = TruncatedSeries::x(&r, 1);
        let p = &x1 * &x2;
        assert_eq!(p, TruncatedSeries::x_monomial(&r, &[1, 1]));
        let one = TruncatedSeries::constant(&r, c(1.0));
        let prod = &(&one + &x1) * &(&one - &x1);
        let expect = &one - &(&x1 * &x1);
        assert_eq!(prod, expect);
        let sq = &x1 * &x1;
        assert!((sq.majorant_norm(0.5, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_tightest() {
        let a = ring(1, 0, 5, 0);
        let b = a.with_truncation(2, 0);
        let x = TruncatedSeries::x(&a, 0);
        let y = TruncatedSeries::x(&b, 0);
        let p = &(&x * &x) * &y;
        assert!(p.is_zero());
        assert_eq!(p.ring().xmax(), 2);
    }

    #[test]
    fn mismatch_errors() {
        let a = ring(2, 0, 3, 0);
        let b = ring(3, 0, 3, 0);
        assert!(matches!(
            TruncatedSeries::x(&a, 0).try_add(&TruncatedSeries::x(&b, 0)),
            Err(Error::DimensionMismatch(_))
        ));
        let c1 = Ring::new(1, 1, 3, 2, vec![c(0.0)]).unwrap();
        let c2 = Ring::new(1, 1, 3, 2, vec![c(1.0)]).unwrap();
        assert_eq!(
            TruncatedSeries::x(&c1, 0).try_mul(&TruncatedSeries::x(&c2, 0)),
            Err(Error::BasePointMismatch)
        );
    }

    #[test]
    fn order_and_jet() {
        let r = ring(2, 1, 5, 2);
        let f = TruncatedSeries::from_terms(
            &r,
            vec![
                (MultiIndex::new(vec![3, 0], vec![0]), c(1.0)),
                (MultiIndex::new(vec![1, 1], vec![1]), c(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(TruncatedSeries::zero(&r).order(), INFINITE_ORDER);
        assert_eq!(TruncatedSeries::u(&r, 0).order(), 0);
        let g = &TruncatedSeries::x(&r, 0) + &TruncatedSeries::x_monomial(&r, &[3, 0]);
        assert_eq!(g.jet(2), TruncatedSeries::x(&r, 0));
        assert_eq!(g.jet(5), g);
        assert_eq!(g.jet_range(2, u32::MAX), TruncatedSeries::x_monomial(&r, &[3, 0]));
        let h = &TruncatedSeries::u(&r, 0) + &TruncatedSeries::x(&r, 0);
        assert_eq!(h.jet(0), TruncatedSeries::u(&r, 0));
    }

    #[test]
    fn majorant_examples() {
        let r = ring(1, 0, 4, 0);
        assert!((TruncatedSeries::x(&r, 0).majorant_norm(0.5, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(TruncatedSeries::zero(&r).majorant_norm(0.5, 1.0), 0.0);
    }

    #[test]
    fn derivatives_and_eval() {
        let r = Ring::new(2, 1, 6, 3, vec![C64::new(0.5, 0.0)]).unwrap();
        let f = &(&TruncatedSeries::x_monomial(&r, &[2, 1]) * &TruncatedSeries::u(&r, 0))
            + &TruncatedSeries::x(&r, 1);
        let x = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
        let u = [C64::new(0.7, -0.1)];
        let direct = x[0] * x[0] * x[1] * u[0] + x[1];
        assert!((f.eval(&x, &u) - direct).norm() < 1e-14);
        let dx0 = f.deriv_x(0).eval(&x, &u);
        assert!((dx0 - 2.0 * x[0] * x[1] * u[0]).norm() < 1e-14);
        let du = f.deriv_u(0).eval(&x, &u);
        assert!((du - x[0] * x[0] * x[1]).norm() < 1e-14);
    }
}
