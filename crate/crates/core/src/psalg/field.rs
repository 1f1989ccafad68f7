//! Vector fields in the x-variables and fibered fields on `C^n × C^p`.

use std::sync::Arc;

use super::key::MultiIndex;
use super::series::{Ring, TruncatedSeries, C64, INFINITE_ORDER};
use crate::error::{Error, Result};

/// Vector field `Σ_i X_i(x, u) ∂/∂x_i` with components sharing one ring.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<TruncatedSeries>,
}

impl VectorField {
    /// Builds a field from its components, which must share dimensions and base.
    pub fn new(comps: Vec<TruncatedSeries>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::DimensionMismatch("vector field without components".into()))?;
        let n = first.ring().n();
        if comps.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} components for n = {n}",
                comps.len()
            )));
        }
        let mut ring = first.ring().clone();
        for c in &comps[1..] {
            ring = Ring::join(&ring, c.ring())?;
        }
        let comps = comps.into_iter().map(|c| c.retruncate(&ring)).collect();
        Ok(Self { comps })
    }

    /// The zero field.
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self { comps: (0..ring.n()).map(|_| TruncatedSeries::zero(ring)).collect() }
    }

    /// The field `f ∂/∂x_i`.
    pub fn along(i: usize, f: TruncatedSeries) -> Self {
        let ring = f.ring().clone();
        let mut v = Self::zero(&ring);
        v.comps[i] = f;
        v
    }

    /// Diagonal linear field `Σ_i d_i x_i ∂/∂x_i`.
    pub fn diagonal(ring: &Arc<Ring>, d: &[C64]) -> Self {
        let comps = (0..ring.n())
            .map(|i| TruncatedSeries::x(ring, i).scale(d[i]))
            .collect();
        Self { comps }
    }

    /// Components.
    pub fn comps(&self) -> &[TruncatedSeries] {
        &self.comps
    }

    /// Component `i`.
    pub fn comp(&self, i: usize) -> &TruncatedSeries {
        &self.comps[i]
    }

    /// Mutable component `i`.
    pub fn comp_mut(&mut self, i: usize) -> &mut TruncatedSeries {
        &mut self.comps[i]
    }

    /// Shared ring.
    pub fn ring(&self) -> &Arc<Ring> {
        self.comps[0].ring()
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.comps.len()
    }

    /// True when every component vanishes.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Every stored term as `(component, multi-index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, MultiIndex, C64)> + '_ {
        self.comps
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |(m, v)| (i, m, v)))
    }

    /// Total number of stored terms.
    pub fn len(&self) -> usize {
        self.comps.iter().map(|c| c.len()).sum()
    }

    /// True when no term is stored.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest x-order among components.
    pub fn order(&self) -> u32 {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(INFINITE_ORDER)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Majorant norm, taken as the maximum over components.
    pub fn majorant_norm(&self, r: f64, t: f64) -> f64 {
        self.comps.iter().map(|c| c.majorant_norm(r, t)).fold(0.0, f64::max)
    }

    /// Applies a map to every component.
    pub fn map<F: Fn(&TruncatedSeries) -> TruncatedSeries>(&self, f: F) -> Self {
        Self { comps: self.comps.iter().map(f).collect() }
    }

    /// Terms of x-degree at most `k`.
    pub fn jet(&self, k: u32) -> Self {
        self.map(|c| c.jet(k))
    }

    /// Terms with x-degree in `[lo, hi]`.
    pub fn jet_range(&self, lo: u32, hi: u32) -> Self {
        self.map(|c| c.jet_range(lo, hi))
    }

    /// Re-truncates every component.
    pub fn truncate(&self, xmax: u32, umax: u32) -> Self {
        let ring = self.ring().with_truncation(xmax, umax);
        self.map(|c| c.retruncate(&ring))
    }

    /// Re-expresses the field in another compatible ring.
    pub fn retruncate(&self, ring: &Arc<Ring>) -> Self {
        self.map(|c| c.retruncate(ring))
    }

    /// Keeps the terms `(i, m)` accepted by `pred`.
    pub fn filter<F: Fn(usize, &MultiIndex) -> bool>(&self, pred: F) -> Self {
        Self {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(i, c)| c.filter(|m| pred(i, m)))
                .collect(),
        }
    }

    /// Multiplies every component by `c`.
    pub fn scale(&self, c: C64) -> Self {
        self.map(|s| s.scale(c))
    }

    /// Multiplies every component by a function.
    pub fn mul_fn(&self, f: &TruncatedSeries) -> Self {
        self.map(|s| s * f)
    }

    /// Checked sum.
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() })
    }

    /// Checked difference.
    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect() })
    }

    /// In-place `self += c * o`.
    pub fn add_scaled(&mut self, o: &Self, c: C64) {
        for (a, b) in self.comps.iter_mut().zip(&o.comps) {
            a.add_scaled(b, c);
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n() != o.n() {
            return Err(Error::DimensionMismatch(format!(
                "fields of dimension {} and {}",
                self.n(),
                o.n()
            )));
        }
        Ring::join(self.ring(), o.ring()).map(|_| ())
    }

    /// Lie derivative `X(f) = Σ_i X_i ∂f/∂x_i`.
    pub fn lie_derivative(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if f.ring().n() != self.n() {
            return Err(Error::DimensionMismatch("function and field dimensions differ".into()));
        }
        let ring = Ring::join(self.ring(), f.ring())?;
        let mut acc = TruncatedSeries::zero(&ring);
        for (i, xi) in self.comps.iter().enumerate() {
            let d = f.deriv_x(i);
            if !d.is_zero() && !xi.is_zero() {
                acc = &acc + &(xi * &d);
            }
        }
        Ok(acc)
    }

    /// Lie bracket in the x-variables, `[X, Y]_i = X(Y_i) - Y(X_i)`.
    pub fn lie_bracket(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut comps = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let a = self.lie_derivative(&o.comps[i])?;
            let b = o.lie_derivative(&self.comps[i])?;
            comps.push(&a - &b);
        }
        Ok(Self { comps })
    }

    /// Divergence `Σ_i ∂X_i/∂x_i`.
    pub fn divergence(&self) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.ring());
        for (i, c) in self.comps.iter().enumerate() {
            acc = &acc + &c.deriv_x(i);
        }
        acc
    }

    /// Evaluates the field at `(x, u)`, with `u` absolute.
    pub fn eval(&self, x: &[C64], u: &[C64]) -> Vec<C64> {
        self.comps.iter().map(|c| c.eval(x, u)).collect()
    }
}

/// Field on `C^n × C^p` with x-components and u-components.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedField {
    /// Coefficients of `∂/∂x_i`.
    pub x: VectorField,
    /// Coefficients of `∂/∂u_k`.
    pub u: Vec<TruncatedSeries>,
}

impl FiberedField {
    /// Builds a fibered field; the u-part must have `p` entries.
    pub fn new(x: VectorField, u: Vec<TruncatedSeries>) -> Result<Self> {
        if u.len() != x.ring().p() {
            return Err(Error::DimensionMismatch(format!(
                "{} u-components for p = {}",
                u.len(),
                x.ring().p()
            )));
        }
        for c in &u {
            Ring::join(x.ring(), c.ring())?;
        }
        Ok(Self { x, u })
    }

    /// The zero field.
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self {
            x: VectorField::zero(ring),
            u: (0..ring.p()).map(|_| TruncatedSeries::zero(ring)).collect(),
        }
    }

    /// Shared ring.
    pub fn ring(&self) -> &Arc<Ring> {
        self.x.ring()
    }

    /// True when both parts vanish.
    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.u.iter().all(|c| c.is_zero())
    }

    /// Derivation `A(f) = Σ_i A_i ∂f/∂x_i + Σ_k A_{u,k} ∂f/∂u_k`.
    pub fn apply(&self, f: &TruncatedSeries) -> TruncatedSeries {
        let mut acc = self.x.lie_derivative(f).expect("compatible ring");
        for (k, uk) in self.u.iter().enumerate() {
            if uk.is_zero() {
                continue;
            }
            let d = f.deriv_u(k);
            if !d.is_zero() {
                acc = &acc + &(uk * &d);
            }
        }
        acc
    }

    /// Bracket of fields on `C^n × C^p`, `[A, B] = A(B) - B(A)` componentwise.
    pub fn bracket(&self, o: &Self) -> Self {
        let n = self.x.n();
        let x = (0..n)
            .map(|i| &self.apply(o.x.comp(i)) - &o.apply(self.x.comp(i)))
            .collect();
        let u = (0..self.u.len())
            .map(|k| &self.apply(&o.u[k]) - &o.apply(&self.u[k]))
            .collect();
        Self { x: VectorField { comps: x }, u }
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        Self {
            x: self.x.try_add(&o.x).expect("compatible fields"),
            u: self.u.iter().zip(&o.u).map(|(a, b)| a + b).collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: C64) -> Self {
        Self { x: self.x.scale(c), u: self.u.iter().map(|s| s.scale(c)).collect() }
    }

    /// Smallest x-order among all components.
    pub fn order(&self) -> u32 {
        self.u.iter().map(|c| c.order()).fold(self.x.order(), u32::min)
    }
}
