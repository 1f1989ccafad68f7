//! Weights `α_{Q,i} = (Q, λ) - λ_i`, their enumeration over degree windows and
//! the associated weight-space projections.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::morphism::{GaussRational, LinearMorphism, EPS_RES};
use crate::error::{Error, Result};
use crate::psalg::{exponents_of_degree, VectorField, C64};

/// A linear form on `g` attached to monomial fields `x^Q ∂_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight {
    /// Values `α(g_1), …, α(g_l)`.
    pub vals: Vec<C64>,
    /// Exact values when the morphism is rational.
    #[serde(skip)]
    pub exact: Option<Vec<GaussRational>>,
    /// Generating pairs `(Q, i)`; the first one is the canonical source.
    pub sources: Vec<(Vec<u32>, usize)>,
}

impl Weight {
    /// Max-norm `max_j |α(g_j)|`.
    pub fn norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Zero test: exact in rational mode, `norm < EPS_RES` otherwise.
    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(ex) => ex.iter().all(|g| g.is_zero()),
            None => self.norm() < EPS_RES,
        }
    }

    /// Canonical source `(Q, i)`.
    pub fn source(&self) -> (&[u32], usize) {
        let (q, i) = &self.sources[0];
        (q, *i)
    }

    /// Degree `|Q|` of the canonical source.
    pub fn degree(&self) -> u32 {
        self.sources[0].0.iter().sum()
    }

    /// Equality of values: exact when both are exact, within `EPS_RES` otherwise.
    pub fn same_value(&self, o: &Weight) -> bool {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => a == b,
            _ => {
                self.vals.len() == o.vals.len()
                    && self.vals.iter().zip(&o.vals).all(|(a, b)| (a - b).norm() < EPS_RES)
            }
        }
    }
}

fn exact_values(s: &LinearMorphism, d: &[i64]) -> Option<Vec<GaussRational>> {
    s.exact().map(|ex| {
        ex.iter()
            .map(|row| {
                let mut re = Rational64::from_integer(0);
                let mut im = Rational64::from_integer(0);
                for (g, &q) in row.iter().zip(d) {
                    re += g.re * q;
                    im += g.im * q;
                }
                GaussRational::new(re, im)
            })
            .collect()
    })
}

/// Integer vector `Q - e_i`.
pub fn weight_vector(q: &[u32], i: usize) -> Vec<i64> {
    let mut d: Vec<i64> = q.iter().map(|&v| v as i64).collect();
    d[i] -= 1;
    d
}

/// The weight of `x^Q ∂_i`.
pub fn weight(q: &[u32], i: usize, s: &LinearMorphism) -> Weight {
    let d = weight_vector(q, i);
    Weight { vals: s.pair(&d), exact: exact_values(s, &d), sources: vec![(q.to_vec(), i)] }
}

/// True when `x^Q ∂_i` has weight zero.
pub fn is_resonant(q: &[u32], i: usize, s: &LinearMorphism) -> bool {
    s.pair_is_zero(&weight_vector(q, i))
}

/// Groups weights by value, merging source lists; groups keep the order of first appearance.
fn group(weights: Vec<Weight>) -> Vec<Weight> {
    let exact = weights.first().is_some_and(|w| w.exact.is_some());
    let mut out: Vec<Weight> = Vec::new();
    if exact {
        let mut index: BTreeMap<Vec<(Rational64, Rational64)>, usize> = BTreeMap::new();
        for w in weights {
            let key: Vec<_> =
                w.exact.as_ref().expect("exact").iter().map(|g| (g.re, g.im)).collect();
            match index.get(&key) {
                Some(&k) => out[k].sources.extend(w.sources),
                None => {
                    index.insert(key, out.len());
                    out.push(w);
                }
            }
        }
        return out;
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    let flat = |w: &Weight| -> Vec<f64> { w.vals.iter().flat_map(|v| [v.re, v.im]).collect() };
    order.sort_by(|&a, &b| {
        flat(&weights[a])
            .partial_cmp(&flat(&weights[b]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut class = vec![0usize; weights.len()];
    let mut reps: Vec<usize> = Vec::new();
    for &k in &order {
        match reps.last() {
            Some(&r) if weights[r].same_value(&weights[k]) => class[k] = r,
            _ => {
                reps.push(k);
                class[k] = k;
            }
        }
    }
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, w) in weights.into_iter().enumerate() {
        let r = class[k];
        match slot.get(&r) {
            Some(&pos) => out[pos].sources.extend(w.sources),
            None => {
                slot.insert(r, out.len());
                out.push(w);
            }
        }
    }
    out
}

/// All nonzero weights with source degree in `[k_low, k_high]`, deduplicated by value.
pub fn nonzero_weights_in(s: &LinearMorphism, k_low: u32, k_high: u32) -> Vec<Weight> {
    let mut all = Vec::new();
    for d in k_low..=k_high {
        for q in exponents_of_degree(s.n(), d) {
            for i in 0..s.n() {
                let w = weight(&q, i, s);
                if !w.is_zero() {
                    all.push(w);
                }
            }
        }
    }
    group(all)
}

/// Groups the terms of a field by weight: returns each weight with its projection.
pub fn weight_decomposition(x: &VectorField, s: &LinearMorphism) -> Vec<(Weight, VectorField)> {
    let mut seen: BTreeMap<(Vec<u32>, usize), ()> = BTreeMap::new();
    let mut ws = Vec::new();
    for (i, m, _) in x.terms() {
        if seen.insert((m.xexp.clone(), i), ()).is_none() {
            ws.push(weight(&m.xexp, i, s));
        }
    }
    group(ws)
        .into_iter()
        .map(|w| {
            let p = weight_project(x, &w, s);
            (w, p)
        })
        .collect()
}

/// Keeps exactly the terms `x^Q u^P ∂_i` of `x` whose weight equals `alpha`.
pub fn weight_project(x: &VectorField, alpha: &Weight, s: &LinearMorphism) -> VectorField {
    x.filter(|i, m| weight(&m.xexp, i, s).same_value(alpha))
}

/// Degree window used for `ω_k(S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaWindow {
    /// Degrees `2^k + 1 ..= 2^{k+1}`.
    Dyadic,
    /// Degrees `2 ..= 2^k` (compatibility variant).
    Cumulative,
}

impl OmegaWindow {
    /// Degree bounds `(low, high)` of the window at index `k`.
    pub fn bounds(self, k: u32) -> (u32, u32) {
        match self {
            OmegaWindow::Dyadic => ((1u32 << k) + 1, 1u32 << (k + 1)),
            OmegaWindow::Cumulative => (2, 1u32 << k),
        }
    }
}

/// How a value of `ω_k(S)` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OmegaCertificate {
    /// Exact minimum over the full enumeration of the window.
    Enumerated,
    /// Lattice lower bound `min_j 1/D_j` from the common denominators of the rational rows.
    LatticeLowerBound,
}

/// A value of `ω_k(S)` with its certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaValue {
    /// The value.
    pub value: f64,
    /// Whether it is exact or a lower bound.
    pub certificate: OmegaCertificate,
}

/// Default number of `(Q, i)` pairs enumerated before falling back to a lower bound.
pub const OMEGA_BUDGET: u128 = 20_000_000;

fn binom(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for t in 0..k {
        r = r.saturating_mul(n - t) / (t + 1);
    }
    r
}

fn window_size(n: usize, lo: u32, hi: u32) -> u128 {
    let n = n as u128;
    let below = |d: u32| if d == 0 { 0 } else { binom(d as u128 - 1 + n, n) };
    (below(hi + 1) - below(lo)).saturating_mul(n)
}

fn lattice_lower_bound(s: &LinearMorphism) -> Option<f64> {
    let ex = s.exact()?;
    let lcm = |a: i64, b: i64| {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        a / x * b
    };
    ex.iter()
        .map(|row| {
            row.iter()
                .fold(1i64, |acc, g| lcm(lcm(acc, *g.re.denom()), *g.im.denom()))
        })
        .map(|d| 1.0 / d as f64)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
}

/// `ω_k(S)` with an explicit enumeration budget.
pub fn omega_s_with_budget(
    s: &LinearMorphism,
    k: u32,
    window: OmegaWindow,
    budget: u128,
) -> Result<OmegaValue> {
    let (lo, hi) = window.bounds(k);
    if lo > hi {
        return Err(Error::NoNonzeroWeights { low: lo, high: hi });
    }
    if window_size(s.n(), lo, hi) > budget {
        return match lattice_lower_bound(s) {
            Some(v) => {
                Ok(OmegaValue { value: v, certificate: OmegaCertificate::LatticeLowerBound })
            }
            None => Err(Error::InvalidInput(format!(
                "degree window [{lo}, {hi}] exceeds the enumeration budget in float mode"
            ))),
        };
    }
    let mut best = f64::INFINITY;
    for d in lo..=hi {
        for q in exponents_of_degree(s.n(), d) {
            for i in 0..s.n() {
                let dv = weight_vector(&q, i);
                if s.pair_is_zero(&dv) {
                    continue;
                }
                let nv = s.pair(&dv).iter().map(|v| v.norm()).fold(0.0, f64::max);
                best = best.min(nv);
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::NoNonzeroWeights { low: lo, high: hi });
    }
    Ok(OmegaValue { value: best, certificate: OmegaCertificate::Enumerated })
}

/// `ω_k(S) = min ‖α‖` over nonzero weights in the window, with the default budget.
pub fn omega_s(s: &LinearMorphism, k: u32, window: OmegaWindow) -> Result<f64> {
    omega_s_with_budget(s, k, window, OMEGA_BUDGET).map(|v| v.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psalg::{Ring, TruncatedSeries};

    fn approx(a: C64, b: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() < 1e-12
    }

    #[test]
    fn weight_examples() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        assert!(weight(&[2, 1], 0, &s).is_zero());
        assert!(approx(weight(&[3, 0], 1, &s).vals[0], 4.0));
        assert!(weight(&[0, 1], 1, &s).is_zero());
    }

    #[test]
    fn window_of_degree_two() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        let ws = nonzero_weights_in(&s, 2, 2);
        let mut vals: Vec<i64> = ws.iter().map(|w| w.vals[0].re.round() as i64).collect();
        vals.sort();
        assert_eq!(vals, vec![-3, -1, 1, 3]);
        let total: usize = ws.iter().map(|w| w.sources.len()).sum();
        // Six (Q, i) pairs of degree two, none of them resonant.
        assert_eq!(total, 6);
        assert!(nonzero_weights_in(&s, 3, 2).is_empty());
    }

    #[test]
    fn float_grouping_matches_exact() {
        let s = LinearMorphism::from_integers(&[vec![1, -1, 2]]).unwrap();
        let f = LinearMorphism::new(s.lam().to_vec()).unwrap();
        let a = nonzero_weights_in(&s, 2, 4);
        let b = nonzero_weights_in(&f, 2, 4);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.sources.len(), y.sources.len());
        }
    }

    #[test]
    fn omega_examples() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        for k in 0..5 {
            assert_eq!(omega_s(&s, k, OmegaWindow::Dyadic).unwrap(), 1.0);
        }
        let one = LinearMorphism::from_integers(&[vec![1]]).unwrap();
        for k in 0..6 {
            assert_eq!(omega_s(&one, k, OmegaWindow::Dyadic).unwrap(), (1u32 << k) as f64);
        }
        let big = omega_s_with_budget(&s, 30, OmegaWindow::Dyadic, 1000).unwrap();
        assert_eq!(big.certificate, OmegaCertificate::LatticeLowerBound);
        assert_eq!(big.value, 1.0);
    }

    #[test]
    fn projection_partitions_terms() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        let ring = Ring::new(2, 0, 3, 0, vec![]).unwrap();
        let x = VectorField::new(vec![
            TruncatedSeries::x_monomial(&ring, &[2, 1]),
            &TruncatedSeries::x_monomial(&ring, &[3, 0]) + &TruncatedSeries::x_monomial(&ring, &[0, 2]),
        ])
        .unwrap();
        let parts = weight_decomposition(&x, &s);
        let mut sum = VectorField::zero(&ring);
        for (w, p) in &parts {
            assert_eq!(&weight_project(p, w, &s), p);
            sum = sum.try_add(p).unwrap();
        }
        assert_eq!(sum, x);
        let absent = weight(&[6, 0], 0, &s);
        assert!(weight_project(&x, &absent, &s).is_zero());
    }
}
