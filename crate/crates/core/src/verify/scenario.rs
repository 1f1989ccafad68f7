//! Scenario generators: complexified Hamiltonian systems and volume-preserving fields.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalform::{nf_field, NormalizationState};
use crate::psalg::{MultiIndex, Ring, TruncatedSeries, VectorField, C64};
use crate::resonance::{LinearMorphism, ResonantStructure};

/// Polynomial in the absolute variables `u`: list of `(exponent, coefficient)`.
pub type UPoly = Vec<(Vec<u32>, C64)>;

/// Polynomial vector field in x: list of `(component, exponent, coefficient)`.
pub type XFieldTerms = Vec<(usize, Vec<u32>, C64)>;

/// A perturbed integrable field `X = Σ_j a_j(π(x)) S_j + P(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    /// Name used in reports.
    pub name: String,
    /// Linear morphism `S`.
    pub s: LinearMorphism,
    /// Resonant structure `R`.
    pub r: ResonantStructure,
    /// Coefficients `a_j` as polynomials in `u`.
    pub a: Vec<UPoly>,
    /// Perturbation `P` as polynomial terms in x.
    pub perturbation: XFieldTerms,
    /// Initial normalized order `m0`.
    pub m0: u32,
}

/// Largest power of two not exceeding `v ≥ 1`.
fn pow2_floor(v: u32) -> u32 {
    1 << v.max(1).ilog2()
}

impl Scenario {
    /// Builds a scenario and checks dimensions; `m0` is the largest power of two
    /// below the order of the perturbation.
    pub fn new(
        name: &str,
        s: LinearMorphism,
        r: ResonantStructure,
        a: Vec<UPoly>,
        perturbation: XFieldTerms,
    ) -> Result<Self> {
        let (n, p) = (s.n(), r.p());
        if a.len() != s.l() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for l = {}", a.len(), s.l())));
        }
        if a.iter().flatten().any(|(e, _)| e.len() != p) {
            return Err(Error::DimensionMismatch("coefficient exponent length differs from p".into()));
        }
        if perturbation.iter().any(|(i, q, _)| *i >= n || q.len() != n) {
            return Err(Error::DimensionMismatch("perturbation term outside C^n".into()));
        }
        let ord = perturbation
            .iter()
            .filter(|(_, _, c)| c.norm() > 0.0)
            .map(|(_, q, _)| q.iter().sum::<u32>())
            .min();
        let m0 = match ord {
            None => 1,
            Some(o) if o >= 2 => pow2_floor(o - 1),
            Some(o) => {
                return Err(Error::InvalidInput(format!(
                    "perturbation of order {o} must have order at least 2"
                )))
            }
        };
        Ok(Self { name: name.into(), s, r, a, perturbation, m0 })
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.s.n()
    }

    /// Fibered ring with the given truncations and base point.
    pub fn ring(&self, xmax: u32, umax: u32, base: Vec<C64>) -> Result<Arc<Ring>> {
        Ring::new(self.n(), self.r.p(), xmax, umax, base)
    }

    /// Pure x-ring of dimension `n`.
    pub fn x_ring(&self, xmax: u32) -> Result<Arc<Ring>> {
        Ring::new(self.n(), 0, xmax, 0, vec![])
    }

    /// Smallest `xmax` for Newton steps from `m0` up to at least `order`.
    pub fn required_xmax(&self, order: u32) -> u32 {
        let mut m = self.m0;
        let mut need = order;
        while m < order {
            need = need.max(2 * m + 1);
            m *= 2;
        }
        need
    }

    /// `a_j(u)` expanded around the base of `ring`.
    pub fn a_series(&self, ring: &Arc<Ring>) -> Vec<TruncatedSeries> {
        self.a
            .iter()
            .map(|poly| {
                let mut acc = TruncatedSeries::zero(ring);
                for (e, c) in poly {
                    let mut t = TruncatedSeries::constant(ring, *c);
                    for (k, &ek) in e.iter().enumerate() {
                        if ek > 0 {
                            t = &t * &TruncatedSeries::u(ring, k).pow(ek);
                        }
                    }
                    acc = &acc + &t;
                }
                acc
            })
            .collect()
    }

    /// `P` in `ring` (any p).
    pub fn perturbation_field(&self, ring: &Arc<Ring>) -> Result<VectorField> {
        let mut comps = vec![TruncatedSeries::zero(ring); self.n()];
        for (i, q, c) in &self.perturbation {
            if q.iter().sum::<u32>() <= ring.xmax() {
                comps[*i].insert(&MultiIndex::x_only(q.clone(), ring.p()), *c)?;
            }
        }
        VectorField::new(comps)
    }

    /// Integrable part `Σ_j a_j(u) S_j` in the fibered ring.
    pub fn integrable_field(&self, ring: &Arc<Ring>) -> VectorField {
        nf_field(&self.a_series(ring), &self.s, ring)
    }

    /// The full field `X(x) = Σ_j a_j(π(x)) S_j + P(x)` on the pure x-ring.
    pub fn x_field(&self, xmax: u32) -> Result<VectorField> {
        let ring = self.x_ring(xmax)?;
        let a: Vec<TruncatedSeries> = self
            .a
            .iter()
            .map(|poly| {
                let mut acc = TruncatedSeries::zero(&ring);
                for (e, c) in poly {
                    let mut q = vec![0u32; self.n()];
                    for (k, &ek) in e.iter().enumerate() {
                        for (qi, ri) in q.iter_mut().zip(self.r.row(k)) {
                            *qi += ek * ri;
                        }
                    }
                    if q.iter().sum::<u32>() < xmax {
                        acc = &acc + &TruncatedSeries::x_monomial(&ring, &q).scale(*c);
                    }
                }
                acc
            })
            .collect();
        nf_field(&a, &self.s, &ring).try_add(&self.perturbation_field(&ring)?)
    }

    /// Initial normalization state in `ring`.
    pub fn initial_state(&self, ring: &Arc<Ring>) -> Result<NormalizationState> {
        NormalizationState::new(
            self.s.clone(),
            self.r.clone(),
            self.a_series(ring),
            self.perturbation_field(ring)?,
            self.m0,
        )
    }
}

/// Time convention of the complexified Hamiltonian flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeConvention {
    /// `ż = ∂G/∂w`, `ẇ = -∂G/∂z`.
    Holomorphic,
    /// Complexification of the real flow `ẋ = ∂H/∂y`, `ẏ = -∂H/∂x` with
    /// `z = x + iy`, `w = x - iy`: `ż = -2i ∂G/∂w`, `ẇ = 2i ∂G/∂z`.
    /// The real slice `w = conj(z)` is invariant.
    Real,
}

impl TimeConvention {
    /// Factor `c` with `X = c (∂G/∂w ∂z - ∂G/∂z ∂w)`.
    pub fn factor(self) -> C64 {
        match self {
            TimeConvention::Holomorphic => C64::new(1.0, 0.0),
            TimeConvention::Real => C64::new(0.0, -2.0),
        }
    }
}

/// How a perturbation is presented.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbationSpec {
    /// Hamiltonian `h(z, w)` as polynomial terms in the `2N` coordinates.
    Hamiltonian(Vec<(Vec<u32>, C64)>),
    /// Explicit field terms, accepted only when Hamiltonian.
    Field(XFieldTerms),
}

/// Symplectic gradient `c (∂h/∂w_i ∂z_i - ∂h/∂z_i ∂w_i)` of `h` in the coordinates
/// `(z_1, w_1, …, z_N, w_N)`.
pub fn symplectic_gradient(h: &[(Vec<u32>, C64)], n_pairs: usize, c: C64) -> Result<XFieldTerms> {
    let n = 2 * n_pairs;
    let mut out = Vec::new();
    for (q, coef) in h {
        if q.len() != n {
            return Err(Error::DimensionMismatch("Hamiltonian term has wrong length".into()));
        }
        for i in 0..n_pairs {
            let (z, w) = (2 * i, 2 * i + 1);
            if q[w] > 0 {
                let mut e = q.clone();
                e[w] -= 1;
                out.push((z, e, coef * c * q[w] as f64));
            }
            if q[z] > 0 {
                let mut e = q.clone();
                e[z] -= 1;
                out.push((w, e, -coef * c * q[z] as f64));
            }
        }
    }
    Ok(out)
}

fn terms_to_field(terms: &XFieldTerms, ring: &Arc<Ring>) -> Result<VectorField> {
    let mut comps = vec![TruncatedSeries::zero(ring); ring.n()];
    for (i, q, c) in terms {
        comps[*i].insert(&MultiIndex::x_only(q.clone(), 0), *c)?;
    }
    VectorField::new(comps)
}

fn max_degree(terms: &XFieldTerms) -> u32 {
    terms.iter().map(|(_, q, _)| q.iter().sum::<u32>()).max().unwrap_or(0)
}

/// Checks that `X = c (F_w ∂z - F_z ∂w)` for a closed 1-form `F`, i.e. `X` is Hamiltonian.
fn hamiltonian_defect(terms: &XFieldTerms, n_pairs: usize, c: C64) -> Result<f64> {
    let n = 2 * n_pairs;
    let ring = Ring::new(n, 0, max_degree(terms) + 1, 0, vec![])?;
    let x = terms_to_field(terms, &ring)?;
    let inv = C64::new(1.0, 0.0) / c;
    // F_{z_i} = -X_{w_i}/c and F_{w_i} = X_{z_i}/c.
    let f: Vec<TruncatedSeries> = (0..n)
        .map(|k| {
            let i = k / 2;
            if k % 2 == 0 {
                x.comp(2 * i + 1).scale(-inv)
            } else {
                x.comp(2 * i).scale(inv)
            }
        })
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            worst = worst.max((&f[a].deriv_x(b) - &f[b].deriv_x(a)).max_abs());
        }
    }
    Ok(worst)
}

/// Complexified Hamiltonian `G = Σ_i Σ_l μ_{i,l} (z_i w_i)^l + h`, with
/// `S_i = z_i ∂z_i - w_i ∂w_i`, `u_i = z_i w_i` and `a_i(u) = c Σ_l l μ_{i,l} u_i^{l-1}`.
/// `mu[i][l-1]` holds `μ_{i,l}`.
pub fn scenario_hamiltonian(
    n_pairs: usize,
    mu: &[Vec<f64>],
    perturbation: &PerturbationSpec,
    time: TimeConvention,
) -> Result<Scenario> {
    if n_pairs == 0 || mu.len() != n_pairs {
        return Err(Error::DimensionMismatch(format!("{} μ rows for {n_pairs} pairs", mu.len())));
    }
    let n = 2 * n_pairs;
    let c = time.factor();
    let rows: Vec<Vec<i64>> = (0..n_pairs)
        .map(|i| (0..n).map(|k| if k == 2 * i { 1 } else if k == 2 * i + 1 { -1 } else { 0 }).collect())
        .collect();
    let s = LinearMorphism::from_integers(&rows)?;
    let r = ResonantStructure::new(
        &s,
        (0..n_pairs)
            .map(|i| (0..n).map(|k| u32::from(k / 2 == i)).collect())
            .collect(),
    )?;
    let a: Vec<UPoly> = mu
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, m)| **m != 0.0)
                .map(|(l0, m)| {
                    let mut e = vec![0u32; n_pairs];
                    e[i] = l0 as u32;
                    (e, c * (m * (l0 + 1) as f64))
                })
                .collect()
        })
        .collect();
    let field = match perturbation {
        PerturbationSpec::Hamiltonian(h) => symplectic_gradient(h, n_pairs, c)?,
        PerturbationSpec::Field(t) => {
            if t.iter().any(|(i, q, _)| *i >= n || q.len() != n) {
                return Err(Error::DimensionMismatch("perturbation term outside C^n".into()));
            }
            let defect = hamiltonian_defect(t, n_pairs, c)?;
            if defect > 1e-12 {
                return Err(Error::NotSymplecticPerturbation(format!(
                    "the 1-form of the field is not closed (defect {defect:.3e})"
                )));
            }
            t.clone()
        }
    };
    Scenario::new("hamiltonian", s, r, a, field)
}

/// Potential `(i, j, f)` with `f` given by its terms `(Q, c)`.
pub type Potential = (usize, usize, Vec<(Vec<u32>, C64)>);

/// Divergence-free field `Σ (∂_j f ∂_i - ∂_i f ∂_j)` from potentials `(i, j, f)`.
pub fn divergence_free_field(n: usize, potentials: &[Potential]) -> XFieldTerms {
    let mut out = Vec::new();
    for (i, j, f) in potentials {
        for (q, c) in f {
            if q[*j] > 0 {
                let mut e = q.clone();
                e[*j] -= 1;
                out.push((*i, e, c * q[*j] as f64));
            }
            if q[*i] > 0 {
                let mut e = q.clone();
                e[*i] -= 1;
                out.push((*j, e, -c * q[*i] as f64));
            }
        }
    }
    debug_assert!(out.iter().all(|(_, q, _)| q.len() == n));
    out
}

/// Volume-preserving scenario on `C^n` with `S_i = x_i ∂_i - x_{i+1} ∂_{i+1}` and
/// the single invariant `u = x_1 ⋯ x_n`.
pub fn scenario_volume(n: usize, a: Vec<UPoly>, perturbation: XFieldTerms) -> Result<Scenario> {
    if n < 2 {
        return Err(Error::InvalidInput("volume scenario needs n ≥ 2".into()));
    }
    if perturbation.iter().any(|(i, q, _)| *i >= n || q.len() != n) {
        return Err(Error::DimensionMismatch("perturbation term outside C^n".into()));
    }
    let rows: Vec<Vec<i64>> = (0..n - 1)
        .map(|i| (0..n).map(|k| if k == i { 1 } else if k == i + 1 { -1 } else { 0 }).collect())
        .collect();
    let s = LinearMorphism::from_integers(&rows)?;
    let r = ResonantStructure::new(&s, vec![vec![1; n]])?;
    let ring = Ring::new(n, 0, max_degree(&perturbation) + 1, 0, vec![])?;
    let div = terms_to_field(&perturbation, &ring)?.divergence().max_abs();
    if div > 1e-12 {
        return Err(Error::NotVolumePreserving { max_div: div });
    }
    Scenario::new("volume", s, r, a, perturbation)
}
