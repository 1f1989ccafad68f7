//! Normalization state, fibered diffeomorphisms and extraction of the frequency map.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::psalg::{substitute_x, Ring, TruncatedSeries, VectorField, C64};
use crate::resonance::{LinearMorphism, ResonantStructure};

/// Relative tolerance of span memberships.
pub const GOOD_TOL: f64 = 1e-9;

/// Diffeomorphism `Φ = Id + U` tangent to the identity, with its fibered extension
/// `Φ̃(x, u) = (Φ(x, u), u + π(Φ(x, u)) - π(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedDiffeo {
    u: VectorField,
}

impl FiberedDiffeo {
    /// Wraps a displacement of order at least two.
    pub fn new(u: VectorField) -> Result<Self> {
        let ord = u.order();
        if ord < 2 {
            return Err(Error::NotTangentToIdentity { order: ord });
        }
        Ok(Self { u })
    }

    /// The identity.
    pub fn identity(ring: &Arc<Ring>) -> Self {
        Self { u: VectorField::zero(ring) }
    }

    /// The x-displacement `U`.
    pub fn displacement(&self) -> &VectorField {
        &self.u
    }

    /// The u-displacement `π(x + U) - π(x)` as series.
    pub fn v_rule(&self, r: &ResonantStructure) -> Result<Vec<TruncatedSeries>> {
        let ring = self.u.ring();
        let args: Vec<TruncatedSeries> = (0..ring.n())
            .map(|i| &TruncatedSeries::x(ring, i) + self.u.comp(i))
            .collect();
        (0..r.p())
            .map(|k| {
                let mono = r.monomial(ring, k);
                Ok(&substitute_x(&mono, &args)? - &mono)
            })
            .collect()
    }

    /// Image `(y, v)` of the point `(x, u)`, with `u` absolute.
    pub fn apply_point(&self, r: &ResonantStructure, x: &[C64], u: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let d = self.u.eval(x, u);
        let y: Vec<C64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        let (py, px) = (r.pi(&y), r.pi(x));
        let v = (0..u.len()).map(|k| u[k] + py[k] - px[k]).collect();
        (y, v)
    }
}

/// Summary of one Newton step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    /// Dyadic index `k` with `m = 2^k` before the step.
    pub k: u32,
    /// Order before the step.
    pub m: u32,
    /// Threshold used to declare a divisor zero.
    pub divisor_floor: f64,
    /// Smallest `|A_{m,α}(b)|` met in the step (infinite when no weight was solved).
    pub min_divisor: f64,
    /// Source `(Q, i)` of the smallest divisor.
    pub min_divisor_source: Option<(Vec<u32>, usize)>,
    /// Number of distinct nonzero weights solved.
    pub weights_solved: usize,
    /// Largest coefficient of the generator.
    pub generator_max: f64,
    /// Largest coefficient of the resonant block before restriction.
    pub resonant_max: f64,
    /// Largest coefficient left at x-degree `≤ 2m` after the transformation.
    pub low_degree_residual: f64,
    /// Mass dropped by the u-truncation while restricting to `Σ`.
    pub sigma_dropped: f64,
    /// Least-squares residual of the span test of the resonant block.
    pub span_residual: f64,
    /// Largest coefficient of the remainder after the step.
    pub remainder_max: f64,
}

/// Column choice and inverse used to read `a_j` from a diagonal field.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    /// Columns `i_1, …, i_l` of the eigenvalue matrix.
    pub columns: Vec<usize>,
    /// Matrix `M` with `a_j = Σ_k M[j][k] g_{i_k}`.
    pub inverse: Vec<Vec<C64>>,
    /// Max-row-sum norm of `M`.
    pub inverse_norm: f64,
}

impl Extraction {
    /// Greedy column pivoting on `λ`: at each step the column with the largest
    /// residual after projection on the chosen ones, lowest index on ties.
    pub fn new(s: &LinearMorphism) -> Result<Self> {
        let (l, n) = (s.l(), s.n());
        let cols: Vec<Vec<C64>> = (0..n).map(|i| (0..l).map(|j| s.lam()[j][i]).collect()).collect();
        let mut basis: Vec<Vec<C64>> = Vec::new();
        let mut chosen = Vec::new();
        for _ in 0..l {
            let mut best: Option<(usize, f64, Vec<C64>)> = None;
            for (i, c) in cols.iter().enumerate() {
                if chosen.contains(&i) {
                    continue;
                }
                let mut r = c.clone();
                for q in &basis {
                    let dot: C64 = q.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                    for (rv, qv) in r.iter_mut().zip(q) {
                        *rv -= dot * qv;
                    }
                }
                let nr = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                if best.as_ref().is_none_or(|b| nr > b.1 * (1.0 + 1e-12)) {
                    best = Some((i, nr, r));
                }
            }
            let (i, nr, r) = best.ok_or_else(|| Error::InvalidInput("no column left".into()))?;
            if nr < 1e-12 {
                return Err(Error::InvalidInput("eigenvalue matrix is rank deficient".into()));
            }
            chosen.push(i);
            basis.push(r.into_iter().map(|v| v / nr).collect());
        }
        // g_{i_k} = Σ_j a_j λ_{j,i_k}, so a = (Lᵀ)^{-1} g with L[j][k] = λ_{j,i_k}.
        let lt = DMatrix::from_fn(l, l, |k, j| s.lam()[j][chosen[k]]);
        let inv = lt
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("selected eigenvalue block is singular".into()))?;
        let inverse: Vec<Vec<C64>> = (0..l).map(|j| (0..l).map(|k| inv[(j, k)]).collect()).collect();
        let inverse_norm = inverse
            .iter()
            .map(|row| row.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(Self { columns: chosen, inverse, inverse_norm })
    }
}

/// The diagonal field `Σ_j a_j(u) S_j`.
pub fn nf_field(a: &[TruncatedSeries], s: &LinearMorphism, ring: &Arc<Ring>) -> VectorField {
    let comps = (0..s.n())
        .map(|i| {
            let mut g = TruncatedSeries::zero(ring);
            for (j, aj) in a.iter().enumerate() {
                g.add_scaled(&aj.retruncate(ring), s.lam()[j][i]);
            }
            let mut e = vec![0u32; s.n()];
            e[i] = 1;
            g.mul_x_monomial(&e)
        })
        .collect();
    VectorField::new(comps).expect("components share a ring")
}

/// Diagonal coefficients `g_i(u)` of a field `Σ_i x_i g_i(u) ∂_i`.
fn diagonal_coefficients(nf: &VectorField) -> Result<Vec<TruncatedSeries>> {
    let ring = nf.ring();
    let mut out = Vec::with_capacity(nf.n());
    for i in 0..nf.n() {
        let mut g = TruncatedSeries::zero(ring);
        for (m, c) in nf.comp(i).iter() {
            let diag = m.xexp.iter().enumerate().all(|(k, &e)| e == u32::from(k == i));
            if !diag {
                return Err(Error::NotDiagonalLinear { q: m.xexp.clone(), i });
            }
            let mut um = m.clone();
            um.xexp = vec![0; nf.n()];
            g.insert(&um, c)?;
        }
        out.push(g);
    }
    Ok(out)
}

/// Coefficients `a_j(u)` with `Σ_j a_j S_j = nf`; errors when `nf` is not diagonal
/// linear in x or not in the span of the `S_j`.
pub fn extract_a_coeffs(
    nf: &VectorField,
    s: &LinearMorphism,
    ext: &Extraction,
) -> Result<Vec<TruncatedSeries>> {
    let g = diagonal_coefficients(nf)?;
    let ring = nf.ring();
    let a: Vec<TruncatedSeries> = (0..s.l())
        .map(|j| {
            let mut acc = TruncatedSeries::zero(ring);
            for (k, &col) in ext.columns.iter().enumerate() {
                acc.add_scaled(&g[col], ext.inverse[j][k]);
            }
            acc
        })
        .collect();
    let scale = nf.max_abs().max(1e-300);
    let back = nf_field(&a, s, ring);
    let residual = back.try_sub(nf)?.max_abs() / scale;
    if residual > GOOD_TOL {
        return Err(Error::NotInSpan { residual });
    }
    Ok(a)
}

/// Relative least-squares residual of `x` against the span of the `S_j` over u-series.
/// Non-diagonal terms count fully towards the residual.
pub fn span_residual(x: &VectorField, s: &LinearMorphism) -> f64 {
    let scale = x.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let n = s.n();
    let l = s.l();
    let mut off_diag: f64 = 0.0;
    let mut by_u: std::collections::BTreeMap<Vec<u32>, Vec<C64>> = Default::default();
    for (i, m, c) in x.terms() {
        let diag = m.xexp.iter().enumerate().all(|(k, &e)| e == u32::from(k == i));
        if diag {
            by_u.entry(m.uexp.clone()).or_insert_with(|| vec![C64::new(0.0, 0.0); n])[i] += c;
        } else {
            off_diag = off_diag.max(c.norm());
        }
    }
    let lt = DMatrix::from_fn(n, l, |i, j| s.lam()[j][i]);
    let svd = lt.clone().svd(true, true);
    let mut worst: f64 = off_diag;
    for v in by_u.values() {
        let rhs = DMatrix::from_fn(n, 1, |i, _| v[i]);
        let sol = svd.solve(&rhs, 1e-14).expect("svd with vectors");
        let res = &lt * sol - rhs;
        worst = worst.max(res.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    worst / scale
}

/// True when `x` lies in the span of the `S_j` over u-series within `GOOD_TOL`.
pub fn in_span(x: &VectorField, s: &LinearMorphism) -> bool {
    span_residual(x, s) < GOOD_TOL
}

/// Current normal form `Σ_j a_j^m(u) S_j`, remainder and history of a normalization.
#[derive(Clone, Debug)]
pub struct NormalizationState {
    /// Linear morphism `S`.
    pub s: LinearMorphism,
    /// Resonant structure `R`.
    pub r: ResonantStructure,
    /// Column choice used by [`extract_a_coeffs`].
    pub extraction: Extraction,
    /// Current normalized order `m`.
    pub m: u32,
    /// Coefficients `a_j^m(u)` as u-series in the ring of the remainder.
    pub a: Vec<TruncatedSeries>,
    /// Remainder, of x-order at least `m + 1`.
    pub remainder: VectorField,
    /// Ideal cofactors `g_k` of the Σ-vanishing part discarded in the latest step.
    pub sigma_part: Vec<VectorField>,
    /// Resonant block restricted to `Σ` in the latest step.
    pub resonant_part: VectorField,
    /// Coordinate changes, one per step; normalized coordinates of step `k`
    /// map to those of step `k - 1` by `x = y + U_k(y, π(y))`.
    pub psi: Vec<FiberedDiffeo>,
    /// Step records.
    pub ledger: Vec<StepRecord>,
}

impl NormalizationState {
    /// Initial state for `X = Σ_j a_j(u) S_j + perturbation` normalized to order `m0`.
    pub fn new(
        s: LinearMorphism,
        r: ResonantStructure,
        a: Vec<TruncatedSeries>,
        perturbation: VectorField,
        m0: u32,
    ) -> Result<Self> {
        let ring = perturbation.ring().clone();
        if s.n() != ring.n() || r.p() != ring.p() || a.len() != s.l() {
            return Err(Error::DimensionMismatch(
                "morphism, resonant structure and coefficients do not match the ring".into(),
            ));
        }
        if m0 < 1 {
            return Err(Error::InvalidInput("initial order must be at least 1".into()));
        }
        let ord = perturbation.order();
        if ord < m0 + 1 {
            return Err(Error::InvalidInput(format!(
                "perturbation of order {ord} is not of order at least m0 + 1 = {}",
                m0 + 1
            )));
        }
        let mut aa = Vec::with_capacity(a.len());
        for f in a {
            if f.ring().base() != ring.base() || f.ring().p() != ring.p() {
                return Err(Error::BasePointMismatch);
            }
            if f.iter().any(|(m, _)| m.xdeg() > 0) {
                return Err(Error::InvalidInput("coefficients a_j must not depend on x".into()));
            }
            aa.push(f.retruncate(&ring));
        }
        let extraction = Extraction::new(&s)?;
        let p = r.p();
        Ok(Self {
            s,
            r,
            extraction,
            m: m0,
            a: aa,
            remainder: perturbation,
            sigma_part: vec![VectorField::zero(&ring); p],
            resonant_part: VectorField::zero(&ring),
            psi: Vec::new(),
            ledger: Vec::new(),
        })
    }

    /// Shared ring.
    pub fn ring(&self) -> &Arc<Ring> {
        self.remainder.ring()
    }

    /// Base point `b`.
    pub fn base(&self) -> &[C64] {
        self.ring().base()
    }

    /// `NF^m = Σ_j a_j^m(u) S_j`.
    pub fn nf(&self) -> VectorField {
        nf_field(&self.a, &self.s, self.ring())
    }

    /// The Σ-vanishing field `Σ_k (x^{R_k} - u_k) g_k` discarded in the latest step.
    pub fn sigma_part_field(&self) -> VectorField {
        let ring = self.ring();
        let mut acc = VectorField::zero(ring);
        for (k, g) in self.sigma_part.iter().enumerate() {
            let ideal = &self.r.monomial(ring, k) - &TruncatedSeries::u(ring, k);
            acc = acc.try_add(&g.mul_fn(&ideal)).expect("same ring");
        }
        acc
    }

    /// Values `a_j^m(b')` at an absolute point `b'` of `C^p`.
    pub fn a_at(&self, u: &[C64]) -> Vec<C64> {
        let x0 = vec![C64::new(0.0, 0.0); self.s.n()];
        self.a.iter().map(|f| f.eval(&x0, u)).collect()
    }

    /// Good-perturbation test of the latest resonant block.
    pub fn good_perturbation_check(&self) -> bool {
        in_span(&self.resonant_part, &self.s)
    }
}

/// Good-perturbation test of a state's latest resonant block.
pub fn good_perturbation_check(state: &NormalizationState) -> bool {
    state.good_perturbation_check()
}
