//! Generators of the ring of `S`-invariant monomials and the rank identity for `Dπ`.

use nalgebra::DMatrix;

use super::morphism::{LinearMorphism, ResonantStructure};
use crate::error::{Error, Result};
use crate::psalg::{exponents_of_degree, C64};

/// Nonzero exponents `Q` with `|Q| ≤ bound` and `(Q, λ_j) = 0` for all `j`, in graded-lex order.
pub fn invariant_exponents(s: &LinearMorphism, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 1..=bound {
        for q in exponents_of_degree(s.n(), d) {
            let v: Vec<i64> = q.iter().map(|&e| e as i64).collect();
            if s.pair_is_zero(&v) {
                out.push(q);
            }
        }
    }
    out
}

/// Minimal generators of the monoid of invariant exponents up to degree `bound`.
///
/// A solution is kept when no other solution lies componentwise below it, which
/// is the same as not being the sum of two nonzero solutions.
pub fn hilbert_basis(s: &LinearMorphism, bound: u32) -> Vec<Vec<u32>> {
    let sols = invariant_exponents(s, bound);
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for q in sols {
        let reducible = basis.iter().any(|g| g.iter().zip(&q).all(|(a, b)| a <= b));
        if !reducible {
            basis.push(q);
        }
    }
    basis
}

/// The resonant structure generated by the Hilbert basis within `degree_bound`.
pub fn first_integral_basis(s: &LinearMorphism, degree_bound: u32) -> Result<ResonantStructure> {
    let basis = hilbert_basis(s, degree_bound);
    if basis.is_empty() {
        return Err(Error::EmptyRing { bound: degree_bound });
    }
    ResonantStructure::new(s, basis)
}

fn det(m: &[Vec<C64>]) -> C64 {
    let k = m.len();
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    DMatrix::from_fn(k, k, |i, j| m[i][j]).determinant()
}

/// Both sides of `x_{j_1}⋯x_{j_k} det(Dπ(x))_{I,J} = x^{R_{i_1}}⋯x^{R_{i_k}} det(R_{I,J})`.
pub fn dpi_minor_identity_check(
    r: &ResonantStructure,
    x: &[C64],
    rows: &[usize],
    cols: &[usize],
) -> Result<(C64, C64)> {
    if let Some(j) = x.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::OnCoordinateHyperplane { index: j });
    }
    if rows.len() != cols.len() || rows.iter().any(|&i| i >= r.p()) || cols.iter().any(|&j| j >= x.len())
    {
        return Err(Error::DimensionMismatch("invalid minor index sets".into()));
    }
    let dpi = r.dpi(x);
    let sub: Vec<Vec<C64>> = rows.iter().map(|&i| cols.iter().map(|&j| dpi[i][j]).collect()).collect();
    let rsub: Vec<Vec<C64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| C64::new(r.row(i)[j] as f64, 0.0)).collect())
        .collect();
    let pi = r.pi(x);
    let lhs = cols.iter().map(|&j| x[j]).product::<C64>() * det(&sub);
    let rhs = rows.iter().map(|&i| pi[i]).product::<C64>() * det(&rsub);
    Ok((lhs, rhs))
}
