//! The linear morphism `S` and the resonant structure `(R, π, Σ)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psalg::{Ring, TruncatedSeries, VectorField, C64};

/// Tolerance deciding a float weight is zero.
pub const EPS_RES: f64 = 1e-9;

/// Gaussian rational `re + i im` with exact components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussRational {
    /// Real part.
    pub re: Rational64,
    /// Imaginary part.
    pub im: Rational64,
}

impl GaussRational {
    /// Builds `re + i im`.
    pub fn new(re: Rational64, im: Rational64) -> Self {
        Self { re, im }
    }

    /// Nearest double-precision complex value.
    pub fn to_c64(self) -> C64 {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        C64::new(f(self.re), f(self.im))
    }

    /// True when both parts vanish.
    pub fn is_zero(self) -> bool {
        self.re == Rational64::from_integer(0) && self.im == Rational64::from_integer(0)
    }
}

/// The `l × n` eigenvalue matrix of the commuting diagonal fields `S_1, …, S_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMorphism {
    lam: Vec<Vec<C64>>,
    exact: Option<Vec<Vec<GaussRational>>>,
}

impl LinearMorphism {
    /// Float morphism; rows must be independent and `l ≤ n`.
    pub fn new(lam: Vec<Vec<C64>>) -> Result<Self> {
        Self::validate(&lam)?;
        Ok(Self { lam, exact: None })
    }

    /// Exact morphism with Gaussian-rational entries.
    pub fn from_rational(exact: Vec<Vec<GaussRational>>) -> Result<Self> {
        let lam: Vec<Vec<C64>> = exact
            .iter()
            .map(|row| row.iter().map(|g| g.to_c64()).collect())
            .collect();
        Self::validate(&lam)?;
        Ok(Self { lam, exact: Some(exact) })
    }

    /// Exact morphism with integer real entries.
    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rational(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| {
                            GaussRational::new(Rational64::from_integer(v), Rational64::from_integer(0))
                        })
                        .collect()
                })
                .collect(),
        )
    }

    fn validate(lam: &[Vec<C64>]) -> Result<()> {
        let l = lam.len();
        if l == 0 {
            return Err(Error::InvalidInput("morphism needs at least one row".into()));
        }
        let n = lam[0].len();
        if lam.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged eigenvalue matrix".into()));
        }
        if l > n {
            return Err(Error::DimensionMismatch(format!("l = {l} exceeds n = {n}")));
        }
        if complex_rank(lam, 1e-10) != l {
            return Err(Error::InvalidInput("rows of the eigenvalue matrix are dependent".into()));
        }
        Ok(())
    }

    /// Number of x-variables.
    pub fn n(&self) -> usize {
        self.lam[0].len()
    }

    /// Number of generators `S_j`.
    pub fn l(&self) -> usize {
        self.lam.len()
    }

    /// Entries `λ_i(g_j)` as rows.
    pub fn lam(&self) -> &[Vec<C64>] {
        &self.lam
    }

    /// Exact entries, when available.
    pub fn exact(&self) -> Option<&[Vec<GaussRational>]> {
        self.exact.as_deref()
    }

    /// True when resonance decisions are made with a float tolerance.
    pub fn float_resonance_mode(&self) -> bool {
        self.exact.is_none()
    }

    /// `Λ = max_{i,j} |λ_i(g_j)|`.
    pub fn lam_max(&self) -> f64 {
        self.lam.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Values `(d, λ_j)` for an integer exponent vector `d`.
    pub fn pair(&self, d: &[i64]) -> Vec<C64> {
        self.lam
            .iter()
            .map(|row| row.iter().zip(d).map(|(l, &q)| l * q as f64).sum())
            .collect()
    }

    /// Exact zero test of `(d, λ_j)` for all `j` (tolerance test in float mode).
    pub fn pair_is_zero(&self, d: &[i64]) -> bool {
        match &self.exact {
            Some(ex) => ex.iter().all(|row| {
                let mut re = Rational64::from_integer(0);
                let mut im = Rational64::from_integer(0);
                for (g, &q) in row.iter().zip(d) {
                    re += g.re * q;
                    im += g.im * q;
                }
                re == Rational64::from_integer(0) && im == Rational64::from_integer(0)
            }),
            None => self.pair(d).iter().all(|v| v.norm() < EPS_RES),
        }
    }

    /// The diagonal field `S_j` in a ring.
    pub fn s_field(&self, ring: &Arc<Ring>, j: usize) -> VectorField {
        VectorField::diagonal(ring, &self.lam[j])
    }

    /// The diagonal field `Σ_j c_j S_j` for constant coefficients.
    pub fn combination(&self, ring: &Arc<Ring>, c: &[C64]) -> VectorField {
        let d: Vec<C64> = (0..self.n())
            .map(|i| (0..self.l()).map(|j| c[j] * self.lam[j][i]).sum())
            .collect();
        VectorField::diagonal(ring, &d)
    }
}

/// Rank of a complex matrix given by rows, via singular values.
pub(crate) fn complex_rank(rows: &[Vec<C64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * smax.max(1.0)).count()
}

/// Exponent rows `R_1, …, R_p` of independent `S`-invariant monomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantStructure {
    rows: Vec<Vec<u32>>,
    rank: usize,
}

impl ResonantStructure {
    /// Validates invariance, nonzero rows and full rank against `S`.
    pub fn new(s: &LinearMorphism, rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = s.n();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("exponent row length differs from n".into()));
        }
        if rows.iter().any(|r| r.iter().all(|&q| q == 0)) {
            return Err(Error::InvalidInput("zero exponent row".into()));
        }
        for r in &rows {
            let d: Vec<i64> = r.iter().map(|&q| q as i64).collect();
            if !s.pair_is_zero(&d) {
                return Err(Error::InvalidInput(format!("x^{r:?} is not S-invariant")));
            }
        }
        let rank = integer_rank(&rows);
        if rank != rows.len() {
            return Err(Error::DependentGenerators { count: rows.len(), rank });
        }
        Ok(Self { rows, rank })
    }

    /// Structure with no invariant monomial.
    pub fn empty() -> Self {
        Self { rows: vec![], rank: 0 }
    }

    /// Number of invariant monomials `p`.
    pub fn p(&self) -> usize {
        self.rows.len()
    }

    /// Exponent rows.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Row `k`.
    pub fn row(&self, k: usize) -> &[u32] {
        &self.rows[k]
    }

    /// Cached rank (equal to `p`).
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Degree `|R_k|`.
    pub fn degree(&self, k: usize) -> u32 {
        self.rows[k].iter().sum()
    }

    /// Smallest degree among rows (zero when `p = 0`).
    pub fn min_degree(&self) -> u32 {
        (0..self.p()).map(|k| self.degree(k)).min().unwrap_or(0)
    }

    /// The monomial `x^{R_k}` in a ring.
    pub fn monomial(&self, ring: &Arc<Ring>, k: usize) -> TruncatedSeries {
        TruncatedSeries::x_monomial(ring, &self.rows[k])
    }

    /// `π(x) = (x^{R_1}, …, x^{R_p})`.
    pub fn pi(&self, x: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(&q, &z)| z.powu(q)).product())
            .collect()
    }

    /// Jacobian `Dπ(x)` as `p` rows of length `n`.
    pub fn dpi(&self, x: &[C64]) -> Vec<Vec<C64>> {
        self.rows
            .iter()
            .map(|r| {
                (0..x.len())
                    .map(|j| {
                        if r[j] == 0 {
                            return C64::new(0.0, 0.0);
                        }
                        let mut v = C64::new(r[j] as f64, 0.0);
                        for (i, (&q, &z)) in r.iter().zip(x).enumerate() {
                            let e = if i == j { q - 1 } else { q };
                            v *= z.powu(e);
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    }

    /// Degree of a monomial once every `u_k` is counted as `x^{R_k}`.
    pub fn sigma_degree(&self, xexp: &[u32], uexp: &[u32]) -> u32 {
        xexp.iter().sum::<u32>()
            + uexp.iter().enumerate().map(|(k, &e)| e * self.degree(k)).sum::<u32>()
    }
}

/// Rank of an integer matrix by exact fraction-free elimination.
pub(crate) fn integer_rank(rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                let g = gcd(a.abs(), b.abs());
                let (fa, fb) = (b / g, a / g);
                let pivot = m[rank].clone();
                for (v, pv) in m[r].iter_mut().zip(&pivot) {
                    *v = *v * fb - pv * fa;
                }
                let row_g = m[r].iter().fold(0i128, |acc, v| gcd(acc, v.abs()));
                if row_g > 1 {
                    for v in m[r].iter_mut() {
                        *v /= row_g;
                    }
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_structure_is_valid() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        let r = ResonantStructure::new(&s, vec![vec![1, 1]]).unwrap();
        assert_eq!(r.p(), 1);
        assert_eq!(r.degree(0), 2);
        let x = [C64::new(0.3, 0.2), C64::new(-0.5, 0.1)];
        assert!((r.pi(&x)[0] - x[0] * x[1]).norm() < 1e-15);
    }

    #[test]
    fn non_invariant_row_is_rejected() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        assert!(ResonantStructure::new(&s, vec![vec![2, 1]]).is_err());
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let s = LinearMorphism::from_integers(&[vec![1, -1]]).unwrap();
        assert!(matches!(
            ResonantStructure::new(&s, vec![vec![1, 1], vec![2, 2]]),
            Err(Error::DependentGenerators { count: 2, rank: 1 })
        ));
    }

    #[test]
    fn dependent_morphism_rows_are_rejected() {
        assert!(LinearMorphism::from_integers(&[vec![1, -1], vec![2, -2]]).is_err());
        assert!(LinearMorphism::from_integers(&[vec![1], vec![2]]).is_err());
    }

    #[test]
    fn integer_rank_examples() {
        assert_eq!(integer_rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 2, 1]]), 2);
        assert_eq!(integer_rank(&[vec![1, 1, 1]]), 1);
    }
}
