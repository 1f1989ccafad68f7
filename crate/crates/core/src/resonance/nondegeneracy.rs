//! Nondegeneracy of the frequency map `a(u)` in the sense of Rüssmann.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::morphism::complex_rank;
use crate::error::{Error, Result};
use crate::psalg::{MultiIndex, TruncatedSeries, C64};

/// True when the coefficient vectors of `(a_1, …, a_l)` up to u-degree `jet_order`
/// span `C^l`, i.e. no nonzero `c` makes `Σ c_j a_j` vanish identically on that jet.
pub fn is_nondegenerate(a: &[TruncatedSeries], jet_order: u32) -> bool {
    let l = a.len();
    if l == 0 {
        return true;
    }
    let mut cols: BTreeMap<MultiIndex, usize> = BTreeMap::new();
    for f in a {
        for (m, _) in f.iter() {
            if m.xdeg() == 0 && m.udeg() <= jet_order {
                let next = cols.len();
                cols.entry(m).or_insert(next);
            }
        }
    }
    let mut rows = vec![vec![C64::new(0.0, 0.0); cols.len()]; l];
    for (j, f) in a.iter().enumerate() {
        for (m, c) in f.iter() {
            if let Some(&k) = cols.get(&m) {
                rows[j][k] = c;
            }
        }
    }
    complex_rank(&rows, 1e-12) == l
}

/// Sampling parameters for [`nondegeneracy_index`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyOptions {
    /// Number of random points on the unit sphere of `C^l`.
    pub sphere_samples: usize,
    /// Number of random real unit directions in `R^{2p}`, in addition to the coordinate axes.
    pub directions: usize,
    /// Seed of the deterministic sampler.
    pub seed: u64,
    /// Values at or below this floor do not certify nondegeneracy.
    pub beta_floor: f64,
    /// Factor applied to the sampled amount to account for sampling.
    pub safety: f64,
}

impl Default for NondegeneracyOptions {
    fn default() -> Self {
        Self { sphere_samples: 64, directions: 64, seed: 0, beta_floor: 1e-8, safety: 0.5 }
    }
}

/// Index and amount of nondegeneracy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NondegeneracyIndex {
    /// Smallest derivative order certifying a positive lower bound.
    pub mu0: u32,
    /// Sampled amount `β(μ0)`.
    pub beta: f64,
    /// `safety · β`.
    pub beta_safe: f64,
}

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Vec<C64>, p: &[C64], c: C64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), C64::new(0.0, 0.0));
    }
    for (a, v) in acc.iter_mut().zip(p) {
        *a += v * c;
    }
}

/// Coefficients in `t` of `f(y + t v)` for a u-series `f` expanded around its base.
fn along_line(f: &TruncatedSeries, y: &[C64], v: &[C64]) -> Vec<C64> {
    let base = f.ring().base();
    let lin: Vec<[C64; 2]> = (0..y.len()).map(|k| [y[k] - base[k], v[k]]).collect();
    let mut acc = vec![C64::new(0.0, 0.0)];
    for (m, c) in f.iter() {
        if m.xdeg() > 0 {
            continue;
        }
        let mut p = vec![C64::new(1.0, 0.0)];
        for (k, &e) in m.uexp.iter().enumerate() {
            for _ in 0..e {
                p = poly_mul(&p, &lin[k]);
            }
        }
        poly_add_scaled(&mut acc, &p, c);
    }
    acc
}

fn unit_complex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let g: Vec<f64> = (0..2 * dim).map(|_| StandardNormal.sample(rng)).collect();
    let nrm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    (0..dim).map(|k| C64::new(g[2 * k] / nrm, g[2 * k + 1] / nrm)).collect()
}

/// Index `μ0` and amount `β` of nondegeneracy of `a` over a finite grid.
///
/// For each grid point `y` and sampled unit `c`, the real function
/// `g(y) = |Σ_j c_j a_j(y)|²` is restricted to lines `y + t v` through `y`.
/// Its derivatives at `t = 0` are exact since the restriction is a polynomial in `t`.
/// `β(μ)` is the minimum over `(y, c)` of the largest `k`-th derivative, `k ≤ μ`,
/// maximized over the sampled directions `v`.
pub fn nondegeneracy_index(
    a: &[TruncatedSeries],
    grid: &[Vec<C64>],
    mu_max: u32,
    opts: &NondegeneracyOptions,
) -> Result<NondegeneracyIndex> {
    let l = a.len();
    if l == 0 || grid.is_empty() {
        return Err(Error::InvalidInput("empty frequency map or grid".into()));
    }
    let p = a[0].ring().p();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spheres: Vec<Vec<C64>> = (0..opts.sphere_samples.max(1)).map(|_| unit_complex(&mut rng, l)).collect();
    let mut dirs: Vec<Vec<C64>> = Vec::new();
    for k in 0..p {
        let mut re = vec![C64::new(0.0, 0.0); p];
        re[k] = C64::new(1.0, 0.0);
        dirs.push(re.clone());
        re[k] = C64::new(0.0, 1.0);
        dirs.push(re);
    }
    for _ in 0..opts.directions {
        dirs.push(unit_complex(&mut rng, p));
    }
    let mu_max_us = mu_max as usize;
    let mut fact = vec![1.0f64; mu_max_us + 1];
    for k in 1..=mu_max_us {
        fact[k] = fact[k - 1] * k as f64;
    }
    // best[μ] = min over (y, c) of max_{k ≤ μ} D_k(y, c).
    let mut beta = vec![f64::INFINITY; mu_max_us + 1];
    for y in grid {
        let lines: Vec<Vec<Vec<C64>>> = dirs
            .iter()
            .map(|v| a.iter().map(|f| along_line(f, y, v)).collect())
            .collect();
        for c in &spheres {
            let mut dk = vec![0.0f64; mu_max_us + 1];
            for per_dir in &lines {
                let mut pc = vec![C64::new(0.0, 0.0)];
                for (j, poly) in per_dir.iter().enumerate() {
                    poly_add_scaled(&mut pc, poly, c[j]);
                }
                let conj: Vec<C64> = pc.iter().map(|z| z.conj()).collect();
                let g = poly_mul(&pc, &conj);
                for k in 0..=mu_max_us {
                    let coef = g.get(k).map_or(0.0, |z| z.re.abs());
                    dk[k] = dk[k].max(coef * fact[k]);
                }
            }
            let mut running = 0.0f64;
            for k in 0..=mu_max_us {
                running = running.max(dk[k]);
                beta[k] = beta[k].min(running);
            }
        }
    }
    for (mu, &b) in beta.iter().enumerate() {
        if b > opts.beta_floor {
            return Ok(NondegeneracyIndex { mu0: mu as u32, beta: b, beta_safe: opts.safety * b });
        }
    }
    Err(Error::DegenerateUpToMuMax { mu_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psalg::Ring;

    fn ring(p: usize) -> std::sync::Arc<Ring> {
        Ring::new(0, p, 0, 3, vec![C64::new(0.0, 0.0); p]).unwrap()
    }

    #[test]
    fn rank_examples() {
        let r1 = ring(1);
        let one = TruncatedSeries::constant(&r1, C64::new(1.0, 0.0));
        assert!(is_nondegenerate(&[one], 0));
        let u = TruncatedSeries::u(&r1, 0);
        assert!(!is_nondegenerate(&[u.clone(), u.scale_re(2.0)], 3));
        let r2 = ring(2);
        let a1 = &TruncatedSeries::constant(&r2, C64::new(1.0, 0.0)) + &TruncatedSeries::u(&r2, 0);
        let a2 = TruncatedSeries::u(&r2, 1);
        assert!(is_nondegenerate(&[a1, a2], 1));
    }

    #[test]
    fn constant_map_has_index_zero() {
        let r1 = ring(1);
        let one = TruncatedSeries::constant(&r1, C64::new(1.0, 0.0));
        let grid = vec![vec![C64::new(0.0, 0.0)], vec![C64::new(0.3, -0.2)]];
        let idx = nondegeneracy_index(&[one], &grid, 3, &NondegeneracyOptions::default()).unwrap();
        assert_eq!(idx.mu0, 0);
        assert!((idx.beta - 1.0).abs() < 1e-12);
        assert!((idx.beta_safe - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_map_vanishes_to_second_order() {
        // |c u|² = |u|² vanishes with its gradient at 0; its second derivative along
        // a real unit direction is 2.
        let r1 = ring(1);
        let u = TruncatedSeries::u(&r1, 0);
        let grid = vec![vec![C64::new(0.0, 0.0)], vec![C64::new(0.5, 0.0)]];
        let idx = nondegeneracy_index(&[u], &grid, 3, &NondegeneracyOptions::default()).unwrap();
        assert_eq!(idx.mu0, 2);
        assert!((idx.beta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_map_is_degenerate() {
        let r1 = ring(1);
        let z = TruncatedSeries::zero(&r1);
        let grid = vec![vec![C64::new(0.1, 0.0)]];
        assert!(matches!(
            nondegeneracy_index(&[z], &grid, 4, &NondegeneracyOptions::default()),
            Err(Error::DegenerateUpToMuMax { mu_max: 4 })
        ));
    }
}
