//! Shared generators for the property tests.

#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;

use lpnf::psalg::{MultiIndex, Ring, TruncatedSeries, VectorField, C64};
use lpnf::resonance::{LinearMorphism, ResonantStructure};

/// Raw term `(x-exponents, u-exponents, re, im)`.
pub type Term = (Vec<u32>, Vec<u32>, f64, f64);

/// Terms with `n` x-exponents in `0..=xdeg` and `p` u-exponents in `0..=udeg`.
pub fn terms(n: usize, p: usize, xdeg: u32, udeg: u32, count: usize) -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=xdeg, n),
            prop::collection::vec(0..=udeg, p),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..=count,
    )
}

/// Builds a series from raw terms, dropping those outside the truncation.
pub fn series(ring: &Arc<Ring>, raw: &[Term]) -> TruncatedSeries {
    let mut f = TruncatedSeries::zero(ring);
    for (x, u, re, im) in raw {
        let m = MultiIndex::new(x.clone(), u.clone());
        if m.xdeg() <= ring.xmax() && m.udeg() <= ring.umax() {
            let prev = f.coeff(&m);
            f.insert(&m, prev + C64::new(*re, *im)).unwrap();
        }
    }
    f
}

/// Builds a field whose component `i` collects the raw terms `k` with `k % n == i`.
pub fn field(ring: &Arc<Ring>, raw: &[Term]) -> VectorField {
    let n = ring.n();
    let comps = (0..n)
        .map(|i| {
            let part: Vec<Term> = raw.iter().skip(i).step_by(n).cloned().collect();
            series(ring, &part)
        })
        .collect();
    VectorField::new(comps).unwrap()
}

/// Drops the terms of x-degree below `order`.
pub fn of_order(x: &VectorField, order: u32) -> VectorField {
    x.jet_range(order, u32::MAX)
}

/// Morphisms with their resonant rows, `n ≤ 3`, `p ≤ 2`, `l ≤ 2`.
pub fn catalogue() -> Vec<(LinearMorphism, ResonantStructure)> {
    let int = |rows: &[Vec<i64>], r: Vec<Vec<u32>>| {
        let s = LinearMorphism::from_integers(rows).unwrap();
        let r = ResonantStructure::new(&s, r).unwrap();
        (s, r)
    };
    vec![
        int(&[vec![1, -1]], vec![vec![1, 1]]),
        int(&[vec![1, -2]], vec![vec![2, 1]]),
        int(&[vec![1, -1, 0]], vec![vec![1, 1, 0], vec![0, 0, 1]]),
        int(&[vec![1, -1, 0], vec![1, 0, -1]], vec![vec![1, 1, 1]]),
        int(&[vec![1, -1, 0], vec![0, 0, 1]], vec![vec![1, 1, 0]]),
    ]
}

