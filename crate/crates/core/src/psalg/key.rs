//! Packed bi-graded monomial keys.
//!
//! A key stores the x-degree, the x-exponents, the u-degree and the
//! u-exponents of a monomial in the bytes of a `u128`, most significant
//! byte first. The natural integer order of keys is therefore graded
//! lexicographic on the x-part, then graded lexicographic on the u-part.
//! Exponent addition is plain integer addition as long as no byte
//! overflows, which truncation degrees below 128 guarantee.

use serde::{Deserialize, Serialize};

/// Largest number of x and u variables a key can hold together.
pub const MAX_VARS: usize = 14;

/// Largest admissible truncation degree.
pub const MAX_DEGREE: u32 = 120;

/// Bi-graded multi-index `(Q, P)` for the monomial `x^Q (u-b)^P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    /// Exponents of the x-variables.
    pub xexp: Vec<u32>,
    /// Exponents of the u-variables (expanded around the base point).
    pub uexp: Vec<u32>,
}

impl MultiIndex {
    /// Builds a multi-index from its two parts.
    pub fn new(xexp: Vec<u32>, uexp: Vec<u32>) -> Self {
        Self { xexp, uexp }
    }

    /// Multi-index with no u-part.
    pub fn x_only(xexp: Vec<u32>, p: usize) -> Self {
        Self { xexp, uexp: vec![0; p] }
    }

    /// Total x-degree `|Q|`.
    pub fn xdeg(&self) -> u32 {
        self.xexp.iter().sum()
    }

    /// Total u-degree `|P|`.
    pub fn udeg(&self) -> u32 {
        self.uexp.iter().sum()
    }
}

/// Dimensions needed to pack and unpack keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Shape {
    pub n: usize,
    pub p: usize,
}

/// Packed monomial key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Key(pub u128);

const XDEG_BYTE: usize = 15;

impl Shape {
    #[inline]
    fn x_byte(&self, i: usize) -> usize {
        XDEG_BYTE - 1 - i
    }

    #[inline]
    fn udeg_byte(&self) -> usize {
        XDEG_BYTE - 1 - self.n
    }

    #[inline]
    fn u_byte(&self, k: usize) -> usize {
        XDEG_BYTE - 2 - self.n - k
    }

    /// Packs a multi-index.
    pub fn pack(&self, m: &MultiIndex) -> Key {
        let mut v: u128 = 0;
        let xd: u32 = m.xexp.iter().sum();
        let ud: u32 = m.uexp.iter().sum();
        v |= (xd as u128) << (8 * XDEG_BYTE);
        for (i, &q) in m.xexp.iter().enumerate() {
            v |= (q as u128) << (8 * self.x_byte(i));
        }
        v |= (ud as u128) << (8 * self.udeg_byte());
        for (k, &q) in m.uexp.iter().enumerate() {
            v |= (q as u128) << (8 * self.u_byte(k));
        }
        Key(v)
    }

    /// Unpacks a key.
    pub fn unpack(&self, k: Key) -> MultiIndex {
        MultiIndex {
            xexp: (0..self.n).map(|i| self.x(k, i)).collect(),
            uexp: (0..self.p).map(|j| self.u(k, j)).collect(),
        }
    }

    #[inline]
    fn byte(k: Key, b: usize) -> u32 {
        ((k.0 >> (8 * b)) & 0xff) as u32
    }

    /// Exponent of `x_i`.
    #[inline]
    pub fn x(&self, k: Key, i: usize) -> u32 {
        Self::byte(k, self.x_byte(i))
    }

    /// Exponent of `u_j`.
    #[inline]
    pub fn u(&self, k: Key, j: usize) -> u32 {
        Self::byte(k, self.u_byte(j))
    }

    /// Key of the single variable `x_i`.
    #[inline]
    pub fn x_unit(&self, i: usize) -> Key {
        Key((1u128 << (8 * XDEG_BYTE)) | (1u128 << (8 * self.x_byte(i))))
    }

    /// Key of the single variable `u_j`.
    #[inline]
    pub fn u_unit(&self, j: usize) -> Key {
        Key((1u128 << (8 * self.udeg_byte())) | (1u128 << (8 * self.u_byte(j))))
    }

    /// Exponents of the x-part only.
    pub fn xexp(&self, k: Key) -> Vec<u32> {
        (0..self.n).map(|i| self.x(k, i)).collect()
    }

    /// Key with the u-part cleared.
    #[inline]
    pub fn x_part(&self, k: Key) -> Key {
        let shift = 8 * (self.udeg_byte() + 1);
        Key((k.0 >> shift) << shift)
    }

    /// Key with the x-part cleared.
    #[inline]
    pub fn u_part(&self, k: Key) -> Key {
        let shift = 8 * (self.udeg_byte() + 1);
        Key(k.0 & ((1u128 << shift) - 1))
    }
}

impl Key {
    /// Total x-degree.
    #[inline]
    pub fn xdeg(self) -> u32 {
        (self.0 >> (8 * XDEG_BYTE)) as u32
    }

    /// Smallest key with x-degree strictly above `d`.
    #[inline]
    pub fn xdeg_bound(d: u32) -> Key {
        Key(((d as u128) + 1) << (8 * XDEG_BYTE))
    }

    /// Exponent sum.
    #[inline]
    pub fn add(self, o: Key) -> Key {
        Key(self.0 + o.0)
    }

    /// Exponent difference; the caller guarantees divisibility.
    #[inline]
    pub fn sub(self, o: Key) -> Key {
        Key(self.0 - o.0)
    }
}

impl Shape {
    /// Total u-degree of a key.
    #[inline]
    pub fn udeg(&self, k: Key) -> u32 {
        Self::byte(k, self.udeg_byte())
    }
}

/// All exponent vectors of length `n` and total degree `d`, in increasing lexicographic order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=d {
            prefix.push(first);
            rec(n - 1, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}
