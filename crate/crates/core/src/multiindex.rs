//! Multi-indices in graded-lexicographic order and dense index spaces.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest index space a dense table may allocate.
pub const MAX_TERMS: u128 = 1_000_000;

/// An element of `N^s` with cached degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        MultiIndex { exps, degree }
    }

    pub fn zero(s: usize) -> Self {
        MultiIndex { exps: vec![0; s], degree: 0 }
    }

    /// The unit vector `e_j`.
    pub fn unit(s: usize, j: usize) -> Self {
        let mut exps = vec![0; s];
        exps[j] = 1;
        MultiIndex { exps, degree: 1 }
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        MultiIndex { exps, degree: self.degree + other.degree }
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex { exps, degree: self.degree - other.degree })
    }

    /// Componentwise partial order.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Index of the first nonzero exponent.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e > 0)
    }

    /// All multi-indices of dimension `s` and exact degree `d`, ascending.
    pub fn of_degree(s: usize, d: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; s];
        fill(&mut out, &mut cur, 0, d as u32);
        out.sort();
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if cur.is_empty() {
        if rem == 0 {
            out.push(MultiIndex::new(Vec::new()));
        }
        return;
    }
    if pos == cur.len() - 1 {
        cur[pos] = rem;
        out.push(MultiIndex::new(cur.clone()));
        return;
    }
    for e in 0..=rem {
        cur[pos] = e;
        fill(out, cur, pos + 1, rem - e);
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.exps.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(MultiIndex::new(Vec::<u32>::deserialize(d)?))
    }
}

/// Number of multi-indices in `s` variables of degree at most `n`.
pub fn count_up_to(s: usize, n: usize) -> u128 {
    // C(n + s, s)
    let mut c: u128 = 1;
    for i in 1..=s as u128 {
        c = c * (n as u128 + i) / i;
    }
    c
}

/// Largest mixed-radix code table kept as a flat array.
const FLAT_CODES: u128 = 1 << 22;

#[derive(Clone, Debug)]
enum CodeTable {
    Flat(Vec<u32>),
    Map(HashMap<u64, u32>),
}

/// Every multi-index of degree `<= order` in `s` variables, ascending, with positions.
///
/// Indices also carry a mixed-radix code `sum k_i (order+1)^i`; codes add
/// like the indices themselves as long as the sum stays within the space.
#[derive(Clone, Debug)]
pub struct IndexSpace {
    pub dim: usize,
    pub order: usize,
    indices: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
    degree_start: Vec<usize>,
    codes: Vec<u64>,
    table: CodeTable,
}

impl IndexSpace {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        let total = count_up_to(dim, order);
        if total > MAX_TERMS {
            return Err(Error::TooManyTerms(total));
        }
        let mut indices = Vec::with_capacity(total as usize);
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(indices.len());
            indices.extend(MultiIndex::of_degree(dim, d));
        }
        degree_start.push(indices.len());
        let pos = indices.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let radix = order as u64 + 1;
        let codes: Vec<u64> = indices
            .iter()
            .map(|k| k.exps().iter().rev().fold(0u64, |acc, &e| acc * radix + e as u64))
            .collect();
        let span = (radix as u128).pow(dim as u32);
        let table = if span <= FLAT_CODES {
            let mut flat = vec![u32::MAX; span as usize];
            for (i, &c) in codes.iter().enumerate() {
                flat[c as usize] = i as u32;
            }
            CodeTable::Flat(flat)
        } else {
            CodeTable::Map(codes.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect())
        };
        Ok(IndexSpace { dim, order, indices, pos, degree_start, codes, table })
    }

    /// Mixed-radix code of the index at position `p`.
    pub fn code(&self, p: usize) -> u64 {
        self.codes[p]
    }

    /// Position of the index with code `c`; `c` must come from adding codes
    /// of indices whose degrees sum to at most `order`.
    pub fn position_of_code(&self, c: u64) -> usize {
        match &self.table {
            CodeTable::Flat(v) => v[c as usize] as usize,
            CodeTable::Map(m) => m[&c] as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.pos.get(k).copied()
    }

    /// Positions of all indices of exact degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d > self.order {
            return 0..0;
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let a = MultiIndex::new(vec![2, 0]);
        let b = MultiIndex::new(vec![0, 3]);
        let c = MultiIndex::new(vec![1, 1]);
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn degree_counts() {
        assert_eq!(MultiIndex::of_degree(3, 2).len(), 6);
        assert_eq!(count_up_to(3, 2), 10);
        let sp = IndexSpace::new(2, 4).unwrap();
        assert_eq!(sp.len(), 15);
        assert_eq!(sp.degree_range(2), 3..6);
        for (i, k) in sp.iter().enumerate() {
            assert_eq!(sp.position(k), Some(i));
        }
    }

    #[test]
    fn memory_guard() {
        assert!(IndexSpace::new(10, 20).is_err());
    }

    #[test]
    fn subtraction() {
        let a = MultiIndex::new(vec![2, 1]);
        let b = MultiIndex::new(vec![1, 1]);
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::new(vec![1, 0])));
        assert_eq!(b.checked_sub(&a), None);
    }
}
