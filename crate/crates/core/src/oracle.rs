//! Point-count stratification of `T_{d,n}` with all weights equal to one.
//!
//! Each nested collection of proper subsets indexes a stratum, a product over
//! tree components of configuration spaces of distinct points in `A^d` modulo
//! translation and homothety. Summing the point counts gives the virtual
//! Poincaré polynomial without any blowup bookkeeping.

use crate::index_set::IndexSet;
use std::collections::HashMap;

pub use crate::poly::signed::IntPoly;
use crate::poly::signed::{add_into, mul, trim};

/// `m_d(k) = (q^d - 1)/(q - 1) · (q^d - 2)(q^d - 3)···(q^d - (k-1))`.
pub fn component_count(d: usize, k: usize) -> IntPoly {
    assert!(k >= 2, "a component needs at least two special points");
    let mut p: IntPoly = vec![1; d];
    for i in 2..k {
        let mut f = vec![0i128; d + 1];
        f[0] = -(i as i128);
        f[d] = 1;
        p = mul(&p, &f);
    }
    p
}

/// Set partitions of `s` into blocks, each partition listed once.
pub(crate) fn set_partitions(s: IndexSet) -> Vec<Vec<IndexSet>> {
    let Some(first) = s.min() else {
        return vec![Vec::new()];
    };
    let rest = s.difference(IndexSet::from_labels([first]));
    let mut out = Vec::new();
    for extra in rest.subsets() {
        let mut block = extra;
        block.insert(first);
        for mut tail in set_partitions(rest.difference(extra)) {
            tail.push(block);
            out.push(tail);
        }
    }
    out
}

struct Counter {
    d: usize,
    partitions: HashMap<u64, Vec<Vec<IndexSet>>>,
    plain: HashMap<u64, IntPoly>,
    marked: HashMap<(u64, u64), IntPoly>,
}

impl Counter {
    fn new(d: usize) -> Self {
        Counter { d, partitions: HashMap::new(), plain: HashMap::new(), marked: HashMap::new() }
    }

    fn partitions_of(&mut self, s: IndexSet) -> Vec<Vec<IndexSet>> {
        self.partitions
            .entry(s.mask())
            .or_insert_with(|| set_partitions(s).into_iter().filter(|p| p.len() >= 2).collect())
            .clone()
    }

    /// Sum over nested collections below a component labelled by `s`.
    fn plain(&mut self, s: IndexSet) -> IntPoly {
        if let Some(p) = self.plain.get(&s.mask()) {
            return p.clone();
        }
        let mut total = Vec::new();
        for blocks in self.partitions_of(s) {
            let mut term = component_count(self.d, blocks.len());
            for &b in &blocks {
                if b.len() >= 2 {
                    term = mul(&term, &self.plain(b));
                }
            }
            add_into(&mut total, &term);
        }
        let total = trim(total);
        self.plain.insert(s.mask(), total.clone());
        total
    }

    /// As `plain`, restricted to collections that contain `i` (with `i ⊊ s`).
    fn marked(&mut self, s: IndexSet, i: IndexSet) -> IntPoly {
        if let Some(p) = self.marked.get(&(s.mask(), i.mask())) {
            return p.clone();
        }
        let mut total = Vec::new();
        for blocks in self.partitions_of(s) {
            let Some(&host) = blocks.iter().find(|b| i.is_subset(**b)) else {
                continue;
            };
            let inner = if host == i { self.plain(i) } else { self.marked(host, i) };
            let mut term = mul(&component_count(self.d, blocks.len()), &inner);
            for &b in &blocks {
                if b != host && b.len() >= 2 {
                    term = mul(&term, &self.plain(b));
                }
            }
            add_into(&mut total, &term);
        }
        let total = trim(total);
        self.marked.insert((s.mask(), i.mask()), total.clone());
        total
    }
}

/// Stratification count of `T_{d,n}` (all weights one) as a polynomial in `q`.
pub fn stratification_polynomial(d: usize, n: usize) -> IntPoly {
    assert!(d >= 1 && (2..=crate::index_set::MAX_LABEL).contains(&n));
    Counter::new(d).plain(IndexSet::range(1, n))
}

/// Stratification count of the boundary divisor indexed by `i`: strata whose
/// collection contains `i`.
pub fn divisor_stratification_polynomial(d: usize, n: usize, i: IndexSet) -> IntPoly {
    let u = IndexSet::range(1, n);
    assert!(i.len() >= 2 && i.is_proper_subset(u));
    Counter::new(d).marked(u, i)
}

/// Euler number of `T_{d,n}` with all weights one.
pub fn euler_oracle(d: usize, n: usize) -> i128 {
    stratification_polynomial(d, n).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_counts() {
        assert_eq!(component_count(2, 2), vec![1, 1]);
        assert_eq!(component_count(2, 3), vec![-2, -2, 1, 1]);
        assert_eq!(component_count(1, 3), vec![-2, 1]);
    }

    #[test]
    fn partitions_are_bell_numbers() {
        assert_eq!(set_partitions(IndexSet::range(1, 4)).len(), 15);
        assert_eq!(set_partitions(IndexSet::range(1, 5)).len(), 52);
    }

    #[test]
    fn small_cases() {
        assert_eq!(stratification_polynomial(2, 3), vec![1, 4, 4, 1]);
        assert_eq!(stratification_polynomial(1, 4), vec![1, 5, 1]);
        assert_eq!(stratification_polynomial(2, 4), vec![1, 11, 30, 30, 11, 1]);
        assert_eq!(euler_oracle(2, 4), 84);
        assert_eq!(stratification_polynomial(1, 2), vec![1]);
    }

    #[test]
    fn divisor_cases() {
        let i = IndexSet::from_labels([1, 2]);
        assert_eq!(divisor_stratification_polynomial(2, 3, i), vec![1, 2, 1]);
        let i = IndexSet::from_labels([1, 2, 3]);
        assert_eq!(divisor_stratification_polynomial(2, 4, i), vec![1, 5, 8, 5, 1]);
    }
}
