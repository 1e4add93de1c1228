//! Subsets of a 1-based label universe, stored as a bitmask.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// Largest supported label.
pub const MAX_LABEL: usize = 63;

/// A set of labels `1..=63`. Ordering is lexicographic on the sorted tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_mask(mask: u64) -> Self {
        debug_assert!(mask & 1 == 0, "label 0 is not a valid index");
        IndexSet(mask)
    }

    /// Labels must lie in `1..=MAX_LABEL`; returns `None` otherwise.
    pub fn try_from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Option<Self> {
        let mut mask = 0u64;
        for l in labels {
            if l == 0 || l > MAX_LABEL {
                return None;
            }
            mask |= 1 << l;
        }
        Some(IndexSet(mask))
    }

    /// Panics on labels outside `1..=MAX_LABEL`.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        Self::try_from_labels(labels).expect("label out of range")
    }

    /// `{lo, lo+1, ..., hi}`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        Self::from_labels(lo..=hi)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, label: usize) -> bool {
        label <= MAX_LABEL && self.0 & (1 << label) != 0
    }

    pub fn insert(&mut self, label: usize) {
        assert!((1..=MAX_LABEL).contains(&label));
        self.0 |= 1 << label;
    }

    pub fn remove(&mut self, label: usize) {
        if label <= MAX_LABEL {
            self.0 &= !(1 << label);
        }
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Nonempty intersection with neither set containing the other.
    pub fn overlaps(self, other: Self) -> bool {
        !self.is_disjoint(other) && !self.is_subset(other) && !other.is_subset(self)
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn max(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let l = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(l)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let full = self.0;
        let mut sub = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = IndexSet(sub);
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }

    /// Position of each label inside `within`, renumbered from 1.
    pub fn relabel_within(self, within: IndexSet) -> IndexSet {
        let positions: Vec<usize> = within.iter().collect();
        IndexSet::from_labels(
            self.iter()
                .filter_map(|l| positions.iter().position(|&p| p == l).map(|i| i + 1)),
        )
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_vec().cmp(&other.to_vec())
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        IndexSet::try_from_labels(v).ok_or_else(|| serde::de::Error::custom("label out of range 1..=63"))
    }
}

/// Parses `[1,2,3]`, `1,2,3` or `{1,2,3}`.
impl std::str::FromStr for IndexSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
        if t.trim().is_empty() {
            return Ok(IndexSet::EMPTY);
        }
        let labels = t
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad label `{p}` in `{s}`")))
            .collect::<Result<Vec<_>, _>>()?;
        IndexSet::try_from_labels(labels).ok_or_else(|| format!("label out of range in `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let a = IndexSet::from_labels([1, 2]);
        let b = IndexSet::from_labels([1, 2, 3]);
        let c = IndexSet::from_labels([2]);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn subsets_enumerates_all() {
        let s = IndexSet::from_labels([2, 4, 5]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert_eq!(IndexSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn relabel() {
        let within = IndexSet::from_labels([2, 4, 7]);
        assert_eq!(
            IndexSet::from_labels([4, 7]).relabel_within(within),
            IndexSet::from_labels([2, 3])
        );
    }

    #[test]
    fn overlap_relation() {
        let a = IndexSet::from_labels([1, 2]);
        assert!(a.overlaps(IndexSet::from_labels([2, 3])));
        assert!(!a.overlaps(IndexSet::from_labels([1, 2, 3])));
        assert!(!a.overlaps(IndexSet::from_labels([3, 4])));
    }

    #[test]
    fn parse_forms() {
        assert_eq!("[1,2]".parse::<IndexSet>().unwrap(), IndexSet::from_labels([1, 2]));
        assert_eq!("3, 4".parse::<IndexSet>().unwrap(), IndexSet::from_labels([3, 4]));
        assert!("0,1".parse::<IndexSet>().is_err());
    }
}
