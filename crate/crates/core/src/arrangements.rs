//! Diagonal arrangements: heavy index sets, building sets, partial partitions
//! of the label universe, and blowup orders.

use crate::index_set::IndexSet;
use crate::weights::{validate_domain, DomainKind, WeightError, WeightVector};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("invalid ambient: {0}")]
    BadAmbient(String),
    #[error("index set {set} is not admissible in {ambient}: {reason}")]
    BadIndexSet { set: IndexSet, ambient: AmbientDescriptor, reason: String },
    #[error("weights have {got} entries but the ambient has n = {n}")]
    LengthMismatch { n: usize, got: usize },
    #[error("weights are not in the {kind} domain: {violations:?}")]
    DomainMismatch { kind: DomainKind, violations: Vec<String> },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("m = {m} is out of range for n = {n} (need n >= 6 and 2 <= m <= n-3)")]
    ShaRange { n: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AmbientKind {
    /// `P^{d(n-1)-1}`: n points in `A^d` up to translation and homothety.
    TSpace,
    /// `(P^{n-d-2})^d`: the GIT quotient of n points in `P^d`.
    PSpace,
    /// `X^n` for a d-dimensional X.
    FMSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmbientDescriptor {
    pub kind: AmbientKind,
    pub d: usize,
    pub n: usize,
}

impl fmt::Display for AmbientDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            AmbientKind::TSpace => "T",
            AmbientKind::PSpace => "P",
            AmbientKind::FMSpace => "FM",
        };
        write!(f, "{k}(d={}, n={})", self.d, self.n)
    }
}

impl AmbientDescriptor {
    pub fn new(kind: AmbientKind, d: usize, n: usize) -> Result<Self, ArrangementError> {
        if d == 0 {
            return Err(ArrangementError::BadAmbient("d must be at least 1".into()));
        }
        if n < 2 {
            return Err(ArrangementError::BadAmbient("n must be at least 2".into()));
        }
        if n > crate::index_set::MAX_LABEL {
            return Err(ArrangementError::BadAmbient(format!("n = {n} is too large")));
        }
        if kind == AmbientKind::PSpace && n < d + 2 {
            return Err(ArrangementError::BadAmbient(format!(
                "PSpace needs n >= d+2 (d={d}, n={n})"
            )));
        }
        Ok(AmbientDescriptor { kind, d, n })
    }

    pub fn t(d: usize, n: usize) -> Result<Self, ArrangementError> {
        Self::new(AmbientKind::TSpace, d, n)
    }

    pub fn p(d: usize, n: usize) -> Result<Self, ArrangementError> {
        Self::new(AmbientKind::PSpace, d, n)
    }

    pub fn fm(d: usize, n: usize) -> Result<Self, ArrangementError> {
        Self::new(AmbientKind::FMSpace, d, n)
    }

    /// The labels that may coincide.
    pub fn universe(&self) -> IndexSet {
        match self.kind {
            AmbientKind::TSpace | AmbientKind::FMSpace => IndexSet::range(1, self.n),
            AmbientKind::PSpace => IndexSet::range(self.d + 1, self.n),
        }
    }

    pub fn dim(&self) -> i64 {
        let (d, n) = (self.d as i64, self.n as i64);
        match self.kind {
            AmbientKind::TSpace => d * (n - 1) - 1,
            AmbientKind::PSpace => d * (n - d - 2),
            AmbientKind::FMSpace => d * n,
        }
    }

    pub fn domain_kind(&self) -> DomainKind {
        match self.kind {
            AmbientKind::TSpace => DomainKind::T,
            AmbientKind::PSpace => DomainKind::P,
            AmbientKind::FMSpace => DomainKind::FM,
        }
    }

    /// Whether a full-universe block describes the empty locus.
    fn universe_is_empty(&self) -> bool {
        self.kind != AmbientKind::FMSpace
    }

    /// Why `set` cannot index a diagonal locus here, if it cannot.
    pub fn index_violation(&self, set: IndexSet) -> Option<String> {
        let u = self.universe();
        if !set.is_subset(u) {
            return Some(format!("not contained in the universe {u}"));
        }
        if set.len() < 2 {
            return Some("needs at least two labels".into());
        }
        if self.universe_is_empty() && set == u {
            return Some("the whole universe indexes the empty locus".into());
        }
        None
    }
}

/// A diagonal locus `δ_I` (TSpace), `H_I` (PSpace) or `Δ_I` (FMSpace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeavySet {
    pub indices: IndexSet,
    pub ambient: AmbientDescriptor,
}

impl HeavySet {
    pub fn new(indices: IndexSet, ambient: AmbientDescriptor) -> Result<Self, ArrangementError> {
        if let Some(reason) = ambient.index_violation(indices) {
            return Err(ArrangementError::BadIndexSet { set: indices, ambient, reason });
        }
        Ok(HeavySet { indices, ambient })
    }

    pub fn codim(&self) -> i64 {
        self.ambient.d as i64 * (self.indices.len() as i64 - 1)
    }

    /// `(dimension, codimension)`.
    pub fn dims(&self) -> (i64, i64) {
        (self.ambient.dim() - self.codim(), self.codim())
    }
}

/// Pairwise-disjoint blocks, each of size at least two: the locus `Z_π` where
/// the labels of every block coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialPartition {
    pub blocks: Vec<IndexSet>,
    pub ambient: AmbientDescriptor,
}

impl PartialPartition {
    /// The explicit empty locus: one block equal to the universe.
    pub fn empty_locus(ambient: AmbientDescriptor) -> Self {
        PartialPartition { blocks: vec![ambient.universe()], ambient }
    }

    pub fn is_empty_locus(&self) -> bool {
        self.ambient.universe_is_empty()
            && self.blocks.len() == 1
            && self.blocks[0] == self.ambient.universe()
    }

    pub fn codim(&self) -> i64 {
        let d = self.ambient.d as i64;
        self.blocks.iter().map(|b| d * (b.len() as i64 - 1)).sum()
    }

    /// `(dimension, codimension)`; the empty locus has dimension -1.
    pub fn dims(&self) -> (i64, i64) {
        if self.is_empty_locus() {
            return (-1, self.ambient.dim() + 1);
        }
        (self.ambient.dim() - self.codim(), self.codim())
    }
}

/// Merges overlapping index sets into disjoint blocks (the factors of the
/// intersection). Returns the empty locus when a block covers the universe.
pub fn factors(
    ambient: AmbientDescriptor,
    sets: &[IndexSet],
) -> Result<PartialPartition, ArrangementError> {
    for &s in sets {
        if !s.is_subset(ambient.universe()) || s.len() < 2 {
            return Err(ArrangementError::BadIndexSet {
                set: s,
                ambient,
                reason: "not a diagonal index set of this ambient".into(),
            });
        }
    }
    let blocks = merge_blocks(sets.iter().copied());
    let out = PartialPartition { blocks, ambient };
    if ambient.universe_is_empty() && out.blocks.contains(&ambient.universe()) {
        return Ok(PartialPartition::empty_locus(ambient));
    }
    Ok(out)
}

/// Closure of a family under union of intersecting members; output sorted.
pub(crate) fn merge_blocks<I: IntoIterator<Item = IndexSet>>(sets: I) -> Vec<IndexSet> {
    let mut blocks: Vec<IndexSet> = Vec::new();
    for s in sets {
        let mut cur = s;
        loop {
            let before = cur;
            blocks.retain(|&b| {
                if b.is_disjoint(cur) {
                    true
                } else {
                    cur = cur.union(b);
                    false
                }
            });
            if cur == before {
                break;
            }
        }
        blocks.push(cur);
    }
    blocks.sort();
    blocks
}

/// Pairwise nested-or-disjoint.
pub fn is_nested(collection: &[IndexSet]) -> bool {
    collection.iter().enumerate().all(|(i, &a)| {
        collection[i + 1..]
            .iter()
            .all(|&b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a))
    })
}

/// How a building set is ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderSpec {
    /// Larger index sets (smaller loci) first, lexicographic tie-break.
    AscendingDimension,
    /// The classes `H1..H4` relative to a fixed index set.
    Relative(IndexSet),
    /// A caller-supplied sequence.
    Explicit(Vec<IndexSet>),
}

impl Serialize for OrderSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            OrderSpec::AscendingDimension => s.serialize_str("asc-dim"),
            OrderSpec::Relative(i) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("relative", i)?;
                m.end()
            }
            OrderSpec::Explicit(seq) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("explicit", seq)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for OrderSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Relative { relative: IndexSet },
            Explicit { explicit: Vec<IndexSet> },
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "asc-dim" => Ok(OrderSpec::AscendingDimension),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown order `{t}`"))),
            Raw::Relative { relative } => Ok(OrderSpec::Relative(relative)),
            Raw::Explicit { explicit } => Ok(OrderSpec::Explicit(explicit)),
        }
    }
}

/// Heavy index sets in a chosen blowup order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildingSet {
    pub ambient: AmbientDescriptor,
    #[serde(skip)]
    pub weights: WeightVector,
    pub elements: Vec<IndexSet>,
    pub order: OrderSpec,
}

impl BuildingSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, set: IndexSet) -> bool {
        self.elements.contains(&set)
    }

    pub fn heavy_sets(&self) -> Vec<HeavySet> {
        self.elements.iter().map(|&indices| HeavySet { indices, ambient: self.ambient }).collect()
    }

    /// Reorders relative to `set` (the classes `H1..H4`).
    pub fn reordered_relative(&self, set: IndexSet) -> Result<BuildingSet, ArrangementError> {
        let rel = relative_order(self, set)?;
        Ok(BuildingSet {
            elements: rel.flatten(),
            order: OrderSpec::Relative(set),
            ..self.clone()
        })
    }
}

/// Larger sets first, then lexicographic.
pub fn sort_ascending_dimension(sets: &mut [IndexSet]) {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
}

/// Every heavy index set admissible in `ambient`, without checking the weight domain.
pub fn heavy_family(weights: &WeightVector, ambient: AmbientDescriptor) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = ambient
        .universe()
        .subsets()
        .filter(|&s| ambient.index_violation(s).is_none() && weights.is_heavy(s))
        .collect();
    sort_ascending_dimension(&mut out);
    out
}

/// The building set `H_A` (TSpace), `G_A` (PSpace) or `K_A` (FMSpace), in
/// ascending-dimension order.
pub fn heavy_sets(
    weights: &WeightVector,
    ambient: AmbientDescriptor,
) -> Result<BuildingSet, ArrangementError> {
    check_weights(weights, ambient)?;
    Ok(BuildingSet {
        ambient,
        weights: weights.clone(),
        elements: heavy_family(weights, ambient),
        order: OrderSpec::AscendingDimension,
    })
}

pub(crate) fn check_weights(
    weights: &WeightVector,
    ambient: AmbientDescriptor,
) -> Result<(), ArrangementError> {
    if weights.n() != ambient.n {
        return Err(ArrangementError::LengthMismatch { n: ambient.n, got: weights.n() });
    }
    let report = validate_domain(weights, ambient.domain_kind())?;
    if !report.accepted {
        return Err(ArrangementError::DomainMismatch {
            kind: report.kind,
            violations: report.violations,
        });
    }
    Ok(())
}

/// The four classes of a building set relative to an index set `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeOrder {
    pub pivot: IndexSet,
    /// Strict supersets of `I`.
    pub h1: Vec<IndexSet>,
    /// Disjoint from `I`.
    pub h2: Vec<IndexSet>,
    /// Partial overlap with `I`.
    pub h3: Vec<IndexSet>,
    /// Subsets of `I`, including `I`.
    pub h4: Vec<IndexSet>,
}

impl RelativeOrder {
    pub fn flatten(&self) -> Vec<IndexSet> {
        self.h1.iter().chain(&self.h2).chain(&self.h3).chain(&self.h4).copied().collect()
    }

    pub fn class_of(&self, set: IndexSet) -> Option<usize> {
        [&self.h1, &self.h2, &self.h3, &self.h4]
            .iter()
            .position(|c| c.contains(&set))
            .map(|i| i + 1)
    }
}

/// Class (1..=4) of `other` relative to `pivot`.
pub fn relative_class(pivot: IndexSet, other: IndexSet) -> usize {
    if pivot.is_proper_subset(other) {
        1
    } else if pivot.is_disjoint(other) {
        2
    } else if other.is_subset(pivot) {
        4
    } else {
        3
    }
}

pub fn relative_order(b: &BuildingSet, pivot: IndexSet) -> Result<RelativeOrder, ArrangementError> {
    if let Some(reason) = b.ambient.index_violation(pivot) {
        return Err(ArrangementError::BadIndexSet { set: pivot, ambient: b.ambient, reason });
    }
    let mut classes: [Vec<IndexSet>; 4] = Default::default();
    for &j in &b.elements {
        classes[relative_class(pivot, j) - 1].push(j);
    }
    for c in classes.iter_mut() {
        sort_ascending_dimension(c);
    }
    let [h1, h2, h3, h4] = classes;
    Ok(RelativeOrder { pivot, h1, h2, h3, h4 })
}

/// Every prefix of `seq` is closed under unions of overlapping members (unions
/// equal to the universe describe the empty locus and are exempt). This is the
/// combinatorial form of "each initial segment is a building set"; orders
/// compatible with inclusion satisfy it automatically.
pub fn is_admissible_order(ambient: AmbientDescriptor, seq: &[IndexSet]) -> bool {
    let universe = ambient.universe();
    for (t, &j) in seq.iter().enumerate() {
        for &k in &seq[..t] {
            if k.overlaps(j) {
                let u = k.union(j);
                if ambient.universe_is_empty() && u == universe {
                    continue;
                }
                if !seq[..t].contains(&u) {
                    return false;
                }
            }
        }
    }
    true
}

/// Compatible with inclusion: a superset index set (smaller locus) never comes
/// after one of its subsets.
pub fn is_inclusion_compatible(seq: &[IndexSet]) -> bool {
    seq.iter().enumerate().all(|(t, &j)| seq[..t].iter().all(|&k| !k.is_proper_subset(j)))
}

/// Dimension comparison used in the boundary analysis of `P̄_{6}`-type moduli:
/// returns `(2(n-m-3), 2(n-4)-m, 2(n-4)-m >= 2(n-m-3))`.
pub fn sha_dimensions(n: usize, m: usize) -> Result<(i64, i64, bool), ArrangementError> {
    if n < 6 || m < 2 || m + 3 > n {
        return Err(ArrangementError::ShaRange { n, m });
    }
    let (n, m) = (n as i64, m as i64);
    let strict_transform = 2 * (n - m - 3);
    let pair_locus = 2 * (n - 4) - m;
    Ok((strict_transform, pair_locus, pair_locus >= strict_transform))
}
