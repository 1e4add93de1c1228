//! Iterated blowups along diagonal building sets.
//!
//! The engine tracks, for every partial partition `π` it meets, the Poincaré
//! polynomial of the dominant transform of `Z_π` after the first `t` centers.
//! When the center `δ_J` is blown up, a transform either lies inside the center
//! (full preimage, a projective bundle), misses it, or meets it cleanly along
//! the transform of the merged partition (strict transform, a blowup).

use crate::arrangements::{
    check_weights, heavy_family, is_admissible_order, merge_blocks, relative_order,
    AmbientDescriptor, AmbientKind, ArrangementError, BuildingSet, OrderSpec,
};
use crate::index_set::IndexSet;
use crate::poly::{signed, PoincarePolynomial};
use crate::strata::Strata;
use crate::weights::{derived_weights, WeightVector};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("order is not admissible: {0}")]
    InadmissibleOrder(String),
    #[error("{set} is not a heavy set of {ambient}")]
    NotHeavy { set: IndexSet, ambient: AmbientDescriptor },
    #[error(transparent)]
    Weight(#[from] crate::weights::WeightError),
    #[error("engine inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterRecord {
    #[serde(rename = "I")]
    pub set: IndexSet,
    /// Codimension of the center's dominant transform when it is blown up.
    pub codim: i64,
    /// Poincaré polynomial of the center's dominant transform at that time.
    pub p_cur: PoincarePolynomial,
    /// Centers already blown up whose index set strictly contains this one.
    #[serde(skip)]
    pub twist: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineResult {
    #[serde(rename = "poincare")]
    pub total: PoincarePolynomial,
    pub euler: u64,
    pub b2: u64,
    pub centers: Vec<CenterRecord>,
}

impl EngineResult {
    pub fn center(&self, set: IndexSet) -> Option<&CenterRecord> {
        self.centers.iter().find(|c| c.set == set)
    }
}

/// `P^{d(n-1)-1}`, `(P^{n-d-2})^d` or `(P^d)^n`.
pub fn ambient_poincare(ambient: AmbientDescriptor) -> PoincarePolynomial {
    locus_poincare(ambient, 0)
}

/// Poincaré polynomial of an intersection `Z_π` with `Σ(|B|-1) = excess`.
fn locus_poincare(ambient: AmbientDescriptor, excess: usize) -> PoincarePolynomial {
    let (d, n) = (ambient.d as i64, ambient.n as i64);
    let e = excess as i64;
    match ambient.kind {
        AmbientKind::TSpace => PoincarePolynomial::q_integer(ambient.dim() + 1 - d * e),
        AmbientKind::PSpace => power(&PoincarePolynomial::q_integer(n - d - 1 - e), ambient.d),
        AmbientKind::FMSpace => power(&PoincarePolynomial::q_integer(d + 1), (n - e) as usize),
    }
}

fn power(p: &PoincarePolynomial, k: usize) -> PoincarePolynomial {
    (0..k).fold(PoincarePolynomial::one(), |acc, _| &acc * p)
}

struct Ledger<'a> {
    ambient: AmbientDescriptor,
    centers: &'a [IndexSet],
    position: HashMap<IndexSet, usize>,
    memo: HashMap<(Vec<IndexSet>, usize), PoincarePolynomial>,
}

impl<'a> Ledger<'a> {
    fn new(ambient: AmbientDescriptor, centers: &'a [IndexSet]) -> Self {
        let position = centers.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ledger { ambient, centers, position, memo: HashMap::new() }
    }

    fn is_empty_locus(&self, blocks: &[IndexSet]) -> bool {
        self.ambient.kind != AmbientKind::FMSpace && blocks.contains(&self.ambient.universe())
    }

    /// Dominant transform of `Z_blocks` after the first `t` centers.
    fn transform(&mut self, blocks: &[IndexSet], t: usize) -> PoincarePolynomial {
        let key = (blocks.to_vec(), t);
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let out = if t == 0 {
            let excess = blocks.iter().map(|b| b.len() - 1).sum();
            locus_poincare(self.ambient, excess)
        } else {
            self.step(blocks, t)
        };
        self.memo.insert(key, out.clone());
        out
    }

    fn step(&mut self, blocks: &[IndexSet], t: usize) -> PoincarePolynomial {
        let j = self.centers[t - 1];
        let prev = self.transform(blocks, t - 1);
        if blocks.iter().any(|b| j.is_subset(*b)) {
            let c = self.center_codim(t - 1);
            return &prev * &PoincarePolynomial::q_integer(c);
        }
        let merged = merge_blocks(blocks.iter().copied().chain([j]));
        if self.is_empty_locus(&merged) {
            return prev;
        }
        let host = *merged.iter().find(|b| j.is_subset(**b)).expect("J lies in a merged block");
        if host != j && self.position.get(&host).is_some_and(|&p| p < t - 1) {
            return prev;
        }
        let meet = self.transform(&merged, t - 1);
        let codim = prev.degree() - meet.degree();
        &prev + &(&meet * &PoincarePolynomial::exceptional(codim))
    }

    /// Codimension of the `t`-th center's transform just before it is blown up.
    fn center_codim(&mut self, t: usize) -> i64 {
        let c = self.transform(&[self.centers[t]], t);
        self.ambient.dim() - c.degree()
    }
}

/// Runs the blowup sequence `centers` on `ambient` with no validation beyond
/// internal consistency.
///
/// After `t` steps the model is the wonderful model of the first `t` centers,
/// counted stratum by stratum. The codimension of the next center comes from
/// the fibre over a general point of its diagonal; its transform is read off
/// the exceptional divisor it creates.
pub(crate) fn run_sequence(
    ambient: AmbientDescriptor,
    centers: &[IndexSet],
) -> Result<EngineResult, EngineError> {
    let inconsistent = |msg: String| EngineError::Inconsistent(format!("{ambient}: {msg}"));
    let mut before = Strata::new(ambient, &[]);
    let mut prev_total = before.total();
    if signed::to_poincare(&prev_total).as_ref() != Some(&ambient_poincare(ambient)) {
        return Err(inconsistent("empty stratification does not reproduce the ambient".into()));
    }
    let mut records = Vec::with_capacity(centers.len());
    for (t, &j) in centers.iter().enumerate() {
        let fibre = before.fibre(j);
        let dim = ambient.dim() - ambient.d as i64 * (j.len() as i64 - 1) + fibre.len() as i64 - 1;
        let codim = ambient.dim() - dim;
        let mut after = Strata::new(ambient, &centers[..=t]);
        let total = after.total();
        let divisor = after.divisor(j);
        let p_cur = signed::div_exact(&divisor, &vec![1; codim.max(1) as usize])
            .and_then(|p| signed::to_poincare(&p))
            .ok_or_else(|| inconsistent(format!("divisor of {j} is not a P^{}-bundle", codim - 1)))?;
        let step = &p_cur * &PoincarePolynomial::exceptional(codim);
        let mut expected = prev_total.clone();
        signed::add_into(&mut expected, &signed::from_poincare(&step));
        if signed::trim(expected) != total {
            return Err(inconsistent(format!("blowing up {j} does not add {step}")));
        }
        let twist = centers[..t].iter().filter(|k| j.is_proper_subset(**k)).count();
        records.push(CenterRecord { set: j, codim, p_cur, twist });
        prev_total = total;
        before = after;
    }
    let total = signed::to_poincare(&prev_total)
        .ok_or_else(|| inconsistent("negative Betti number".into()))?;
    if total.degree() != ambient.dim() || !total.is_palindromic() {
        return Err(inconsistent(format!("{total} is not palindromic of degree {}", ambient.dim())));
    }
    Ok(EngineResult { euler: total.eval_one(), b2: total.coeff(1), total, centers: records })
}

/// The same computation by transform bookkeeping: every tracked partial
/// partition carries the Poincaré polynomial of its dominant transform. Only
/// orders compatible with inclusion are accepted, since for other orders the
/// transform of a smaller diagonal need not stay inside a larger one.
pub fn run_ledger(ambient: AmbientDescriptor, centers: &[IndexSet]) -> Result<EngineResult, EngineError> {
    if !crate::arrangements::is_inclusion_compatible(centers) {
        return Err(EngineError::InadmissibleOrder(
            "transform bookkeeping needs an order compatible with inclusion".into(),
        ));
    }
    for &c in centers {
        if let Some(reason) = ambient.index_violation(c) {
            return Err(ArrangementError::BadIndexSet { set: c, ambient, reason }.into());
        }
    }
    if !is_admissible_order(ambient, centers) {
        return Err(EngineError::InadmissibleOrder(
            "a prefix is not closed under unions of overlapping centers".into(),
        ));
    }
    let mut ledger = Ledger::new(ambient, centers);
    let mut total = ambient_poincare(ambient);
    let mut records = Vec::with_capacity(centers.len());
    for (t, &j) in centers.iter().enumerate() {
        let p_cur = ledger.transform(&[j], t);
        let codim = ambient.dim() - p_cur.degree();
        total += &(&p_cur * &PoincarePolynomial::exceptional(codim));
        records.push(CenterRecord { set: j, codim, p_cur, twist: 0 });
    }
    for (t, r) in records.iter_mut().enumerate() {
        r.twist = centers[..t].iter().filter(|k| r.set.is_proper_subset(**k)).count();
    }
    Ok(EngineResult { euler: total.eval_one(), b2: total.coeff(1), total, centers: records })
}

/// Resolves an order into a concrete sequence of centers.
pub fn blowup_sequence(b: &BuildingSet, order: &OrderSpec) -> Result<Vec<IndexSet>, EngineError> {
    let seq = match order {
        OrderSpec::AscendingDimension => {
            let mut v = b.elements.clone();
            crate::arrangements::sort_ascending_dimension(&mut v);
            v
        }
        OrderSpec::Relative(i) => relative_order(b, *i)?.flatten(),
        OrderSpec::Explicit(v) => {
            let mut given = v.clone();
            let mut expected = b.elements.clone();
            given.sort();
            expected.sort();
            if given != expected {
                return Err(EngineError::InadmissibleOrder(
                    "explicit order is not a permutation of the building set".into(),
                ));
            }
            v.clone()
        }
    };
    if !is_admissible_order(b.ambient, &seq) {
        return Err(EngineError::InadmissibleOrder(
            "a prefix is not closed under unions of overlapping centers".into(),
        ));
    }
    Ok(seq)
}

/// Poincaré polynomial of the iterated blowup of the ambient along the heavy
/// sets of `weights`, in the given order.
pub fn run(
    ambient: AmbientDescriptor,
    weights: &WeightVector,
    order: &OrderSpec,
) -> Result<EngineResult, EngineError> {
    let b = crate::arrangements::heavy_sets(weights, ambient)?;
    let seq = blowup_sequence(&b, order)?;
    run_sequence(ambient, &seq)
}

fn unchecked_total(ambient: AmbientDescriptor, weights: &WeightVector) -> Result<PoincarePolynomial, EngineError> {
    let seq = heavy_family(weights, ambient);
    Ok(run_sequence(ambient, &seq)?.total)
}

fn require_heavy(
    ambient: AmbientDescriptor,
    weights: &WeightVector,
    i: IndexSet,
) -> Result<(), EngineError> {
    check_weights(weights, ambient)?;
    if ambient.index_violation(i).is_some() || !weights.is_heavy(i) {
        return Err(EngineError::NotHeavy { set: i, ambient });
    }
    Ok(())
}

/// The two factors of the boundary divisor indexed by `i`.
pub fn divisor_factors(
    ambient: AmbientDescriptor,
    weights: &WeightVector,
    i: IndexSet,
) -> Result<(PoincarePolynomial, PoincarePolynomial), EngineError> {
    require_heavy(ambient, weights, i)?;
    let d = ambient.d;
    let (inner, outer) = derived_weights(weights, i)?;
    let left = unchecked_total(AmbientDescriptor::t(d, i.len())?, &WeightVector::new(d, inner)?)?;
    let right = match ambient.kind {
        AmbientKind::TSpace => {
            let t = AmbientDescriptor::t(d, outer.len())?;
            unchecked_total(t, &WeightVector::new(d, outer)?)?
        }
        AmbientKind::PSpace => {
            let merged = merged_frame_weights(weights, i, d);
            unchecked_total(AmbientDescriptor::p(d, merged.n())?, &merged)?
        }
        AmbientKind::FMSpace => {
            let fm = AmbientDescriptor::fm(d, outer.len())?;
            unchecked_total(fm, &WeightVector::new(d, outer)?)?
        }
    };
    Ok((left, right))
}

/// Weights of the P-space factor of a divisor: the labels of `i` collapse to a
/// single point of weight one, placed where the smallest of them sat.
fn merged_frame_weights(weights: &WeightVector, i: IndexSet, d: usize) -> WeightVector {
    let one = crate::rational::int(1);
    let mut entries = Vec::with_capacity(weights.n() - i.len() + 1);
    let mut placed = false;
    for l in 1..=weights.n() {
        if i.contains(l) {
            if !placed {
                entries.push(one.clone());
                placed = true;
            }
        } else {
            entries.push(weights.get(l).clone());
        }
    }
    WeightVector::new(d, entries).expect("entries stay in (0,1]")
}

/// Poincaré polynomial of the boundary divisor indexed by `i`.
pub fn divisor_poincare(
    ambient: AmbientDescriptor,
    weights: &WeightVector,
    i: IndexSet,
) -> Result<PoincarePolynomial, EngineError> {
    let (l, r) = divisor_factors(ambient, weights, i)?;
    Ok(&l * &r)
}

/// Number of centers strictly containing `i` index-wise; the twist of the
/// normal bundle of the divisor is this number minus one.
pub fn twist_report(
    ambient: AmbientDescriptor,
    weights: &WeightVector,
    i: IndexSet,
) -> Result<usize, EngineError> {
    require_heavy(ambient, weights, i)?;
    let b = crate::arrangements::heavy_sets(weights, ambient)?;
    Ok(relative_order(&b, i)?.h1.len())
}
