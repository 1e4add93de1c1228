//! Point counts of the wonderful model of a diagonal building set.
//!
//! A point of the model is a tree: the nested collection of members whose
//! diagonals it lies over, a screen (configuration modulo translation and
//! homothety) for every member, and a placement of the top-level children in
//! the ambient. Children of one component may share a position unless the
//! labels they carry together form a member.

use crate::arrangements::{AmbientDescriptor, AmbientKind};
use crate::index_set::IndexSet;
use crate::oracle::{component_count, set_partitions};
use crate::poly::signed::{add_into, mul, scale, trim, IntPoly};
use std::collections::{HashMap, HashSet};

pub(crate) struct Strata {
    ambient: AmbientDescriptor,
    members: HashSet<IndexSet>,
    member_list: Vec<IndexSet>,
    partitions: HashMap<u64, std::rc::Rc<Vec<Vec<IndexSet>>>>,
    nodes: HashMap<u64, IntPoly>,
    marked: HashMap<(u64, u64), IntPoly>,
    local: HashMap<(usize, Vec<u64>, bool), IntPoly>,
    placements: HashMap<(usize, bool), IntPoly>,
}

impl Strata {
    pub(crate) fn new(ambient: AmbientDescriptor, family: &[IndexSet]) -> Self {
        Strata {
            ambient,
            members: family.iter().copied().collect(),
            member_list: family.to_vec(),
            partitions: HashMap::new(),
            nodes: HashMap::new(),
            marked: HashMap::new(),
            local: HashMap::new(),
            placements: HashMap::new(),
        }
    }

    fn partitions_of(&mut self, s: IndexSet) -> std::rc::Rc<Vec<Vec<IndexSet>>> {
        self.partitions.entry(s.mask()).or_insert_with(|| set_partitions(s).into()).clone()
    }

    fn admissible_children(&self, blocks: &[IndexSet]) -> bool {
        blocks.iter().all(|b| b.len() == 1 || self.members.contains(b))
    }

    /// Groups of children (as bitmasks over child positions) spanning a member.
    fn spanning_groups(&self, children: &[IndexSet]) -> Vec<u64> {
        let span = children.iter().fold(IndexSet::EMPTY, |a, &c| a.union(c));
        let mut out = Vec::new();
        for &m in &self.member_list {
            if !m.is_subset(span) {
                continue;
            }
            let mut group = 0u64;
            let mut ok = true;
            for (i, &c) in children.iter().enumerate() {
                if c.is_subset(m) {
                    group |= 1 << i;
                } else if !c.is_disjoint(m) {
                    ok = false;
                    break;
                }
            }
            if ok && group.count_ones() >= 2 {
                out.push(group);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Point count of `j` distinct positions for the children of a component.
    fn placements(&mut self, j: usize, root: bool) -> IntPoly {
        if let Some(p) = self.placements.get(&(j, root)) {
            return p.clone();
        }
        let d = self.ambient.d;
        let p = if !root || self.ambient.kind == AmbientKind::TSpace {
            if j >= 2 {
                component_count(d, j)
            } else {
                Vec::new()
            }
        } else if self.ambient.kind == AmbientKind::PSpace {
            // one position is pinned at the origin; the torus rescales each axis
            let mut total = Vec::new();
            for (i, s) in stirling_first(j).into_iter().enumerate() {
                if i >= 2 && s != 0 {
                    let axis: IntPoly = vec![1; i - 1];
                    let term = (0..d).fold(vec![1], |acc, _| mul(&acc, &axis));
                    add_into(&mut total, &scale(&term, s));
                }
            }
            trim(total)
        } else {
            let x: IntPoly = vec![1; d + 1];
            (0..j).fold(vec![1], |acc, i| {
                let mut f = x.clone();
                f[0] -= i as i128;
                mul(&acc, &trim(f))
            })
        };
        self.placements.insert((j, root), p.clone());
        p
    }

    /// Count of placements of `children` in one component, summed over which
    /// of them coincide.
    fn local_count(&mut self, children: &[IndexSet], root: bool) -> IntPoly {
        let k = children.len();
        let groups = self.spanning_groups(children);
        let key = (k, groups.clone(), root);
        if let Some(p) = self.local.get(&key) {
            return p.clone();
        }
        let mut total = Vec::new();
        for classes in set_partitions(IndexSet::range(1, k)) {
            let masks: Vec<u64> = classes.iter().map(|c| c.mask() >> 1).collect();
            if groups.iter().any(|&g| masks.iter().any(|&m| g & !m == 0)) {
                continue;
            }
            let p = self.placements(classes.len(), root);
            add_into(&mut total, &p);
        }
        let total = trim(total);
        self.local.insert(key, total.clone());
        total
    }

    /// Sum over nested subcollections below a member `s`.
    pub(crate) fn node(&mut self, s: IndexSet) -> IntPoly {
        if let Some(p) = self.nodes.get(&s.mask()) {
            return p.clone();
        }
        let mut total = Vec::new();
        for children in self.partitions_of(s).iter() {
            if children.len() < 2 || !self.admissible_children(children) {
                continue;
            }
            let term = self.component_term(children, false, None);
            add_into(&mut total, &term);
        }
        let total = trim(total);
        self.nodes.insert(s.mask(), total.clone());
        total
    }

    /// Local count of one component times the counts below its children;
    /// with `marked = Some(j)`, the child containing `j` must keep `j` as a node.
    fn component_term(&mut self, children: &[IndexSet], root: bool, marked: Option<IndexSet>) -> IntPoly {
        let mut term = self.local_count(children, root);
        for &c in children {
            if c.len() < 2 {
                continue;
            }
            let below = match marked {
                Some(j) if j.is_subset(c) && j != c => self.marked_node(c, j),
                _ => self.node(c),
            };
            term = mul(&term, &below);
            if term.is_empty() {
                break;
            }
        }
        term
    }

    fn marked_node(&mut self, s: IndexSet, j: IndexSet) -> IntPoly {
        if let Some(p) = self.marked.get(&(s.mask(), j.mask())) {
            return p.clone();
        }
        let mut total = Vec::new();
        for children in self.partitions_of(s).iter() {
            if children.len() < 2
                || !self.admissible_children(children)
                || !children.iter().any(|c| j.is_subset(*c))
            {
                continue;
            }
            let term = self.component_term(children, false, Some(j));
            add_into(&mut total, &term);
        }
        let total = trim(total);
        self.marked.insert((s.mask(), j.mask()), total.clone());
        total
    }

    fn root_sum(&mut self, marked: Option<IndexSet>) -> IntPoly {
        let universe = self.ambient.universe();
        let mut total = Vec::new();
        for children in self.partitions_of(universe).iter() {
            if !self.admissible_children(children) {
                continue;
            }
            if let Some(j) = marked {
                if !children.iter().any(|c| j.is_subset(*c)) {
                    continue;
                }
            }
            let term = self.component_term(children, true, marked);
            add_into(&mut total, &term);
        }
        trim(total)
    }

    /// Point count of the whole model.
    pub(crate) fn total(&mut self) -> IntPoly {
        self.root_sum(None)
    }

    /// Point count of the divisor of a member `j`: strata whose collection contains it.
    pub(crate) fn divisor(&mut self, j: IndexSet) -> IntPoly {
        debug_assert!(self.members.contains(&j));
        if j == self.ambient.universe() {
            let children_total = self.node(j);
            let root = self.placements(1, true);
            return mul(&children_total, &root);
        }
        self.root_sum(Some(j))
    }

    /// Point count of the fibre over a general point of the diagonal `j`,
    /// where `j` is not a member.
    pub(crate) fn fibre(&mut self, j: IndexSet) -> IntPoly {
        let mut total = Vec::new();
        for children in self.partitions_of(j).iter() {
            if !self.admissible_children(children) {
                continue;
            }
            if children.len() >= 2 && !self.spanning_groups(children).is_empty() {
                continue;
            }
            let mut term = vec![1];
            for &c in children {
                if c.len() >= 2 {
                    term = mul(&term, &self.node(c));
                }
            }
            add_into(&mut total, &term);
        }
        trim(total)
    }
}

/// Signed Stirling numbers of the first kind `s(j, i)` for `i = 0..=j`.
fn stirling_first(j: usize) -> Vec<i128> {
    let mut row = vec![1i128];
    for m in 0..j {
        let mut next = vec![0i128; row.len() + 1];
        for (i, &c) in row.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= m as i128 * c;
        }
        row = next;
    }
    row
}
