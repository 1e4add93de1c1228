//! Weighted stable rooted trees (T-case) and stable trees (P-case).
//!
//! A tree is stored flat: the nested collection of coincident sets, one
//! screen per member and a root placement. Reduction and forgetting work on a
//! recursive view and flatten back.

use crate::arrangements::{heavy_family, is_nested, AmbientDescriptor};
use crate::git::{is_stable, normalize, GitError, PointConfiguration};
use crate::index_set::IndexSet;
use crate::rational::{self, Rational};
use crate::weights::{git_weights, validate_domain, DomainKind, WeightError, WeightVector};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("dangling node identifier: {0}")]
    Dangling(String),
    #[error("{place}: expected {expected} coordinates, got {got}")]
    DimensionMismatch { place: String, expected: usize, got: usize },
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("tree is not valid: {0}")]
    Invalid(String),
    #[error("target weights are not componentwise <= the tree weights")]
    NotSmaller,
    #[error("weights outside the {kind} domain: {violations:?}")]
    Domain { kind: DomainKind, violations: Vec<String> },
    #[error("forgetting from a framed tree must keep the frame labels 1..={0}")]
    FrameMissing(usize),
    #[error("forgetting leaves an unstable tree: {0}")]
    UnstableResult(String),
    #[error("k = {k} is outside 2..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("operation needs a rooted tree")]
    NeedsRooted,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Git(#[from] GitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Rooted,
    Framed,
}

/// A child of a component: a mark or a member of the collection. Children of
/// one component have disjoint labels and are ordered by their smallest label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChildId {
    Mark(usize),
    Node(IndexSet),
}

impl ChildId {
    pub fn labels(self) -> IndexSet {
        match self {
            ChildId::Mark(l) => IndexSet::from_labels([l]),
            ChildId::Node(s) => s,
        }
    }

    fn key(self) -> usize {
        match self {
            ChildId::Mark(l) => l,
            ChildId::Node(s) => s.min().unwrap_or(0),
        }
    }
}

impl Ord for ChildId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.key(), self.labels()).cmp(&(other.key(), other.labels()))
    }
}

impl PartialOrd for ChildId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// `3` for a mark, `[4,5]` for a node.
impl fmt::Display for ChildId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChildId::Mark(l) => write!(f, "{l}"),
            ChildId::Node(s) => write!(f, "{s}"),
        }
    }
}

impl std::str::FromStr for ChildId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('[') || t.starts_with('{') {
            let set: IndexSet = t.parse()?;
            Ok(ChildId::Node(set))
        } else {
            let l: usize = t.parse().map_err(|_| format!("bad child identifier `{s}`"))?;
            IndexSet::try_from_labels([l]).ok_or_else(|| format!("label out of range `{s}`"))?;
            Ok(ChildId::Mark(l))
        }
    }
}

pub type Position = Vec<Rational>;

/// Positions of the children of one component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Screen {
    positions: BTreeMap<ChildId, Position>,
}

impl Screen {
    pub fn new(positions: BTreeMap<ChildId, Position>) -> Self {
        Screen { positions }
    }

    pub fn from_entries<I: IntoIterator<Item = (ChildId, Position)>>(entries: I) -> Self {
        Screen { positions: entries.into_iter().collect() }
    }

    pub fn positions(&self) -> &BTreeMap<ChildId, Position> {
        &self.positions
    }

    pub fn get(&self, c: ChildId) -> Option<&Position> {
        self.positions.get(&c)
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distinct_positions(&self) -> usize {
        self.positions.values().collect::<BTreeSet<_>>().len()
    }

    /// Translates the smallest child to the origin and rescales so the first
    /// nonzero coordinate, row-major over sorted children, is one.
    pub fn canonical(&self) -> Screen {
        let Some(origin) = self.positions.values().next().cloned() else {
            return self.clone();
        };
        let shifted: Vec<(ChildId, Position)> = self
            .positions
            .iter()
            .map(|(&c, p)| (c, p.iter().zip(&origin).map(|(x, o)| x - o).collect()))
            .collect();
        let lead = shifted.iter().flat_map(|(_, p)| p.iter()).find(|x| !x.is_zero()).cloned();
        match lead {
            None => Screen::from_entries(shifted),
            Some(l) => Screen::from_entries(
                shifted.into_iter().map(|(c, p)| (c, p.iter().map(|x| x / &l).collect())),
            ),
        }
    }

    /// Applies `x ↦ c·x + v` to every position.
    pub fn affine_image(&self, c: &Rational, v: &[Rational]) -> Screen {
        Screen::from_entries(
            self.positions.iter().map(|(&k, p)| (k, p.iter().zip(v).map(|(x, t)| c * x + t).collect())),
        )
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (c, p) in &self.positions {
            m.insert(c.to_string(), json!(p.iter().map(rational::format).collect::<Vec<_>>()));
        }
        Value::Object(m)
    }

    fn from_json(v: &Value, place: &str) -> Result<Screen, TreeError> {
        let obj = v.as_object().ok_or_else(|| TreeError::Malformed(format!("{place} is not an object")))?;
        let mut positions = BTreeMap::new();
        for (k, p) in obj {
            let id: ChildId = k.parse().map_err(TreeError::Malformed)?;
            let coords = p
                .as_array()
                .ok_or_else(|| TreeError::Malformed(format!("{place}/{k} is not an array")))?
                .iter()
                .map(|x| match x {
                    Value::String(s) => rational::parse(s).map_err(|e| TreeError::Malformed(e.to_string())),
                    Value::Number(n) => {
                        rational::parse(&n.to_string()).map_err(|e| TreeError::Malformed(e.to_string()))
                    }
                    _ => Err(TreeError::Malformed(format!("{place}/{k} has a non-numeric coordinate"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            positions.insert(id, coords);
        }
        Ok(Screen { positions })
    }
}

/// Outcome of [`StableTree::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    /// The first failing component (`weights`, `collection`, `root` or a
    /// screen key) and the reason.
    pub component: Option<String>,
    pub reason: Option<String>,
}

impl ValidationReport {
    fn ok() -> Self {
        ValidationReport { accepted: true, component: None, reason: None }
    }

    fn reject(component: impl Into<String>, reason: impl Into<String>) -> Self {
        ValidationReport { accepted: false, component: Some(component.into()), reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableTree {
    kind: TreeKind,
    weights: WeightVector,
    collection: Vec<IndexSet>,
    screens: BTreeMap<IndexSet, Screen>,
    root: Screen,
}

#[derive(Clone)]
struct Comp {
    children: Vec<(Child, Position)>,
}

#[derive(Clone)]
enum Child {
    Mark(usize),
    Node(Comp),
}

impl Comp {
    fn labels(&self) -> IndexSet {
        self.children.iter().fold(IndexSet::EMPTY, |acc, (c, _)| {
            acc.union(match c {
                Child::Mark(l) => IndexSet::from_labels([*l]),
                Child::Node(sub) => sub.labels(),
            })
        })
    }

    fn distinct_positions(&self) -> usize {
        self.children.iter().map(|(_, p)| p).collect::<BTreeSet<_>>().len()
    }
}

impl StableTree {
    /// Builds a tree from its parts. A rooted collection may list the whole
    /// label set; its screen then serves as the root.
    pub fn new(
        kind: TreeKind,
        weights: WeightVector,
        collection: Vec<IndexSet>,
        mut screens: BTreeMap<IndexSet, Screen>,
        mut root: Screen,
    ) -> Result<Self, TreeError> {
        let d = weights.d();
        let universe = weights.universe();
        let mut members = Vec::new();
        for s in collection {
            if !s.is_subset(universe) || s.len() < 2 {
                return Err(TreeError::Malformed(format!("collection member {s} is not a subset of size >= 2")));
            }
            if kind == TreeKind::Rooted && s == universe {
                if let Some(top) = screens.remove(&s) {
                    if !root.is_empty() {
                        return Err(TreeError::Malformed("both a root and a screen for the whole set".into()));
                    }
                    root = top;
                }
                continue;
            }
            if !members.contains(&s) {
                members.push(s);
            }
        }
        for key in screens.keys() {
            if !members.contains(key) {
                return Err(TreeError::Dangling(format!("screen {key} has no collection member")));
            }
        }
        for m in &members {
            if !screens.contains_key(m) {
                return Err(TreeError::Dangling(format!("collection member {m} has no screen")));
            }
        }
        for (key, screen) in &screens {
            check_dims(screen, d, &key.to_string())?;
        }
        let root_dim = if kind == TreeKind::Framed { d + 1 } else { d };
        check_dims(&root, root_dim, "root")?;
        members.sort_by_key(|s| (s.len(), *s));
        let mut tree = StableTree { kind, weights, collection: members, screens, root };
        tree.collection = tree.postorder();
        Ok(tree)
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.weights.d()
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Members, each listed after the members it contains.
    pub fn collection(&self) -> &[IndexSet] {
        &self.collection
    }

    pub fn screen(&self, s: IndexSet) -> Option<&Screen> {
        self.screens.get(&s)
    }

    pub fn root(&self) -> &Screen {
        &self.root
    }

    fn postorder(&self) -> Vec<IndexSet> {
        fn walk(t: &StableTree, comp: Option<IndexSet>, out: &mut Vec<IndexSet>) {
            for c in t.children(comp) {
                if let ChildId::Node(s) = c {
                    walk(t, Some(s), out);
                    out.push(s);
                }
            }
        }
        if !is_nested(&self.collection) {
            return self.collection.clone();
        }
        let mut out = Vec::new();
        walk(self, None, &mut out);
        out
    }

    /// Children of a member, or of the root for `None`; needs a nested collection.
    pub fn children(&self, comp: Option<IndexSet>) -> Vec<ChildId> {
        let span = comp.unwrap_or_else(|| self.weights.universe());
        let inner: Vec<IndexSet> =
            self.collection.iter().copied().filter(|&s| s.is_proper_subset(span)).collect();
        let maximal: Vec<IndexSet> =
            inner.iter().copied().filter(|&s| !inner.iter().any(|&t| s.is_proper_subset(t))).collect();
        let covered = maximal.iter().fold(IndexSet::EMPTY, |a, &s| a.union(s));
        let mut out: Vec<ChildId> = span.difference(covered).iter().map(ChildId::Mark).collect();
        out.extend(maximal.into_iter().map(ChildId::Node));
        out.sort();
        out
    }

    /// The point configuration with every mark at its top-level position.
    pub fn collapsed_root(&self) -> Result<PointConfiguration, TreeError> {
        let mut pts = vec![Vec::new(); self.n()];
        for (c, p) in &self.root.positions {
            for l in c.labels().iter() {
                pts[l - 1] = p.clone();
            }
        }
        Ok(PointConfiguration::new(self.d(), pts)?)
    }

    /// Checks every invariant; structural problems are errors, violated
    /// invariants are rejections naming the first failing component.
    pub fn validate(&self) -> Result<ValidationReport, TreeError> {
        let domain = match self.kind {
            TreeKind::Rooted => DomainKind::T,
            TreeKind::Framed => DomainKind::P,
        };
        let report = validate_domain(&self.weights, domain)?;
        if !report.accepted {
            return Ok(ValidationReport::reject("weights", report.violations.join("; ")));
        }
        for &s in &self.collection {
            if !self.weights.is_heavy(s) {
                return Ok(ValidationReport::reject(
                    "collection",
                    format!("{s} has weight {} <= 1", rational::format(&self.weights.sum_over(s))),
                ));
            }
            if self.kind == TreeKind::Framed {
                let amb = AmbientDescriptor::p(self.d(), self.n()).map_err(|e| TreeError::Malformed(e.to_string()))?;
                if let Some(v) = amb.index_violation(s) {
                    return Ok(ValidationReport::reject("collection", format!("{s}: {v}")));
                }
            }
        }
        if !is_nested(&self.collection) {
            return Ok(ValidationReport::reject("collection", "members are not nested"));
        }
        for &s in &self.collection {
            if let Some(r) = self.check_component(Some(s))? {
                return Ok(r);
            }
        }
        if let Some(r) = self.check_component(None)? {
            return Ok(r);
        }
        if self.kind == TreeKind::Framed {
            let w = git_weights(self.d(), self.n())?;
            let report = is_stable(&self.collapsed_root()?, &w.entries)?;
            if let Some(wit) = report.witness {
                return Ok(ValidationReport::reject(
                    "root",
                    format!(
                        "collapsed configuration unstable: points {} span a {}-plane of weight {}",
                        wit.points,
                        wit.span_dim,
                        rational::format(&wit.weight)
                    ),
                ));
            }
        }
        Ok(ValidationReport::ok())
    }

    fn check_component(&self, comp: Option<IndexSet>) -> Result<Option<ValidationReport>, TreeError> {
        let name = comp.map_or_else(|| "root".to_string(), |s| s.to_string());
        let screen = match comp {
            Some(s) => &self.screens[&s],
            None => &self.root,
        };
        let expected = self.children(comp);
        for c in screen.positions.keys() {
            if !expected.contains(c) {
                return Err(TreeError::Dangling(format!("{name} places {c}, which is not one of its children")));
            }
        }
        for c in &expected {
            if !screen.positions.contains_key(c) {
                return Err(TreeError::Dangling(format!("{name} does not place its child {c}")));
            }
        }
        if screen.distinct_positions() < 2 {
            let why = if comp.is_some() { "all children share one position" } else { "top-level positions all equal" };
            return Ok(Some(ValidationReport::reject(name, why)));
        }
        let mut groups: BTreeMap<&Position, Vec<ChildId>> = BTreeMap::new();
        for (c, p) in &screen.positions {
            groups.entry(p).or_default().push(*c);
        }
        for group in groups.values() {
            if group.len() < 2 {
                continue;
            }
            if let Some(node) = group.iter().find(|c| matches!(c, ChildId::Node(_))) {
                return Ok(Some(ValidationReport::reject(name, format!("node {node} shares its position"))));
            }
            let labels = group.iter().fold(IndexSet::EMPTY, |a, c| a.union(c.labels()));
            if self.weights.is_heavy(labels) {
                return Ok(Some(ValidationReport::reject(
                    name,
                    format!(
                        "marks {labels} coincide with weight {} > 1",
                        rational::format(&self.weights.sum_over(labels))
                    ),
                )));
            }
        }
        Ok(None)
    }

    fn require_valid(&self) -> Result<(), TreeError> {
        let r = self.validate()?;
        if r.accepted {
            Ok(())
        } else {
            Err(TreeError::Invalid(format!(
                "{}: {}",
                r.component.unwrap_or_default(),
                r.reason.unwrap_or_default()
            )))
        }
    }

    /// Unique representative of the isomorphism class.
    pub fn canonicalize(&self) -> Result<StableTree, TreeError> {
        self.require_valid()?;
        let screens = self.screens.iter().map(|(&k, s)| (k, s.canonical())).collect();
        let root = match self.kind {
            TreeKind::Rooted => self.root.canonical(),
            TreeKind::Framed => {
                let chart = normalize(&self.collapsed_root()?)?.to_configuration();
                Screen::from_entries(self.root.positions.keys().map(|&c| (c, chart.point(c.key()).to_vec())))
            }
        };
        Ok(StableTree { screens, root, ..self.clone() })
    }

    fn to_comp(&self, comp: Option<IndexSet>) -> Comp {
        let screen = match comp {
            Some(s) => &self.screens[&s],
            None => &self.root,
        };
        let children = screen
            .positions
            .iter()
            .map(|(&c, p)| {
                let child = match c {
                    ChildId::Mark(l) => Child::Mark(l),
                    ChildId::Node(s) => Child::Node(self.to_comp(Some(s))),
                };
                (child, p.clone())
            })
            .collect();
        Comp { children }
    }

    fn from_comp(kind: TreeKind, weights: WeightVector, root: Comp) -> Result<StableTree, TreeError> {
        fn flatten(c: &Comp, screens: &mut BTreeMap<IndexSet, Screen>) -> Screen {
            Screen::from_entries(c.children.iter().map(|(child, p)| {
                let id = match child {
                    Child::Mark(l) => ChildId::Mark(*l),
                    Child::Node(sub) => {
                        let s = sub.labels();
                        let screen = flatten(sub, screens);
                        screens.insert(s, screen);
                        ChildId::Node(s)
                    }
                };
                (id, p.clone())
            }))
        }
        let mut screens = BTreeMap::new();
        let root = flatten(&root, &mut screens);
        let collection = screens.keys().copied().collect();
        StableTree::new(kind, weights, collection, screens, root)
    }

    /// The reduction morphism to weights `b <= a`: members that are no longer
    /// heavy collapse, with all their marks, onto their attachment position.
    pub fn reduce(&self, b: &WeightVector) -> Result<StableTree, TreeError> {
        if b.d() != self.d() || !b.le(&self.weights) {
            return Err(TreeError::NotSmaller);
        }
        let kind = match self.kind {
            TreeKind::Rooted => DomainKind::T,
            TreeKind::Framed => DomainKind::P,
        };
        let report = validate_domain(b, kind)?;
        if !report.accepted {
            return Err(TreeError::Domain { kind, violations: report.violations });
        }
        self.require_valid()?;
        fn go(c: Comp, b: &WeightVector) -> Comp {
            let mut children = Vec::new();
            for (child, p) in c.children {
                match child {
                    Child::Node(sub) if !b.is_heavy(sub.labels()) => {
                        children.extend(sub.labels().iter().map(|l| (Child::Mark(l), p.clone())));
                    }
                    Child::Node(sub) => children.push((Child::Node(go(sub, b)), p)),
                    m => children.push((m, p)),
                }
            }
            Comp { children }
        }
        StableTree::from_comp(self.kind, b.clone(), go(self.to_comp(None), b))
    }

    /// The forgetful morphism keeping the marks in `r`, relabelled `1..|r|`
    /// in increasing order.
    pub fn forget(&self, r: IndexSet) -> Result<StableTree, TreeError> {
        let d = self.d();
        if r.is_empty() || !r.is_subset(self.weights.universe()) {
            return Err(TreeError::Malformed(format!("{r} is not a nonempty subset of the labels")));
        }
        if self.kind == TreeKind::Framed && !IndexSet::range(1, d + 1).is_subset(r) {
            return Err(TreeError::FrameMissing(d + 1));
        }
        let kept = self.weights.restrict(r)?;
        let kind = match self.kind {
            TreeKind::Rooted => DomainKind::T,
            TreeKind::Framed => DomainKind::P,
        };
        let report = validate_domain(&kept, kind)?;
        if !report.accepted {
            return Err(TreeError::Domain { kind, violations: report.violations });
        }
        self.require_valid()?;
        let a = &self.weights;
        fn prune(c: Comp, r: IndexSet, a: &WeightVector) -> Comp {
            let mut children = Vec::new();
            for (child, p) in c.children {
                match child {
                    Child::Mark(l) if r.contains(l) => children.push((Child::Mark(l), p)),
                    Child::Mark(_) => {}
                    Child::Node(sub) => {
                        let sub = prune(sub, r, a);
                        let labels = sub.labels();
                        if labels.is_empty() {
                            continue;
                        }
                        if !a.is_heavy(labels) {
                            children.extend(labels.iter().map(|l| (Child::Mark(l), p.clone())));
                        } else if sub.distinct_positions() < 2 {
                            // a lone node child: it takes over the attachment point
                            let (only, _) = sub.children.into_iter().next().expect("heavy node has a child");
                            children.push((only, p));
                        } else {
                            children.push((Child::Node(sub), p));
                        }
                    }
                }
            }
            Comp { children }
        }
        let mut root = prune(self.to_comp(None), r, a);
        while self.kind == TreeKind::Rooted && root.distinct_positions() < 2 {
            match root.children.pop() {
                Some((Child::Node(sub), _)) if root.children.is_empty() => root = sub,
                _ => return Err(TreeError::UnstableResult("surviving marks collapse to one point".into())),
            }
        }
        fn relabel(c: Comp, r: IndexSet) -> Comp {
            let pos: Vec<usize> = r.iter().collect();
            Comp {
                children: c
                    .children
                    .into_iter()
                    .map(|(child, p)| {
                        let child = match child {
                            Child::Mark(l) => Child::Mark(pos.iter().position(|&x| x == l).unwrap() + 1),
                            Child::Node(sub) => Child::Node(relabel(sub, r)),
                        };
                        (child, p)
                    })
                    .collect(),
            }
        }
        let out = StableTree::from_comp(self.kind, kept, relabel(root, r))?;
        let check = out.validate()?;
        if !check.accepted {
            return Err(TreeError::UnstableResult(format!(
                "{}: {}",
                check.component.unwrap_or_default(),
                check.reason.unwrap_or_default()
            )));
        }
        Ok(out)
    }

    /// Canonical forgetful images onto every `k`-subset of the labels.
    pub fn forgetful_profile(&self, k: usize) -> Result<BTreeMap<IndexSet, StableTree>, TreeError> {
        if self.kind != TreeKind::Rooted {
            return Err(TreeError::NeedsRooted);
        }
        let n = self.n();
        if k < 2 || k > n {
            return Err(TreeError::KOutOfRange { k, n });
        }
        let mut out = BTreeMap::new();
        for s in self.weights.universe().subsets().filter(|s| s.len() == k) {
            out.insert(s, self.forget(s)?.canonicalize()?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut screens = Map::new();
        for s in &self.collection {
            screens.insert(s.to_string(), self.screens[s].to_json());
        }
        json!({
            "kind": self.kind,
            "d": self.d(),
            "n": self.n(),
            "weights": self.weights.entries().iter().map(rational::format).collect::<Vec<_>>(),
            "collection": self.collection,
            "screens": screens,
            "root": self.root.to_json(),
        })
    }

    /// Parses the JSON form; weights may use the `x+e` shorthand.
    pub fn from_json(v: &Value, epsilon: &Rational) -> Result<StableTree, TreeError> {
        let field = |k: &str| v.get(k).ok_or_else(|| TreeError::Malformed(format!("missing field `{k}`")));
        let kind: TreeKind =
            serde_json::from_value(field("kind")?.clone()).map_err(|e| TreeError::Malformed(e.to_string()))?;
        let d = field("d")?.as_u64().ok_or_else(|| TreeError::Malformed("`d` is not an integer".into()))? as usize;
        let raw: Vec<String> = field("weights")?
            .as_array()
            .ok_or_else(|| TreeError::Malformed("`weights` is not an array".into()))?
            .iter()
            .map(|x| match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        let entries = raw
            .iter()
            .map(|s| rational::parse_with_epsilon(s, epsilon))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| TreeError::Malformed(e.to_string()))?;
        let weights = WeightVector::new(d, entries)?;
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != weights.n() {
                return Err(TreeError::Malformed(format!("n = {n} but {} weights", weights.n())));
            }
        }
        let collection: Vec<IndexSet> =
            serde_json::from_value(field("collection")?.clone()).map_err(|e| TreeError::Malformed(e.to_string()))?;
        let mut screens = BTreeMap::new();
        if let Some(obj) = v.get("screens") {
            let obj = obj.as_object().ok_or_else(|| TreeError::Malformed("`screens` is not an object".into()))?;
            for (k, s) in obj {
                let key: IndexSet = k.parse().map_err(TreeError::Malformed)?;
                screens.insert(key, Screen::from_json(s, k)?);
            }
        }
        let root = match v.get("root") {
            Some(r) => Screen::from_json(r, "root")?,
            None => Screen::default(),
        };
        StableTree::new(kind, weights, collection, screens, root)
    }
}

/// JSON object keyed by `[i,j,...]`.
pub fn profile_json(profile: &BTreeMap<IndexSet, StableTree>) -> Value {
    let mut m = Map::new();
    for (k, t) in profile {
        m.insert(k.to_string(), t.to_json());
    }
    Value::Object(m)
}

impl Serialize for StableTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn check_dims(screen: &Screen, dim: usize, place: &str) -> Result<(), TreeError> {
    for (c, p) in &screen.positions {
        if p.len() != dim {
            return Err(TreeError::DimensionMismatch { place: format!("{place}/{c}"), expected: dim, got: p.len() });
        }
    }
    Ok(())
}

/// A random valid tree for `weights`: a random nested subfamily of the heavy
/// sets, small-integer positions, and random coincidences of light marks.
pub fn random_tree<R: Rng>(rng: &mut R, kind: TreeKind, weights: &WeightVector) -> Result<StableTree, TreeError> {
    let (d, n) = (weights.d(), weights.n());
    let ambient = match kind {
        TreeKind::Rooted => AmbientDescriptor::t(d, n),
        TreeKind::Framed => AmbientDescriptor::p(d, n),
    }
    .map_err(|e| TreeError::Malformed(e.to_string()))?;
    let mut members: Vec<IndexSet> = Vec::new();
    let mut pool = heavy_family(weights, ambient);
    pool.shuffle(rng);
    for s in pool {
        if rng.gen_bool(0.5) && members.iter().all(|&t| s.is_disjoint(t) || s.is_subset(t) || t.is_subset(s)) {
            members.push(s);
        }
    }
    let shape = StableTree {
        kind,
        weights: weights.clone(),
        collection: members.clone(),
        screens: BTreeMap::new(),
        root: Screen::default(),
    };
    for _attempt in 0..1000 {
        let mut screens = BTreeMap::new();
        for &s in &members {
            screens.insert(s, random_screen(rng, &shape.children(Some(s)), weights, d, false));
        }
        let root = random_screen(rng, &shape.children(None), weights, d, kind == TreeKind::Framed);
        let t = StableTree::new(kind, weights.clone(), members.clone(), screens, root)?;
        if t.validate()?.accepted {
            return Ok(t);
        }
    }
    Err(TreeError::Invalid("no valid placement found".into()))
}

fn random_screen<R: Rng>(
    rng: &mut R,
    children: &[ChildId],
    weights: &WeightVector,
    d: usize,
    projective: bool,
) -> Screen {
    let dim = if projective { d + 1 } else { d };
    let mut placed: Vec<(ChildId, Position)> = Vec::new();
    for &c in children {
        let share = matches!(c, ChildId::Mark(_)) && !placed.is_empty() && rng.gen_bool(0.25);
        if share {
            let (other, p) = placed[rng.gen_range(0..placed.len())].clone();
            if let ChildId::Mark(_) = other {
                let group = placed
                    .iter()
                    .filter(|(_, q)| *q == p)
                    .fold(c.labels(), |a, (o, _)| a.union(o.labels()));
                if !weights.is_heavy(group) {
                    placed.push((c, p));
                    continue;
                }
            }
        }
        loop {
            let p: Position = (0..dim).map(|_| rational::int(rng.gen_range(-3..=3))).collect();
            if projective && p.iter().all(|x| x.is_zero()) {
                continue;
            }
            let p = if projective { crate::linalg::projective_normal(&p).unwrap() } else { p };
            if !placed.iter().any(|(_, q)| *q == p) {
                placed.push((c, p));
                break;
            }
        }
    }
    Screen::from_entries(placed)
}
