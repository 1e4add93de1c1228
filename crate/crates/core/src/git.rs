//! Weighted point configurations in `P^d`: stability, frame normalization onto
//! `(P^{n-d-2})^d`, and the coincidence loci `H_I`.

use crate::arrangements::{heavy_family, AmbientDescriptor, ArrangementError};
use crate::index_set::IndexSet;
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};
use crate::weights::{git_weights, validate_domain, DomainKind, WeightError, WeightVector};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GitError {
    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
    #[error("point {0} is the zero vector")]
    ZeroPoint(usize),
    #[error("{got} weights for {n} points")]
    WeightLength { n: usize, got: usize },
    #[error("configuration is unstable: {0}")]
    Unstable(String),
    #[error("quotient point is malformed: {0}")]
    BadQuotient(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("weights are not in the P domain: {0:?}")]
    DomainMismatch(Vec<String>),
}

/// `n` points of `P^d`, each stored with first nonzero coordinate one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointConfiguration {
    d: usize,
    points: Vec<Vec<Rational>>,
}

impl PointConfiguration {
    pub fn new(d: usize, points: Vec<Vec<Rational>>) -> Result<Self, GitError> {
        let mut out = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != d + 1 {
                return Err(GitError::DimensionMismatch { index: i + 1, got: p.len(), expected: d + 1 });
            }
            out.push(linalg::projective_normal(&p).ok_or(GitError::ZeroPoint(i + 1))?);
        }
        Ok(PointConfiguration { d, points: out })
    }

    pub fn from_integers(d: usize, points: &[Vec<i64>]) -> Result<Self, GitError> {
        Self::new(d, points.iter().map(|p| p.iter().map(|&x| rational::int(x)).collect()).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Point `i` (1-based).
    pub fn point(&self, i: usize) -> &[Rational] {
        &self.points[i - 1]
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    /// Image under the projective transformation with matrix `m`.
    pub fn transform(&self, m: &Matrix) -> Result<Self, GitError> {
        Self::new(self.d, self.points.iter().map(|p| linalg::mat_vec(m, p)).collect())
    }

    /// Maximal groups of at least two labels whose points coincide.
    pub fn coincidences(&self) -> Vec<IndexSet> {
        let mut out: Vec<IndexSet> = Vec::new();
        let mut seen = IndexSet::EMPTY;
        for i in 1..=self.n() {
            if seen.contains(i) {
                continue;
            }
            let class = IndexSet::from_labels((i..=self.n()).filter(|&j| self.point(j) == self.point(i)));
            seen = seen.union(class);
            if class.len() >= 2 {
                out.push(class);
            }
        }
        out
    }

    fn integer_points(&self) -> Vec<Option<Vec<i64>>> {
        self.points
            .iter()
            .map(|p| linalg::primitive_integer(p).iter().map(|x| x.to_i64()).collect())
            .collect()
    }
}

impl Serialize for PointConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.points.iter().map(|p| p.iter().map(rational::format).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(de)?;
        let d = rows.first().map_or(0, |r| r.len()).saturating_sub(1);
        let points = rows
            .iter()
            .map(|r| r.iter().map(|x| rational::parse(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        PointConfiguration::new(d, points).map_err(serde::de::Error::custom)
    }
}

/// Rank of a few short integer vectors; rational fallback on overflow.
fn rank_of(ints: &[Option<Vec<i64>>], rats: &[Vec<Rational>], idx: &[usize]) -> usize {
    if let Some(rows) = idx.iter().map(|&i| ints[i].clone()).collect::<Option<Vec<_>>>() {
        if let Some(r) = bareiss_rank(rows) {
            return r;
        }
    }
    linalg::rank(&idx.iter().map(|&i| rats[i].clone()).collect())
}

fn bareiss_rank(rows: Vec<Vec<i64>>) -> Option<usize> {
    let mut a: Vec<Vec<i128>> = rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let m = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..cols {
                let v = a[i][j].checked_mul(a[r][c])?.checked_sub(a[i][c].checked_mul(a[r][j])?)?;
                a[i][j] = v / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
    }
    Some(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Labels of the points lying in the subspace.
    pub points: IndexSet,
    pub span_dim: usize,
    #[serde(with = "rational::as_string")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<Witness>,
    /// Subspaces whose weight equals `dim W + 1` exactly.
    pub exact_ties: usize,
}

/// Stability for weights `w`: `Σ_{p_i ∈ W} w_i < dim W + 1` for every proper
/// subspace `W` spanned by points of the configuration. The first violation
/// found, in order of increasing span dimension, is returned as a witness.
pub fn is_stable(c: &PointConfiguration, w: &[Rational]) -> Result<StabilityReport, GitError> {
    if w.len() != c.n() {
        return Err(GitError::WeightLength { n: c.n(), got: w.len() });
    }
    let ints = c.integer_points();
    let n = c.n();
    let mut witness = None;
    let mut ties = 0;
    for size in 1..=c.d {
        let mut seen = HashSet::new();
        for s in IndexSet::range(1, n).subsets().filter(|s| s.len() == size) {
            let idx: Vec<usize> = s.iter().map(|i| i - 1).collect();
            if rank_of(&ints, &c.points, &idx) < size {
                continue;
            }
            let mut inside = s;
            for p in 1..=n {
                if s.contains(p) {
                    continue;
                }
                let mut with = idx.clone();
                with.push(p - 1);
                if rank_of(&ints, &c.points, &with) == size {
                    inside.insert(p);
                }
            }
            if !seen.insert(inside) {
                continue;
            }
            let weight: Rational = inside.iter().map(|i| w[i - 1].clone()).sum();
            let bound = rational::int(size as i64);
            if weight == bound {
                ties += 1;
            }
            if weight >= bound && witness.is_none() {
                witness = Some(Witness { points: inside, span_dim: size - 1, weight });
            }
        }
    }
    Ok(StabilityReport { stable: witness.is_none(), witness, exact_ties: ties })
}

/// Which of the four explicit conditions on a configuration hold:
/// (1) `p_1..p_{d+1}` in general position; (2) no later point in the span of
/// `p_1..p_d`; (3) not all of `p_{d+1}..p_n` equal; (4) for each `k <= d`, the
/// later points do not all lie on the hyperplane spanned by the frame points
/// other than `p_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub failed: Vec<u8>,
}

pub fn direct_conditions(c: &PointConfiguration) -> ConditionReport {
    let d = c.d;
    let n = c.n();
    let ints = c.integer_points();
    let rank = |idx: &[usize]| rank_of(&ints, &c.points, idx);
    let mut failed = Vec::new();
    if n < d + 1 || rank(&(0..=d).collect::<Vec<_>>()) < d + 1 {
        failed.push(1);
    }
    let base: Vec<usize> = (0..d).collect();
    let base_rank = rank(&base);
    if (d + 1..n).any(|i| {
        let mut v = base.clone();
        v.push(i);
        rank(&v) == base_rank
    }) {
        failed.push(2);
    }
    if n > d && (d + 1..n).all(|i| c.points[i] == c.points[d]) {
        failed.push(3);
    }
    if n > d + 1 {
        for k in 0..d {
            let hyper: Vec<usize> = (0..=d).filter(|&j| j != k).collect();
            let hr = rank(&hyper);
            let all_on = (d + 1..n).all(|i| {
                let mut v = hyper.clone();
                v.push(i);
                rank(&v) == hr
            });
            if all_on {
                failed.push(4);
                break;
            }
        }
    }
    ConditionReport { holds: failed.is_empty(), failed }
}

/// A point of `(P^{n-d-2})^d`: row `k` is `[b^k_{d+2} : ... : b^k_n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientPoint {
    d: usize,
    n: usize,
    rows: Vec<Vec<Rational>>,
}

impl QuotientPoint {
    pub fn new(d: usize, n: usize, rows: Vec<Vec<Rational>>) -> Result<Self, GitError> {
        if rows.len() != d || n < d + 2 {
            return Err(GitError::BadQuotient(format!("expected {d} rows for n = {n}")));
        }
        let mut out = Vec::with_capacity(d);
        for r in rows {
            if r.len() != n - d - 1 {
                return Err(GitError::BadQuotient(format!(
                    "row has {} entries, expected {}",
                    r.len(),
                    n - d - 1
                )));
            }
            out.push(linalg::projective_normal(&r).ok_or_else(|| GitError::BadQuotient("zero row".into()))?);
        }
        Ok(QuotientPoint { d, n, rows: out })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// `b^k_i` for `0 <= k < d` and `d+2 <= i <= n`; zero for `i = d+1`.
    pub fn coordinate(&self, k: usize, i: usize) -> Rational {
        if i == self.d + 1 {
            Rational::zero()
        } else {
            self.rows[k][i - self.d - 2].clone()
        }
    }

    /// The configuration in the chart `p_i = [b^0_i : ... : b^{d-1}_i : 1]`
    /// with the standard frame.
    pub fn to_configuration(&self) -> PointConfiguration {
        let d = self.d;
        let mut pts = Vec::with_capacity(self.n);
        for i in 1..=self.n {
            let p: Vec<Rational> = if i <= d + 1 {
                (1..=d + 1).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
            } else {
                (0..d).map(|k| self.coordinate(k, i)).chain([Rational::one()]).collect()
            };
            pts.push(p);
        }
        PointConfiguration::new(d, pts).expect("chart points are nonzero")
    }
}

impl Serialize for QuotientPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.rows.iter().map(|p| p.iter().map(rational::format).collect()).collect();
        rows.serialize(s)
    }
}

impl QuotientPoint {
    /// Rebuilds from the serialized rows.
    pub fn from_strings(n: usize, rows: &[Vec<String>]) -> Result<Self, GitError> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| rational::parse(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| GitError::BadQuotient(e.to_string()))?;
        QuotientPoint::new(rows.len(), n, parsed)
    }
}

/// Moves `p_1..p_{d+1}` to the standard frame and reads off the quotient
/// coordinates. Requires stability for the GIT weights.
pub fn normalize(c: &PointConfiguration) -> Result<QuotientPoint, GitError> {
    let (d, n) = (c.d, c.n());
    let w = git_weights(d, n)?;
    let report = is_stable(c, &w.entries)?;
    if let Some(wit) = report.witness {
        return Err(GitError::Unstable(format!(
            "points {} span a {}-plane of weight {}",
            wit.points,
            wit.span_dim,
            rational::format(&wit.weight)
        )));
    }
    let frame: Matrix = linalg::transpose(&c.points[..=d].to_vec());
    let inv = linalg::inverse(&frame).ok_or_else(|| GitError::Unstable("frame is degenerate".into()))?;
    let mut rows = vec![Vec::with_capacity(n - d - 1); d];
    for p in &c.points[d + 1..] {
        let v = linalg::mat_vec(&inv, p);
        let last = v[d].clone();
        if last.is_zero() {
            return Err(GitError::Unstable("a point lies in the span of p_1..p_d".into()));
        }
        for (k, row) in rows.iter_mut().enumerate() {
            row.push(&v[k] / &last);
        }
    }
    QuotientPoint::new(d, n, rows)
}

/// Heavy `I ⊆ {d+1..n}` with the quotient point on `H_I`, larger sets first.
pub fn classify_coincidence(qp: &QuotientPoint, a: &WeightVector) -> Result<Vec<IndexSet>, GitError> {
    let (d, n) = (qp.d, qp.n);
    if a.n() != n {
        return Err(GitError::WeightLength { n, got: a.n() });
    }
    let report = validate_domain(a, DomainKind::P)?;
    if !report.accepted {
        return Err(GitError::DomainMismatch(report.violations));
    }
    let amb = AmbientDescriptor::p(d, n)?;
    Ok(heavy_family(a, amb)
        .into_iter()
        .filter(|&set| set != amb.universe())
        .filter(|set| {
            let first = IndexSet::min(*set).expect("heavy sets are nonempty");
            set.iter().all(|i| (0..d).all(|k| qp.coordinate(k, i) == qp.coordinate(k, first)))
        })
        .collect())
}
