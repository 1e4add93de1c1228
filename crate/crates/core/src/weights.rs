//! Weight vectors and the three admissible weight domains.

use crate::index_set::IndexSet;
use crate::rational::{self, int, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("ambient dimension d must be at least 1")]
    BadDimension,
    #[error("need at least 2 weights, got {0}")]
    TooFew(usize),
    #[error("expected {expected} weights, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("weight a_{index} = {value} is outside (0, 1]")]
    OutOfRange { index: usize, value: String },
    #[error("the P-domain needs n >= d+2 (d={d}, n={n})")]
    PDomainUndefined { d: usize, n: usize },
    #[error("GIT weights need n > d+2 (d={d}, n={n})")]
    GitUndefined { d: usize, n: usize },
    #[error("index set {0} is empty or out of range")]
    BadIndexSet(IndexSet),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    FM,
    T,
    P,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::FM => "FM",
            DomainKind::T => "T",
            DomainKind::P => "P",
        })
    }
}

impl std::str::FromStr for DomainKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "FM" | "fm" => Ok(DomainKind::FM),
            "T" | "t" => Ok(DomainKind::T),
            "P" | "p" => Ok(DomainKind::P),
            other => Err(format!("unknown domain kind `{other}` (expected FM, T or P)")),
        }
    }
}

/// Weights `a_1..a_n` attached to labeled points in a `d`-dimensional space.
/// Serializes as a JSON array of `"p/q"` strings; `d` travels separately.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    d: usize,
    entries: Vec<Rational>,
}

impl Serialize for WeightVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::vec_as_strings::serialize(&self.entries, s)
    }
}

impl WeightVector {
    pub fn new(d: usize, entries: Vec<Rational>) -> Result<Self, WeightError> {
        if d == 0 {
            return Err(WeightError::BadDimension);
        }
        if entries.len() < 2 {
            return Err(WeightError::TooFew(entries.len()));
        }
        let one = Rational::one();
        for (i, a) in entries.iter().enumerate() {
            if *a <= Rational::zero() || *a > one {
                return Err(WeightError::OutOfRange { index: i + 1, value: rational::format(a) });
            }
        }
        Ok(WeightVector { d, entries })
    }

    /// Like [`WeightVector::new`], additionally checking the length.
    pub fn with_len(d: usize, n: usize, entries: Vec<Rational>) -> Result<Self, WeightError> {
        if entries.len() != n {
            return Err(WeightError::WrongLength { expected: n, got: entries.len() });
        }
        Self::new(d, entries)
    }

    /// Parses `"p/q"` strings.
    pub fn from_strings<S: AsRef<str>>(d: usize, raw: &[S]) -> Result<Self, WeightError> {
        let entries = raw
            .iter()
            .enumerate()
            .map(|(i, s)| {
                rational::parse(s.as_ref()).map_err(|_| WeightError::OutOfRange {
                    index: i + 1,
                    value: s.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(d, entries)
    }

    pub fn ones(d: usize, n: usize) -> Self {
        Self::new(d, vec![Rational::one(); n]).expect("all-ones weights are well formed")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Weight of label `i` (1-based).
    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i - 1]
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().sum()
    }

    pub fn sum_over(&self, set: IndexSet) -> Rational {
        set.iter().filter(|&i| i <= self.n()).map(|i| self.get(i).clone()).sum()
    }

    /// Strict weight excess `Σ_{i∈I} a_i > 1`.
    pub fn is_heavy(&self, set: IndexSet) -> bool {
        self.sum_over(set) > Rational::one()
    }

    pub fn universe(&self) -> IndexSet {
        IndexSet::range(1, self.n())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &WeightVector) -> bool {
        self.n() == other.n() && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// Restriction to the labels of `set`, in label order.
    pub fn restrict(&self, set: IndexSet) -> Result<WeightVector, WeightError> {
        if set.is_empty() || !set.is_subset(self.universe()) {
            return Err(WeightError::BadIndexSet(set));
        }
        let entries: Vec<Rational> = set.iter().map(|i| self.get(i).clone()).collect();
        if entries.len() < 2 {
            return Err(WeightError::TooFew(entries.len()));
        }
        WeightVector::new(self.d, entries)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", rational::format(a))?;
        }
        write!(f, ")")
    }
}

/// Result of a domain membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainReport {
    pub kind: DomainKind,
    pub accepted: bool,
    pub violations: Vec<String>,
}

/// Lower bounds `w_1..w_n` of the P-domain; defined for `n >= d+2`.
pub fn p_domain_bounds(d: usize, n: usize) -> Result<Vec<Rational>, WeightError> {
    if d == 0 {
        return Err(WeightError::BadDimension);
    }
    if n < d + 2 {
        return Err(WeightError::PDomainUndefined { d, n });
    }
    let eps = Rational::new(1.into(), ((n - d) as i64).into());
    let eps_hat = Rational::new(1.into(), (((d + 1) * (n - d)) as i64).into());
    let one = Rational::one();
    let mut w = Vec::with_capacity(n);
    for _ in 0..d {
        w.push(&one - &eps_hat);
    }
    w.push(&one - int((n - d - 1) as i64) * &eps + int(d as i64) * &eps_hat);
    for _ in d + 2..=n {
        w.push(eps.clone());
    }
    Ok(w)
}

/// Membership of `a` in `D^FM`, `D^T` or `D^P`. Well-formedness (entries in
/// `(0,1]`) is already guaranteed by [`WeightVector`]; structural problems that
/// remain (an undefined P-domain) are errors, not rejections.
pub fn validate_domain(a: &WeightVector, kind: DomainKind) -> Result<DomainReport, WeightError> {
    let mut violations = Vec::new();
    match kind {
        DomainKind::FM => {}
        DomainKind::T => {
            let total = a.total();
            if total <= Rational::one() {
                violations.push(format!(
                    "sum of weights {} is not > 1",
                    rational::format(&total)
                ));
            }
        }
        DomainKind::P => {
            let bounds = p_domain_bounds(a.d(), a.n())?;
            for (i, (ai, wi)) in a.entries().iter().zip(&bounds).enumerate() {
                if ai < wi {
                    violations.push(format!(
                        "a_{} = {} < w_{} = {}",
                        i + 1,
                        rational::format(ai),
                        i + 1,
                        rational::format(wi)
                    ));
                }
            }
        }
    }
    Ok(DomainReport { kind, accepted: violations.is_empty(), violations })
}

/// `A(I)` and `A_+(I^c)`: restriction to `I`, and restriction to the complement
/// followed by one extra weight 1.
pub fn derived_weights(
    a: &WeightVector,
    set: IndexSet,
) -> Result<(Vec<Rational>, Vec<Rational>), WeightError> {
    if set.is_empty() || !set.is_subset(a.universe()) {
        return Err(WeightError::BadIndexSet(set));
    }
    let inside: Vec<Rational> = set.iter().map(|i| a.get(i).clone()).collect();
    let mut outside: Vec<Rational> =
        a.universe().difference(set).iter().map(|i| a.get(i).clone()).collect();
    outside.push(Rational::one());
    Ok((inside, outside))
}

/// The GIT weights of the fractional line bundle `O(w_1, ..., w_n)` on `(P^d)^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GitWeightVector {
    pub d: usize,
    pub n: usize,
    #[serde(with = "rational::as_string")]
    pub epsilon: Rational,
    #[serde(with = "rational::as_string")]
    pub epsilon_hat: Rational,
    #[serde(with = "rational::vec_as_strings")]
    pub entries: Vec<Rational>,
}

impl GitWeightVector {
    pub fn total(&self) -> Rational {
        self.entries.iter().sum()
    }
}

/// `n = d+2` is rejected: the quotient degenerates to a point.
pub fn git_weights(d: usize, n: usize) -> Result<GitWeightVector, WeightError> {
    if d == 0 {
        return Err(WeightError::BadDimension);
    }
    if n <= d + 2 {
        return Err(WeightError::GitUndefined { d, n });
    }
    let entries = p_domain_bounds(d, n)?;
    Ok(GitWeightVector {
        d,
        n,
        epsilon: Rational::new(1.into(), ((n - d) as i64).into()),
        epsilon_hat: Rational::new(1.into(), (((d + 1) * (n - d)) as i64).into()),
        entries,
    })
}
