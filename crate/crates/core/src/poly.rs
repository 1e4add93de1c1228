//! Integer polynomials in `q = [L]`, used for Poincaré polynomials.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

/// Coefficients `c_0, c_1, ...` of `Σ c_k q^k`; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoincarePolynomial(Vec<u64>);

impl PoincarePolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PoincarePolynomial(coeffs)
    }

    pub fn zero() -> Self {
        PoincarePolynomial(Vec::new())
    }

    pub fn one() -> Self {
        PoincarePolynomial(vec![1])
    }

    /// `q^k`.
    pub fn monomial(k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        PoincarePolynomial(v)
    }

    /// `[c]_q = 1 + q + ... + q^{c-1}`, the class of `P^{c-1}`; zero for `c <= 0`.
    pub fn q_integer(c: i64) -> Self {
        if c <= 0 {
            return Self::zero();
        }
        PoincarePolynomial(vec![1; c as usize])
    }

    /// `q + q^2 + ... + q^{c-1}`: what a blowup of codimension `c` adds.
    pub fn exceptional(c: i64) -> Self {
        if c <= 1 {
            return Self::zero();
        }
        let mut v = vec![1; c as usize];
        v[0] = 0;
        PoincarePolynomial(v)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn eval(&self, q: u64) -> u128 {
        self.0.iter().rev().fold(0u128, |acc, &c| acc * q as u128 + c as u128)
    }

    /// `c_k = c_{deg-k}` for every `k`.
    pub fn is_palindromic(&self) -> bool {
        let n = self.0.len();
        (0..n / 2).all(|k| self.0[k] == self.0[n - 1 - k])
    }

    /// Subtraction that fails on a negative coefficient.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let n = self.0.len().max(other.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(self.coeff(k).checked_sub(other.coeff(k))?);
        }
        Some(Self::new(v))
    }
}

impl Add for &PoincarePolynomial {
    type Output = PoincarePolynomial;

    fn add(self, other: &PoincarePolynomial) -> PoincarePolynomial {
        let n = self.0.len().max(other.0.len());
        PoincarePolynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
}

impl Add for PoincarePolynomial {
    type Output = PoincarePolynomial;

    fn add(self, other: PoincarePolynomial) -> PoincarePolynomial {
        &self + &other
    }
}

impl AddAssign<&PoincarePolynomial> for PoincarePolynomial {
    fn add_assign(&mut self, other: &PoincarePolynomial) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

impl Mul for &PoincarePolynomial {
    type Output = PoincarePolynomial;

    fn mul(self, other: &PoincarePolynomial) -> PoincarePolynomial {
        if self.is_zero() || other.is_zero() {
            return PoincarePolynomial::zero();
        }
        let mut v = vec![0u64; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PoincarePolynomial::new(v)
    }
}

impl Mul for PoincarePolynomial {
    type Output = PoincarePolynomial;

    fn mul(self, other: PoincarePolynomial) -> PoincarePolynomial {
        &self * &other
    }
}

/// `1 + 4q + 4q^2 + q^3`.
impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "q")?,
                (1, c) => write!(f, "{c}q")?,
                (k, 1) => write!(f, "q^{k}")?,
                (k, c) => write!(f, "{c}q^{k}")?,
            }
        }
        Ok(())
    }
}

/// Polynomials with signed coefficients, used for point counts of strata.
pub mod signed {
    use super::PoincarePolynomial;

    pub type IntPoly = Vec<i128>;

    pub fn trim(mut p: IntPoly) -> IntPoly {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    pub fn mul(a: &[i128], b: &[i128]) -> IntPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0i128; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn add_into(acc: &mut IntPoly, p: &[i128]) {
        if acc.len() < p.len() {
            acc.resize(p.len(), 0);
        }
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
    }

    pub fn scale(p: &[i128], c: i128) -> IntPoly {
        trim(p.iter().map(|x| x * c).collect())
    }

    /// Exact quotient by a monic divisor, or `None` when the remainder is nonzero.
    pub fn div_exact(num: &[i128], den: &[i128]) -> Option<IntPoly> {
        let num = trim(num.to_vec());
        let den = trim(den.to_vec());
        assert!(den.last() == Some(&1), "divisor must be monic");
        if num.len() < den.len() {
            return num.is_empty().then(Vec::new);
        }
        let mut rem = num;
        let mut quot = vec![0i128; rem.len() - den.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + den.len() - 1];
            quot[k] = c;
            for (j, &x) in den.iter().enumerate() {
                rem[k + j] -= c * x;
            }
        }
        trim(rem).is_empty().then(|| trim(quot))
    }

    pub fn from_poincare(p: &PoincarePolynomial) -> IntPoly {
        p.coeffs().iter().map(|&c| c as i128).collect()
    }

    /// `None` when a coefficient is negative.
    pub fn to_poincare(p: &[i128]) -> Option<PoincarePolynomial> {
        let coeffs = p.iter().map(|&c| u64::try_from(c).ok()).collect::<Option<Vec<_>>>()?;
        Some(PoincarePolynomial::new(coeffs))
    }
}
