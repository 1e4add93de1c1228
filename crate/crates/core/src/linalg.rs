//! Exact linear algebra over `Q` and `Z` for small dense matrices.

#![allow(clippy::needless_range_loop)]

use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Rows of rationals.
pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    row_reduce(&mut a).len()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect()
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Scales a nonzero vector so its first nonzero entry is one.
pub fn projective_normal(v: &[Rational]) -> Option<Vec<Rational>> {
    let lead = v.iter().find(|x| !x.is_zero())?.clone();
    Some(v.iter().map(|x| x / &lead).collect())
}

/// Primitive integer vector on the same line through the origin, with the
/// sign of the first nonzero entry kept.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> =
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Adjugate of a square integer matrix: `adj(m) · m = det(m) · I`.
pub fn adjugate_i64(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    if n == 1 {
        out[0][0] = BigInt::one();
        return out;
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let c = det_i64(&minor);
            out[j][i] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    out
}

pub fn is_unimodular(m: &[Vec<i64>]) -> bool {
    det_i64(m).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn q(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn rank_and_inverse() {
        let m = q(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&m), 1);
        assert!(inverse(&m).is_none());
        let m = q(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, q(&[&[1, -1], &[-1, 2]]));
        assert_eq!(mat_mul(&m, &inv), q(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn projective_and_primitive() {
        let v = vec![int(0), int(2), int(4)];
        assert_eq!(projective_normal(&v).unwrap(), vec![int(0), int(1), int(2)]);
        assert!(projective_normal(&[int(0)]).is_none());
        let w = vec![rat(1, 2), rat(-3, 4)];
        assert_eq!(primitive_integer(&w), vec![BigInt::from(2), BigInt::from(-3)]);
    }

    #[test]
    fn integer_determinants() {
        assert_eq!(det_i64(&[vec![1, 0], vec![1, 2]]), BigInt::from(2));
        assert_eq!(det_i64(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), BigInt::from(-1));
        let m = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        let adj = adjugate_i64(&m);
        let det = det_i64(&m);
        for i in 0..3 {
            for j in 0..3 {
                let s: BigInt = (0..3).map(|k| &adj[i][k] * m[k][j]).sum();
                assert_eq!(s, if i == j { det.clone() } else { BigInt::zero() });
            }
        }
    }
}
