#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wonderful_core::git::PointConfiguration;
use wonderful_core::linalg::{self, Matrix};
use wonderful_core::rational::{int, rat};

pub const GIT_SHAPES: [(usize, usize); 6] = [(1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (3, 6)];

/// Small integer points, with repeated points and frame-hugging points mixed
/// in so that every failure mode of stability shows up.
pub fn random_configuration(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointConfiguration {
    let mut pts: Vec<Vec<i64>> = Vec::with_capacity(n);
    for i in 0..n {
        let roll = rng.gen_range(0..10);
        let p = if i > 0 && roll == 0 {
            pts[rng.gen_range(0..i)].clone()
        } else if roll == 1 {
            let mut e = vec![0; d + 1];
            e[rng.gen_range(0..=d)] = 1;
            e
        } else {
            loop {
                let v: Vec<i64> = (0..=d).map(|_| rng.gen_range(-2..=2)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            }
        };
        pts.push(p);
    }
    PointConfiguration::from_integers(d, &pts).unwrap()
}

pub fn random_invertible(rng: &mut ChaCha8Rng, size: usize) -> Matrix {
    loop {
        let m: Matrix = (0..size)
            .map(|_| (0..size).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect())
            .collect();
        if linalg::inverse(&m).is_some() {
            return m;
        }
    }
}

pub fn ints(v: &[i64]) -> Vec<wonderful_core::Rational> {
    v.iter().map(|&x| int(x)).collect()
}
