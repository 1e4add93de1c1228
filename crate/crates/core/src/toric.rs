//! Fans of the Losev–Manin models by iterated stellar subdivision.

use crate::index_set::IndexSet;
use crate::linalg;
use crate::poly::PoincarePolynomial;
use crate::rational::{self, Rational};
use crate::weights::WeightVector;
use num_integer::binomial;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToricError {
    #[error("no Losev-Manin fan for {kind} with d = {d}, n = {n}")]
    BadShape { kind: FanKind, d: usize, n: usize },
    #[error("subdivision target cone {0:?} is not a face of the fan")]
    MissingCone(Vec<usize>),
    #[error("cone {0:?} is not simplicial")]
    NotSimplicial(Vec<usize>),
    #[error("fan is not smooth and complete")]
    NotSmoothComplete,
    #[error("malformed fan: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FanKind {
    T,
    P,
}

impl std::fmt::Display for FanKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FanKind::T => "T",
            FanKind::P => "P",
        })
    }
}

impl std::str::FromStr for FanKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "T" | "t" => Ok(FanKind::T),
            "P" | "p" => Ok(FanKind::P),
            other => Err(format!("unknown fan kind `{other}` (expected T or P)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// Sorted ray indices (0-based).
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FanCheck {
    pub smooth: bool,
    pub complete: bool,
}

/// Weights `(ε, ..., ε, 1)` with `ε = 1/(n-1)` for T, and `(1, ..., 1, ε, ..., ε)`
/// with `d+1` ones and `ε = 1/(n-d-1)` for P.
pub fn lm_weights(kind: FanKind, d: usize, n: usize) -> Result<WeightVector, ToricError> {
    check_shape(kind, d, n)?;
    let entries: Vec<Rational> = match kind {
        FanKind::T => {
            let eps = rational::rat(1, (n - 1) as i64);
            (1..=n).map(|i| if i == n { rational::int(1) } else { eps.clone() }).collect()
        }
        FanKind::P => {
            let eps = rational::rat(1, (n - d - 1) as i64);
            (1..=n).map(|i| if i <= d + 1 { rational::int(1) } else { eps.clone() }).collect()
        }
    };
    WeightVector::new(d, entries).map_err(|e| ToricError::Malformed(e.to_string()))
}

fn check_shape(kind: FanKind, d: usize, n: usize) -> Result<(), ToricError> {
    let ok = d >= 1
        && match kind {
            FanKind::T => n >= 2 && d * (n - 1) >= 2,
            FanKind::P => n >= d + 3,
        };
    if ok {
        Ok(())
    } else {
        Err(ToricError::BadShape { kind, d, n })
    }
}

/// Coordinates of the lattice: the base rays `e^k_i` and their indices.
struct Lattice {
    kind: FanKind,
    d: usize,
    n: usize,
    rank: usize,
}

impl Lattice {
    fn new(kind: FanKind, d: usize, n: usize) -> Self {
        let rank = match kind {
            FanKind::T => d * (n - 1) - 1,
            FanKind::P => d * (n - d - 2),
        };
        Lattice { kind, d, n, rank }
    }

    /// Labels carrying base rays: `1..n-1` for T, `d+2..n` for P.
    fn labels(&self) -> Vec<usize> {
        match self.kind {
            FanKind::T => (1..self.n).collect(),
            FanKind::P => (self.d + 2..=self.n).collect(),
        }
    }

    /// The base ray `e^k_i` (`k` in `1..=d`) in eliminated coordinates.
    fn base(&self, i: usize, k: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank];
        match self.kind {
            FanKind::T => {
                let idx = (i - 1) * self.d + (k - 1);
                if idx == self.rank {
                    v.iter_mut().for_each(|x| *x = -1);
                } else {
                    v[idx] = 1;
                }
            }
            FanKind::P => {
                let width = self.n - self.d - 2;
                let block = (k - 1) * width;
                if i == self.n {
                    v[block..block + width].iter_mut().for_each(|x| *x = -1);
                } else {
                    v[block + i - self.d - 2] = 1;
                }
            }
        }
        v
    }

    /// Labels of a heavy set that carry the cone of its center.
    fn cone_labels(&self, set: IndexSet) -> Vec<usize> {
        let pinned = match self.kind {
            FanKind::T => self.n,
            FanKind::P => self.d + 1,
        };
        set.iter().filter(|&i| i != pinned).collect()
    }

    /// Centers of the LM building set, largest first.
    fn centers(&self) -> Vec<IndexSet> {
        let pinned = match self.kind {
            FanKind::T => self.n,
            FanKind::P => self.d + 1,
        };
        let free = IndexSet::from_labels(self.labels());
        let mut out: Vec<IndexSet> = free
            .subsets()
            .filter(|s| !s.is_empty() && s.len() < free.len())
            .map(|s| s.union(IndexSet::from_labels([pinned])))
            .collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// The ray list: base rays followed by one sum per subset of size `1..`,
/// with duplicates removed.
pub fn lm_rays(kind: FanKind, d: usize, n: usize) -> Result<Vec<Vec<i64>>, ToricError> {
    check_shape(kind, d, n)?;
    let lat = Lattice::new(kind, d, n);
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for i in lat.labels() {
        for k in 1..=d {
            rays.push(lat.base(i, k));
        }
    }
    for set in lat.centers() {
        let v = sum_ray(&lat, set);
        if !rays.contains(&v) {
            rays.push(v);
        }
    }
    Ok(rays)
}

fn sum_ray(lat: &Lattice, set: IndexSet) -> Vec<i64> {
    let mut v = vec![0; lat.rank];
    for i in lat.cone_labels(set) {
        for k in 1..=lat.d {
            v = add(&v, &lat.base(i, k));
        }
    }
    v
}

/// Replaces every maximal cone containing `tau` by the cones joining `new`
/// to the facets of it opposite the rays of `tau`.
pub fn stellar_subdivide(fan: &mut Fan, tau: &[usize], ray: Vec<i64>) -> Result<usize, ToricError> {
    let containing: Vec<usize> = (0..fan.max_cones.len())
        .filter(|&c| tau.iter().all(|r| fan.max_cones[c].contains(r)))
        .collect();
    if containing.is_empty() {
        return Err(ToricError::MissingCone(tau.to_vec()));
    }
    let new = fan.rays.len();
    fan.rays.push(ray);
    let mut kept = Vec::with_capacity(fan.max_cones.len() + containing.len() * tau.len());
    let mut added = Vec::new();
    for (c, cone) in fan.max_cones.iter().enumerate() {
        if containing.binary_search(&c).is_err() {
            kept.push(cone.clone());
            continue;
        }
        for r in tau {
            let mut next: Vec<usize> = cone.iter().copied().filter(|x| x != r).collect();
            next.push(new);
            next.sort_unstable();
            added.push(next);
        }
    }
    kept.extend(added);
    fan.max_cones = kept;
    Ok(new)
}

fn base_fan(lat: &Lattice) -> Fan {
    let mut rays = Vec::new();
    let mut index = HashMap::new();
    for i in lat.labels() {
        for k in 1..=lat.d {
            index.insert((i, k), rays.len());
            rays.push(lat.base(i, k));
        }
    }
    let max_cones = match lat.kind {
        FanKind::T => {
            let all: Vec<usize> = (0..rays.len()).collect();
            (0..rays.len()).map(|skip| all.iter().copied().filter(|&r| r != skip).collect()).collect()
        }
        FanKind::P => {
            // one facet of the simplex fan of P^{n-d-2} per factor
            let labels = lat.labels();
            let mut cones: Vec<Vec<usize>> = vec![Vec::new()];
            for k in 1..=lat.d {
                let mut next = Vec::new();
                for cone in &cones {
                    for &skip in &labels {
                        let mut c = cone.clone();
                        c.extend(labels.iter().filter(|&&i| i != skip).map(|&i| index[&(i, k)]));
                        next.push(c);
                    }
                }
                cones = next;
            }
            cones.into_iter().map(|mut c| {
                c.sort_unstable();
                c
            }).collect()
        }
    };
    Fan { lattice_rank: lat.rank, rays, max_cones }
}

/// Fan of the LM model: the base fan subdivided at each center, largest first.
pub fn build_fan(kind: FanKind, d: usize, n: usize) -> Result<Fan, ToricError> {
    check_shape(kind, d, n)?;
    let lat = Lattice::new(kind, d, n);
    let mut fan = base_fan(&lat);
    let base_index = |i: usize, k: usize| -> usize {
        let pos = lat.labels().iter().position(|&l| l == i).expect("label carries base rays");
        pos * d + (k - 1)
    };
    for set in lat.centers() {
        let tau: Vec<usize> =
            lat.cone_labels(set).into_iter().flat_map(|i| (1..=d).map(move |k| (i, k))).map(|(i, k)| base_index(i, k)).collect();
        if tau.len() < 2 {
            continue;
        }
        stellar_subdivide(&mut fan, &tau, sum_ray(&lat, set))?;
    }
    Ok(fan)
}

impl Fan {
    pub fn validate_shape(&self) -> Result<(), ToricError> {
        for r in &self.rays {
            if r.len() != self.lattice_rank {
                return Err(ToricError::Malformed(format!("ray {r:?} has the wrong length")));
            }
        }
        for c in &self.max_cones {
            if c.iter().any(|&i| i >= self.rays.len()) {
                return Err(ToricError::Malformed(format!("cone {c:?} names a missing ray")));
            }
        }
        Ok(())
    }

    fn cone_matrix(&self, cone: &[usize]) -> Vec<Vec<i64>> {
        cone.iter().map(|&r| self.rays[r].clone()).collect()
    }

    /// Number of cones of each dimension `0..=rank`.
    pub fn f_vector(&self) -> Vec<u64> {
        let mut faces: HashSet<Vec<usize>> = HashSet::new();
        for cone in &self.max_cones {
            let k = cone.len();
            for mask in 0u64..(1 << k) {
                faces.insert((0..k).filter(|b| mask >> b & 1 == 1).map(|b| cone[b]).collect());
            }
        }
        let mut f = vec![0u64; self.lattice_rank + 1];
        for face in faces {
            if face.len() <= self.lattice_rank {
                f[face.len()] += 1;
            }
        }
        f
    }

    /// Plain-text export: `RAYS rxrank`, the rays, `CONES m`, the cones.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "RAYS {}x{}", self.rays.len(), self.lattice_rank);
        for r in &self.rays {
            let _ = writeln!(s, "{}", r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
        }
        let _ = writeln!(s, "CONES {}", self.max_cones.len());
        for c in &self.max_cones {
            let _ = writeln!(s, "{}", c.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Fan, ToricError> {
        let bad = |m: &str| ToricError::Malformed(m.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| bad("empty input"))?;
        let dims = head.strip_prefix("RAYS ").ok_or_else(|| bad("missing RAYS header"))?;
        let (r, rank) = dims.split_once(['x', '×']).ok_or_else(|| bad("RAYS header needs rxrank"))?;
        let r: usize = r.trim().parse().map_err(|_| bad("bad ray count"))?;
        let rank: usize = rank.trim().parse().map_err(|_| bad("bad rank"))?;
        let mut rays = Vec::with_capacity(r);
        for _ in 0..r {
            let l = lines.next().ok_or_else(|| bad("too few rays"))?;
            rays.push(
                l.split_whitespace().map(|x| x.parse::<i64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad(l))?,
            );
        }
        let head = lines.next().ok_or_else(|| bad("missing CONES header"))?;
        let m: usize = head
            .strip_prefix("CONES ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| bad("bad CONES header"))?;
        let mut max_cones = Vec::with_capacity(m);
        for _ in 0..m {
            let l = lines.next().ok_or_else(|| bad("too few cones"))?;
            let mut c =
                l.split_whitespace().map(|x| x.parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad(l))?;
            c.sort_unstable();
            max_cones.push(c);
        }
        let fan = Fan { lattice_rank: rank, rays, max_cones };
        fan.validate_shape()?;
        Ok(fan)
    }
}

/// Smoothness by unimodularity of every maximal cone; completeness by the
/// ridge condition plus exact membership of sign-pattern and random probes.
pub fn check_fan(fan: &Fan, seed: u64) -> Result<FanCheck, ToricError> {
    fan.validate_shape()?;
    let rank = fan.lattice_rank;
    let mut smooth = true;
    let mut full = true;
    let mut inverses: Vec<Vec<Vec<i64>>> = Vec::new();
    for cone in &fan.max_cones {
        let m = fan.cone_matrix(cone);
        let rat: linalg::Matrix = m.iter().map(|r| r.iter().map(|&x| rational::int(x)).collect()).collect();
        if linalg::rank(&rat) < cone.len() {
            return Err(ToricError::NotSimplicial(cone.clone()));
        }
        if cone.len() < rank {
            full = false;
            smooth &= minors_gcd_is_one(&m);
            continue;
        }
        let det = linalg::det_i64(&m);
        smooth &= det.abs() == 1.into();
        // columns of the inverse, scaled by |det|, give barycentric coordinates
        let inv = linalg::inverse(&linalg::transpose(&rat)).expect("full rank");
        let scale = rational::int(det.abs().to_i64().unwrap_or(i64::MAX));
        let scaled = inv
            .iter()
            .map(|row| row.iter().map(|x| (x * &scale).to_integer().to_i64().unwrap_or(0)).collect())
            .collect();
        inverses.push(scaled);
    }
    let complete = full && ridges_paired(fan) && probes_covered(&inverses, rank, seed);
    Ok(FanCheck { smooth, complete })
}

fn minors_gcd_is_one(m: &[Vec<i64>]) -> bool {
    let k = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut g = num_bigint::BigInt::zero();
    for choice in IndexSet::range(1, cols).subsets().filter(|s| s.len() == k) {
        let sub: Vec<Vec<i64>> = m.iter().map(|r| choice.iter().map(|c| r[c - 1]).collect()).collect();
        g = num_integer::gcd(g, linalg::det_i64(&sub));
        if g == 1.into() {
            return true;
        }
    }
    false
}

fn ridges_paired(fan: &Fan) -> bool {
    let mut count: HashMap<Vec<usize>, u32> = HashMap::new();
    for cone in &fan.max_cones {
        for skip in 0..cone.len() {
            let ridge: Vec<usize> = cone.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
            *count.entry(ridge).or_default() += 1;
        }
    }
    count.values().all(|&c| c == 2)
}

fn probes_covered(inverses: &[Vec<Vec<i64>>], rank: usize, seed: u64) -> bool {
    let covered = |v: &[i64]| {
        inverses.iter().any(|inv| {
            inv.iter().all(|row| row.iter().zip(v).map(|(a, b)| *a as i128 * *b as i128).sum::<i128>() >= 0)
        })
    };
    if rank <= 12 {
        for mask in 0u64..(1 << rank) {
            let v: Vec<i64> = (0..rank).map(|b| if mask >> b & 1 == 1 { 1 } else { -1 }).collect();
            if !covered(&v) {
                return false;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-1000..=1000)).collect();
        if !covered(&v) {
            return false;
        }
    }
    true
}

/// `Σ h_k q^k` with `h_k = Σ_j (-1)^{j-k} C(j,k) f_{rank-j}`.
pub fn h_polynomial(fan: &Fan) -> Result<PoincarePolynomial, ToricError> {
    fan.validate_shape()?;
    let rank = fan.lattice_rank;
    if fan.max_cones.iter().any(|c| c.len() != rank) || !ridges_paired(fan) {
        return Err(ToricError::NotSmoothComplete);
    }
    let f = fan.f_vector();
    let mut h = Vec::with_capacity(rank + 1);
    for k in 0..=rank {
        let mut s: i128 = 0;
        for j in k..=rank {
            let term = binomial(j as i128, k as i128) * f[rank - j] as i128;
            s += if (j - k) % 2 == 0 { term } else { -term };
        }
        if s < 0 {
            return Err(ToricError::NotSmoothComplete);
        }
        h.push(s as u64);
    }
    Ok(PoincarePolynomial::new(h))
}
