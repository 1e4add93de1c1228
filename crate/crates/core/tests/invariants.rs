mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wonderful_core::git::{is_stable, normalize, PointConfiguration};
use wonderful_core::rational::rat;
use wonderful_core::trees::{random_tree, TreeKind};
use wonderful_core::weights::git_weights;
use wonderful_core::{ambient_poincare, factors, heavy_sets, run, AmbientDescriptor, IndexSet, OrderSpec, WeightVector};

fn sixths(n: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(1i64..=6, n)
}

fn wv(d: usize, v: &[i64]) -> WeightVector {
    WeightVector::new(d, v.iter().map(|&k| rat(k, 6)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factors_are_idempotent_and_order_free(n in 3usize..=7, raw in proptest::collection::vec(any::<u64>(), 1..5)) {
        let amb = AmbientDescriptor::fm(1, n).unwrap();
        let u = amb.universe().mask();
        let sets: Vec<IndexSet> = raw.iter().map(|&m| IndexSet::from_mask(m & u)).filter(|s| s.len() >= 2).collect();
        prop_assume!(!sets.is_empty());
        let once = factors(amb, &sets).unwrap();
        prop_assert_eq!(factors(amb, &once.blocks).unwrap(), once.clone());
        let mut rev = sets.clone();
        rev.reverse();
        prop_assert_eq!(factors(amb, &rev).unwrap(), once);
    }

    #[test]
    fn heavy_sets_shrink_with_weights(d in 1usize..=2, a in sixths(5), cut in sixths(5)) {
        let b: Vec<i64> = a.iter().zip(&cut).map(|(x, c)| (*x).min(*c)).collect();
        let amb = AmbientDescriptor::fm(d, 5).unwrap();
        let ha = heavy_sets(&wv(d, &a), amb).unwrap().elements;
        let hb = heavy_sets(&wv(d, &b), amb).unwrap().elements;
        prop_assert!(hb.iter().all(|s| ha.contains(s)));
    }

    #[test]
    fn betti_laws(d in 1usize..=2, n in 3usize..=5, a in sixths(5), cut in sixths(5)) {
        let a = &a[..n];
        let b: Vec<i64> = a.iter().zip(&cut).map(|(x, c)| (*x).min(*c)).collect();
        prop_assume!(b.iter().sum::<i64>() > 6);
        let amb = AmbientDescriptor::t(d, n).unwrap();
        let ra = run(amb, &wv(d, a), &OrderSpec::AscendingDimension).unwrap();
        let rb = run(amb, &wv(d, &b), &OrderSpec::AscendingDimension).unwrap();
        for r in [&ra, &rb] {
            prop_assert!(r.total.is_palindromic());
            prop_assert_eq!(r.total.degree(), amb.dim());
            let big = r.centers.iter().filter(|c| c.codim >= 2).count() as u64;
            prop_assert_eq!(r.b2, ambient_poincare(amb).coeff(1) + big);
        }
        prop_assert!((0..ra.total.coeffs().len()).all(|k| rb.total.coeff(k) <= ra.total.coeff(k)));
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>(), d in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, TreeKind::Rooted, &WeightVector::ones(d, 4)).unwrap();
        let c = t.canonicalize().unwrap();
        prop_assert_eq!(c.canonicalize().unwrap(), c);
    }

    #[test]
    fn normalize_ignores_the_group(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = git_weights(2, 6).unwrap();
        let c: PointConfiguration = loop {
            let c = common::random_configuration(&mut rng, 2, 6);
            if is_stable(&c, &w.entries).unwrap().stable {
                break c;
            }
        };
        let g = common::random_invertible(&mut rng, 3);
        prop_assert_eq!(normalize(&c.transform(&g).unwrap()).unwrap(), normalize(&c).unwrap());
    }
}
