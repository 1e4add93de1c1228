mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use wonderful_core::rational::{int, parse_with_epsilon, rat};
use wonderful_core::trees::{profile_json, random_tree, ChildId, Screen, StableTree, TreeError, TreeKind};
use wonderful_core::{IndexSet, Rational, WeightVector};

fn set(v: &[usize]) -> IndexSet {
    IndexSet::from_labels(v.iter().copied())
}

fn pos(v: &[i64]) -> Vec<Rational> {
    common::ints(v)
}

fn weights(d: usize, raw: &[&str], eps: &Rational) -> WeightVector {
    WeightVector::new(d, raw.iter().map(|s| parse_with_epsilon(s, eps).unwrap()).collect()).unwrap()
}

fn screen(entries: &[(ChildId, &[i64])]) -> Screen {
    Screen::from_entries(entries.iter().map(|(c, p)| (*c, pos(p))))
}

use ChildId::{Mark as M, Node as N};

fn ex_sdg(first_screen: Screen) -> StableTree {
    let eps = rat(1, 100);
    let a = weights(2, &["1/4+e", "1/4+e", "1/4+e", "1/4+e", "1/2+e", "1/2+e"], &eps);
    let mut screens = BTreeMap::new();
    screens.insert(set(&[1, 2, 3, 4, 5, 6]), screen(&[(N(set(&[1, 2, 3, 4])), &[0, 0]), (N(set(&[5, 6])), &[1, 1])]));
    screens.insert(set(&[1, 2, 3, 4]), first_screen);
    screens.insert(set(&[5, 6]), screen(&[(M(5), &[0, 0]), (M(6), &[2, 1])]));
    StableTree::new(
        TreeKind::Rooted,
        a,
        vec![set(&[1, 2, 3, 4, 5, 6]), set(&[1, 2, 3, 4]), set(&[5, 6])],
        screens,
        Screen::default(),
    )
    .unwrap()
}

#[test]
fn coincident_pairs_inside_a_screen_are_accepted() {
    let t = ex_sdg(screen(&[(M(1), &[0, 0]), (M(2), &[0, 0]), (M(3), &[1, 0]), (M(4), &[1, 0])]));
    assert!(t.validate().unwrap().accepted);
    assert_eq!(t.collection(), &[set(&[1, 2, 3, 4]), set(&[5, 6])]);
}

#[test]
fn screen_with_one_position_is_rejected() {
    let t = ex_sdg(screen(&[(M(1), &[3, 3]), (M(2), &[3, 3]), (M(3), &[3, 3]), (M(4), &[3, 3])]));
    let r = t.validate().unwrap();
    assert!(!r.accepted);
    assert_eq!(r.component.as_deref(), Some("[1,2,3,4]"));
}

#[test]
fn heavy_coincidence_at_root_is_rejected() {
    let a = WeightVector::ones(2, 4);
    let root = screen(&[(M(1), &[0, 0]), (M(2), &[0, 0]), (M(3), &[1, 0]), (M(4), &[0, 1])]);
    let t = StableTree::new(TreeKind::Rooted, a, vec![], BTreeMap::new(), root).unwrap();
    let r = t.validate().unwrap();
    assert!(!r.accepted);
    assert_eq!(r.component.as_deref(), Some("root"));
}

#[test]
fn dangling_and_mismatched_input_are_errors() {
    let a = WeightVector::ones(2, 3);
    let root = screen(&[(M(1), &[0, 0]), (M(2), &[1, 0]), (N(set(&[3, 4])), &[0, 1])]);
    let t = StableTree::new(TreeKind::Rooted, a.clone(), vec![], BTreeMap::new(), root).unwrap();
    assert!(matches!(t.validate(), Err(TreeError::Dangling(_))));
    let root = screen(&[(M(1), &[0]), (M(2), &[1, 0]), (M(3), &[0, 1])]);
    let err = StableTree::new(TreeKind::Rooted, a, vec![], BTreeMap::new(), root).unwrap_err();
    assert!(matches!(err, TreeError::DimensionMismatch { .. }));
}

#[test]
fn screen_normal_form() {
    let s = screen(&[(M(1), &[3, 3]), (M(2), &[5, 7])]).canonical();
    assert_eq!(s, screen(&[(M(1), &[0, 0]), (M(2), &[1, 2])]));
}

fn figure_tree() -> (StableTree, Rational) {
    let eps = rat(1, 100);
    let a = weights(2, &["1", "1/3+e", "1/3+e", "1", "1", "1"], &eps);
    let mut screens = BTreeMap::new();
    screens.insert(set(&[1, 2, 3, 4, 5]), screen(&[(N(set(&[1, 2, 3])), &[0, 0]), (N(set(&[4, 5])), &[2, -1])]));
    screens.insert(set(&[1, 2, 3]), screen(&[(M(1), &[0, 0]), (M(2), &[1, 0]), (M(3), &[0, 1])]));
    screens.insert(set(&[4, 5]), screen(&[(M(4), &[0, 0]), (M(5), &[1, 1])]));
    let root = screen(&[(N(set(&[1, 2, 3, 4, 5])), &[0, 0]), (M(6), &[1, 0])]);
    let t = StableTree::new(
        TreeKind::Rooted,
        a,
        vec![set(&[1, 2, 3]), set(&[4, 5]), set(&[1, 2, 3, 4, 5])],
        screens,
        root,
    )
    .unwrap();
    (t, eps)
}

#[test]
fn reduction_chain_of_the_figure() {
    let (t, eps) = figure_tree();
    assert!(t.validate().unwrap().accepted);
    let b = weights(2, &["1/5+e", "1/5+e", "1/5+e", "1/5+e", "1/5+e", "1"], &eps);
    let c = weights(2, &["1/6+e"; 6], &eps);
    let tb = t.reduce(&b).unwrap();
    assert_eq!(tb.collection(), &[set(&[1, 2, 3, 4, 5])]);
    let s = tb.screen(set(&[1, 2, 3, 4, 5])).unwrap();
    assert_eq!(s.distinct_positions(), 2);
    assert_eq!(s.get(M(1)), s.get(M(3)));
    assert_eq!(s.get(M(4)), s.get(M(5)));
    let tc = tb.reduce(&c).unwrap();
    assert!(tc.collection().is_empty());
    let root = tc.root();
    assert_eq!(root.distinct_positions(), 2);
    assert!((2..=5).all(|l| root.get(M(l)) == root.get(M(1))));
    assert_ne!(root.get(M(6)), root.get(M(1)));
    assert_eq!(t.reduce(&c).unwrap().canonicalize().unwrap(), tc.canonicalize().unwrap());
}

fn chain_tree() -> StableTree {
    let mut screens = BTreeMap::new();
    screens.insert(set(&[1, 2]), screen(&[(M(1), &[0, 0]), (M(2), &[1, 0])]));
    screens.insert(set(&[1, 2, 3]), screen(&[(N(set(&[1, 2])), &[0, 0]), (M(3), &[0, 1])]));
    let root = screen(&[(N(set(&[1, 2, 3])), &[0, 0]), (M(4), &[1, 1])]);
    StableTree::new(TreeKind::Rooted, WeightVector::ones(2, 4), vec![set(&[1, 2]), set(&[1, 2, 3])], screens, root)
        .unwrap()
}

#[test]
fn forgetting_contracts_the_end_components() {
    let t = chain_tree();
    assert!(t.validate().unwrap().accepted);
    let last = t.forget(set(&[1, 2, 3])).unwrap();
    assert_eq!(last.n(), 3);
    assert_eq!(last.collection(), &[set(&[1, 2])]);
    assert_eq!(last.root().positions().keys().copied().collect::<Vec<_>>(), vec![N(set(&[1, 2])), M(3)]);
    let first = t.forget(set(&[2, 3, 4])).unwrap();
    assert_eq!(first.collection(), &[set(&[1, 2])]);
    let s = first.screen(set(&[1, 2])).unwrap();
    assert_eq!(s.positions().keys().copied().collect::<Vec<_>>(), vec![M(1), M(2)]);
    assert_eq!(t.forget(set(&[1, 2, 3, 4])).unwrap(), t);
}

#[test]
fn framed_forget_needs_the_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = random_tree(&mut rng, TreeKind::Framed, &WeightVector::ones(2, 6)).unwrap();
    assert!(matches!(t.forget(set(&[2, 3, 4, 5, 6])), Err(TreeError::FrameMissing(3))));
}

#[test]
fn collinear_configurations_share_pair_profiles() {
    let a = WeightVector::ones(2, 3);
    let mk = |x: i64| {
        let root = screen(&[(M(1), &[0, 0]), (M(2), &[1, 1]), (M(3), &[x, x])]);
        StableTree::new(TreeKind::Rooted, a.clone(), vec![], BTreeMap::new(), root).unwrap()
    };
    let (s, t) = (mk(3), mk(5));
    assert_ne!(s.canonicalize().unwrap(), t.canonicalize().unwrap());
    assert_eq!(s.forgetful_profile(2).unwrap(), t.forgetful_profile(2).unwrap());
    assert_ne!(s.forgetful_profile(3).unwrap(), t.forgetful_profile(3).unwrap());
}

const SHAPES: [(usize, usize); 4] = [(1, 4), (2, 3), (2, 4), (3, 3)];

fn grid_weights(rng: &mut ChaCha8Rng, d: usize, n: usize) -> WeightVector {
    let grid = [rat(1, 2), rat(2, 3), int(1)];
    WeightVector::new(d, (0..n).map(|_| grid[rng.gen_range(0..3)].clone()).collect()).unwrap()
}

#[test]
fn corpus_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for &(d, n) in &SHAPES {
        for _ in 0..40 {
            let a = grid_weights(&mut rng, d, n);
            let t = random_tree(&mut rng, TreeKind::Rooted, &a).unwrap();
            let c = t.canonicalize().unwrap();
            assert_eq!(c.canonicalize().unwrap(), c);
            assert_eq!(StableTree::from_json(&c.to_json(), &rat(1, 1000)).unwrap(), c);
            assert!(wonderful_core::is_nested(c.collection()));
            assert!(c.collection().iter().all(|&s| a.is_heavy(s)));
            assert_eq!(t.reduce(&a).unwrap().canonicalize().unwrap(), c);
            let full = a.universe();
            assert_eq!(t.forget(full).unwrap().canonicalize().unwrap(), c);
        }
    }
}

#[test]
fn homothety_leaves_canonical_form_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let t = random_tree(&mut rng, TreeKind::Rooted, &WeightVector::ones(2, 4)).unwrap();
        let c = rat(rng.gen_range(1..=7), rng.gen_range(1..=5)) * int(if rng.gen_bool(0.5) { 1 } else { -1 });
        let v = vec![rat(rng.gen_range(-9..=9), 2), rat(rng.gen_range(-9..=9), 3)];
        let moved = StableTree::new(
            TreeKind::Rooted,
            t.weights().clone(),
            t.collection().to_vec(),
            t.collection().iter().map(|&s| (s, t.screen(s).unwrap().affine_image(&c, &v))).collect(),
            t.root().affine_image(&c, &v),
        )
        .unwrap();
        assert_eq!(moved.canonicalize().unwrap(), t.canonicalize().unwrap());
    }
}

#[test]
fn composition_and_forget_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for &(d, n) in &SHAPES {
        for _ in 0..25 {
            let a = WeightVector::ones(d, n);
            let t = random_tree(&mut rng, TreeKind::Rooted, &a).unwrap();
            let b = loop {
                let b = grid_weights(&mut rng, d, n);
                if b.total() > int(1) {
                    break b;
                }
            };
            let c = loop {
                let c = WeightVector::new(
                    d,
                    b.entries().iter().map(|x| if rng.gen_bool(0.5) { x * rat(3, 4) } else { x.clone() }).collect(),
                )
                .unwrap();
                if c.total() > int(1) {
                    break c;
                }
            };
            let tb = t.reduce(&b).unwrap();
            assert!(tb.validate().unwrap().accepted);
            assert_eq!(tb.reduce(&c).unwrap().canonicalize().unwrap(), t.reduce(&c).unwrap().canonicalize().unwrap());
            let r = IndexSet::range(1, n - 1);
            let r2 = IndexSet::range(2, n - 1);
            if r2.len() >= 2 {
                let once = t.forget(r).unwrap().forget(r2.relabel_within(r)).unwrap();
                assert_eq!(once.canonicalize().unwrap(), t.forget(r2).unwrap().canonicalize().unwrap());
            }
        }
    }
}

#[test]
fn framed_trees_canonicalize_through_the_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for &(d, n) in &[(1, 5), (2, 6)] {
        for _ in 0..15 {
            let t = random_tree(&mut rng, TreeKind::Framed, &WeightVector::ones(d, n)).unwrap();
            let c = t.canonicalize().unwrap();
            assert_eq!(c.canonicalize().unwrap(), c);
            let g = common::random_invertible(&mut rng, d + 1);
            let root = Screen::from_entries(t.root().positions().iter().map(|(&k, p)| {
                (k, wonderful_core::linalg::mat_vec(&g, p))
            }));
            let moved = StableTree::new(
                TreeKind::Framed,
                t.weights().clone(),
                t.collection().to_vec(),
                t.collection().iter().map(|&s| (s, t.screen(s).unwrap().clone())).collect(),
                root,
            )
            .unwrap();
            assert_eq!(moved.canonicalize().unwrap(), c);
        }
    }
}

#[test]
fn profiles_separate_the_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for &(d, n) in &SHAPES {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for _ in 0..30 {
            let t = random_tree(&mut rng, TreeKind::Rooted, &WeightVector::ones(d, n)).unwrap();
            let c = t.canonicalize().unwrap().to_json().to_string();
            let p = profile_json(&t.forgetful_profile(3).unwrap()).to_string();
            if let Some(prev) = seen.insert(p, c.clone()) {
                assert_eq!(prev, c);
            }
        }
    }
}
