mod common;

use std::collections::BTreeSet;

use loopnet::causet::ElemId;
use loopnet::fixtures;
use loopnet::loopgrp::{
    apply_morphism, in_loop_group, inverse, is_loop, is_path, multiply, parse_word, reduce, support,
    word_perp, Generator, PathEnds, Word,
};
use loopnet::simplex::{tangent_simplices, Simplex1};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn paper_reduction_example() {
    let p = fixtures::two_towers();
    let loops = fixtures::two_tower_loops(&p);
    let (b2, b1) = (loops.p[0], loops.p[1]);
    let b = loops.p_prime[1];
    let w = Word::new(vec![b2, b, b.opposite(), b1]);
    assert_eq!(reduce(&w), Word::new(vec![b2, b1]));
    assert_eq!(support(&w), BTreeSet::from([b2.support, b1.support]));
    assert_eq!(reduce(&Word::new(vec![b, b.opposite()])), Word::empty());
    assert!(support(&Word::empty()).is_empty());
    assert_eq!(inverse(&Word::new(vec![b2, b1])), Word::new(vec![b1.opposite(), b2.opposite()]));
    assert_eq!(multiply(&Word::letter(b2), &Word::letter(b1)), Word::new(vec![b2, b1]));
}

#[test]
fn reduction_matches_fixpoint_oracle() {
    let p = fixtures::two_towers();
    let mut letters = tangent_simplices(&p);
    letters.truncate(6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2_000 {
        let len = rand::Rng::gen_range(&mut rng, 0..=200);
        let w = common::random_word(&mut rng, &letters, len);
        let r = reduce(&w);
        assert_eq!(r, common::reduce_fixpoint(&w));
        assert!(r.is_reduced());
        assert_eq!(reduce(&r), r);
        assert_eq!(support(&w), support(&r));
        assert!(reduce(&multiply(&w, &inverse(&w))).is_empty());
    }
}

#[test]
fn paths_and_loops() {
    let p = fixtures::two_towers();
    let l = fixtures::two_tower_loops(&p);
    let (x1, y1) = (p.id("x1").unwrap(), p.id("y1").unwrap());
    let pw = Word::new(l.p.clone());
    assert_eq!(is_path(&pw), Some(PathEnds::Span { start: x1, end: x1 }));
    assert_eq!(is_loop(&pw), Some(x1));
    assert_eq!(is_loop(&Word::new(l.p_prime.clone())), Some(y1));
    let half = Word::letter(l.p[1]);
    assert_eq!(is_path(&half), Some(PathEnds::Span { start: x1, end: y1 }));
    assert_eq!(is_loop(&half), None);
    let broken = Word::new(vec![l.p[1], l.p[1]]);
    assert_eq!(is_path(&broken), None);
    assert_eq!(is_path(&Word::empty()), Some(PathEnds::Everywhere));
    // a reduced path keeps its endpoints
    let w = Word::new(vec![l.p[0], l.p_prime[0], l.p_prime[0].opposite(), l.p[1]]);
    assert!(is_path(&w).is_some());
    assert_eq!(is_path(&reduce(&w)), is_path(&w));
}

#[test]
fn loop_images_under_inclusion() {
    let p = fixtures::two_towers();
    let o1 = p.id("O1").unwrap();
    let (sub, incl) = p.restrict(o1).unwrap();
    let lp = parse_word(&sub, "(o1b;x1,y1) (o1a;y1,x1)").unwrap();
    let img = apply_morphism(&incl, &lp);
    assert_eq!(img, Word::new(fixtures::two_tower_loops(&p).p));
    assert_eq!(is_loop(&img), Some(incl.apply(is_loop(&lp).unwrap())));
}

#[test]
fn loop_group_membership() {
    let p = fixtures::two_towers();
    let l = fixtures::two_tower_loops(&p);
    let pq = multiply(&Word::new(l.p.clone()), &Word::new(l.q.clone()));
    assert_eq!(in_loop_group(&pq), Some(vec![2, 2]));
    let single = Word::letter(l.p[1]);
    assert_eq!(in_loop_group(&single), None);
    assert_eq!(in_loop_group(&Word::empty()), Some(vec![]));
}

#[test]
fn loop_dp_matches_partition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut members = 0;
    for (k, p) in [fixtures::two_towers(), fixtures::diamond()].iter().enumerate() {
        for _ in 0..500 {
            let len = rand::Rng::gen_range(&mut rng, 1..=12);
            let w = common::random_loop_product(&mut rng, p, len, k == 0);
            let dp = in_loop_group(&w);
            assert_eq!(dp.is_some(), common::partition_oracle(&w), "{w:?}");
            if let Some(blocks) = dp {
                members += 1;
                assert_eq!(blocks.iter().sum::<usize>(), reduce(&w).len());
                assert!(in_loop_group(&reduce(&w)).is_some());
            }
        }
    }
    assert!(members > 100);
}

#[test]
fn causal_disjointness_of_words() {
    let p = fixtures::two_towers();
    let l = fixtures::two_tower_loops(&p);
    let (pw, qw, pp) = (Word::new(l.p), Word::new(l.q), Word::new(l.p_prime));
    assert_eq!(word_perp(&p, &pw, &qw), Some((p.id("O1").unwrap(), p.id("O2").unwrap())));
    assert_eq!(word_perp(&p, &qw, &pw), Some((p.id("O2").unwrap(), p.id("O1").unwrap())));
    assert_eq!(word_perp(&p, &pw, &pp), None);
    assert_eq!(word_perp(&p, &pw, &pw), None);
    // invariance under reduction of either side
    let padded = multiply(&multiply(&pw, &pp), &inverse(&pp));
    assert_eq!(word_perp(&p, &padded, &qw).is_some(), word_perp(&p, &pw, &qw).is_some());
}

#[test]
fn generators_use_canonical_section() {
    let p = fixtures::two_towers();
    for b in tangent_simplices(&p) {
        let g = Generator::of(b);
        assert_eq!(g.letter(), b);
        assert_eq!(Generator::of(b.opposite()).simplex, g.simplex);
        if b.d0 != b.d1 {
            assert_ne!(Generator::of(b.opposite()).inverted, g.inverted);
        } else {
            assert!(g.is_involution());
        }
    }
}

#[test]
fn literal_round_trip() {
    let p = fixtures::minkowski();
    let l = fixtures::site_loops(&p, 1, 0);
    let w = Word::new(l.p_prime);
    let text = loopnet::loopgrp::format_word(&p, &w);
    assert_eq!(parse_word(&p, &text).unwrap(), w);
    let c = fixtures::circle12();
    let w = parse_word(&c, "([0,3);[0,1),[2,3)) ~([0,3);[0,1),[2,3))").unwrap();
    assert!(reduce(&w).is_empty());
    assert!(parse_word(&c, "([0,3);[0,1),[5,6))").is_err());
    assert!(parse_word(&c, "(nope;a,b)").is_err());
}

fn letters_strategy() -> (loopnet::causet::CausalPoset, Vec<Simplex1>) {
    let p = fixtures::two_towers();
    let letters = tangent_simplices(&p);
    (p, letters)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn free_group_axioms(a in proptest::collection::vec(0usize..1000, 0..20),
                         b in proptest::collection::vec(0usize..1000, 0..20),
                         c in proptest::collection::vec(0usize..1000, 0..20)) {
        let (_, letters) = letters_strategy();
        let mk = |v: &[usize]| Word::new(v.iter().map(|i| letters[i % letters.len()]).collect());
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        prop_assert_eq!(reduce(&multiply(&multiply(&a, &b), &c)), reduce(&multiply(&a, &multiply(&b, &c))));
        prop_assert_eq!(reduce(&multiply(&a, &Word::empty())), reduce(&a));
        prop_assert_eq!(reduce(&multiply(&Word::empty(), &a)), reduce(&a));
        prop_assert!(reduce(&multiply(&inverse(&a), &a)).is_empty());
        prop_assert_eq!(reduce(&multiply(&reduce(&a), &reduce(&b))), reduce(&multiply(&a, &b)));
    }

    #[test]
    fn morphisms_commute_with_reduction(v in proptest::collection::vec(0usize..1000, 0..30), g in 0usize..2) {
        let (p, letters) = letters_strategy();
        let w = Word::new(v.iter().map(|i| letters[i % letters.len()]).collect());
        let act = fixtures::two_towers_symmetry(&p);
        let psi = act.morphism(g);
        prop_assert_eq!(reduce(&apply_morphism(&psi, &w)), apply_morphism(&psi, &reduce(&w)));
        let twice = psi.then(&psi).unwrap();
        prop_assert_eq!(apply_morphism(&twice, &w), apply_morphism(&psi, &apply_morphism(&psi, &w)));
        if let Some(o) = is_loop(&w) {
            prop_assert_eq!(is_loop(&apply_morphism(&psi, &w)), Some(psi.apply(o)));
        }
        // injective on reduced words: the half turn is an involution
        prop_assert_eq!(apply_morphism(&twice, &w), w);
    }

    #[test]
    fn word_perp_is_symmetric(v in proptest::collection::vec(0usize..1000, 0..8),
                              u in proptest::collection::vec(0usize..1000, 0..8)) {
        let (p, letters) = letters_strategy();
        let a = Word::new(v.iter().map(|i| letters[i % letters.len()]).collect());
        let b = Word::new(u.iter().map(|i| letters[i % letters.len()]).collect());
        let ab = word_perp(&p, &a, &b).map(|(x, y)| (y, x));
        let ba = word_perp(&p, &b, &a);
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if !a.is_empty() && !reduce(&a).is_empty() {
            prop_assert!(word_perp(&p, &a, &a).is_none());
        }
        let _ = ElemId(0);
    }
}
