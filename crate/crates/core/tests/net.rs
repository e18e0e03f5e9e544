use std::collections::BTreeSet;
use std::time::Instant;

use loopnet::causet::{CausalPoset, ElemId, SymmetryAction};
use loopnet::fixtures;
use loopnet::loopgrp::{inverse, is_loop, Word};
use loopnet::net::{check_causality, check_isotony, check_net, fibre_generators, symmetry_on_net, Net};
use loopnet::quotient::{EngineConfig, QuotientEngine};
use loopnet::simplex::{tangent_simplices, Simplex1};
use loopnet::Error;

/// Every word over the local letters up to `cap`, filtered to reduced loops,
/// one per inverse pair.
fn brute_fibre(p: &CausalPoset, o: ElemId, cap: usize) -> BTreeSet<Word> {
    let letters: Vec<Simplex1> = tangent_simplices(p).into_iter().filter(|b| p.leq(b.support, o)).collect();
    let mut layer: Vec<Vec<Simplex1>> = vec![vec![]];
    let mut out = BTreeSet::new();
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            for &b in &letters {
                let mut v = w.clone();
                v.push(b);
                next.push(v);
            }
        }
        for v in &next {
            let w = Word::new(v.clone());
            if w.is_reduced() && is_loop(&w).is_some() {
                let inv = inverse(&w);
                out.insert(if inv < w { inv } else { w });
            }
        }
        layer = next;
    }
    out
}

#[test]
fn fibres_match_brute_force() {
    let p = fixtures::two_towers();
    for o in p.elements().filter(|&o| p.label(o) != "T") {
        for cap in 0..=3 {
            let f = fibre_generators(&p, o, cap);
            let expect: Vec<Word> = brute_fibre(&p, o, cap).into_iter().collect();
            assert_eq!(f.generators, expect, "{} cap {cap}", p.label(o));
        }
    }
}

#[test]
fn fibre_examples() {
    let p = fixtures::two_towers();
    let l = fixtures::two_tower_loops(&p);
    let o1 = p.id("O1").unwrap();
    let f = fibre_generators(&p, o1, 2);
    assert!(f.contains(&Word::new(l.p.clone())));
    assert!(f.contains(&Word::new(l.p.clone()).inverse()));
    // some generator is based at y1
    let y1 = p.id("y1").unwrap();
    assert!(f.generators.iter().any(|g| is_loop(g) == Some(y1)));
    assert!(f.generators.iter().all(|g| g.letters().iter().all(|b| p.leq(b.support, o1))));
    assert!(fibre_generators(&p, p.id("x1").unwrap(), 4).is_empty());
    let counts: Vec<usize> = (1..=4).map(|c| fibre_generators(&p, o1, c).len()).collect();
    assert_eq!(counts, vec![8, 20, 152, 828]);
}

#[test]
fn isotony() {
    let p = fixtures::two_towers();
    let (o1a, o1) = (p.id("o1a").unwrap(), p.id("O1").unwrap());
    assert_eq!(check_isotony(&p, &fibre_generators(&p, o1a, 4), o1), Ok(true));
    let o2 = p.id("O2").unwrap();
    assert!(matches!(check_isotony(&p, &fibre_generators(&p, o1, 2), o2), Err(Error::InvalidRange(_))));
}

#[test]
fn causality_between_towers() {
    let p = fixtures::two_towers();
    let engine = QuotientEngine::new(&p, EngineConfig::default());
    let (o1, o2) = (p.id("O1").unwrap(), p.id("O2").unwrap());
    let r = check_causality(&engine, &fibre_generators(&p, o1, 2), &fibre_generators(&p, o2, 2), None, 0.0).unwrap();
    assert_eq!(r.entries.len(), 400);
    assert!(r.holds());
    assert!(r.entries.iter().all(|e| e.steps == Some(1)));
    let same = check_causality(&engine, &fibre_generators(&p, o1, 2), &fibre_generators(&p, o1, 2), None, 0.0);
    assert_eq!(same, Err(Error::NotCausallyDisjoint));
}

#[test]
fn covariance_on_circle_rotations() {
    let p = fixtures::circle12();
    let act = SymmetryAction::cyclic_rotation(&p).unwrap();
    let net = Net::build(&p, 3, 100_000);
    let entries = symmetry_on_net(&net, &act);
    assert_eq!(entries.len(), act.order() * p.len());
    assert!(entries.iter().all(|e| e.bijective && e.composition));
    let id = act.identity();
    assert!(entries.iter().filter(|e| e.group_element == id).all(|e| e.image == e.base));
    assert!(net.fibres.iter().any(|f| !f.is_empty()));
}

#[test]
fn full_net_checks_on_fixtures() {
    for (name, p, act) in [
        ("two towers", fixtures::two_towers(), None),
        ("minkowski", fixtures::minkowski(), Some(())),
    ] {
        let t = Instant::now();
        let act = match act {
            None => fixtures::two_towers_symmetry(&p),
            Some(()) => fixtures::minkowski_symmetry(&p),
        };
        let net = Net::build(&p, 3, 50_000);
        let engine = QuotientEngine::new(&p, EngineConfig::default());
        let r = check_net(&net, &engine, &act);
        assert!(r.isotony_holds(), "{name}");
        assert!(r.causality_holds(), "{name}");
        assert!(r.covariance_holds(), "{name}");
        assert!(!r.causality.is_empty());
        println!("{name}: {} isotony, {} causality, {} covariance in {:?}", r.isotony.len(), r.causality.len(), r.covariance.len(), t.elapsed());
    }
}
