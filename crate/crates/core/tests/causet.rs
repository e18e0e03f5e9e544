use loopnet::causet::{
    build_causal_set_poset, build_circle, build_minkowski_lattice, is_pathwise_connected,
    orbit_and_stabilizer, validate_poset, CausalPoset, CausalSetSpec, DoubleConeSpec, ElemId,
    GeoMap, SymmetryAction, Q,
};
use loopnet::fixtures;
use loopnet::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cone(t: f64, x: f64, y: f64, z: f64, r: f64) -> DoubleConeSpec {
    DoubleConeSpec::from_f64([t, x, y, z], r)
}

#[test]
fn fixtures_are_valid_and_connected() {
    for (name, p) in [
        ("diamond", fixtures::diamond()),
        ("two towers", fixtures::two_towers()),
        ("minkowski", fixtures::minkowski()),
        ("circle", fixtures::circle12()),
        ("causal set", fixtures::causal_set7()),
        ("swap", fixtures::swap().0),
    ] {
        let report = validate_poset(&p);
        assert!(report.is_valid(), "{name}: {:?}", report.violations);
        assert!(report.pathwise_connected, "{name} not connected");
    }
}

#[test]
fn two_towers_relations() {
    let p = fixtures::two_towers();
    assert_eq!(p.len(), 11);
    let e = |l: &str| p.id(l).unwrap();
    assert!(p.perp(e("O1"), e("O2")));
    assert!(p.perp(e("x1"), e("o2b")));
    assert!(!p.perp(e("x1"), e("y1")));
    assert!(!p.leq(e("x1"), e("y1")) && !p.leq(e("y1"), e("x1")));
    for l in ["x1", "y1", "o1a", "o1b", "O1", "O2"] {
        assert!(p.leq(e(l), e("T")));
    }
    assert!(p.is_maximal(e("T")));
}

#[test]
fn injected_irreflexivity_violation() {
    let p = fixtures::diamond();
    let a = p.id("x").unwrap();
    let bad = p.with_perp(a, a, true);
    let report = validate_poset(&bad);
    assert!(report.has("irreflexive"));
    assert!(report.violations.iter().any(|v| v.elements == vec!["x".to_string()]));
}

#[test]
fn injected_stability_violation() {
    let p = fixtures::two_towers();
    let (x1, o1a, o2a) = (p.id("x1").unwrap(), p.id("o1a").unwrap(), p.id("o2a").unwrap());
    // o1a ⊥ o2a stays, x1 ⊥ o2a removed
    let bad = p.with_perp(x1, o2a, false);
    assert!(bad.perp(o1a, o2a));
    let report = validate_poset(&bad);
    assert!(report
        .violations
        .iter()
        .any(|v| v.axiom == "⊥-stability" && v.elements == vec!["x1".to_string(), "o2a".to_string()]));
}

#[test]
fn common_minorant_is_reported() {
    let labels = ["m", "a", "b"].map(String::from).to_vec();
    let p = CausalPoset::from_relations(labels, &[(0, 1), (0, 2)], &[(1, 2)]).unwrap();
    let report = validate_poset(&p);
    assert!(report.has("no-common-minorant"));
}

#[test]
fn pathwise_connectedness() {
    let d = fixtures::diamond();
    assert!(is_pathwise_connected(&d));
    assert!(!is_pathwise_connected(&d.disjoint_union(&d)));
    assert!(is_pathwise_connected(&fixtures::two_towers()));
}

#[test]
fn minkowski_builder_examples() {
    let p = build_minkowski_lattice(&[cone(0.0, 0.0, 0.0, 0.0, 2.0), cone(0.0, 0.0, 0.0, 0.0, 1.0)]).unwrap();
    assert!(p.leq(ElemId(1), ElemId(0)));
    assert!(!p.perp(ElemId(0), ElemId(1)));
    let p = build_minkowski_lattice(&[cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(0.0, 5.0, 0.0, 0.0, 1.0)]).unwrap();
    assert!(p.perp(ElemId(0), ElemId(1)));
    let p = build_minkowski_lattice(&[cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(3.0, 2.0, 0.0, 0.0, 1.0)]).unwrap();
    assert!(!p.perp(ElemId(0), ElemId(1)));
    assert_eq!(build_minkowski_lattice(&[]), Err(Error::EmptyPoset));
}

fn sample_in_cone(rng: &mut ChaCha8Rng, c: &DoubleConeSpec) -> [f64; 4] {
    let ctr = c.center_f64();
    let r = c.radius_f64();
    loop {
        let p = [0; 4].map(|_| rng.gen_range(-r..r));
        let q = [ctr[0] + p[0], ctr[1] + p[1], ctr[2] + p[2], ctr[3] + p[3]];
        if c.contains_point(&q) {
            return q;
        }
    }
}

fn causally_connected(p: &[f64; 4], q: &[f64; 4]) -> bool {
    let dt = (p[0] - q[0]).abs();
    let dx2 = (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2) + (p[3] - q[3]).powi(2);
    dt * dt >= dx2
}

/// Samples point pairs from both regions, half uniformly and half near
/// opposite time tips: no causally connected pair may appear when ⊥ holds,
/// and one must appear when it does not.
fn sampled_perp(a: &DoubleConeSpec, b: &DoubleConeSpec, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ca, cb) = (a.center_f64(), b.center_f64());
    let (ra, rb) = (a.radius_f64(), b.radius_f64());
    for i in 0..samples {
        let (p, q) = if i % 2 == 0 {
            (sample_in_cone(&mut rng, a), sample_in_cone(&mut rng, b))
        } else {
            let sign = if i % 4 == 1 { 1.0 } else { -1.0 };
            let mut p = ca;
            let mut q = cb;
            p[0] += sign * ra * rng.gen_range(0.9..0.999);
            q[0] -= sign * rb * rng.gen_range(0.9..0.999);
            (p, q)
        };
        assert!(a.contains_point(&p) && b.contains_point(&q));
        if causally_connected(&p, &q) {
            return false;
        }
    }
    true
}

#[test]
fn perp_predicate_matches_point_sampling() {
    let pairs = [
        (cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(0.0, 5.0, 0.0, 0.0, 1.0), true),
        (cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(3.0, 2.0, 0.0, 0.0, 1.0), false),
        (cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(1.0, 2.5, 0.0, 0.0, 1.0), false),
        (cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(0.0, 1.2, 1.2, 0.0, 1.0), false),
        (cone(0.0, 0.0, 0.0, 0.0, 1.0), cone(0.0, 1.5, 1.5, 0.0, 1.0), true),
    ];
    for (a, b, expect) in pairs {
        assert_eq!(a.spacelike_to(&b), expect);
        assert_eq!(sampled_perp(&a, &b, 10_000, 11), expect, "{a:?} {b:?}");
    }
    let p = fixtures::two_towers();
    for a in p.elements() {
        for b in p.elements() {
            if p.perp(a, b) {
                assert!(sampled_perp(p.cone(a).unwrap(), p.cone(b).unwrap(), 2_000, 5));
            }
        }
    }
}

#[test]
fn circle_examples() {
    let p = build_circle(6, 1..=2).unwrap();
    assert_eq!(p.len(), 12);
    let (a01, a34) = (p.id("[0,1)").unwrap(), p.id("[3,4)").unwrap());
    assert!(p.perp(a01, a34));
    let (a02, a12) = (p.id("[0,2)").unwrap(), p.id("[1,2)").unwrap());
    assert!(p.leq(a12, a02));
    assert!(!p.perp(a01, p.id("[1,2)").unwrap()));
    assert!(build_circle(3, 1..=1).is_err());
    assert!(build_circle(6, 0..=2).is_err());
    assert!(build_circle(6, 1..=6).is_err());
}

#[test]
fn causal_set_examples() {
    let spacelike = CausalSetSpec {
        points: vec![[Q::from(0), Q::from(0), Q::from(0), Q::from(0)], [Q::from(0), Q::from(1), Q::from(0), Q::from(0)]],
        seed: 0,
        max_subset_size: 1,
    };
    let p = build_causal_set_poset(&spacelike, 100).unwrap();
    assert!(p.perp(ElemId(0), ElemId(1)));
    let timelike = CausalSetSpec {
        points: vec![[Q::from(0), Q::from(0), Q::from(0), Q::from(0)], [Q::from(2), Q::from(1), Q::from(0), Q::from(0)]],
        seed: 0,
        max_subset_size: 1,
    };
    let p = build_causal_set_poset(&timelike, 100).unwrap();
    assert!(!p.perp(ElemId(0), ElemId(1)));
    let p = fixtures::causal_set7();
    assert_eq!(p.len(), 6 + 15);
    assert!(validate_poset(&p).is_valid());
    let big = CausalSetSpec::sprinkle(1, 20, 1.0, 3);
    assert!(matches!(build_causal_set_poset(&big, 100), Err(Error::PosetTooLarge { .. })));
}

#[test]
fn restriction() {
    let p = fixtures::two_towers();
    let o1 = p.id("O1").unwrap();
    let (sub, incl) = p.restrict(o1).unwrap();
    let mut labels: Vec<&str> = sub.labels().iter().map(|s| s.as_str()).collect();
    labels.sort();
    assert_eq!(labels, vec!["O1", "o1a", "o1b", "x1", "y1"]);
    assert!(incl.check(&sub, &p).is_empty());
    for a in sub.elements() {
        assert!(p.leq(incl.apply(a), o1));
        for b in sub.elements() {
            assert_eq!(sub.perp(a, b), p.perp(incl.apply(a), incl.apply(b)));
        }
    }
    let x1 = p.id("x1").unwrap();
    assert_eq!(p.restrict(x1).unwrap().0.len(), 1);
    assert!(p.restrict(ElemId(99)).is_err());
}

#[test]
fn orbits_and_stabilizers() {
    let c = build_circle(6, 1..=2).unwrap();
    let rot = SymmetryAction::cyclic_rotation(&c).unwrap();
    assert_eq!(rot.order(), 6);
    assert!(rot.validate(&c).is_empty());
    let (orbit, stab) = orbit_and_stabilizer(&rot, c.id("[0,2)").unwrap());
    assert_eq!(orbit.len(), 6);
    assert_eq!(stab, vec![rot.identity()]);

    let triv = SymmetryAction::trivial(&c);
    let o = c.id("[2,3)").unwrap();
    let (orbit, stab) = orbit_and_stabilizer(&triv, o);
    assert_eq!(orbit, vec![o]);
    assert_eq!(stab.len(), triv.order());

    let m = fixtures::minkowski();
    let act = fixtures::minkowski_symmetry(&m);
    assert_eq!(act.order(), 4);
    assert!(act.validate(&m).is_empty());
    for o in m.elements() {
        let (orbit, stab) = orbit_and_stabilizer(&act, o);
        assert_eq!(orbit.len() * stab.len(), act.order());
        for &g in &stab {
            for &h in &stab {
                assert!(stab.contains(&act.mul(g, h)));
            }
            assert!(stab.contains(&act.inv(g)));
        }
    }
}

#[test]
fn translation_group_on_periodic_arcs() {
    // rotations of a circle are the translations of the periodic line
    let c = build_circle(12, 1..=3).unwrap();
    let shift3 = SymmetryAction::from_geo_maps(&c, &[GeoMap::CircleShift { n: 12, k: 3 }]).unwrap();
    assert_eq!(shift3.order(), 4);
    for o in c.elements() {
        let (orbit, stab) = orbit_and_stabilizer(&shift3, o);
        assert_eq!(orbit.len() * stab.len(), 4);
    }
}

#[test]
fn invalid_actions_are_rejected() {
    let p = fixtures::two_towers();
    let shift = GeoMap::translation([Q::from(0), Q::from(1), Q::from(0), Q::from(0)]);
    assert!(SymmetryAction::from_geo_maps(&p, &[shift]).is_err());
    let d = fixtures::diamond();
    // swapping x with o is not order preserving
    let bad = SymmetryAction::from_permutations(&d, &[vec![ElemId(2), ElemId(1), ElemId(0), ElemId(3)]]).unwrap();
    assert!(!bad.validate(&d).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_cone_posets_satisfy_axioms(cones in proptest::collection::vec(
        (-4i64..4, -6i64..6, -6i64..6, 1i64..5), 1..12)) {
        let mut specs: Vec<DoubleConeSpec> = cones
            .iter()
            .map(|&(t, x, y, r)| DoubleConeSpec::new([Q::from(t), Q::from(x), Q::from(y), Q::from(0)], Q::from(r)))
            .collect();
        specs.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        specs.dedup();
        let p = build_minkowski_lattice(&specs).unwrap();
        let report = validate_poset(&p);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
        for o in p.elements() {
            for a in p.elements() {
                if p.perp(o, a) {
                    for x in p.elements() {
                        if p.leq(x, o) {
                            prop_assert!(p.perp(x, a));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn circle_posets_satisfy_axioms(n in 4u32..14, lo in 1u32..4, extra in 0u32..3) {
        let hi = (lo + extra).min(n - 1);
        prop_assume!(lo <= hi && lo < n);
        let p = build_circle(n, lo..=hi).unwrap();
        prop_assert!(validate_poset(&p).is_valid());
        let rot = SymmetryAction::cyclic_rotation(&p).unwrap();
        prop_assert!(rot.validate(&p).is_empty());
    }

    #[test]
    fn causal_sets_satisfy_axioms(seed in 0u64..1000, count in 2usize..7) {
        let spec = CausalSetSpec::sprinkle(seed, count, 1.0, 2);
        let p = build_causal_set_poset(&spec, 4096).unwrap();
        prop_assert!(validate_poset(&p).is_valid());
    }
}
