use loopnet::causet::{CausalPoset, ElemId};
use loopnet::fixtures;
use loopnet::simplex::{
    degeneracy0, enumerate_1simplices, enumerate_2simplices, morphism_image, tangent_simplices,
    Simplex1, Simplex2, SimplexClass,
};

fn s(p: &CausalPoset, sup: &str, d0: &str, d1: &str) -> Simplex1 {
    Simplex1::new(p.id(sup).unwrap(), p.id(d0).unwrap(), p.id(d1).unwrap())
}

#[test]
fn diamond_classification() {
    let p = fixtures::diamond();
    let all = enumerate_1simplices(&p);
    assert_eq!(all.len(), 20);
    assert_eq!(s(&p, "o", "x", "y").classify(&p), SimplexClass::Tangent);
    assert_eq!(s(&p, "o", "o", "x").classify(&p), SimplexClass::Nerve);
    assert_eq!(s(&p, "o", "x", "o").classify(&p), SimplexClass::ReversedNerve);
    let t = all.iter().filter(|(_, c)| c.is_tangent()).count();
    let n = all.iter().filter(|(_, c)| c.is_nerve()).count();
    let r = all.iter().filter(|(_, c)| *c == SimplexClass::ReversedNerve).count();
    assert_eq!(t + n + r, 20);
    // under o: (x,x) (x,y) (y,x) (y,y) are tangent; nerve: (o,o) (o,x) (o,y)
    assert_eq!((t, n, r), (8, 8, 4));
}

#[test]
fn opposite_is_an_involution_preserving_tangency() {
    for p in [fixtures::diamond(), fixtures::two_towers(), fixtures::circle12()] {
        for (b, c) in enumerate_1simplices(&p) {
            assert_eq!(b.opposite().opposite(), b);
            assert_eq!(b.opposite().support, b.support);
            if c.is_tangent() {
                assert!(b.opposite().is_tangent(&p));
            }
            if c == SimplexClass::Nerve {
                assert_eq!(b.opposite().classify(&p), SimplexClass::ReversedNerve);
            }
        }
    }
    let p = fixtures::diamond();
    assert_eq!(s(&p, "o", "x", "y").opposite(), s(&p, "o", "y", "x"));
}

#[test]
fn degeneracies() {
    let p = fixtures::diamond();
    let x = p.id("x").unwrap();
    let sx = degeneracy0(x);
    assert_eq!(sx, Simplex1::new(x, x, x));
    assert_eq!(sx.classify(&p), SimplexClass::Degenerate);
    assert!(sx.is_nerve(&p));
    assert_eq!(sx.opposite(), sx);
}

/// Independent enumeration straight from the definition of a 2-simplex.
fn brute_2simplices(p: &CausalPoset) -> Vec<(Simplex2, bool)> {
    let els: Vec<ElemId> = p.elements().collect();
    let mut out = Vec::new();
    for &c in &els {
        for &s0 in &els {
            for &s1 in &els {
                for &s2 in &els {
                    for &v0 in &els {
                        for &v1 in &els {
                            for &v2 in &els {
                                let f0 = Simplex1::new(s0, v2, v1);
                                let f1 = Simplex1::new(s1, v2, v0);
                                let f2 = Simplex1::new(s2, v1, v0);
                                if let Ok(t) = Simplex2::new(p, c, f0, f1, f2) {
                                    let chain = p.leq(v0, v1) && p.leq(v1, v2) && v2 == c;
                                    let faces = [f0, f1, f2].iter().all(|f| f.d0 == f.support && p.leq(f.d1, f.d0));
                                    out.push((t, chain && faces));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn two_simplices_match_brute_force() {
    let p = fixtures::diamond();
    let mut fast = enumerate_2simplices(&p, usize::MAX);
    assert!(!fast.truncated);
    fast.simplices.sort();
    let brute = brute_2simplices(&p);
    assert_eq!(fast.simplices, brute);
    let (x, y) = (p.id("x").unwrap(), p.id("y").unwrap());
    let xy_non_nerve = brute
        .iter()
        .filter(|(c, nerve)| {
            let v = c.vertices();
            !nerve && v.contains(&x) && v.contains(&y) && v.iter().all(|a| *a == x || *a == y)
        })
        .count();
    assert_eq!(xy_non_nerve, 24);
    let capped = enumerate_2simplices(&p, 10);
    assert!(capped.truncated);
    assert_eq!(capped.simplices.len(), 10);
}

#[test]
fn two_simplex_examples() {
    let p = fixtures::two_towers();
    let e = |l: &str| p.id(l).unwrap();
    let (x, a, o) = (e("x1"), e("o1a"), e("O1"));
    let nerve = Simplex2::new(&p, o, Simplex1::new(o, o, a), Simplex1::new(o, o, x), Simplex1::new(a, a, x)).unwrap();
    assert!(nerve.is_nerve(&p));
    let y = e("y1");
    let c = Simplex2::new(&p, o, Simplex1::new(o, y, x), Simplex1::new(o, y, x), Simplex1::new(x, x, x)).unwrap();
    assert!(!c.is_nerve(&p));
    // mismatched vertices
    assert!(Simplex2::new(&p, o, Simplex1::new(o, y, x), Simplex1::new(o, x, x), Simplex1::new(x, x, x)).is_err());
    // every nerve 2-simplex has nerve faces
    for (c, nerve) in enumerate_2simplices(&fixtures::diamond(), usize::MAX).simplices {
        if nerve {
            assert!([c.f0, c.f1, c.f2].iter().all(|f| f.is_nerve(&fixtures::diamond())));
        }
    }
}

#[test]
fn morphism_images() {
    let p = fixtures::two_towers();
    let o1 = p.id("O1").unwrap();
    let (sub, incl) = p.restrict(o1).unwrap();
    let b = s(&sub, "o1a", "y1", "x1");
    assert_eq!(morphism_image(&incl, b), s(&p, "o1a", "y1", "x1"));
    for (b, c) in enumerate_1simplices(&sub) {
        let img = morphism_image(&incl, b);
        assert_eq!(img.classify(&p), c);
        assert_eq!(morphism_image(&incl, b.opposite()), img.opposite());
    }
    let act = fixtures::two_towers_symmetry(&p);
    for g in act.group() {
        let psi = act.morphism(g);
        for (b, c) in enumerate_1simplices(&p) {
            assert_eq!(morphism_image(&psi, b).classify(&p), c);
            assert_eq!(morphism_image(&psi, b.opposite()), morphism_image(&psi, b).opposite());
        }
    }
    assert!(tangent_simplices(&p).iter().all(|b| b.is_tangent(&p)));
}
