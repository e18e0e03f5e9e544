mod common;

use std::f64::consts::PI;

use loopnet::causet::{build_minkowski_lattice, CausalPoset, DoubleConeSpec, ElemId, Q};
use loopnet::cochain::{build_invariant_0cochain, filling_function, twisted_delta, Atom, Cochain0, TestFunction};
use loopnet::fixtures;
use loopnet::loopgrp::{commutator, inverse, multiply, Word};
use loopnet::quotient::{EngineConfig, QuotientEngine};
use loopnet::simplex::{enumerate_1simplices, enumerate_2simplices_on, Simplex1};
use loopnet::weyl::*;
use loopnet::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn profile() -> &'static HyperboloidProfile {
    static P: OnceLock<HyperboloidProfile> = OnceLock::new();
    P.get_or_init(|| HyperboloidProfile::new(QuadratureConfig::default()).unwrap())
}

fn atom_at(c: [i64; 4], r: Q, a: f64) -> FieldFunction {
    FieldFunction::from_terms([((c.map(Q::from), r), a)])
}

fn random_function(rng: &mut ChaCha8Rng, atoms: usize) -> FieldFunction {
    FieldFunction::from_terms((0..atoms).map(|_| {
        let c = [0; 4].map(|_: i32| Q::new(rng.gen_range(-4..=4), 2));
        let r = Q::new(rng.gen_range(2..=5), 2);
        ((c, r), rng.gen_range(-2.0..2.0))
    }))
}

#[test]
fn em_transform_matches_4d_oracle() {
    let prof = profile();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = atom_at([1, 0, 1, 0], Q::new(3, 2), 1.0).add(&atom_at([0, 1, 0, -1], Q::from(1), -0.5));
    let momenta: Vec<[f64; 3]> = (0..5).map(|_| [0; 3].map(|_: i32| rng.gen_range(-3.0..3.0))).collect();
    let got = em_transform(&f, prof, &momenta).unwrap();
    assert!(got.rel_change < 1e-8);
    for (p, v) in momenta.iter().zip(&got.values) {
        let o = common::em_oracle(&f, *p, prof.mass());
        assert!((v - o).norm() / o.norm() < 1e-6, "p={p:?} got {v} oracle {o}");
    }
    assert!(got.to_csv().lines().count() == 6);
}

#[test]
fn em_transform_translation_and_zero() {
    let prof = profile();
    let p = [[0.7, -0.2, 1.1], [2.0, 0.0, 0.0]];
    let origin = em_transform(&atom_at([0; 4], Q::from(2), 1.0), prof, &p).unwrap();
    let moved = em_transform(&atom_at([1, 2, 0, -1], Q::from(2), 1.0), prof, &p).unwrap();
    for (k, q) in p.iter().enumerate() {
        let om = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + 1.0).sqrt();
        let phase = Complex64::from_polar(1.0, om * 1.0 - (q[0] * 2.0 - q[2]));
        assert!((moved.values[k] - phase * origin.values[k]).norm() < 1e-14 * origin.values[k].norm().max(1.0));
    }
    let zero = em_transform(&FieldFunction::zero(), prof, &p).unwrap();
    assert!(zero.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
}

/// `∫ conj(E f) E g q²/ω dq dΩ` on a spherical tensor grid.
fn inner_oracle(f: &FieldFunction, g: &FieldFunction, prof: &HyperboloidProfile) -> Complex64 {
    let q_rule = CompositeRule::new(0.0, prof.config().cutoff, 200, 16);
    let mu_rule = CompositeRule::new(-1.0, 1.0, 6, 16);
    let n_phi = 48;
    let mut total = Complex64::new(0.0, 0.0);
    for (&q, &wq) in q_rule.nodes.iter().zip(&q_rule.weights) {
        let om = (q * q + prof.mass().powi(2)).sqrt();
        let terms = |h: &FieldFunction| -> Vec<([f64; 4], f64)> {
            h.iter()
                .map(|((c, r), a)| (c.map(loopnet::causet::q_to_f64), a * prof.radial(loopnet::causet::q_to_f64(*r), q)))
                .collect()
        };
        let (tf, tg) = (terms(f), terms(g));
        let e = |h: &[([f64; 4], f64)], dir: [f64; 3]| -> Complex64 {
            h.iter()
                .map(|(c, v)| Complex64::from_polar(*v, om * c[0] - q * (dir[0] * c[1] + dir[1] * c[2] + dir[2] * c[3])))
                .sum::<Complex64>()
                / (2.0 * PI).powi(2)
        };
        let mut ang = Complex64::new(0.0, 0.0);
        for (&mu, &wmu) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
            let st = (1.0 - mu * mu).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let dir = [st * phi.cos(), st * phi.sin(), mu];
                ang += wmu * (2.0 * PI / n_phi as f64) * e(&tf, dir).conj() * e(&tg, dir);
            }
        }
        total += wq * q * q / om * ang;
    }
    total
}

#[test]
fn inner_product_matches_3d_oracle() {
    let prof = profile();
    let f = atom_at([0, 0, 0, 0], Q::from(1), 1.0).add(&atom_at([1, 1, 0, 0], Q::from(2), -0.7));
    let g = atom_at([0, 0, 1, 1], Q::new(3, 2), 0.4).add(&atom_at([-1, 0, 0, 1], Q::from(1), 1.3));
    for (a, b) in [(&f, &g), (&f, &f), (&g, &f)] {
        let got = hyperboloid_inner(a, b, prof).unwrap();
        let oracle = inner_oracle(a, b, prof);
        assert!((got - oracle).norm() / oracle.norm() < 1e-4, "got {got} oracle {oracle}");
    }
}

#[test]
fn sigma_values() {
    let prof = profile();
    // frozen from an independent radial-quadrature prototype
    for (r, expect) in [(1, -1.336271245714148e-06), (2, 1.2502793006510975e-4), (3, -1.5097411997199686e-3)] {
        let s = sigma(&atom_at([0; 4], Q::from(r), 1.0), &atom_at([3 * r, 0, 0, 0], Q::from(r), 1.0), prof).unwrap();
        assert!((s - expect).abs() < 1e-6 * expect.abs(), "R={r}: {s}");
    }
    let timelike = sigma(&atom_at([0; 4], Q::from(3), 1.0), &atom_at([9, 0, 0, 0], Q::from(3), 1.0), prof).unwrap();
    assert!(timelike.abs() > 1e-3);
    for r in [1, 2, 3] {
        let f = atom_at([0; 4], Q::from(r), 1.0);
        for dt in [0, 1, r] {
            let s = sigma(&f, &atom_at([dt, 6 * r, 0, 0], Q::from(r), 1.0), prof).unwrap();
            assert!(s.abs() < 1e-6, "spacelike R={r} dt={dt}: {s}");
        }
    }
    let single = atom_at([1, 0, 0, 0], Q::from(2), 1.5);
    assert!(hyperboloid_inner(&single, &single, prof).unwrap().re > 0.0);
    assert_eq!(sigma(&single, &single, prof).unwrap(), 0.0);
}

#[test]
fn massless_field() {
    let prof = HyperboloidProfile::new(QuadratureConfig { mass: 0.0, ..QuadratureConfig::default() }).unwrap();
    let f = atom_at([0; 4], Q::from(2), 1.0);
    let g = atom_at([5, 0, 0, 0], Q::from(2), 1.0);
    assert!(prof.inner(&f, &f).unwrap().re > 0.0);
    let s = prof.sigma(&f, &g).unwrap();
    assert!(s.is_finite() && s != 0.0);
    assert_eq!(prof.sigma(&g, &f).unwrap(), -s);
}

#[test]
fn coarse_quadrature_is_rejected() {
    let cfg = QuadratureConfig { panels: 3, nodes: 2, ..QuadratureConfig::default() };
    let prof = HyperboloidProfile::new(cfg).unwrap();
    let f = atom_at([0; 4], Q::from(1), 1.0);
    let g = atom_at([2, 1, 0, 0], Q::from(1), 1.0);
    assert!(matches!(prof.sigma(&f, &g), Err(Error::NonConvergence { .. })));
    assert!(matches!(prof.check_radial(1.0), Ok(_) | Err(Error::NonConvergence { .. })));
    let bad = QuadratureConfig { cutoff: 0.0, ..QuadratureConfig::default() };
    assert!(matches!(HyperboloidProfile::new(bad), Err(Error::InvalidRange(_))));
    for r in [1.0, 2.5, 3.5, 14.0] {
        assert!(profile().check_radial(r).unwrap() < 1e-8);
    }
}

#[test]
fn weyl_group_laws() {
    let prof = profile();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let [a, b, c] = [0; 3].map(|_: i32| WeylElement::new(rng.gen_range(-1.0..1.0), random_function(&mut rng, 2)));
        assert!(weyl_multiply(&a, &a.inverse(), prof).unwrap().is_identity());
        let comm = weyl_commutator(&a, &b, prof).unwrap();
        assert!(comm.func.is_zero());
        let s = sigma(&a.func, &b.func, prof).unwrap();
        assert!((comm.phase + s).abs() < 1e-12 * s.abs().max(1e-3));
        let left = weyl_multiply(&weyl_multiply(&a, &b, prof).unwrap(), &c, prof).unwrap();
        let right = weyl_multiply(&a, &weyl_multiply(&b, &c, prof).unwrap(), prof).unwrap();
        assert!((left.phase - right.phase).abs() < 1e-9);
        assert!(left.func.rel_distance(&right.func) < 1e-15);
    }
    assert!(WeylElement::identity().is_identity());
    assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
    assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sigma_is_antisymmetric_and_bilinear(seed in 0u64..1000) {
        let prof = profile();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (random_function(&mut rng, 2), random_function(&mut rng, 2), random_function(&mut rng, 1));
        let s = prof.sigma(&f, &g).unwrap();
        prop_assert_eq!(prof.sigma(&g, &f).unwrap(), -s);
        prop_assert_eq!(prof.sigma(&f, &f).unwrap(), 0.0);
        let lin = prof.sigma(&f.add(&h), &g).unwrap() - s - prof.sigma(&h, &g).unwrap();
        prop_assert!(lin.abs() < 1e-12);
        let ip = prof.inner(&f, &g).unwrap();
        let pi = prof.inner(&g, &f).unwrap();
        prop_assert!((ip - pi.conj()).norm() < 1e-15);
        prop_assert!((2.0 * ip.im - s).abs() < 1e-12);
    }
}

fn minkowski_connection(p: &CausalPoset) -> FieldConnection<'_> {
    let act = fixtures::minkowski_symmetry(p);
    let f0 = build_invariant_0cochain(p, &act).unwrap();
    FieldConnection::from_0cochain(p, &f0, profile()).unwrap()
}

fn minkowski() -> &'static CausalPoset {
    static P: OnceLock<CausalPoset> = OnceLock::new();
    P.get_or_init(fixtures::minkowski)
}

/// Plain uniform Monte Carlo over the support's bounding box.
fn corona_oracle(p: &CausalPoset, b: Simplex1, f_ev: &TestFunction, n: usize) -> (f64, f64) {
    let cone = |a| p.cone(a).unwrap().clone();
    let (s, d0, d1) = (cone(b.support), cone(b.d0), cone(b.d1));
    let inside = |c: &DoubleConeSpec, x: &[f64; 4]| {
        let (cc, r) = (c.center_f64(), c.radius_f64());
        (x[0] - cc[0]).abs() + ((x[1] - cc[1]).powi(2) + (x[2] - cc[2]).powi(2) + (x[3] - cc[3]).powi(2)).sqrt() < r
    };
    let (c, r) = (s.center_f64(), s.radius_f64());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x: [f64; 4] = std::array::from_fn(|k| c[k] + rng.gen_range(-r..r));
        let v = if inside(&s, &x) && !inside(&d0, &x) && !inside(&d1, &x) { f_ev.eval(&x).abs() } else { 0.0 };
        s1 += v;
        s2 += v * v;
    }
    let vol = (2.0 * r).powi(4);
    let mean = s1 / n as f64;
    (vol * mean, vol * ((s2 / n as f64 - mean * mean) / n as f64).sqrt())
}

#[test]
fn corona_integrals() {
    let p = minkowski();
    let cfg = QuadratureConfig::default();
    let (x, y, a, b) = (fixtures::site(p, "x", 0, 0), fixtures::site(p, "y", 0, 0), fixtures::site(p, "a", 0, 0), fixtures::site(p, "b", 0, 0));
    let fill = |e| filling_function(p, e).unwrap();
    // nerve and empty integrands
    assert_eq!(corona_integral(p, Simplex1::new(a, a, x), &fill(a), &cfg).unwrap(), CoronaEstimate::zero());
    assert_eq!(corona_integral(p, Simplex1::new(a, y, x), &TestFunction::zero(), &cfg).unwrap(), CoronaEstimate::zero());
    for simplex in [Simplex1::new(a, y, x), Simplex1::new(b, x, a), Simplex1::new(b, x, y)] {
        let f = fill(simplex.support);
        let est = corona_integral(p, simplex, &f, &cfg).unwrap();
        assert!(!est.flagged && est.value > 0.0);
        assert_eq!(corona_integral(p, simplex, &f, &cfg).unwrap(), est);
        assert_eq!(corona_integral(p, simplex.opposite(), &f, &cfg).unwrap(), est);
        let doubled = QuadratureConfig { mc_samples: 2 * cfg.mc_samples, ..cfg.clone() };
        let est2 = corona_integral(p, simplex, &f, &doubled).unwrap();
        assert!((est2.value - est.value).abs() < 0.01 * est.value);
        let (oracle, se) = corona_oracle(p, simplex, &f, 2_000_000);
        assert!((oracle - est.value).abs() < 4.0 * (se + est.std_err), "{} vs oracle {oracle} ± {se}", est.value);
        // translation and rotation move the estimate only by rounding
        let shift = fixtures::lattice_translation_x();
        let act = fixtures::minkowski_symmetry(p);
        let moved = Simplex1::new(
            fixtures::site(p, p.label(simplex.support).split('[').next().unwrap(), 1, 0),
            fixtures::site(p, p.label(simplex.d0).split('[').next().unwrap(), 1, 0),
            fixtures::site(p, p.label(simplex.d1).split('[').next().unwrap(), 1, 0),
        );
        let est_t = corona_integral(p, moved, &f.push_forward(&shift), &cfg).unwrap();
        assert_eq!(est_t.value, est.value);
        let g = 1;
        let rotated = Simplex1::new(act.act(g, moved.support), act.act(g, moved.d0), act.act(g, moved.d1));
        let est_r = corona_integral(p, rotated, &f.push_forward(&shift).push_forward(act.geo(g).unwrap()), &cfg).unwrap();
        assert!((est_r.value - est.value).abs() < 1e-12 * est.value);
    }
    let circle = fixtures::circle12();
    let b = enumerate_1simplices(&circle).into_iter().find(|(_, c)| c.is_tangent()).unwrap().0;
    let atom = TestFunction::atom(Atom::new([Q::from(0); 4], Q::from(1), Q::from(1)));
    assert!(matches!(corona_integral(&circle, b, &atom, &cfg), Err(Error::InvalidGeometry(_))));
}

#[test]
fn field_connection_axioms() {
    let p = minkowski();
    let conn = minkowski_connection(p);
    let prof = profile();
    let act = fixtures::minkowski_symmetry(p);
    let simplices = enumerate_1simplices(p);
    let site_of = |e| p.label(e).split_once('[').map(|(n, s)| (n.to_string(), s.to_string()));
    for (b, class) in &simplices {
        if class.is_nerve() {
            assert!(conn.value(*b).unwrap().is_identity());
            continue;
        }
        // restrict the expensive part to site (0,0) and its images
        let Some((_, s)) = site_of(b.support) else { continue };
        if s != "0,0]" {
            continue;
        }
        let u = conn.value(*b).unwrap();
        let ubar = conn.value(b.opposite()).unwrap();
        assert_eq!(ubar, u.inverse());
        assert!(weyl_multiply(&ubar, &u, prof).unwrap().is_identity());
        let one = field_connection(p, conn.cochain(), *b, prof).unwrap();
        assert_eq!(one, u);
        // translation covariance
        let name = |e| site_of(e).unwrap().0;
        let t = Simplex1::new(
            fixtures::site(p, &name(b.support), 1, 0),
            fixtures::site(p, &name(b.d0), 1, 0),
            fixtures::site(p, &name(b.d1), 1, 0),
        );
        let ut = conn.value(t).unwrap();
        let expect = u.push_forward(&fixtures::lattice_translation_x());
        assert!(ut.func.rel_distance(&expect.func) < 1e-6 && ut.phase == expect.phase);
        for g in act.group() {
            let r = Simplex1::new(act.act(g, b.support), act.act(g, b.d0), act.act(g, b.d1));
            let ur = conn.value(r).unwrap();
            assert!(ur.func.rel_distance(&u.push_forward(act.geo(g).unwrap()).func) < 1e-12);
        }
    }
    assert!(matches!(
        FieldConnection::from_0cochain(&CausalPoset::from_relations(vec!["a".into()], &[], &[]).unwrap(), &Cochain0::zero(), prof),
        Err(Error::MissingGeometry)
    ));
}

#[test]
fn holonomies() {
    let p = minkowski();
    let conn = minkowski_connection(p);
    let prof = profile();
    assert!(conn.holonomy(&Word::empty()).unwrap().is_identity());
    let l = fixtures::site_loops(p, 0, 0);
    let l2 = fixtures::site_loops(p, 1, 0);
    let (pw, pp, pt) = (Word::new(l.p.clone()), Word::new(l.p_prime.clone()), Word::new(l.p_top.clone()));
    for w in [&pw, &pp, &pt, &multiply(&pw, &pt)] {
        assert!(conn.holonomy(&multiply(w, &inverse(w))).unwrap().is_identity());
        let h = conn.holonomy(w).unwrap();
        let hi = conn.holonomy(&inverse(w)).unwrap();
        assert_eq!(hi.func, h.func.scaled(-1.0));
        assert!((hi.phase + h.phase).abs() < 1e-12);
    }
    // causally disjoint loops commute up to quadrature error
    for (g, h) in [(&pw, Word::new(l2.p.clone())), (&pp, Word::new(l2.p_prime.clone())), (&pw, Word::new(l2.p_prime.clone()))] {
        let c = conn.holonomy(&commutator(g, &h)).unwrap();
        assert!(c.func.is_zero());
        assert!(c.phase.abs() < 1e-6);
        let c2 = weyl_commutator(&conn.holonomy(g).unwrap(), &conn.holonomy(&h).unwrap(), prof).unwrap();
        assert!(c2.phase.abs() < 1e-6);
    }
    // loops in the fibre of the top element do not commute
    let c = weyl_commutator(&conn.holonomy(&pw).unwrap(), &conn.holonomy(&pt).unwrap(), prof).unwrap();
    assert!(c.func.is_zero());
    assert!(c.phase.abs() > 1e-3);
    let sep = WeylSeparator { connection: &conn };
    let (a, b) = (multiply(&pw, &pt), multiply(&pt, &pw));
    let s = loopnet::quotient::Separator::separate(&sep, &a, &b).unwrap();
    assert!((s.magnitude - c.phase.abs()).abs() < 1e-9);
    assert!(loopnet::quotient::Separator::separate(&sep, &pw, &pw).is_none());
    let engine = QuotientEngine::new(p, EngineConfig { max_depth: 2, max_width: 2000, max_len: 12 })
        .with_separator(Box::new(WeylSeparator { connection: &conn }));
    let v = engine.equal(&a, &b);
    assert!(v.is_unequal(), "{v:?}");
}

#[test]
fn nontriviality_certificates() {
    let p = minkowski();
    let act = fixtures::minkowski_symmetry(p);
    let f0 = build_invariant_0cochain(p, &act).unwrap();
    let prof = profile();
    let (x, y, a) = (fixtures::site(p, "x", 0, 0), fixtures::site(p, "y", 0, 0), fixtures::site(p, "a", 0, 0));
    let cert = certify_nontrivial(p, &f0, Simplex1::new(a, y, x), prof).unwrap();
    assert_eq!(cert.shift, [1.0, 0.0, 0.0, 0.0]);
    assert!(cert.positive() && cert.rel_err < 1e-4);
    let zero = certify_nontrivial(p, &f0, Simplex1::new(a, x, x), prof).unwrap();
    assert_eq!((zero.direct, zero.factorized, zero.positive()), (0.0, 0.0, false));
    let b = fixtures::site(p, "b", 0, 0);
    assert!(matches!(certify_nontrivial(p, &f0, Simplex1::new(b, a, x), prof), Err(Error::InvalidSimplex(_))));
    // spacelike shift y = (0, 3R, 0, 0) inside a common cone
    let cones = [
        DoubleConeSpec::from_f64([0.0, 0.0, 0.0, 0.0], 1.0),
        DoubleConeSpec::from_f64([0.0, 3.0, 0.0, 0.0], 1.0),
        DoubleConeSpec::from_f64([0.0, 1.5, 0.0, 0.0], 4.0),
    ];
    let q = build_minkowski_lattice(&cones).unwrap();
    let (e0, e1, top) = (ElemId(0), ElemId(1), ElemId(2));
    let f = Cochain0::from_values(q.elements().map(|e| (e, filling_function(&q, e).unwrap())));
    let cert = certify_nontrivial(&q, &f, Simplex1::new(top, e1, e0), prof).unwrap();
    assert_eq!(cert.shift, [0.0, 3.0, 0.0, 0.0]);
    assert!(cert.positive() && cert.rel_err < 1e-4, "{cert:?}");
}

#[test]
fn nonflatness_witness() {
    let p = minkowski();
    let conn = minkowski_connection(p);
    let w = certify_nonflat(&conn, 10_000).unwrap();
    assert!(!w.simplex.is_nerve(p));
    assert!(w.mismatch > profile().config().tolerances.function);
    assert_eq!(certify_nonflat(&conn, 10_000).unwrap(), w);
    // doubled samples
    let prof2 = HyperboloidProfile::new(QuadratureConfig { mc_samples: 400_000, ..QuadratureConfig::default() }).unwrap();
    let act = fixtures::minkowski_symmetry(p);
    let conn2 = FieldConnection::from_0cochain(p, &build_invariant_0cochain(p, &act).unwrap(), &prof2).unwrap();
    let w2 = certify_nonflat(&conn2, 10_000).unwrap();
    assert_eq!(w2.simplex, w.simplex);
    assert!((w2.mismatch - w.mismatch).abs() < 0.01 * w.mismatch);
    // nerve 2-simplices satisfy the cocycle identity exactly
    let nerve: Vec<_> = enumerate_2simplices_on(p, &[fixtures::site(p, "b", 0, 0)], usize::MAX)
        .simplices
        .into_iter()
        .filter(|(_, n)| *n)
        .collect();
    assert!(!nerve.is_empty());
    for (c, _) in nerve {
        for f in [c.f0, c.f1, c.f2] {
            assert!(conn.value(f).unwrap().is_identity());
        }
    }
    // the zero cochain gives a flat connection
    let flat = FieldConnection::new(p, twisted_delta(p, &Cochain0::zero()), profile()).unwrap();
    assert_eq!(certify_nonflat(&flat, 500), Err(Error::NoWitnessFound));
}
