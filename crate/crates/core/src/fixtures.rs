//! Named posets used throughout the tests, examples and CLI.
//!
//! All geometric fixtures are double-cone posets with exactly representable
//! coordinates, so their floating-point images under the attached symmetries
//! are exact.

use crate::causet::{
    build_causal_set_poset, build_circle, build_minkowski_lattice, builders::CAUSAL_SET_CAP,
    CausalPoset, CausalSetSpec, DoubleConeSpec, ElemId, GeoMap, SymmetryAction, Q,
};
use crate::error::Result;
use crate::simplex::Simplex1;

fn cone(t: f64, x: f64, y: f64, z: f64, r: f64) -> DoubleConeSpec {
    DoubleConeSpec::from_f64([t, x, y, z], r)
}

fn labelled(specs: Vec<(&str, DoubleConeSpec)>) -> Result<CausalPoset> {
    let (labels, cones): (Vec<String>, Vec<DoubleConeSpec>) =
        specs.into_iter().map(|(l, c)| (l.to_string(), c)).unzip();
    build_minkowski_lattice(&cones)?.relabel(labels)
}

/// `{x, y, o, ô}` with `x, y ≤ o, ô` and no ⊥ pairs.
pub fn diamond() -> CausalPoset {
    labelled(vec![
        ("x", cone(0.0, 0.0, 0.0, 0.0, 1.0)),
        ("y", cone(1.0, 0.0, 0.0, 0.0, 1.0)),
        ("o", cone(0.5, 0.0, 0.0, 0.0, 2.5)),
        ("ô", cone(0.5, 0.5, 0.0, 0.0, 2.5)),
    ])
    .expect("diamond fixture")
}

fn tower(side: f64, k: u8) -> Vec<(String, DoubleConeSpec)> {
    let c = 5.0 * side;
    vec![
        (format!("x{k}"), cone(0.0, c, 0.0, 0.0, 1.0)),
        (format!("y{k}"), cone(1.0, c, 0.0, 0.0, 1.0)),
        (format!("o{k}a"), cone(0.5, c, 0.0, 0.0, 2.5)),
        (format!("o{k}b"), cone(0.5, c - 0.5 * side, 0.0, 0.0, 2.5)),
        (format!("O{k}"), cone(0.5, c, 0.0, 0.0, 4.0)),
    ]
}

/// Two towers of five cones under `O1 ⊥ O2`, plus a top element `T`.
pub fn two_towers() -> CausalPoset {
    let mut specs = tower(-1.0, 1);
    specs.extend(tower(1.0, 2));
    specs.push(("T".to_string(), cone(0.5, 0.0, 0.0, 0.0, 10.0)));
    let (labels, cones): (Vec<String>, Vec<DoubleConeSpec>) = specs.into_iter().unzip();
    build_minkowski_lattice(&cones).and_then(|p| p.relabel(labels)).expect("two-towers fixture")
}

/// Half turn about the z axis, exchanging the towers.
pub fn two_towers_symmetry(p: &CausalPoset) -> SymmetryAction {
    let half = GeoMap::Affine { linear: [[-1, 0, 0], [0, -1, 0], [0, 0, 1]], shift: [Q::from(0); 4] };
    SymmetryAction::from_geo_maps(p, &[half]).expect("half turn preserves the towers")
}

/// Standard loops of the two-tower fixture.
pub struct TwoTowerLoops {
    /// loop at `x1`: `(o1b; x1, y1)(o1a; y1, x1)`
    pub p: Vec<Simplex1>,
    /// loop at `y1` through `O1`
    pub p_prime: Vec<Simplex1>,
    /// loop at `x2`, the tower-2 image of `p`
    pub q: Vec<Simplex1>,
}

pub fn two_tower_loops(p: &CausalPoset) -> TwoTowerLoops {
    let e = |l: &str| p.id(l).expect("two-tower label");
    let s = |sup: &str, d0: &str, d1: &str| Simplex1::new(e(sup), e(d0), e(d1));
    TwoTowerLoops {
        p: vec![s("o1b", "x1", "y1"), s("o1a", "y1", "x1")],
        p_prime: vec![s("o1a", "y1", "x1"), s("O1", "x1", "o1a"), s("O1", "o1a", "y1")],
        q: vec![s("o2b", "x2", "y2"), s("o2a", "y2", "x2")],
    }
}

/// Lattice spacing of the Minkowski fixture.
pub const SITE_SPACING: f64 = 7.0;

/// Sites of the Minkowski fixture in the `(x, y)` plane.
pub fn minkowski_sites() -> Vec<(i32, i32)> {
    let mut out = vec![(0, 0)];
    out.extend([(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]);
    out
}

/// Nine sites of four cones each (`x`, `y`, `a`, `b`) plus a top `T`;
/// 37 elements, invariant under quarter turns about the z axis.
pub fn minkowski() -> CausalPoset {
    let mut labels = Vec::new();
    let mut cones = Vec::new();
    for (i, j) in minkowski_sites() {
        let (sx, sy) = (SITE_SPACING * i as f64, SITE_SPACING * j as f64);
        let tag = format!("{i},{j}");
        for (name, spec) in [
            ("x", cone(0.0, sx, sy, 0.0, 1.0)),
            ("y", cone(1.0, sx, sy, 0.0, 1.0)),
            ("a", cone(0.5, sx, sy, 0.0, 2.5)),
            ("b", cone(0.5, sx, sy, 0.5, 3.5)),
        ] {
            labels.push(format!("{name}[{tag}]"));
            cones.push(spec);
        }
    }
    labels.push("T".to_string());
    cones.push(cone(0.5, 0.0, 0.0, 0.0, 14.0));
    build_minkowski_lattice(&cones).and_then(|p| p.relabel(labels)).expect("minkowski fixture")
}

/// Quarter turns about the z axis (order 4).
pub fn minkowski_symmetry(p: &CausalPoset) -> SymmetryAction {
    SymmetryAction::from_geo_maps(p, &[GeoMap::quarter_turn_z()]).expect("rotation preserves the lattice")
}

/// Element of the Minkowski fixture by cone name and site.
pub fn site(p: &CausalPoset, name: &str, i: i32, j: i32) -> ElemId {
    p.id(&format!("{name}[{i},{j}]")).expect("minkowski label")
}

/// Translation by one lattice spacing along x.
pub fn lattice_translation_x() -> GeoMap {
    GeoMap::translation([Q::from(0), Q::from(SITE_SPACING as i64), Q::from(0), Q::from(0)])
}

/// Loops of the Minkowski fixture at site `(i, j)`.
pub struct SiteLoops {
    /// `(b; x, y)(a; y, x)`, a loop at `x`
    pub p: Vec<Simplex1>,
    /// `(b; x, a)(b; a, y)(a; y, x)`, a loop at `x` through `a`
    pub p_prime: Vec<Simplex1>,
    /// `(b; x, a)(T; a, x)`, a loop at `x` through the top element
    pub p_top: Vec<Simplex1>,
}

pub fn site_loops(p: &CausalPoset, i: i32, j: i32) -> SiteLoops {
    let e = |n: &str| site(p, n, i, j);
    let (x, y, a, b) = (e("x"), e("y"), e("a"), e("b"));
    let t = p.id("T").expect("minkowski top");
    SiteLoops {
        p: vec![Simplex1::new(b, x, y), Simplex1::new(a, y, x)],
        p_prime: vec![Simplex1::new(b, x, a), Simplex1::new(b, a, y), Simplex1::new(a, y, x)],
        p_top: vec![Simplex1::new(b, x, a), Simplex1::new(t, a, x)],
    }
}

/// `a, o < m1, m2` with a symmetry exchanging `m1` and `m2`; no path from
/// `a` to `o` is fixed by the joint stabilizer.
pub fn swap() -> (CausalPoset, SymmetryAction) {
    let labels = ["a", "o", "m1", "m2"].map(String::from).to_vec();
    let p = CausalPoset::from_relations(labels, &[(0, 2), (0, 3), (1, 2), (1, 3)], &[])
        .expect("swap fixture");
    let act = SymmetryAction::from_permutations(&p, &[vec![ElemId(0), ElemId(1), ElemId(3), ElemId(2)]])
        .expect("swap action");
    (p, act)
}

/// Arcs of lengths 1 to 3 on a 12-segment circle.
pub fn circle12() -> CausalPoset {
    build_circle(12, 1..=3).expect("circle fixture")
}

/// Six points sprinkled with seed 7, subsets of size at most 2.
pub fn causal_set7() -> CausalPoset {
    let spec = CausalSetSpec::sprinkle(7, 6, 1.0, 2);
    build_causal_set_poset(&spec, CAUSAL_SET_CAP).expect("causal-set fixture")
}
