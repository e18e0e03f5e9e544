//! Finite symmetry groups acting by causal automorphisms, and poset morphisms.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::builders::{q_to_f64, Q};
use super::{CausalPoset, ElemId, Geometry};
use crate::error::{Error, Result};

/// Largest group generated by [`SymmetryAction`] constructors.
pub const GROUP_CAP: usize = 4096;

/// Geometric realization of a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeoMap {
    /// `(t, x⃗) ↦ (t + shift₀, L x⃗ + shift⃗)` with `L` a signed permutation.
    Affine { linear: [[i8; 3]; 3], shift: [Q; 4] },
    /// Rotation of an `n`-segment circle by `k` segments.
    CircleShift { n: u32, k: u32 },
}

impl GeoMap {
    pub fn identity_affine() -> Self {
        GeoMap::Affine { linear: [[1, 0, 0], [0, 1, 0], [0, 0, 1]], shift: [Q::zero(); 4] }
    }

    pub fn translation(shift: [Q; 4]) -> Self {
        GeoMap::Affine { linear: [[1, 0, 0], [0, 1, 0], [0, 0, 1]], shift }
    }

    /// Quarter turn about the z axis, `(x, y) ↦ (−y, x)`.
    pub fn quarter_turn_z() -> Self {
        GeoMap::Affine { linear: [[0, -1, 0], [1, 0, 0], [0, 0, 1]], shift: [Q::zero(); 4] }
    }

    fn is_signed_permutation(linear: &[[i8; 3]; 3]) -> bool {
        let rows_ok = linear.iter().all(|r| r.iter().map(|v| v.abs() as i32).sum::<i32>() == 1);
        let cols_ok = (0..3).all(|j| linear.iter().map(|r| r[j].abs() as i32).sum::<i32>() == 1);
        rows_ok && cols_ok && linear.iter().flatten().all(|v| v.abs() <= 1)
    }

    pub fn is_valid(&self) -> bool {
        match self {
            GeoMap::Affine { linear, .. } => Self::is_signed_permutation(linear),
            GeoMap::CircleShift { n, k } => *n > 0 && k < n,
        }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GeoMap) -> Result<GeoMap> {
        match (self, other) {
            (GeoMap::Affine { linear: a, shift: sa }, GeoMap::Affine { linear: b, shift: sb }) => {
                let mut linear = [[0i8; 3]; 3];
                let mut shift = [Q::zero(); 4];
                shift[0] = sa[0] + sb[0];
                for i in 0..3 {
                    for j in 0..3 {
                        linear[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
                    }
                    shift[i + 1] = sa[i + 1]
                        + (0..3).fold(Q::zero(), |s, k| s + Q::from(a[i][k] as i64) * sb[k + 1]);
                }
                Ok(GeoMap::Affine { linear, shift })
            }
            (GeoMap::CircleShift { n, k }, GeoMap::CircleShift { n: m, k: l }) if n == m => {
                Ok(GeoMap::CircleShift { n: *n, k: (k + l) % n })
            }
            _ => Err(Error::InvalidAction("cannot compose maps of different kinds".into())),
        }
    }

    pub fn inverse(&self) -> GeoMap {
        match self {
            GeoMap::Affine { linear, shift } => {
                let mut lt = [[0i8; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        lt[i][j] = linear[j][i];
                    }
                }
                let mut s = [Q::zero(); 4];
                s[0] = -shift[0];
                for i in 0..3 {
                    s[i + 1] = -(0..3).fold(Q::zero(), |acc, k| acc + Q::from(lt[i][k] as i64) * shift[k + 1]);
                }
                GeoMap::Affine { linear: lt, shift: s }
            }
            GeoMap::CircleShift { n, k } => GeoMap::CircleShift { n: *n, k: (n - k) % n },
        }
    }

    pub fn apply_point(&self, p: &[Q; 4]) -> [Q; 4] {
        match self {
            GeoMap::Affine { linear, shift } => {
                let mut out = [Q::zero(); 4];
                out[0] = p[0] + shift[0];
                for i in 0..3 {
                    out[i + 1] = shift[i + 1]
                        + (0..3).fold(Q::zero(), |s, k| s + Q::from(linear[i][k] as i64) * p[k + 1]);
                }
                out
            }
            GeoMap::CircleShift { .. } => *p,
        }
    }

    /// Floating-point image of a spacetime point. Exact for signed
    /// permutations and shifts that are exactly representable.
    pub fn apply_f64(&self, p: &[f64; 4]) -> [f64; 4] {
        match self {
            GeoMap::Affine { linear, shift } => {
                let mut out = [0.0; 4];
                out[0] = p[0] + q_to_f64(shift[0]);
                for i in 0..3 {
                    let mut v = 0.0;
                    for k in 0..3 {
                        match linear[i][k] {
                            1 => v += p[k + 1],
                            -1 => v -= p[k + 1],
                            _ => {}
                        }
                    }
                    out[i + 1] = v + q_to_f64(shift[i + 1]);
                }
                out
            }
            GeoMap::CircleShift { .. } => *p,
        }
    }

    /// Image of an angle in radians (circle maps only).
    pub fn apply_angle(&self, theta: f64) -> f64 {
        match self {
            GeoMap::CircleShift { n, k } => {
                (theta + std::f64::consts::TAU * *k as f64 / *n as f64).rem_euclid(std::f64::consts::TAU)
            }
            GeoMap::Affine { .. } => theta,
        }
    }

    pub fn apply_geometry(&self, g: &Geometry) -> Option<Geometry> {
        match (self, g) {
            (GeoMap::Affine { .. }, Geometry::Cone(c)) => {
                let mut c = c.clone();
                c.center = self.apply_point(&c.center);
                Some(Geometry::Cone(c))
            }
            (GeoMap::CircleShift { n, k }, Geometry::Arc(a)) if a.n == *n => {
                Some(Geometry::Arc(a.rotated(*k)))
            }
            _ => None,
        }
    }
}

/// A finite group acting on a poset, stored as a multiplication table and a
/// permutation per group element.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryAction {
    perms: Vec<Vec<ElemId>>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    geo: Option<Vec<GeoMap>>,
}

fn close_group<T: Clone + Eq + std::hash::Hash>(
    identity: T,
    gens: &[T],
    compose: impl Fn(&T, &T) -> Result<T>,
) -> Result<(Vec<T>, Vec<Vec<usize>>)> {
    let mut elems = vec![identity.clone()];
    let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let next = compose(g, &elems[i])?;
            if !index.contains_key(&next) {
                if elems.len() >= GROUP_CAP {
                    return Err(Error::InvalidAction(format!("group exceeds {GROUP_CAP} elements")));
                }
                index.insert(next.clone(), elems.len());
                elems.push(next);
            }
        }
        i += 1;
    }
    let mut mul = vec![vec![0; elems.len()]; elems.len()];
    for (a, ea) in elems.iter().enumerate() {
        for (b, eb) in elems.iter().enumerate() {
            let c = compose(ea, eb)?;
            mul[a][b] = *index
                .get(&c)
                .ok_or_else(|| Error::InvalidAction("generated set not closed".into()))?;
        }
    }
    Ok((elems, mul))
}

fn inverses(mul: &[Vec<usize>], identity: usize) -> Result<Vec<usize>> {
    (0..mul.len())
        .map(|g| {
            (0..mul.len())
                .find(|&h| mul[g][h] == identity)
                .ok_or_else(|| Error::InvalidAction(format!("element {g} has no inverse")))
        })
        .collect()
}

impl SymmetryAction {
    /// The one-element group.
    pub fn trivial(p: &CausalPoset) -> Self {
        Self {
            perms: vec![p.elements().collect()],
            mul: vec![vec![0]],
            inv: vec![0],
            identity: 0,
            geo: None,
        }
    }

    /// Group generated by element permutations.
    pub fn from_permutations(p: &CausalPoset, gens: &[Vec<ElemId>]) -> Result<Self> {
        for g in gens {
            if g.len() != p.len() || g.iter().any(|a| !p.contains(*a)) {
                return Err(Error::InvalidAction("permutation has wrong length".into()));
            }
            let mut seen = vec![false; p.len()];
            for a in g {
                if std::mem::replace(&mut seen[a.idx()], true) {
                    return Err(Error::InvalidAction("map is not a bijection".into()));
                }
            }
        }
        let id: Vec<ElemId> = p.elements().collect();
        let (perms, mul) = close_group(id, gens, |a, b| Ok(b.iter().map(|x| a[x.idx()]).collect()))?;
        let inv = inverses(&mul, 0)?;
        Ok(Self { perms, mul, inv, identity: 0, geo: None })
    }

    /// Group generated by geometric maps; each map must send every element's
    /// geometry to the geometry of some element.
    pub fn from_geo_maps(p: &CausalPoset, gens: &[GeoMap]) -> Result<Self> {
        let geometry = p.geometry().ok_or(Error::MissingGeometry)?;
        if let Some(bad) = gens.iter().find(|g| !g.is_valid()) {
            return Err(Error::InvalidAction(format!("invalid map {bad:?}")));
        }
        let identity = match gens.first() {
            Some(GeoMap::CircleShift { n, .. }) => GeoMap::CircleShift { n: *n, k: 0 },
            _ => GeoMap::identity_affine(),
        };
        let (maps, mul) = close_group(identity, gens, |a, b| a.compose(b))?;
        let lookup: HashMap<&Geometry, ElemId> =
            geometry.iter().enumerate().map(|(i, g)| (g, ElemId(i as u32))).collect();
        let mut perms = Vec::with_capacity(maps.len());
        for (gi, m) in maps.iter().enumerate() {
            let perm = geometry
                .iter()
                .map(|g| {
                    m.apply_geometry(g).and_then(|img| lookup.get(&img).copied()).ok_or_else(|| {
                        Error::InvalidAction(format!("group element {gi} maps an element outside the poset"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            perms.push(perm);
        }
        let inv = inverses(&mul, 0)?;
        Ok(Self { perms, mul, inv, identity: 0, geo: Some(maps) })
    }

    /// Cyclic rotations of a circle poset.
    pub fn cyclic_rotation(p: &CausalPoset) -> Result<Self> {
        let n = match p.geometry().and_then(|g| g.first()) {
            Some(Geometry::Arc(a)) => a.n,
            _ => return Err(Error::MissingGeometry),
        };
        Self::from_geo_maps(p, &[GeoMap::CircleShift { n, k: 1 % n }])
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn group(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// `g ∘ h`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn act(&self, g: usize, o: ElemId) -> ElemId {
        self.perms[g][o.idx()]
    }

    pub fn permutation(&self, g: usize) -> &[ElemId] {
        &self.perms[g]
    }

    pub fn has_geometry(&self) -> bool {
        self.geo.is_some()
    }

    pub fn geo(&self, g: usize) -> Result<&GeoMap> {
        self.geo.as_ref().map(|v| &v[g]).ok_or(Error::MissingRealization(g))
    }

    pub fn stabilizer(&self, o: ElemId) -> Vec<usize> {
        self.group().filter(|&g| self.act(g, o) == o).collect()
    }

    /// The automorphism `o ↦ g(o)` as a morphism.
    pub fn morphism(&self, g: usize) -> PosetMorphism {
        PosetMorphism::new(self.perms[g].clone(), self.perms[g].len())
    }

    /// Lists violated group axioms and automorphism conditions.
    pub fn validate(&self, p: &CausalPoset) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.order();
        for g in 0..n {
            if self.mul[self.identity][g] != g || self.mul[g][self.identity] != g {
                out.push(format!("identity law fails at {g}"));
            }
            if self.mul[g][self.inv[g]] != self.identity {
                out.push(format!("inverse law fails at {g}"));
            }
            for h in 0..n {
                for k in 0..n {
                    if self.mul[self.mul[g][h]][k] != self.mul[g][self.mul[h][k]] {
                        out.push(format!("associativity fails at ({g},{h},{k})"));
                    }
                }
                let composed: Vec<ElemId> = p.elements().map(|o| self.act(g, self.act(h, o))).collect();
                if composed != self.perms[self.mul[g][h]] {
                    out.push(format!("action is not a homomorphism at ({g},{h})"));
                }
            }
            for a in p.elements() {
                for b in p.elements() {
                    let (ga, gb) = (self.act(g, a), self.act(g, b));
                    if p.leq(a, b) != p.leq(ga, gb) {
                        out.push(format!("element {g} does not preserve ≤ on ({},{})", p.label(a), p.label(b)));
                    }
                    if p.perp(a, b) != p.perp(ga, gb) {
                        out.push(format!("element {g} does not preserve ⊥ on ({},{})", p.label(a), p.label(b)));
                    }
                }
            }
        }
        out
    }
}

/// Orbit of `o` (sorted) and its stabilizer subgroup.
pub fn orbit_and_stabilizer(act: &SymmetryAction, o: ElemId) -> (Vec<ElemId>, Vec<usize>) {
    let mut orbit: Vec<ElemId> = act.group().map(|g| act.act(g, o)).collect();
    orbit.sort();
    orbit.dedup();
    (orbit, act.stabilizer(o))
}

/// Injective map between posets, stored as the image of each source element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetMorphism {
    map: Vec<ElemId>,
    target_len: usize,
}

impl PosetMorphism {
    pub fn new(map: Vec<ElemId>, target_len: usize) -> Self {
        Self { map, target_len }
    }

    pub fn identity(p: &CausalPoset) -> Self {
        Self::new(p.elements().collect(), p.len())
    }

    pub fn apply(&self, a: ElemId) -> ElemId {
        self.map[a.idx()]
    }

    pub fn map(&self) -> &[ElemId] {
        &self.map
    }

    pub fn source_len(&self) -> usize {
        self.map.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &PosetMorphism) -> Result<PosetMorphism> {
        if self.target_len != outer.source_len() {
            return Err(Error::DimensionMismatch("morphisms do not compose".into()));
        }
        Ok(Self::new(self.map.iter().map(|&a| outer.apply(a)).collect(), outer.target_len))
    }

    /// Lists violations of injectivity and of preservation/reflection of
    /// both relations.
    pub fn check(&self, source: &CausalPoset, target: &CausalPoset) -> Vec<String> {
        let mut out = Vec::new();
        if self.map.len() != source.len() || self.target_len != target.len() {
            out.push("size mismatch".to_string());
            return out;
        }
        if self.map.iter().any(|a| !target.contains(*a)) {
            out.push("image outside target".to_string());
            return out;
        }
        let mut seen = vec![false; target.len()];
        for a in &self.map {
            if std::mem::replace(&mut seen[a.idx()], true) {
                out.push(format!("not injective at {}", target.label(*a)));
            }
        }
        for a in source.elements() {
            for b in source.elements() {
                let (pa, pb) = (self.apply(a), self.apply(b));
                if source.leq(a, b) != target.leq(pa, pb) {
                    out.push(format!("≤ not preserved on ({},{})", source.label(a), source.label(b)));
                }
                if source.perp(a, b) != target.perp(pa, pb) {
                    out.push(format!("⊥ not preserved on ({},{})", source.label(a), source.label(b)));
                }
            }
        }
        out
    }
}
