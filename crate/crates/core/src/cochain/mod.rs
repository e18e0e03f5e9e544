//! Cochains with values in test functions: the coboundary `d`, the twisted
//! coboundary `δ`, the bar involution with its even/odd split, the symmetry
//! action, and invariant cochains built orbit by orbit.
//!
//! A cochain is a finite map from simplices to [`TestFunction`]s; simplices
//! not in the map carry the zero function.

pub mod testfn;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, SymmetryAction, Q};
use crate::error::{Error, Result};
use crate::simplex::{enumerate_1simplices, Simplex1, Simplex2};
pub use testfn::{bump, bump_profile, Atom, TestFunction};

/// Simplices of any degree: a support and an image under poset
/// automorphisms.
pub trait Simplex: Copy + Ord + std::fmt::Debug {
    fn support(&self) -> ElemId;
    fn mapped(&self, f: impl Fn(ElemId) -> ElemId) -> Self;
}

impl Simplex for ElemId {
    fn support(&self) -> ElemId {
        *self
    }

    fn mapped(&self, f: impl Fn(ElemId) -> ElemId) -> Self {
        f(*self)
    }
}

impl Simplex for Simplex1 {
    fn support(&self) -> ElemId {
        self.support
    }

    fn mapped(&self, f: impl Fn(ElemId) -> ElemId) -> Self {
        Simplex1::new(f(self.support), f(self.d0), f(self.d1))
    }
}

impl Simplex for Simplex2 {
    fn support(&self) -> ElemId {
        self.support
    }

    fn mapped(&self, f: impl Fn(ElemId) -> ElemId) -> Self {
        Simplex2 { support: f(self.support), f0: self.f0.mapped(&f), f1: self.f1.mapped(&f), f2: self.f2.mapped(&f) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "K: Serialize", deserialize = "K: Deserialize<'de>"))]
pub struct Cochain<K: Simplex> {
    values: BTreeMap<K, TestFunction>,
}

pub type Cochain0 = Cochain<ElemId>;
pub type Cochain1 = Cochain<Simplex1>;
pub type Cochain2 = Cochain<Simplex2>;

impl<K: Simplex> Default for Cochain<K> {
    fn default() -> Self {
        Cochain { values: BTreeMap::new() }
    }
}

impl<K: Simplex> Cochain<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_values(values: impl IntoIterator<Item = (K, TestFunction)>) -> Self {
        let mut c = Self::zero();
        for (k, v) in values {
            c.set(k, v);
        }
        c
    }

    pub fn set(&mut self, k: K, v: TestFunction) {
        if v.is_zero() {
            self.values.remove(&k);
        } else {
            self.values.insert(k, v);
        }
    }

    pub fn value(&self, k: &K) -> TestFunction {
        self.values.get(k).cloned().unwrap_or_default()
    }

    pub fn get(&self, k: &K) -> Option<&TestFunction> {
        self.values.get(k)
    }

    /// Simplices with a nonzero value.
    pub fn iter(&self) -> impl Iterator<Item = (&K, &TestFunction)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.values {
            out.set(*k, out.value(k).add(v));
        }
        out
    }

    pub fn scaled(&self, s: Q) -> Self {
        Self::from_values(self.values.iter().map(|(k, v)| (*k, v.scaled(s))))
    }

    /// `(g f)_x = f_{g(x)} ∘ g`.
    pub fn act(&self, act: &SymmetryAction, g: usize) -> Result<Self> {
        let inv = act.inv(g);
        let back = act.geo(inv)?;
        Ok(Self::from_values(
            self.values.iter().map(|(k, v)| (k.mapped(|a| act.act(inv, a)), v.push_forward(back))),
        ))
    }

    /// `f_{g(x)} = f_x ∘ g⁻¹` for every simplex and group element.
    pub fn is_invariant(&self, act: &SymmetryAction) -> Result<bool> {
        for g in act.group() {
            if &self.act(act, g)? != self {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every value lies in test functions supported in the closure of the
    /// simplex's support.
    pub fn satisfies_support(&self, p: &CausalPoset) -> bool {
        self.values.iter().all(|(k, v)| p.geometry_of(k.support()).is_some_and(|g| v.inside(g)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.values().all(TestFunction::is_nonnegative)
    }
}

/// `(df)_b = f_{∂₀b} − f_{∂₁b}` on every 1-simplex of `p`.
pub fn coboundary0(p: &CausalPoset, f: &Cochain0) -> Cochain1 {
    Cochain::from_values(
        enumerate_1simplices(p).into_iter().map(|(b, _)| (b, f.value(&b.d0).sub(&f.value(&b.d1)))),
    )
}

/// `(df)_c = f_{∂₀c} − f_{∂₁c} + f_{∂₂c}` on the given 2-simplices.
pub fn coboundary1(f: &Cochain1, simplices: &[Simplex2]) -> Cochain2 {
    Cochain::from_values(
        simplices.iter().map(|c| (*c, f.value(&c.f0).sub(&f.value(&c.f1)).add(&f.value(&c.f2)))),
    )
}

/// A cochain of any supported degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyCochain {
    Zero(Cochain0),
    One(Cochain1),
    Two(Cochain2),
}

impl AnyCochain {
    pub fn degree(&self) -> u8 {
        match self {
            AnyCochain::Zero(_) => 0,
            AnyCochain::One(_) => 1,
            AnyCochain::Two(_) => 2,
        }
    }

    /// Coboundary into the next degree; 2-cochains are evaluated on
    /// `simplices`.
    pub fn coboundary(&self, p: &CausalPoset, simplices: &[Simplex2]) -> Result<AnyCochain> {
        match self {
            AnyCochain::Zero(f) => Ok(AnyCochain::One(coboundary0(p, f))),
            AnyCochain::One(f) => Ok(AnyCochain::Two(coboundary1(f, simplices))),
            AnyCochain::Two(_) => Err(Error::DegreeOverflow(2)),
        }
    }
}

/// `(δf)_b = f_{∂₀b} − f_{∂₁b} + f_{|b|}`.
pub fn twisted_delta(p: &CausalPoset, f: &Cochain0) -> Cochain1 {
    Cochain::from_values(
        enumerate_1simplices(p)
            .into_iter()
            .map(|(b, _)| (b, f.value(&b.d0).sub(&f.value(&b.d1)).add(&f.value(&b.support)))),
    )
}

/// `f̄_b = f_{b̄}`.
pub fn bar(f: &Cochain1) -> Cochain1 {
    Cochain::from_values(f.iter().map(|(b, v)| (b.opposite(), v.clone())))
}

/// `(½(f + f̄), ½(f − f̄))`.
pub fn split_even_odd(f: &Cochain1) -> (Cochain1, Cochain1) {
    let fb = bar(f);
    let half = Q::new(1, 2);
    (f.add(&fb).scaled(half), f.add(&fb.scaled(Q::from(-1))).scaled(half))
}

/// Zero outside the tangent simplices.
pub fn cutoff_tilde(p: &CausalPoset, f: &Cochain1) -> Cochain1 {
    Cochain::from_values(f.iter().filter(|(b, _)| b.is_tangent(p)).map(|(b, v)| (*b, v.clone())))
}

/// Carries a representative value around the orbit of `rep`, failing when
/// the stabilizer of `rep` moves every candidate.
fn spread_orbit<K: Simplex>(
    act: &SymmetryAction,
    rep: K,
    candidates: &[TestFunction],
    out: &mut BTreeMap<K, TestFunction>,
) -> Result<()> {
    let stab: Vec<usize> = act.group().filter(|&g| rep.mapped(|a| act.act(g, a)) == rep).collect();
    let mut chosen = None;
    for c in candidates {
        let mut fixed = true;
        for &g in &stab {
            if &c.push_forward(act.geo(g)?) != c {
                fixed = false;
                break;
            }
        }
        if fixed {
            chosen = Some(c);
            break;
        }
    }
    let value = chosen.ok_or(Error::ObstructedOrbit(rep.support()))?;
    for g in act.group() {
        let image = rep.mapped(|a| act.act(g, a));
        out.entry(image).or_insert_with(|| value.push_forward(act.geo(g).expect("geometric action")));
    }
    Ok(())
}

/// Invariant 0-cochain with, on each orbit, the first candidate atom of the
/// representative that its stabilizer fixes.
pub fn build_invariant_0cochain_with(
    p: &CausalPoset,
    act: &SymmetryAction,
    candidates: impl Fn(ElemId) -> Vec<TestFunction>,
) -> Result<Cochain0> {
    if !act.has_geometry() {
        return Err(Error::MissingGeometry);
    }
    let mut out = BTreeMap::new();
    for a in p.elements() {
        if !out.contains_key(&a) {
            spread_orbit(act, a, &candidates(a), &mut out)?;
        }
    }
    Ok(Cochain { values: out })
}

/// Unit atom filling a region's closure.
pub fn filling_function(p: &CausalPoset, a: ElemId) -> Result<TestFunction> {
    let g = p.geometry_of(a).ok_or(Error::MissingGeometry)?;
    Atom::filling(g).map(TestFunction::atom).ok_or(Error::MissingRealization(a.idx()))
}

/// Invariant, nonnegative, nowhere-zero 0-cochain of filling atoms.
pub fn build_invariant_0cochain(p: &CausalPoset, act: &SymmetryAction) -> Result<Cochain0> {
    for a in p.elements() {
        filling_function(p, a)?;
    }
    build_invariant_0cochain_with(p, act, |a| vec![filling_function(p, a).expect("checked above")])
}

/// Invariant 1-cochain, the filling atom of the support on every
/// non-degenerate 1-simplex and zero on degenerate ones.
pub fn build_invariant_1cochain(p: &CausalPoset, act: &SymmetryAction) -> Result<Cochain1> {
    if !act.has_geometry() {
        return Err(Error::MissingGeometry);
    }
    let mut out = BTreeMap::new();
    for (b, _) in enumerate_1simplices(p) {
        let degenerate = b.d0 == b.support && b.d1 == b.support;
        if degenerate || out.contains_key(&b) {
            continue;
        }
        spread_orbit(act, b, &[filling_function(p, b.support)?], &mut out)?;
    }
    Ok(Cochain { values: out })
}
