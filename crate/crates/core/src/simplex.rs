//! 1- and 2-simplices of a poset and their nerve classification.
//!
//! A 1-simplex `(s; d0, d1)` runs from `d1` to `d0` inside the support `s`.
//! The generators of the free group are the *tangent* simplices, those whose
//! support strictly dominates both faces; this set is closed under
//! [`Simplex1::opposite`]. Opposites of non-degenerate nerve simplices form a
//! separate class, [`SimplexClass::ReversedNerve`], which is neither nerve
//! nor tangent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, PosetMorphism};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex1 {
    pub support: ElemId,
    pub d0: ElemId,
    pub d1: ElemId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimplexClass {
    /// `(a; a, a)`
    Degenerate,
    /// `d1 ≤ d0 = support`, not degenerate
    Nerve,
    /// `support > d0` and `support > d1`
    Tangent,
    /// `(s; d, s)` with `d < s`, the opposite of a nerve simplex
    ReversedNerve,
}

impl SimplexClass {
    pub fn is_nerve(self) -> bool {
        matches!(self, SimplexClass::Degenerate | SimplexClass::Nerve)
    }

    pub fn is_tangent(self) -> bool {
        self == SimplexClass::Tangent
    }
}

impl Simplex1 {
    pub const fn new(support: ElemId, d0: ElemId, d1: ElemId) -> Self {
        Self { support, d0, d1 }
    }

    /// Same support, faces exchanged.
    pub const fn opposite(self) -> Self {
        Self { support: self.support, d0: self.d1, d1: self.d0 }
    }

    pub fn is_valid(&self, p: &CausalPoset) -> bool {
        p.contains(self.support)
            && p.contains(self.d0)
            && p.contains(self.d1)
            && p.leq(self.d0, self.support)
            && p.leq(self.d1, self.support)
    }

    pub fn classify(&self, p: &CausalPoset) -> SimplexClass {
        let s = self.support;
        if self.d0 == s && self.d1 == s {
            SimplexClass::Degenerate
        } else if self.d0 == s {
            SimplexClass::Nerve
        } else if self.d1 == s {
            SimplexClass::ReversedNerve
        } else {
            debug_assert!(p.lt(self.d0, s) && p.lt(self.d1, s));
            SimplexClass::Tangent
        }
    }

    pub fn is_tangent(&self, p: &CausalPoset) -> bool {
        self.classify(p).is_tangent()
    }

    pub fn is_nerve(&self, p: &CausalPoset) -> bool {
        self.classify(p).is_nerve()
    }

    pub fn display<'a>(&'a self, p: &'a CausalPoset) -> impl fmt::Display + 'a {
        DisplaySimplex { b: self, p }
    }
}

struct DisplaySimplex<'a> {
    b: &'a Simplex1,
    p: &'a CausalPoset,
}

impl fmt::Display for DisplaySimplex<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({};{},{})",
            self.p.label(self.b.support),
            self.p.label(self.b.d0),
            self.p.label(self.b.d1)
        )
    }
}

/// `σ₀a = (a; a, a)`.
pub fn degeneracy0(a: ElemId) -> Simplex1 {
    Simplex1::new(a, a, a)
}

/// Every 1-simplex with its class, ordered by `(support, d0, d1)`.
pub fn enumerate_1simplices(p: &CausalPoset) -> Vec<(Simplex1, SimplexClass)> {
    let mut out = Vec::new();
    for s in p.elements() {
        let lower = p.lower_set(s);
        for &d0 in &lower {
            for &d1 in &lower {
                let b = Simplex1::new(s, d0, d1);
                out.push((b, b.classify(p)));
            }
        }
    }
    out
}

/// All tangent 1-simplices, ordered by `(support, d0, d1)`.
pub fn tangent_simplices(p: &CausalPoset) -> Vec<Simplex1> {
    enumerate_1simplices(p).into_iter().filter(|(_, c)| c.is_tangent()).map(|(b, _)| b).collect()
}

/// Letterwise image of a simplex under a morphism.
pub fn morphism_image(psi: &PosetMorphism, b: Simplex1) -> Simplex1 {
    Simplex1::new(psi.apply(b.support), psi.apply(b.d0), psi.apply(b.d1))
}

/// A 2-simplex with faces `f0 = ∂₀c`, `f1 = ∂₁c`, `f2 = ∂₂c` on vertices
/// `v0, v1, v2`: `f0` runs `v1 → v2`, `f1` runs `v0 → v2`, `f2` runs `v0 → v1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex2 {
    pub support: ElemId,
    pub f0: Simplex1,
    pub f1: Simplex1,
    pub f2: Simplex1,
}

impl Simplex2 {
    /// Checks face supports and the three vertex equalities.
    pub fn new(p: &CausalPoset, support: ElemId, f0: Simplex1, f1: Simplex1, f2: Simplex1) -> Result<Self> {
        for f in [f0, f1, f2] {
            if !f.is_valid(p) || !p.leq(f.support, support) {
                return Err(Error::InvalidSimplex(format!("face {} not under support", f.display(p))));
            }
        }
        if f0.d0 != f1.d0 || f1.d1 != f2.d1 || f0.d1 != f2.d0 {
            return Err(Error::InvalidSimplex("face vertices do not match".into()));
        }
        Ok(Self { support, f0, f1, f2 })
    }

    pub fn vertices(&self) -> [ElemId; 3] {
        [self.f1.d1, self.f2.d0, self.f0.d0]
    }

    /// Vertices totally ordered with the greatest equal to the support, and
    /// every face a nerve simplex.
    pub fn is_nerve(&self, p: &CausalPoset) -> bool {
        let [v0, v1, v2] = self.vertices();
        p.leq(v0, v1)
            && p.leq(v1, v2)
            && v2 == self.support
            && [self.f0, self.f1, self.f2].iter().all(|f| f.is_nerve(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSimplices {
    pub simplices: Vec<(Simplex2, bool)>,
    pub truncated: bool,
}

/// 2-simplices supported on the given elements, in lexicographic order of
/// `(support, v0, v1, v2, |f0|, |f1|, |f2|)`, stopping after `cap`.
pub fn enumerate_2simplices_on(p: &CausalPoset, supports: &[ElemId], cap: usize) -> TwoSimplices {
    let mut simplices = Vec::new();
    for &c in supports {
        let lower = p.lower_set(c);
        for &v0 in &lower {
            for &v1 in &lower {
                for &v2 in &lower {
                    let above = |a: ElemId, b: ElemId| -> Vec<ElemId> {
                        lower.iter().copied().filter(|&s| p.leq(a, s) && p.leq(b, s)).collect()
                    };
                    let (s0s, s1s, s2s) = (above(v1, v2), above(v0, v2), above(v0, v1));
                    for &s0 in &s0s {
                        for &s1 in &s1s {
                            for &s2 in &s2s {
                                if simplices.len() == cap {
                                    return TwoSimplices { simplices, truncated: true };
                                }
                                let c2 = Simplex2 {
                                    support: c,
                                    f0: Simplex1::new(s0, v2, v1),
                                    f1: Simplex1::new(s1, v2, v0),
                                    f2: Simplex1::new(s2, v1, v0),
                                };
                                simplices.push((c2, c2.is_nerve(p)));
                            }
                        }
                    }
                }
            }
        }
    }
    TwoSimplices { simplices, truncated: false }
}

/// All 2-simplices of the poset up to `cap`.
pub fn enumerate_2simplices(p: &CausalPoset, cap: usize) -> TwoSimplices {
    let all: Vec<ElemId> = p.elements().collect();
    enumerate_2simplices_on(p, &all, cap)
}
