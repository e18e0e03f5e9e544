//! The free group on tangent 1-simplices, with `b⁻¹ = b̄`, and its loop
//! subgroup.
//!
//! # Letter order
//!
//! A word `b_n ⋯ b_2 b_1` is stored left to right, so `letters()[0]` is `b_n`
//! and the last letter `b_1` is traversed first. A word is a path when
//! `∂₁b_{i+1} = ∂₀b_i` for consecutive letters; it starts at `∂₁b_1` and ends
//! at `∂₀b_n`. The product `w1 · w2` places the letters of `w2` to the right,
//! so `w2` is traversed first.

pub mod literal;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, PosetMorphism};
use crate::simplex::{morphism_image, Simplex1};

pub use literal::{format_word, parse_word};

/// A letter relative to the canonical section of `T₁/∼_opp`: the smaller of
/// `b` and `b̄` in `(support, d0, d1)` order is the positive generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub simplex: Simplex1,
    pub inverted: bool,
}

impl Generator {
    pub fn of(b: Simplex1) -> Self {
        let bar = b.opposite();
        if bar < b {
            Self { simplex: bar, inverted: true }
        } else {
            Self { simplex: b, inverted: false }
        }
    }

    pub fn letter(&self) -> Simplex1 {
        if self.inverted {
            self.simplex.opposite()
        } else {
            self.simplex
        }
    }

    /// Letters equal to their own opposite, `(s; a, a)`, are involutions.
    pub fn is_involution(&self) -> bool {
        self.simplex.d0 == self.simplex.d1
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<Simplex1>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Letters in storage order, leftmost (`b_n`) first.
    pub fn new(letters: Vec<Simplex1>) -> Self {
        Self { letters }
    }

    pub fn letter(b: Simplex1) -> Self {
        Self { letters: vec![b] }
    }

    pub fn letters(&self) -> &[Simplex1] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Simplex1> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word::new(self.letters[range].to_vec())
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].opposite())
    }

    /// `self · other` without reduction.
    pub fn mul(&self, other: &Word) -> Word {
        multiply(self, other)
    }

    pub fn inverse(&self) -> Word {
        inverse(self)
    }

    pub fn reduce(&self) -> Word {
        reduce(self)
    }

    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            out.extend_from_slice(&base.letters);
        }
        Word::new(out)
    }
}

impl From<Vec<Simplex1>> for Word {
    fn from(letters: Vec<Simplex1>) -> Self {
        Word::new(letters)
    }
}

/// Free reduction by a single left-to-right stack pass.
pub fn reduce(w: &Word) -> Word {
    let mut out: Vec<Simplex1> = Vec::with_capacity(w.len());
    for &b in &w.letters {
        if out.last() == Some(&b.opposite()) {
            out.pop();
        } else {
            out.push(b);
        }
    }
    Word::new(out)
}

/// Concatenation with `w2` on the right.
pub fn multiply(w1: &Word, w2: &Word) -> Word {
    let mut letters = Vec::with_capacity(w1.len() + w2.len());
    letters.extend_from_slice(&w1.letters);
    letters.extend_from_slice(&w2.letters);
    Word::new(letters)
}

/// Commutator `[a, b] = a b ā b̄`.
pub fn commutator(a: &Word, b: &Word) -> Word {
    multiply(&multiply(a, b), &multiply(&a.inverse(), &b.inverse()))
}

/// Reversed word of opposites.
pub fn inverse(w: &Word) -> Word {
    Word::new(w.letters.iter().rev().map(|b| b.opposite()).collect())
}

/// Supports of the letters of the reduced word.
pub fn support(w: &Word) -> BTreeSet<ElemId> {
    reduce(w).letters.iter().map(|b| b.support).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathEnds {
    /// The empty word, a path at every point.
    Everywhere,
    Span { start: ElemId, end: ElemId },
}

/// Start and end of a path, or `None` when consecutive faces do not match.
pub fn is_path(w: &Word) -> Option<PathEnds> {
    let (first, last) = match (w.letters.first(), w.letters.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Some(PathEnds::Everywhere),
    };
    if w.letters.windows(2).all(|pair| pair[0].d1 == pair[1].d0) {
        Some(PathEnds::Span { start: last.d1, end: first.d0 })
    } else {
        None
    }
}

/// Base point of a non-empty loop.
pub fn is_loop(w: &Word) -> Option<ElemId> {
    match is_path(w) {
        Some(PathEnds::Span { start, end }) if start == end => Some(start),
        _ => None,
    }
}

fn is_loop_slice(letters: &[Simplex1]) -> bool {
    match (letters.first(), letters.last()) {
        (Some(f), Some(l)) => f.d0 == l.d1 && letters.windows(2).all(|p| p[0].d1 == p[1].d0),
        _ => false,
    }
}

/// Partition of `reduce(w)` into consecutive loop blocks, as block lengths
/// from left to right. The identity yields an empty partition.
pub fn in_loop_group(w: &Word) -> Option<Vec<usize>> {
    let r = reduce(w);
    let n = r.len();
    let mut back: Vec<Option<usize>> = vec![None; n + 1];
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for i in 0..n {
        if !ok[i] {
            continue;
        }
        for j in i + 1..=n {
            if j > i + 1 && r.letters[j - 2].d1 != r.letters[j - 1].d0 {
                break;
            }
            if !ok[j] && r.letters[i].d0 == r.letters[j - 1].d1 {
                ok[j] = true;
                back[j] = Some(i);
            }
        }
    }
    if !ok[n] {
        return None;
    }
    let mut blocks = Vec::new();
    let mut j = n;
    while j > 0 {
        let i = back[j].expect("reachable prefix has a predecessor");
        blocks.push(j - i);
        j = i;
    }
    blocks.reverse();
    Some(blocks)
}

/// Splits `reduce(w)` into its loop blocks.
pub fn loop_blocks(w: &Word) -> Option<Vec<Word>> {
    let r = reduce(w);
    let sizes = in_loop_group(&r)?;
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for s in sizes {
        out.push(r.slice(at..at + s));
        at += s;
    }
    Some(out)
}

pub fn is_loop_group_member(w: &Word) -> bool {
    in_loop_group(w).is_some()
}

/// Elements dominating every element of `s`.
pub fn dominators(p: &CausalPoset, s: &BTreeSet<ElemId>) -> Vec<ElemId> {
    p.elements().filter(|&o| s.iter().all(|&a| p.leq(a, o))).collect()
}

/// First pair `(o1, o2)` with `|w1| ≤ o1`, `|w2| ≤ o2` and `o1 ⊥ o2`.
pub fn word_perp(p: &CausalPoset, w1: &Word, w2: &Word) -> Option<(ElemId, ElemId)> {
    let d1 = dominators(p, &support(w1));
    let d2 = dominators(p, &support(w2));
    for &o1 in &d1 {
        for &o2 in &d2 {
            if p.perp(o1, o2) {
                return Some((o1, o2));
            }
        }
    }
    None
}

/// Letterwise image under a morphism.
pub fn apply_morphism(psi: &PosetMorphism, w: &Word) -> Word {
    Word::new(w.letters.iter().map(|&b| morphism_image(psi, b)).collect())
}

/// True when every letter is a valid tangent simplex of `p`.
pub fn is_tangent_word(p: &CausalPoset, w: &Word) -> bool {
    w.letters.iter().all(|b| b.is_valid(p) && b.is_tangent(p))
}

pub(crate) fn slice_is_loop(letters: &[Simplex1]) -> bool {
    is_loop_slice(letters)
}
