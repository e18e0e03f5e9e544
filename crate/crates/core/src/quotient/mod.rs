//! The quotient of the free group by causal commutators `w[p, q]w̄`, where
//! `p ⊥ q` are loops.
//!
//! Equality in the quotient is decided by a sound three-valued engine
//! ([`engine`]): `Equal` comes with a replayable [`RewriteCertificate`],
//! `Unequal` with the name of a homomorphism that kills every causal
//! commutator yet separates the two words, and `Unknown` when the budget runs
//! out.

pub mod engine;
pub mod lemma;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, PosetMorphism};
use crate::error::{Error, Result};
use crate::loopgrp::{commutator, is_loop, is_loop_group_member, multiply, reduce, word_perp, Generator, Word};
use crate::simplex::{morphism_image, Simplex1};

pub use engine::{quotient_equal, EngineConfig, QuotientEngine};
pub use lemma::{check_lemma_cl, reexpress_in_cl, LemmaReport, LemmaSample};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CausalCommutator {
    pub conjugator: Word,
    pub p: Word,
    pub q: Word,
    /// Dominators witnessing `p ⊥ q`.
    pub witness: (ElemId, ElemId),
    /// The conjugator is a loop-group member.
    pub in_cl: bool,
}

impl CausalCommutator {
    /// `w · p q p̄ q̄ · w̄`, unreduced.
    pub fn word(&self) -> Word {
        multiply(&multiply(&self.conjugator, &commutator(&self.p, &self.q)), &self.conjugator.inverse())
    }

    pub fn inverse(&self) -> CausalCommutator {
        CausalCommutator {
            conjugator: self.conjugator.clone(),
            p: self.q.clone(),
            q: self.p.clone(),
            witness: (self.witness.1, self.witness.0),
            in_cl: self.in_cl,
        }
    }
}

pub fn make_causal_commutator(p: &CausalPoset, w: &Word, lp: &Word, lq: &Word) -> Result<CausalCommutator> {
    if is_loop(lp).is_none() || is_loop(lq).is_none() {
        return Err(Error::NotLoops);
    }
    let witness = word_perp(p, lp, lq).ok_or(Error::NotCausallyDisjoint)?;
    Ok(CausalCommutator {
        conjugator: w.clone(),
        p: lp.clone(),
        q: lq.clone(),
        witness,
        in_cl: is_loop_group_member(w),
    })
}

/// Product of commutators, left to right.
pub fn product_word(factors: &[CausalCommutator]) -> Word {
    factors.iter().fold(Word::empty(), |acc, c| multiply(&acc, &c.word()))
}

/// One move of a rewrite certificate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewriteStep {
    /// Insert `letter · letter̄` before position `at`; no reduction follows.
    Insert { at: usize, letter: Simplex1 },
    /// Exchange the adjacent loops `w[at..at+left)` and
    /// `w[at+left..at+left+right)`, whose supports lie under `witness.0 ⊥
    /// witness.1`; the word is freely reduced afterwards.
    Swap { at: usize, left: usize, right: usize, witness: (ElemId, ElemId) },
}

/// Moves taking `reduce(start)` to the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteCertificate {
    pub start: Word,
    pub steps: Vec<RewriteStep>,
}

impl RewriteCertificate {
    /// Replays every step, checking legality, and returns the final word.
    pub fn replay(&self, p: &CausalPoset) -> Result<Word> {
        let mut w = reduce(&self.start).into_letters();
        for (k, step) in self.steps.iter().enumerate() {
            let bad = |why: &str| Error::InvalidSimplex(format!("certificate step {k}: {why}"));
            match *step {
                RewriteStep::Insert { at, letter } => {
                    if at > w.len() {
                        return Err(bad("insertion out of range"));
                    }
                    if !letter.is_valid(p) || !letter.is_tangent(p) {
                        return Err(bad("inserted letter is not a generator"));
                    }
                    w.splice(at..at, [letter, letter.opposite()]);
                }
                RewriteStep::Swap { at, left, right, witness } => {
                    if left == 0 || right == 0 || at + left + right > w.len() {
                        return Err(bad("swap out of range"));
                    }
                    let a = Word::new(w[at..at + left].to_vec());
                    let b = Word::new(w[at + left..at + left + right].to_vec());
                    if is_loop(&a).is_none() || is_loop(&b).is_none() {
                        return Err(bad("swapped blocks are not loops"));
                    }
                    let (o1, o2) = witness;
                    if !p.contains(o1) || !p.contains(o2) || !p.perp(o1, o2) {
                        return Err(bad("witness pair is not causally disjoint"));
                    }
                    let under = |x: &Word, o: ElemId| reduce(x).letters().iter().all(|l| p.leq(l.support, o));
                    if !under(&a, o1) || !under(&b, o2) {
                        return Err(bad("block support exceeds witness"));
                    }
                    let mut next = w[..at].to_vec();
                    next.extend_from_slice(b.letters());
                    next.extend_from_slice(a.letters());
                    next.extend_from_slice(&w[at + left + right..]);
                    w = reduce(&Word::new(next)).into_letters();
                }
            }
        }
        Ok(Word::new(w))
    }

    /// True when replay is legal and ends at the empty word.
    pub fn verify(&self, p: &CausalPoset) -> bool {
        matches!(self.replay(p), Ok(w) if w.is_empty())
    }

    /// Certificate for the inverse of `start`.
    pub fn mirrored(&self) -> RewriteCertificate {
        let mut len = reduce(&self.start).len();
        let mut steps = Vec::with_capacity(self.steps.len());
        // lengths before each step are needed to mirror positions
        let mut w = reduce(&self.start).into_letters();
        for step in &self.steps {
            match *step {
                RewriteStep::Insert { at, letter } => {
                    steps.push(RewriteStep::Insert { at: len - at, letter });
                    w.splice(at..at, [letter, letter.opposite()]);
                }
                RewriteStep::Swap { at, left, right, witness } => {
                    steps.push(RewriteStep::Swap {
                        at: len - at - left - right,
                        left: right,
                        right: left,
                        witness: (witness.1, witness.0),
                    });
                    let mut next = w[..at].to_vec();
                    next.extend_from_slice(&w[at + left..at + left + right]);
                    next.extend_from_slice(&w[at..at + left]);
                    next.extend_from_slice(&w[at + left + right..]);
                    w = reduce(&Word::new(next)).into_letters();
                }
            }
            len = w.len();
        }
        RewriteCertificate { start: self.start.inverse(), steps }
    }

    /// Letterwise image under a morphism; positions are unchanged.
    pub fn map(&self, psi: &PosetMorphism) -> RewriteCertificate {
        RewriteCertificate {
            start: crate::loopgrp::apply_morphism(psi, &self.start),
            steps: self
                .steps
                .iter()
                .map(|s| match *s {
                    RewriteStep::Insert { at, letter } => {
                        RewriteStep::Insert { at, letter: morphism_image(psi, letter) }
                    }
                    RewriteStep::Swap { at, left, right, witness } => RewriteStep::Swap {
                        at,
                        left,
                        right,
                        witness: (psi.apply(witness.0), psi.apply(witness.1)),
                    },
                })
                .collect(),
        }
    }
}

/// Exponent sums per positive generator. Involutive letters `(s; a, a)` have
/// order two and contribute nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianImage(pub BTreeMap<Simplex1, i64>);

impl AbelianImage {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &AbelianImage) -> AbelianImage {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            *out.entry(*k).or_insert(0) += v;
        }
        out.retain(|_, v| *v != 0);
        AbelianImage(out)
    }

    pub fn neg(&self) -> AbelianImage {
        AbelianImage(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }
}

pub fn abelianize(w: &Word) -> AbelianImage {
    let mut out: BTreeMap<Simplex1, i64> = BTreeMap::new();
    for &b in w.letters() {
        let g = Generator::of(b);
        if g.is_involution() {
            continue;
        }
        *out.entry(g.simplex).or_insert(0) += if g.inverted { -1 } else { 1 };
    }
    out.retain(|_, v| *v != 0);
    AbelianImage(out)
}

/// Evidence that two words differ in the quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub separator: String,
    pub detail: String,
    /// Size of the difference in the separator's own units.
    pub magnitude: f64,
}

/// A group homomorphism out of the free group that kills every causal
/// commutator, used to prove inequality.
pub trait Separator: Send + Sync {
    fn name(&self) -> String;
    /// `Some` when the images of `a` and `b` provably differ.
    fn separate(&self, a: &Word, b: &Word) -> Option<Separation>;
}

pub struct AbelianSeparator;

impl Separator for AbelianSeparator {
    fn name(&self) -> String {
        "abelianization".into()
    }

    fn separate(&self, a: &Word, b: &Word) -> Option<Separation> {
        let diff = abelianize(a).add(&abelianize(b).neg());
        let (g, v) = diff.0.iter().next()?;
        Some(Separation {
            separator: self.name(),
            detail: format!("exponent of generator {g:?} differs by {v}"),
            magnitude: diff.0.values().map(|v| v.unsigned_abs() as f64).sum(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Equal(RewriteCertificate),
    Unequal(Separation),
    Unknown { explored: usize },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal(_))
    }

    pub fn is_unequal(&self) -> bool {
        matches!(self, Verdict::Unequal(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equal(_) => "equal",
            Verdict::Unequal(_) => "unequal",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// Outcome of transporting a quotient equality along a morphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SquareReport {
    pub source_equal: bool,
    /// The mapped certificate replays to the empty word in the target.
    pub target_certified: bool,
}

impl SquareReport {
    /// Commutes when source equality transports to target equality.
    pub fn commutes(&self) -> bool {
        !self.source_equal || self.target_certified
    }
}

/// Decides `a = b` in the source quotient and, when equal, replays the
/// letterwise image of the certificate in the target.
pub fn quotient_image_under_morphism(
    source: &QuotientEngine,
    target: &CausalPoset,
    psi: &PosetMorphism,
    a: &Word,
    b: &Word,
) -> SquareReport {
    match source.equal(a, b) {
        Verdict::Equal(cert) => SquareReport { source_equal: true, target_certified: cert.map(psi).verify(target) },
        _ => SquareReport { source_equal: false, target_certified: false },
    }
}
