//! Sampling check that a product of causal commutators lying in the loop
//! group is a product of commutators with loop conjugators.
//!
//! A product is re-expressed by cancelling adjacent factors whose product is
//! trivial until every surviving conjugator is a loop-group member; the
//! result is verified by comparing reduced words.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{make_causal_commutator, product_word, CausalCommutator};
use crate::causet::{CausalPoset, ElemId};
use crate::loopgrp::{is_loop_group_member, multiply, reduce, Word};
use crate::simplex::{tangent_simplices, Simplex1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaSample {
    pub factors: Vec<CausalCommutator>,
    /// Factors with loop conjugators, when re-expression succeeded.
    pub reexpressed: Option<Vec<CausalCommutator>>,
    /// Number of sampled factors whose conjugator is not a loop-group member.
    pub non_loop_conjugators: usize,
}

impl LemmaSample {
    pub fn success(&self) -> bool {
        self.reexpressed.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub samples: Vec<LemmaSample>,
    /// Products drawn in total, including those outside the loop group.
    pub drawn: usize,
}

impl LemmaReport {
    pub fn successes(&self) -> usize {
        self.samples.iter().filter(|s| s.success()).count()
    }

    pub fn all_succeeded(&self) -> bool {
        self.successes() == self.samples.len()
    }
}

/// Rewrites a product whose value lies in the loop group as a product of
/// commutators with loop conjugators, verified against the original.
pub fn reexpress_in_cl(factors: &[CausalCommutator]) -> Option<Vec<CausalCommutator>> {
    let target = reduce(&product_word(factors));
    if !is_loop_group_member(&target) {
        return None;
    }
    let mut stack: Vec<CausalCommutator> = Vec::with_capacity(factors.len());
    for f in factors {
        let cancels = stack.last().is_some_and(|top| reduce(&multiply(&top.word(), &f.word())).is_empty());
        if cancels {
            stack.pop();
        } else if !reduce(&f.word()).is_empty() {
            stack.push(f.clone());
        }
    }
    let ok = stack.iter().all(|f| f.in_cl) && reduce(&product_word(&stack)) == target;
    ok.then_some(stack)
}

/// Random loop of at most `max_len` letters whose supports lie below `top`.
pub fn random_loop_under(
    rng: &mut impl Rng,
    p: &CausalPoset,
    letters: &[Simplex1],
    top: ElemId,
    max_len: usize,
) -> Option<Word> {
    let local: Vec<Simplex1> = letters.iter().copied().filter(|b| p.leq(b.support, top)).collect();
    if local.is_empty() {
        return None;
    }
    for _ in 0..64 {
        let len = rng.gen_range(1..=max_len.max(1));
        let last = *local.choose(rng)?;
        let base = last.d1;
        let mut rev = vec![last];
        let mut at = last.d0;
        for k in 1..len {
            let closing = k + 1 == len;
            let options: Vec<Simplex1> =
                local.iter().copied().filter(|b| b.d1 == at && (!closing || b.d0 == base)).collect();
            match options.choose(rng) {
                Some(&b) => {
                    rev.push(b);
                    at = b.d0;
                }
                None => break,
            }
        }
        if at == base {
            rev.reverse();
            let w = Word::new(rev);
            if !reduce(&w).is_empty() {
                return Some(w);
            }
        }
    }
    None
}

/// Draws products of one to three causal commutators, sometimes padded with
/// a cancelling pair whose conjugator is an arbitrary word, and keeps those
/// lying in the loop group.
pub fn sample_commutator_products(
    p: &CausalPoset,
    count: usize,
    max_conj_len: usize,
    seed: u64,
) -> (Vec<Vec<CausalCommutator>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = tangent_simplices(p);
    let pairs: Vec<(ElemId, ElemId)> =
        p.elements().flat_map(|a| p.elements().map(move |b| (a, b))).filter(|&(a, b)| p.perp(a, b)).collect();
    let tops: Vec<ElemId> = p.elements().filter(|&o| letters.iter().any(|b| b.support == o)).collect();
    let mut out = Vec::new();
    let mut drawn = 0;
    if pairs.is_empty() || letters.is_empty() {
        return (out, drawn);
    }
    let draw = |rng: &mut ChaCha8Rng, loop_conj: bool| -> Option<CausalCommutator> {
        let &(o1, o2) = pairs.choose(rng)?;
        let lp = random_loop_under(rng, p, &letters, o1, 4)?;
        let lq = random_loop_under(rng, p, &letters, o2, 4)?;
        let w = if loop_conj {
            let o = *tops.choose(rng)?;
            random_loop_under(rng, p, &letters, o, max_conj_len).unwrap_or_default()
        } else {
            let len = rng.gen_range(1..=max_conj_len.max(1));
            Word::new((0..len).map(|_| *letters.choose(rng).unwrap()).collect())
        };
        make_causal_commutator(p, &w, &lp, &lq).ok()
    };
    let attempts = count * 200;
    while out.len() < count && drawn < attempts {
        drawn += 1;
        let k = rng.gen_range(1..=3);
        let mut factors: Vec<CausalCommutator> = Vec::with_capacity(k + 2);
        for _ in 0..k {
            let loop_conj = rng.gen_bool(0.6);
            if let Some(f) = draw(&mut rng, loop_conj) {
                factors.push(f);
            }
        }
        if rng.gen_bool(0.5) {
            if let Some(f) = draw(&mut rng, false) {
                let at = rng.gen_range(0..=factors.len());
                let inv = f.inverse();
                factors.splice(at..at, [f, inv]);
            }
        }
        if factors.is_empty() {
            continue;
        }
        if is_loop_group_member(&product_word(&factors)) {
            out.push(factors);
        }
    }
    (out, drawn)
}

/// Samples `count` loop-group products and re-expresses each.
pub fn check_lemma_cl(p: &CausalPoset, count: usize, max_conj_len: usize, seed: u64) -> LemmaReport {
    let (products, drawn) = sample_commutator_products(p, count, max_conj_len, seed);
    let samples = products
        .into_iter()
        .map(|factors| LemmaSample {
            non_loop_conjugators: factors.iter().filter(|f| !f.in_cl).count(),
            reexpressed: reexpress_in_cl(&factors),
            factors,
        })
        .collect();
    LemmaReport { samples, drawn }
}
