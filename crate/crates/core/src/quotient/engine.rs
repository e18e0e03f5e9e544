//! Breadth-first search for rewrite certificates.
//!
//! States are words; each move either exchanges two adjacent loop blocks
//! under causally disjoint dominators (then reduces) or inserts a cancelling
//! pair `g ḡ`. Frontier expansion runs in parallel and is merged in frontier
//! order, so results do not depend on the thread count.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{AbelianSeparator, RewriteCertificate, RewriteStep, Separator, Verdict};
use crate::causet::{CausalPoset, ElemId};
use crate::loopgrp::{multiply, reduce, slice_is_loop, Word};
use crate::simplex::Simplex1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum number of moves.
    pub max_depth: usize,
    /// Maximum number of distinct states visited.
    pub max_width: usize,
    /// Words longer than this are not explored.
    pub max_len: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_depth: 6, max_width: 20_000, max_len: 40 }
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn first_common(&self, other: &Bits) -> Option<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(k, (a, b))| k * 64 + (a & b).trailing_zeros() as usize)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    k * 64 + t
                })
            })
        })
    }
}

/// Upper sets and ⊥-neighbourhoods as bitsets.
struct PerpIndex {
    n: usize,
    up: Vec<Bits>,
    perp: Vec<Bits>,
}

impl PerpIndex {
    fn new(p: &CausalPoset) -> Self {
        let n = p.len();
        let mut up = vec![Bits::empty(n); n];
        let mut perp = vec![Bits::empty(n); n];
        for a in p.elements() {
            for b in p.elements() {
                if p.leq(a, b) {
                    up[a.idx()].set(b.idx());
                }
                if p.perp(a, b) {
                    perp[a.idx()].set(b.idx());
                }
            }
        }
        PerpIndex { n, up, perp }
    }

    /// First `(o1, o2)` in lexicographic order with `o1 ∈ d1`, `o2 ∈ d2`,
    /// `o1 ⊥ o2`.
    fn witness(&self, d1: &Bits, d2: &Bits) -> Option<(ElemId, ElemId)> {
        d1.ones()
            .find_map(|o1| self.perp[o1].first_common(d2).map(|o2| (ElemId(o1 as u32), ElemId(o2 as u32))))
    }
}

pub struct QuotientEngine<'a> {
    poset: &'a CausalPoset,
    index: PerpIndex,
    pub config: EngineConfig,
    separators: Vec<Box<dyn Separator + 'a>>,
}

struct Node {
    word: Vec<Simplex1>,
    parent: usize,
    step: Option<RewriteStep>,
}

impl<'a> QuotientEngine<'a> {
    /// Engine with the abelianization separator.
    pub fn new(poset: &'a CausalPoset, config: EngineConfig) -> Self {
        QuotientEngine { poset, index: PerpIndex::new(poset), config, separators: Vec::new() }
    }

    /// Adds a separator consulted after the search fails.
    pub fn with_separator(mut self, s: Box<dyn Separator + 'a>) -> Self {
        self.separators.push(s);
        self
    }

    pub fn poset(&self) -> &CausalPoset {
        self.poset
    }

    /// Abelianization, then the certificate search, then the remaining
    /// separators.
    pub fn equal(&self, a: &Word, b: &Word) -> Verdict {
        if let Some(sep) = AbelianSeparator.separate(a, b) {
            return Verdict::Unequal(sep);
        }
        let start = multiply(a, &b.inverse());
        let explored = match self.search(&start) {
            Ok(cert) => return Verdict::Equal(cert),
            Err(explored) => explored,
        };
        for s in &self.separators {
            if let Some(sep) = s.separate(a, b) {
                return Verdict::Unequal(sep);
            }
        }
        Verdict::Unknown { explored }
    }

    /// Certificate reducing `start` to the identity, or the number of states
    /// explored.
    pub fn search(&self, start: &Word) -> Result<RewriteCertificate, usize> {
        let root = reduce(start).into_letters();
        if root.is_empty() {
            return Ok(RewriteCertificate { start: start.clone(), steps: Vec::new() });
        }
        let mut alphabet: Vec<Simplex1> = root.iter().flat_map(|&b| [b, b.opposite()]).collect();
        alphabet.sort();
        alphabet.dedup();

        let mut nodes = vec![Node { word: root.clone(), parent: usize::MAX, step: None }];
        let mut seen: HashMap<Vec<Simplex1>, usize> = HashMap::from([(root, 0)]);
        let mut frontier = vec![0usize];
        for _ in 0..self.config.max_depth {
            let expanded: Vec<Vec<(Vec<Simplex1>, RewriteStep)>> =
                frontier.par_iter().map(|&i| self.successors(&nodes[i].word, &alphabet)).collect();
            let mut next = Vec::new();
            for (&parent, succ) in frontier.iter().zip(expanded) {
                for (word, step) in succ {
                    if seen.contains_key(&word) {
                        continue;
                    }
                    let done = word.is_empty();
                    nodes.push(Node { word: word.clone(), parent, step: Some(step) });
                    let id = nodes.len() - 1;
                    if done {
                        return Ok(RewriteCertificate { start: start.clone(), steps: trace(&nodes, id) });
                    }
                    seen.insert(word, id);
                    next.push(id);
                    if nodes.len() >= self.config.max_width {
                        return Err(nodes.len());
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Err(nodes.len())
    }

    fn successors(&self, w: &[Simplex1], alphabet: &[Simplex1]) -> Vec<(Vec<Simplex1>, RewriteStep)> {
        let n = w.len();
        let idx = &self.index;
        let mut out = Vec::new();
        for i in 0..n {
            let mut dom_a = Bits::full(idx.n);
            for j in i + 1..n {
                if j > i + 1 && w[j - 2].d1 != w[j - 1].d0 {
                    break;
                }
                dom_a.and_assign(&idx.up[w[j - 1].support.idx()]);
                if w[i].d0 != w[j - 1].d1 {
                    continue;
                }
                let mut dom_b = Bits::full(idx.n);
                for k in j + 1..=n {
                    if k > j + 1 && w[k - 2].d1 != w[k - 1].d0 {
                        break;
                    }
                    dom_b.and_assign(&idx.up[w[k - 1].support.idx()]);
                    if w[j].d0 != w[k - 1].d1 || w[i..j] == w[j..k] {
                        continue;
                    }
                    debug_assert!(slice_is_loop(&w[i..j]) && slice_is_loop(&w[j..k]));
                    if let Some(witness) = idx.witness(&dom_a, &dom_b) {
                        let mut swapped = w[..i].to_vec();
                        swapped.extend_from_slice(&w[j..k]);
                        swapped.extend_from_slice(&w[i..j]);
                        swapped.extend_from_slice(&w[k..]);
                        let step = RewriteStep::Swap { at: i, left: j - i, right: k - j, witness };
                        let reduced = reduce(&Word::new(swapped)).into_letters();
                        if reduced.is_empty() {
                            return vec![(reduced, step)];
                        }
                        out.push((reduced, step));
                    }
                }
            }
        }
        if n + 2 <= self.config.max_len {
            for at in 0..=n {
                for &g in alphabet {
                    if (at > 0 && w[at - 1] == g.opposite()) || (at < n && w[at] == g) {
                        continue;
                    }
                    let mut inserted = w.to_vec();
                    inserted.splice(at..at, [g, g.opposite()]);
                    out.push((inserted, RewriteStep::Insert { at, letter: g }));
                }
            }
        }
        out
    }
}

fn trace(nodes: &[Node], mut id: usize) -> Vec<RewriteStep> {
    let mut steps = Vec::new();
    while let Some(step) = &nodes[id].step {
        steps.push(step.clone());
        id = nodes[id].parent;
    }
    steps.reverse();
    steps
}

/// Decides `a = b` with the default separators and the given budget.
pub fn quotient_equal(p: &CausalPoset, a: &Word, b: &Word, max_depth: usize, max_width: usize) -> Verdict {
    let config = EngineConfig { max_depth, max_width, ..EngineConfig::default() };
    QuotientEngine::new(p, config).equal(a, b)
}
