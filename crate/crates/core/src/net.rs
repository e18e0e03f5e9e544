//! The net of causal loops at group level: fibres of loops below each
//! element, and checks of isotony, causality and covariance on their
//! generators.
//!
//! A fibre stores one representative per inverse pair, so the generating set
//! it stands for is closed under inverse.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, SymmetryAction};
use crate::error::{Error, Result};
use crate::loopgrp::{apply_morphism, is_loop, multiply, Word};
use crate::quotient::{QuotientEngine, Verdict};
use crate::simplex::{tangent_simplices, Simplex1};

/// Generators of the loop group over `(K|o)`: reduced loops up to a length
/// cap, one per inverse pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fibre {
    pub base: ElemId,
    /// Length cap actually enumerated.
    pub cap: usize,
    pub generators: Vec<Word>,
}

impl Fibre {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Membership of `w` or its inverse.
    pub fn contains(&self, w: &Word) -> bool {
        let c = canonical(w.letters());
        self.generators.binary_search(&c).is_ok()
    }
}

fn canonical(letters: &[Simplex1]) -> Word {
    let inv: Vec<Simplex1> = letters.iter().rev().map(|b| b.opposite()).collect();
    Word::new(if inv.as_slice() < letters { inv } else { letters.to_vec() })
}

/// Reduced loops over `(K|o)` of length at most `cap`; `None` when more than
/// `budget` generators would be produced.
pub fn fibre_generators_within(p: &CausalPoset, o: ElemId, cap: usize, budget: usize) -> Option<Fibre> {
    let letters: Vec<Simplex1> =
        tangent_simplices(p).into_iter().filter(|b| p.leq(b.support, o)).collect();
    let mut by_d0: HashMap<ElemId, Vec<Simplex1>> = HashMap::new();
    for &b in &letters {
        by_d0.entry(b.d0).or_default().push(b);
    }
    let mut found: BTreeSet<Word> = BTreeSet::new();
    let mut path: Vec<Simplex1> = Vec::with_capacity(cap);
    fn extend(
        path: &mut Vec<Simplex1>,
        by_d0: &HashMap<ElemId, Vec<Simplex1>>,
        cap: usize,
        budget: usize,
        found: &mut BTreeSet<Word>,
    ) -> bool {
        let (first, last) = (path[0], path[path.len() - 1]);
        if first.d0 == last.d1 {
            found.insert(canonical(path));
            if found.len() > budget {
                return false;
            }
        }
        if path.len() == cap {
            return true;
        }
        for &b in by_d0.get(&last.d1).map(Vec::as_slice).unwrap_or(&[]) {
            if b == last.opposite() {
                continue;
            }
            path.push(b);
            let ok = extend(path, by_d0, cap, budget, found);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    if cap > 0 {
        for &b in &letters {
            path.push(b);
            let ok = extend(&mut path, &by_d0, cap, budget, &mut found);
            path.pop();
            if !ok {
                return None;
            }
        }
    }
    Some(Fibre { base: o, cap, generators: found.into_iter().collect() })
}

/// All reduced loops over `(K|o)` of length at most `cap`.
pub fn fibre_generators(p: &CausalPoset, o: ElemId, cap: usize) -> Fibre {
    fibre_generators_within(p, o, cap, usize::MAX).expect("unbounded budget")
}

/// Fibres of every element, each at the largest cap up to `cap` whose
/// enumeration stays within `budget` generators.
#[derive(Debug, Clone)]
pub struct Net<'a> {
    pub poset: &'a CausalPoset,
    pub fibres: Vec<Fibre>,
}

impl<'a> Net<'a> {
    pub fn build(poset: &'a CausalPoset, cap: usize, budget: usize) -> Self {
        let fibres = poset
            .elements()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&o| {
                (0..=cap)
                    .rev()
                    .find_map(|c| fibre_generators_within(poset, o, c, budget))
                    .expect("cap zero always fits")
            })
            .collect();
        Net { poset, fibres }
    }

    pub fn fibre(&self, o: ElemId) -> &Fibre {
        &self.fibres[o.idx()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotonyEntry {
    pub small: ElemId,
    pub large: ElemId,
    pub generators: usize,
    pub holds: bool,
}

/// Every generator of the `o`-fibre is a loop over `(K|a)`.
pub fn check_isotony(p: &CausalPoset, fibre: &Fibre, a: ElemId) -> Result<bool> {
    if !p.leq(fibre.base, a) {
        return Err(Error::InvalidRange(format!("{} is not below {}", p.label(fibre.base), p.label(a))));
    }
    Ok(fibre.generators.iter().all(|g| is_loop(g).is_some() && g.letters().iter().all(|b| p.leq(b.support, a))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityEntry {
    pub pair: (ElemId, ElemId),
    pub g: Word,
    pub h: Word,
    pub verdict: String,
    /// Number of certificate steps when equal.
    pub steps: Option<usize>,
    /// Commutator deviation reported by the backend, if any.
    pub phase: Option<f64>,
}

/// A representation in which commutators of generators can be measured.
pub trait CommutatorProbe: Sync {
    /// Size of `ρ(g)ρ(h) − ρ(h)ρ(g)` in the probe's own units.
    fn commutator_deviation(&self, g: &Word, h: &Word) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub entries: Vec<CausalityEntry>,
    pub tolerance: f64,
}

impl CausalityReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == "equal" && e.phase.is_none_or(|ph| ph.abs() <= self.tolerance))
    }
}

fn causality_entry(
    engine: &QuotientEngine,
    pair: (ElemId, ElemId),
    g: &Word,
    h: &Word,
    probe: Option<&dyn CommutatorProbe>,
) -> CausalityEntry {
    let v = engine.equal(&multiply(g, h), &multiply(h, g));
    let steps = match &v {
        Verdict::Equal(c) if c.verify(engine.poset()) => Some(c.steps.len()),
        _ => None,
    };
    CausalityEntry {
        pair,
        g: g.clone(),
        h: h.clone(),
        verdict: v.label().to_string(),
        steps,
        phase: probe.map(|pr| pr.commutator_deviation(g, h)),
    }
}

/// `gh = hg` in the quotient for every generator pair of two causally
/// disjoint fibres, optionally measured in a representation.
pub fn check_causality(
    engine: &QuotientEngine,
    f1: &Fibre,
    f2: &Fibre,
    probe: Option<&dyn CommutatorProbe>,
    tolerance: f64,
) -> Result<CausalityReport> {
    let p = engine.poset();
    if !p.perp(f1.base, f2.base) {
        return Err(Error::NotCausallyDisjoint);
    }
    let pairs: Vec<(&Word, &Word)> =
        f1.generators.iter().flat_map(|g| f2.generators.iter().map(move |h| (g, h))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(g, h)| causality_entry(engine, (f1.base, f2.base), g, h, probe))
        .collect();
    Ok(CausalityReport { entries, tolerance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CovarianceEntry {
    pub group_element: usize,
    pub base: ElemId,
    pub image: ElemId,
    pub generators: usize,
    pub bijective: bool,
    /// `α_g` followed by `α_h` agrees with `α_{gh}` on this fibre.
    pub composition: bool,
}

/// For each group element `g` and element `o`: `α_g` maps the `o`-fibre
/// onto the `g·o`-fibre, commutes with inclusions and composes correctly.
pub fn symmetry_on_net(net: &Net, act: &SymmetryAction) -> Vec<CovarianceEntry> {
    let p = net.poset;
    let work: Vec<(usize, ElemId)> = act.group().flat_map(|g| p.elements().map(move |o| (g, o))).collect();
    work.par_iter()
        .map(|&(g, o)| {
            let psi = act.morphism(g);
            let src = net.fibre(o);
            let image = act.act(g, o);
            let tgt = net.fibre(image);
            let mapped: BTreeSet<Word> =
                src.generators.iter().map(|w| canonical(apply_morphism(&psi, w).letters())).collect();
            let bijective = src.cap == tgt.cap
                && mapped.len() == src.len()
                && mapped.len() == tgt.len()
                && mapped.iter().all(|w| tgt.contains(w))
                && p.upper_set(o).iter().all(|&a| {
                    // compatibility with the inclusion o ≤ a
                    mapped.iter().all(|w| w.letters().iter().all(|b| p.leq(b.support, act.act(g, a))))
                });
            let composition = act.group().all(|h| {
                let gh = act.morphism(act.mul(g, h));
                let ph = act.morphism(h);
                src.generators.iter().all(|w| apply_morphism(&gh, w) == apply_morphism(&psi, &apply_morphism(&ph, w)))
            });
            CovarianceEntry { group_element: g, base: o, image, generators: src.len(), bijective, composition }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub isotony: Vec<IsotonyEntry>,
    pub causality: Vec<CausalityEntry>,
    pub covariance: Vec<CovarianceEntry>,
}

impl NetReport {
    pub fn isotony_holds(&self) -> bool {
        self.isotony.iter().all(|e| e.holds)
    }

    pub fn causality_holds(&self) -> bool {
        self.causality.iter().all(|e| e.steps.is_some())
    }

    pub fn covariance_holds(&self) -> bool {
        self.covariance.iter().all(|e| e.bijective && e.composition)
    }

    pub fn holds(&self) -> bool {
        self.isotony_holds() && self.causality_holds() && self.covariance_holds()
    }
}

/// Isotony for every strictly comparable pair, causality for every generator
/// pair of every unordered causally disjoint pair, and covariance under
/// `act`.
pub fn check_net(net: &Net, engine: &QuotientEngine, act: &SymmetryAction) -> NetReport {
    let p = net.poset;
    let mut isotony = Vec::new();
    for o in p.elements() {
        for a in p.elements().filter(|&a| p.lt(o, a)) {
            let f = net.fibre(o);
            isotony.push(IsotonyEntry {
                small: o,
                large: a,
                generators: f.len(),
                holds: check_isotony(p, f, a).unwrap_or(false),
            });
        }
    }
    let mut seen: HashSet<(&Word, &Word)> = HashSet::new();
    let mut jobs = Vec::new();
    for o in p.elements() {
        for a in p.elements().filter(|&a| o < a && p.perp(o, a)) {
            for g in &net.fibre(o).generators {
                for h in &net.fibre(a).generators {
                    if seen.insert((g, h)) {
                        jobs.push(((o, a), g, h));
                    }
                }
            }
        }
    }
    let causality = jobs.par_iter().map(|&(pair, g, h)| causality_entry(engine, pair, g, h, None)).collect();
    NetReport { isotony, causality, covariance: symmetry_on_net(net, act) }
}
