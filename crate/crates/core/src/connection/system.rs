//! Connections induced by a loop representation through path-frames, and
//! connection systems with their causality and covariance checks.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Connection1Cochain, LoopRepresentation, PathFrame, PathFrameSystem, UnitaryValue};
use crate::causet::{CausalPoset, ElemId, SymmetryAction};
use crate::error::{Error, Result};
use crate::loopgrp::{is_loop, multiply, Word};
use crate::net::fibre_generators;
use crate::simplex::{morphism_image, tangent_simplices, Simplex1};

/// `p̄_(o,∂₀b) b p_(o,∂₁b)`, a loop at the pole.
pub fn framed_loop(frame: &PathFrame, b: Simplex1) -> Result<Word> {
    let to = frame.require(b.d0)?.inverse();
    let from = frame.require(b.d1)?;
    Ok(multiply(&multiply(&to, &Word::letter(b)), from))
}

/// `u(b) = w(p̄_(o,∂₀b) b p_(o,∂₁b))` on the given letters.
pub fn connection_from_rep(
    rep: &dyn LoopRepresentation,
    frame: &PathFrame,
    letters: &[Simplex1],
) -> Result<Connection1Cochain> {
    let values = letters
        .par_iter()
        .map(|&b| Ok((b, rep.word(&framed_loop(frame, b)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Connection1Cochain::from_values(values))
}

/// One connection per base element.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConnectionSystem {
    pub per_base: BTreeMap<ElemId, Connection1Cochain>,
}

impl ConnectionSystem {
    /// `u_o := u` for every base.
    pub fn constant(u: &Connection1Cochain, bases: impl IntoIterator<Item = ElemId>) -> Self {
        ConnectionSystem { per_base: bases.into_iter().map(|o| (o, u.clone())).collect() }
    }

    pub fn base(&self, o: ElemId) -> Option<&Connection1Cochain> {
        self.per_base.get(&o)
    }

    /// `w(p) = u_o(p)` for a loop `p` at `o`; the empty word gives the
    /// identity.
    pub fn loop_value(&self, rep: &dyn LoopRepresentation, p: &Word) -> Result<UnitaryValue> {
        if p.is_empty() {
            return Ok(rep.identity());
        }
        let o = is_loop(p).ok_or(Error::NotLoops)?;
        self.per_base.get(&o).ok_or_else(|| Error::MissingValue(format!("base {o:?}")))?.holonomy(rep, p)
    }

    /// True when `p` is a loop whose letters all carry values at its base.
    pub fn covers(&self, p: &Word) -> bool {
        is_loop(p)
            .and_then(|o| self.per_base.get(&o))
            .is_some_and(|u| p.letters().iter().all(|b| u.get(b).is_some()))
    }
}

/// The connection system of `rep` over every frame of `system` on every
/// tangent simplex.
pub fn build_connection_system(
    p: &CausalPoset,
    rep: &dyn LoopRepresentation,
    system: &PathFrameSystem,
) -> Result<ConnectionSystem> {
    let bases: Vec<ElemId> = system.poles().collect();
    build_connection_system_on(rep, system, &bases, &tangent_simplices(p))
}

/// The connection system restricted to some bases and letters.
pub fn build_connection_system_on(
    rep: &dyn LoopRepresentation,
    system: &PathFrameSystem,
    bases: &[ElemId],
    letters: &[Simplex1],
) -> Result<ConnectionSystem> {
    let mut per_base = BTreeMap::new();
    for &o in bases {
        let frame = system.frame(o).ok_or_else(|| Error::MissingValue(format!("frame over {o:?}")))?;
        per_base.insert(o, connection_from_rep(rep, frame, letters)?);
    }
    Ok(ConnectionSystem { per_base })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemCheck {
    /// Length cap of the fibre loops compared for causality.
    pub loop_cap: usize,
    pub tolerance: f64,
}

impl Default for SystemCheck {
    fn default() -> Self {
        SystemCheck { loop_cap: 2, tolerance: 1e-6 }
    }
}

/// `[u_o(g), u_a(h)]` for loops under a causally disjoint pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityCheck {
    pub pair: (ElemId, ElemId),
    pub g: Word,
    pub h: Word,
    pub deviation: f64,
}

/// Worst deviation of `u_{s(o)}(s(b))` from `Ad_{Γ_s}(u_o(b))` over the
/// letters present at both bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CovarianceCheck {
    pub group_element: usize,
    pub base: ElemId,
    pub letters: usize,
    pub worst: Option<Simplex1>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemReport {
    pub tolerance: f64,
    pub causality: Vec<CausalityCheck>,
    pub covariance: Vec<CovarianceCheck>,
    /// Largest deviation of `u_o(b̄)` from `u_o(b)⁻¹`.
    pub inverse_defect: f64,
    /// Fibre loops without values at their base.
    pub skipped_loops: usize,
}

impl SystemReport {
    pub fn causality_holds(&self) -> bool {
        self.causality.iter().all(|c| c.deviation <= self.tolerance)
    }

    pub fn covariance_holds(&self) -> bool {
        self.covariance.iter().all(|c| c.deviation <= self.tolerance)
    }

    pub fn holds(&self) -> bool {
        self.causality_holds() && self.covariance_holds() && self.inverse_defect <= self.tolerance
    }

    pub fn max_causality_deviation(&self) -> f64 {
        self.causality.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    pub fn max_covariance_deviation(&self) -> f64 {
        self.covariance.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    /// Failed checks with their location.
    pub fn violations(&self, p: &CausalPoset) -> Vec<String> {
        let mut out = Vec::new();
        for c in self.causality.iter().filter(|c| c.deviation > self.tolerance) {
            out.push(format!(
                "causality under ({}, {}): [{:?}, {:?}] deviates by {:e}",
                p.label(c.pair.0),
                p.label(c.pair.1),
                c.g,
                c.h,
                c.deviation
            ));
        }
        for c in self.covariance.iter().filter(|c| c.deviation > self.tolerance) {
            out.push(format!(
                "covariance of group element {} at base {}: letter {:?} deviates by {:e}",
                c.group_element,
                p.label(c.base),
                c.worst,
                c.deviation
            ));
        }
        if self.inverse_defect > self.tolerance {
            out.push(format!("u(b̄) deviates from u(b)⁻¹ by {:e}", self.inverse_defect));
        }
        out
    }
}

/// Causality of fibre loops under every causally disjoint pair, covariance
/// under `act` on every base and letter present, and `u(b̄) = u(b)⁻¹`.
pub fn check_system(
    p: &CausalPoset,
    rep: &dyn LoopRepresentation,
    sys: &ConnectionSystem,
    act: Option<&SymmetryAction>,
    cfg: &SystemCheck,
) -> Result<SystemReport> {
    let fibres: BTreeMap<ElemId, Vec<Word>> =
        p.elements().map(|o| (o, fibre_generators(p, o, cfg.loop_cap).generators)).collect();
    let mut skipped: HashSet<&Word> = HashSet::new();
    let mut seen: HashSet<(&Word, &Word)> = HashSet::new();
    let mut jobs = Vec::new();
    for x in p.elements() {
        for y in p.elements().filter(|&y| x < y && p.perp(x, y)) {
            for g in &fibres[&x] {
                if !sys.covers(g) {
                    skipped.insert(g);
                    continue;
                }
                for h in &fibres[&y] {
                    if !sys.covers(h) {
                        skipped.insert(h);
                    } else if seen.insert((g, h)) {
                        jobs.push(((x, y), g, h));
                    }
                }
            }
        }
    }
    let causality = jobs
        .par_iter()
        .map(|&(pair, g, h)| {
            let d = rep.commutator_deviation(&sys.loop_value(rep, g)?, &sys.loop_value(rep, h)?)?;
            Ok(CausalityCheck { pair, g: g.clone(), h: h.clone(), deviation: d })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut covariance = Vec::new();
    if let Some(act) = act {
        for s in act.group() {
            let psi = act.morphism(s);
            for (&o, u) in &sys.per_base {
                let Some(target) = sys.per_base.get(&act.act(s, o)) else { continue };
                let mut check = CovarianceCheck { group_element: s, base: o, letters: 0, worst: None, deviation: 0.0 };
                for (&b, v) in u.iter() {
                    let Some(image) = target.get(&morphism_image(&psi, b)) else { continue };
                    let d = rep.deviation(image, &rep.transport(s, v)?)?;
                    check.letters += 1;
                    if check.worst.is_none() || d > check.deviation {
                        check.worst = Some(b);
                        check.deviation = d;
                    }
                }
                covariance.push(check);
            }
        }
    }
    let mut inverse_defect: f64 = 0.0;
    for u in sys.per_base.values() {
        inverse_defect = inverse_defect.max(u.inverse_defect(rep)?);
    }
    Ok(SystemReport { tolerance: cfg.tolerance, causality, covariance, inverse_defect, skipped_loops: skipped.len() })
}
