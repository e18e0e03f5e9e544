//! Gauge transformations `g_a(o)` of connection systems, their group law,
//! the gauge induced by a change of path-frame system, and gauge groups.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Connection1Cochain, ConnectionSystem, LoopRepresentation, PathFrameSystem, UnitaryValue};
use crate::causet::{CausalPoset, ElemId, SymmetryAction};
use crate::error::{Error, Result};
use crate::loopgrp::{is_loop, multiply};
use crate::net::fibre_generators;

/// Fields `o ↦ g_a(o)` indexed by `a`; absent entries are the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransformation {
    pub fields: BTreeMap<ElemId, BTreeMap<ElemId, UnitaryValue>>,
}

impl GaugeTransformation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: ElemId, o: ElemId, v: UnitaryValue) {
        self.fields.entry(a).or_default().insert(o, v);
    }

    pub fn get(&self, a: ElemId, o: ElemId) -> Option<&UnitaryValue> {
        self.fields.get(&a).and_then(|f| f.get(&o))
    }

    /// `g_a(o)`.
    pub fn value(&self, rep: &dyn LoopRepresentation, a: ElemId, o: ElemId) -> UnitaryValue {
        self.get(a, o).cloned().unwrap_or_else(|| rep.identity())
    }

    fn entries(&self) -> impl Iterator<Item = (ElemId, ElemId, &UnitaryValue)> {
        self.fields.iter().flat_map(|(&a, f)| f.iter().map(move |(&o, v)| (a, o, v)))
    }

    /// `(g·h)_a(o) = g_a(o) h_a(o)`.
    pub fn compose(&self, rep: &dyn LoopRepresentation, h: &GaugeTransformation) -> Result<GaugeTransformation> {
        let keys: BTreeSet<(ElemId, ElemId)> =
            self.entries().map(|(a, o, _)| (a, o)).chain(h.entries().map(|(a, o, _)| (a, o))).collect();
        let mut out = GaugeTransformation::identity();
        for (a, o) in keys {
            out.set(a, o, rep.multiply(&self.value(rep, a, o), &h.value(rep, a, o))?);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> GaugeTransformation {
        let mut out = GaugeTransformation::identity();
        for (a, o, v) in self.entries() {
            out.set(a, o, v.inverse());
        }
        out
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.unitarity_defect()).fold(0.0, f64::max)
    }

    /// Largest deviation of `g_{s(a)}(s(o))` from `Ad_{Γ_s}(g_a(o))`.
    pub fn equivariance_defect(&self, rep: &dyn LoopRepresentation, act: &SymmetryAction) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in act.group() {
            for (a, o, v) in self.entries() {
                let image = self.value(rep, act.act(s, a), act.act(s, o));
                worst = worst.max(rep.deviation(&image, &rep.transport(s, v)?)?);
            }
        }
        Ok(worst)
    }

    /// `g_o(o) v g_o(o)*`, the transformed value of a loop at `o`.
    pub fn conjugate_at(&self, rep: &dyn LoopRepresentation, o: ElemId, v: &UnitaryValue) -> Result<UnitaryValue> {
        let g = self.value(rep, o, o);
        rep.conjugate(&g, v, &g.inverse())
    }

    /// Largest commutator of `g_a(a)` with the images of the fibre loops
    /// over `o`, for `a ≤ o`. Zero is sufficient for `Ad_{g_a(a)}` to
    /// stabilise the represented fibre.
    pub fn fibre_commutation_defect(
        &self,
        p: &CausalPoset,
        rep: &dyn LoopRepresentation,
        sys: &ConnectionSystem,
        loop_cap: usize,
    ) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for o in p.elements() {
            let images = fibre_generators(p, o, loop_cap)
                .generators
                .iter()
                .filter(|g| sys.covers(g))
                .map(|g| sys.loop_value(rep, g))
                .collect::<Result<Vec<_>>>()?;
            for a in p.lower_set(o) {
                let Some(g) = self.get(a, a) else { continue };
                for v in &images {
                    worst = worst.max(rep.commutator_deviation(g, v)?);
                }
            }
        }
        Ok(worst)
    }
}

/// `u^g_o(b) = g_o(∂₀b) u_o(b) g_o(∂₁b)*`.
pub fn apply_gauge(
    rep: &dyn LoopRepresentation,
    sys: &ConnectionSystem,
    g: &GaugeTransformation,
) -> Result<ConnectionSystem> {
    let mut per_base = BTreeMap::new();
    for (&o, u) in &sys.per_base {
        let mut out = Connection1Cochain::default();
        for (&b, v) in u.iter() {
            out.set(b, rep.conjugate(&g.value(rep, o, b.d0), v, &g.value(rep, o, b.d1).inverse())?);
        }
        per_base.insert(o, out);
    }
    Ok(ConnectionSystem { per_base })
}

/// `g_o(a) = w(q̄_(o,a) p_(o,a))` on the given bases, carrying the system
/// of `from` onto that of `to`. Each `g_o(o)` is the identity.
pub fn frame_change_gauge(
    rep: &dyn LoopRepresentation,
    from: &PathFrameSystem,
    to: &PathFrameSystem,
    bases: &[ElemId],
) -> Result<GaugeTransformation> {
    let mut g = GaugeTransformation::identity();
    for &o in bases {
        let missing = || Error::MissingValue(format!("frame over {o:?}"));
        let (pf, qf) = (from.frame(o).ok_or_else(missing)?, to.frame(o).ok_or_else(missing)?);
        for (&a, pa) in &pf.paths {
            let qa = qf.require(a)?;
            let w = multiply(&qa.inverse(), pa);
            debug_assert!(w.is_empty() || is_loop(&w) == Some(o));
            g.set(o, a, rep.word(&w)?);
        }
    }
    Ok(g)
}

/// One generator `g_a(a)` of the gauge group over `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeGenerator {
    /// Index into the supplied gauge transformations.
    pub gauge: usize,
    pub element: ElemId,
    pub value: UnitaryValue,
}

/// `{g_a(a) | g ∈ gauges, a ≤ o}`.
pub fn gauge_group_generators(
    p: &CausalPoset,
    rep: &dyn LoopRepresentation,
    gauges: &[GaugeTransformation],
    o: ElemId,
) -> Vec<GaugeGenerator> {
    let mut out = Vec::new();
    for (i, g) in gauges.iter().enumerate() {
        for a in p.lower_set(o) {
            out.push(GaugeGenerator { gauge: i, element: a, value: g.value(rep, a, a) });
        }
    }
    out
}
