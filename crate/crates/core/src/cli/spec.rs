//! JSON input specs: posets with optional symmetry, and the field
//! configuration.

use serde::{Deserialize, Serialize};

use crate::causet::{
    build_causal_set_poset, build_circle, build_minkowski_lattice, builders::CAUSAL_SET_CAP, q_from_f64,
    CausalPoset, CausalSetSpec, DoubleConeSpec, ElemId, GeoMap, SymmetryAction,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::weyl::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeSpec {
    /// `(t, x, y, z)`
    pub center: [f64; 4],
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SprinkleSpec {
    pub seed: u64,
    pub count: usize,
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PosetKind {
    /// Labels with generating order and ⊥ pairs, closed transitively and
    /// symmetrically.
    Explicit { elements: Vec<String>, order: Vec<(String, String)>, perp: Vec<(String, String)> },
    MinkowskiLattice { cones: Vec<ConeSpec> },
    #[serde(rename_all = "camelCase")]
    Circle { n: u32, min_length: u32, max_length: u32 },
    #[serde(rename_all = "camelCase")]
    CausalSet {
        #[serde(default)]
        points: Option<Vec<[f64; 4]>>,
        #[serde(default)]
        sprinkle: Option<SprinkleSpec>,
        max_subset_size: usize,
    },
}

/// A geometric map: a signed permutation of the spatial axes followed by a
/// shift, or a rotation of an `n`-segment circle by `k` segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum GeoMapSpec {
    Affine { linear: [[i8; 3]; 3], shift: [f64; 4] },
    CircleShift { n: u32, k: u32 },
}

impl GeoMapSpec {
    pub fn to_geo_map(&self) -> GeoMap {
        match self {
            GeoMapSpec::Affine { linear, shift } => GeoMap::Affine { linear: *linear, shift: shift.map(q_from_f64) },
            GeoMapSpec::CircleShift { n, k } => GeoMap::CircleShift { n: *n, k: *k },
        }
    }
}

/// Generators as images of the element list, in order, and optionally the
/// geometric map realising each generator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymmetrySpec {
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_realization: Option<Vec<GeoMapSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetSpec {
    #[serde(flatten)]
    pub kind: PosetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySpec>,
}

impl PosetSpec {
    pub fn build(&self) -> Result<(CausalPoset, SymmetryAction)> {
        let p = self.build_poset()?;
        let act = match &self.symmetry {
            None => SymmetryAction::trivial(&p),
            Some(s) => build_symmetry(&p, s)?,
        };
        let problems = act.validate(&p);
        if !problems.is_empty() {
            return Err(Error::InvalidAction(problems.join("; ")));
        }
        Ok((p, act))
    }

    fn build_poset(&self) -> Result<CausalPoset> {
        match &self.kind {
            PosetKind::Explicit { elements, order, perp } => {
                let index = |l: &str| {
                    elements.iter().position(|e| e == l).ok_or_else(|| Error::UnknownElement(l.to_string()))
                };
                let pairs = |v: &[(String, String)]| -> Result<Vec<(usize, usize)>> {
                    v.iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect()
                };
                CausalPoset::from_relations(elements.clone(), &pairs(order)?, &pairs(perp)?)
            }
            PosetKind::MinkowskiLattice { cones } => {
                let specs: Vec<DoubleConeSpec> =
                    cones.iter().map(|c| DoubleConeSpec::from_f64(c.center, c.radius)).collect();
                let p = build_minkowski_lattice(&specs)?;
                if cones.iter().all(|c| c.label.is_some()) {
                    p.relabel(cones.iter().map(|c| c.label.clone().unwrap_or_default()).collect())
                } else {
                    Ok(p)
                }
            }
            PosetKind::Circle { n, min_length, max_length } => build_circle(*n, *min_length..=*max_length),
            PosetKind::CausalSet { points, sprinkle, max_subset_size } => {
                let spec = match (points, sprinkle) {
                    (Some(pts), None) => CausalSetSpec {
                        points: pts.iter().map(|p| p.map(q_from_f64)).collect(),
                        seed: 0,
                        max_subset_size: *max_subset_size,
                    },
                    (None, Some(s)) => CausalSetSpec::sprinkle(s.seed, s.count, s.extent, *max_subset_size),
                    _ => return Err(Error::Parse("causal-set needs exactly one of points and sprinkle".into())),
                };
                build_causal_set_poset(&spec, CAUSAL_SET_CAP)
            }
        }
    }

    /// The spec of a named fixture.
    pub fn fixture(name: &str) -> Result<PosetSpec> {
        let quarter = GeoMapSpec::Affine { linear: [[0, -1, 0], [1, 0, 0], [0, 0, 1]], shift: [0.0; 4] };
        let half = GeoMapSpec::Affine { linear: [[-1, 0, 0], [0, -1, 0], [0, 0, 1]], shift: [0.0; 4] };
        let geometric = |maps: Vec<GeoMapSpec>| {
            Some(SymmetrySpec { generators: Vec::new(), geometric_realization: Some(maps) })
        };
        let (p, symmetry) = match name {
            "diamond" => (fixtures::diamond(), None),
            "twotowers" => (fixtures::two_towers(), geometric(vec![half])),
            "minkowski" => (fixtures::minkowski(), geometric(vec![quarter])),
            "circle12" => {
                let kind = PosetKind::Circle { n: 12, min_length: 1, max_length: 3 };
                let symmetry = geometric(vec![GeoMapSpec::CircleShift { n: 12, k: 1 }]);
                return Ok(PosetSpec { kind, symmetry });
            }
            "causalset7" => {
                let kind = PosetKind::CausalSet {
                    points: None,
                    sprinkle: Some(SprinkleSpec { seed: 7, count: 6, extent: 1.0 }),
                    max_subset_size: 2,
                };
                return Ok(PosetSpec { kind, symmetry: None });
            }
            "swap" => {
                let (p, act) = fixtures::swap();
                let image = |s: usize| p.elements().map(|a| p.label(act.act(s, a)).to_string()).collect();
                let generators = act.group().filter(|&s| s != act.identity()).map(image).collect();
                return Ok(PosetSpec {
                    kind: explicit(&p),
                    symmetry: Some(SymmetrySpec { generators, geometric_realization: None }),
                });
            }
            other => return Err(Error::Parse(format!("unknown fixture `{other}`"))),
        };
        let cones = p
            .elements()
            .map(|a| {
                let c = p.cone(a).ok_or(Error::MissingGeometry)?;
                Ok(ConeSpec { center: c.center_f64(), radius: c.radius_f64(), label: Some(p.label(a).to_string()) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PosetSpec { kind: PosetKind::MinkowskiLattice { cones }, symmetry })
    }
}

/// Covering relations and ⊥ pairs of a poset as an explicit spec.
fn explicit(p: &CausalPoset) -> PosetKind {
    let l = |a: ElemId| p.label(a).to_string();
    let mut order = Vec::new();
    let mut perp = Vec::new();
    for a in p.elements() {
        for b in p.elements() {
            let covers = p.lt(a, b) && !p.elements().any(|c| p.lt(a, c) && p.lt(c, b));
            if covers {
                order.push((l(a), l(b)));
            }
            if a < b && p.perp(a, b) {
                perp.push((l(a), l(b)));
            }
        }
    }
    PosetKind::Explicit { elements: p.labels().to_vec(), order, perp }
}

fn build_symmetry(p: &CausalPoset, s: &SymmetrySpec) -> Result<SymmetryAction> {
    let perms = s
        .generators
        .iter()
        .map(|g| g.iter().map(|l| p.id(l)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    match &s.geometric_realization {
        None => SymmetryAction::from_permutations(p, &perms),
        Some(maps) => {
            let act = SymmetryAction::from_geo_maps(p, &maps.iter().map(GeoMapSpec::to_geo_map).collect::<Vec<_>>())?;
            if !perms.is_empty() {
                if perms.len() != maps.len() {
                    return Err(Error::InvalidAction("one geometric map is needed per generator".into()));
                }
                for (perm, map) in perms.iter().zip(maps) {
                    // the generator itself is the first element after the identity
                    let single = SymmetryAction::from_geo_maps(p, &[map.to_geo_map()])?;
                    if single.permutation(single.order().min(2) - 1) != perm.as_slice() {
                        return Err(Error::InvalidAction("generator disagrees with its geometric realization".into()));
                    }
                }
            }
            Ok(act)
        }
    }
}

/// The field configuration file; absent fields take their defaults.
pub type FieldSpec = QuadratureConfig;
