//! Free-field backend: the hyperboloid transform `E_m`, the symplectic form,
//! Weyl-element arithmetic, corona integrals and the field connection with
//! its non-triviality and non-flatness certificates.
//!
//! A Weyl element `(φ, F)` models `e^{iφ} exp(iΦ(F))`. Products follow the
//! canonical commutation relations:
//! `(φ_A, F_A)(φ_B, F_B) = (φ_A + φ_B − σ(F_A, F_B)/2, F_A + F_B)` with
//! `σ(f, g) = 2 Im⟨E_m f, E_m g⟩` and measure `d³p/ω` on the hyperboloid, so
//! the commutator `ABA⁻¹B⁻¹` is the pure phase `−σ(F_A, F_B)`.

pub mod corona;
pub mod field;
pub mod profile;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::causet::{q_to_f64, GeoMap, Q};
use crate::cochain::{Atom, TestFunction};
use crate::error::Result;

pub use corona::{corona_integral, CoronaEstimate};
pub use field::{
    certify_nonflat, certify_nontrivial, field_connection, holonomy, FieldConnection, NonflatWitness,
    NontrivialityCertificate, WeylSeparator,
};
pub use profile::{sinc, CompositeRule, ConvergenceEntry, HyperboloidProfile, QuadratureConfig, Tolerances};

/// Centre and scale of a bump.
pub type AtomKey = ([Q; 4], Q);

/// A real combination of bumps, keyed by centre and scale, with exact zeros
/// pruned.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<(AtomKey, f64)>", into = "Vec<(AtomKey, f64)>")]
pub struct FieldFunction {
    coeffs: BTreeMap<AtomKey, f64>,
}

impl From<Vec<(AtomKey, f64)>> for FieldFunction {
    fn from(terms: Vec<(AtomKey, f64)>) -> Self {
        Self::from_terms(terms)
    }
}

impl From<FieldFunction> for Vec<(AtomKey, f64)> {
    fn from(f: FieldFunction) -> Self {
        f.coeffs.into_iter().collect()
    }
}

impl FieldFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (AtomKey, f64)>) -> Self {
        let mut out = Self::zero();
        for (k, v) in terms {
            *out.coeffs.entry(k).or_insert(0.0) += v;
        }
        out.coeffs.retain(|_, v| *v != 0.0);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AtomKey, f64)> {
        self.coeffs.iter().map(|(k, v)| (k, *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &AtomKey> {
        self.coeffs.keys()
    }

    pub fn coeff(&self, k: &AtomKey) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn add(&self, other: &FieldFunction) -> FieldFunction {
        Self::from_terms(self.iter().chain(other.iter()).map(|(k, v)| (*k, v)))
    }

    pub fn sub(&self, other: &FieldFunction) -> FieldFunction {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> FieldFunction {
        Self::from_terms(self.iter().map(|(k, v)| (*k, v * s)))
    }

    /// `f ∘ s⁻¹`.
    pub fn push_forward(&self, s: &GeoMap) -> FieldFunction {
        Self::from_terms(self.iter().map(|((c, r), v)| {
            let moved = Atom::new(*c, *r, Q::from(1)).push_forward(s);
            ((moved.center, moved.scale), v)
        }))
    }

    /// Largest coefficient difference, relative to the larger sup norm.
    pub fn rel_distance(&self, other: &FieldFunction) -> f64 {
        let d = self.sub(other).iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        let scale = self.iter().chain(other.iter()).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            d / scale
        }
    }
}

impl From<&TestFunction> for FieldFunction {
    fn from(f: &TestFunction) -> Self {
        Self::from_terms(f.atoms().iter().map(|a| ((a.center, a.scale), q_to_f64(a.amplitude))))
    }
}

impl fmt::Display for FieldFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, ((c, r), v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{v:.6e}·f_{r}({:?})", c.map(q_to_f64))?;
        }
        Ok(())
    }
}

/// Phase in `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// `e^{i phase} exp(iΦ(func))`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeylElement {
    pub phase: f64,
    pub func: FieldFunction,
}

impl WeylElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(phase: f64, func: FieldFunction) -> Self {
        WeylElement { phase, func }
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0.0 && self.func.is_zero()
    }

    pub fn inverse(&self) -> WeylElement {
        WeylElement { phase: -self.phase, func: self.func.scaled(-1.0) }
    }

    /// Translated by a symmetry, `(φ, F ∘ s⁻¹)`.
    pub fn push_forward(&self, s: &GeoMap) -> WeylElement {
        WeylElement { phase: self.phase, func: self.func.push_forward(s) }
    }
}

/// `(φ_A + φ_B − σ(F_A, F_B)/2, F_A + F_B)`.
pub fn weyl_multiply(a: &WeylElement, b: &WeylElement, prof: &HyperboloidProfile) -> Result<WeylElement> {
    let s = prof.sigma(&a.func, &b.func)?;
    Ok(WeylElement { phase: a.phase + b.phase - 0.5 * s, func: a.func.add(&b.func) })
}

/// `ABA⁻¹B⁻¹`.
pub fn weyl_commutator(a: &WeylElement, b: &WeylElement, prof: &HyperboloidProfile) -> Result<WeylElement> {
    let ab = weyl_multiply(a, b, prof)?;
    let ai_bi = weyl_multiply(&a.inverse(), &b.inverse(), prof)?;
    weyl_multiply(&ab, &ai_bi, prof)
}

/// Samples of `E_m f` with the momenta they were taken at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmSamples {
    pub mass: f64,
    pub momenta: Vec<[f64; 3]>,
    pub values: Vec<Complex64>,
    /// Largest node-doubling change relative to the sample maximum.
    pub rel_change: f64,
}

impl EmSamples {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("px,py,pz,omega,re,im\n");
        for (p, v) in self.momenta.iter().zip(&self.values) {
            let om = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + self.mass * self.mass).sqrt();
            out.push_str(&format!("{},{},{},{},{:e},{:e}\n", p[0], p[1], p[2], om, v.re, v.im));
        }
        out
    }
}

/// Momenta `(q, 0, 0)` on the nodes of the configured radial grid.
pub fn radial_momenta(prof: &HyperboloidProfile) -> Vec<[f64; 3]> {
    prof.grid().nodes.iter().map(|&q| [q, 0.0, 0.0]).collect()
}

/// `E_m f(p⃗) = (2π)⁻² Σ a e^{i(ω y₀ − p⃗·y⃗)} fTime(R, ω) fSpace(R, |p⃗|)`,
/// checked against the node-doubled profile.
pub fn em_transform(f: &FieldFunction, prof: &HyperboloidProfile, momenta: &[[f64; 3]]) -> Result<EmSamples> {
    let values = prof.em_values(f, momenta);
    let fine = prof.refined().em_values(f, momenta);
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = values.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let rel_change = if peak == 0.0 { 0.0 } else { diff / peak };
    if rel_change > prof.config().tolerances.quadrature {
        return Err(crate::Error::NonConvergence { what: "hyperboloid transform".into(), rel_change });
    }
    Ok(EmSamples { mass: prof.mass(), momenta: momenta.to_vec(), values, rel_change })
}

/// `⟨E_m f, E_m g⟩` with measure `d³p/ω`.
pub fn hyperboloid_inner(f: &FieldFunction, g: &FieldFunction, prof: &HyperboloidProfile) -> Result<Complex64> {
    prof.inner(f, g)
}

/// `σ(f, g) = 2 Im⟨E_m f, E_m g⟩`.
pub fn sigma(f: &FieldFunction, g: &FieldFunction, prof: &HyperboloidProfile) -> Result<f64> {
    prof.sigma(f, g)
}

/// `‖E_m f‖`.
pub fn em_norm(f: &FieldFunction, prof: &HyperboloidProfile) -> Result<f64> {
    Ok(prof.inner(f, f)?.re.max(0.0).sqrt())
}
