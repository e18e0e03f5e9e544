//! The field connection `u(b) = exp(i c_b Φ(f^odd_b))` with corona weight
//! `c_b = ∫_{b⊚} |f^ev_b|`, its holonomies, a quotient separator built on
//! them, and the certificates of non-triviality and non-flatness.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{corona_integral, weyl_commutator, wrap_phase, CompositeRule, CoronaEstimate, FieldFunction, HyperboloidProfile, WeylElement};
use crate::causet::{q_to_f64, CausalPoset, Q};
use crate::cochain::{split_even_odd, twisted_delta, Cochain0, Cochain1, TestFunction};
use crate::error::{Error, Result};
use crate::loopgrp::{reduce, Generator, Word};
use crate::net::CommutatorProbe;
use crate::quotient::{abelianize, Separation, Separator};
use crate::simplex::{enumerate_2simplices_on, Simplex1, Simplex2};

/// Even and odd parts of a 1-cochain at one simplex.
fn parts(f: &Cochain1, b: Simplex1) -> (TestFunction, TestFunction) {
    let single = Cochain1::from_values([(b, f.value(&b)), (b.opposite(), f.value(&b.opposite()))]);
    let (ev, odd) = split_even_odd(&single);
    (ev.value(&b), odd.value(&b))
}

/// `u(b) = (0, c_b f^odd_b)` for one simplex, computing its corona afresh.
pub fn field_connection(p: &CausalPoset, f: &Cochain1, b: Simplex1, prof: &HyperboloidProfile) -> Result<WeylElement> {
    let (ev, odd) = parts(f, b);
    let c = corona_integral(p, b, &ev, prof.config())?;
    Ok(WeylElement::new(0.0, FieldFunction::from(&odd).scaled(c.value)))
}

/// `u(w) = u(b₀) u(b₁) ⋯` over the reduced word. `u` must be a connection,
/// `u(b̄) = u(b)⁻¹`, so the function part is the abelian image weighted by
/// the generators' function parts and vanishes exactly on commutators.
pub fn holonomy(
    word: &Word,
    u: impl Fn(Simplex1) -> Result<WeylElement>,
    prof: &HyperboloidProfile,
) -> Result<WeylElement> {
    let w = reduce(word);
    let mut phase = 0.0;
    let mut partial = FieldFunction::zero();
    for &b in w.letters() {
        let ub = u(b)?;
        phase += ub.phase - 0.5 * prof.sigma(&partial, &ub.func)?;
        partial = partial.add(&ub.func);
    }
    let mut func = FieldFunction::zero();
    for (g, n) in &abelianize(&w).0 {
        func = func.add(&u(*g)?.func.scaled(*n as f64));
    }
    Ok(WeylElement::new(phase, func))
}

/// The field connection of a 1-cochain with cached corona weights.
///
/// Corona estimates are exactly translation invariant, so they are cached by
/// the shape of the simplex and integrand relative to the support's centre.
#[derive(Debug)]
pub struct FieldConnection<'a> {
    poset: &'a CausalPoset,
    cochain: Cochain1,
    profile: &'a HyperboloidProfile,
    coronas: RwLock<HashMap<Vec<Q>, CoronaEstimate>>,
}

/// Support radius, faces and integrand atoms relative to the support centre.
fn shape_key(p: &CausalPoset, b: Simplex1, ev: &TestFunction) -> Option<Vec<Q>> {
    let s = p.cone(b.support)?;
    let mut key = vec![s.radius];
    for face in [b.d0, b.d1] {
        let c = p.cone(face)?;
        key.extend((0..4).map(|k| c.center[k] - s.center[k]));
        key.push(c.radius);
    }
    for a in ev.atoms() {
        key.extend((0..4).map(|k| a.center[k] - s.center[k]));
        key.extend([a.scale, a.amplitude]);
    }
    Some(key)
}

impl<'a> FieldConnection<'a> {
    pub fn new(poset: &'a CausalPoset, cochain: Cochain1, profile: &'a HyperboloidProfile) -> Result<Self> {
        if poset.geometry().is_none() {
            return Err(Error::MissingGeometry);
        }
        Ok(FieldConnection { poset, cochain, profile, coronas: RwLock::default() })
    }

    /// The connection of `δf` for a 0-cochain `f`.
    pub fn from_0cochain(poset: &'a CausalPoset, f: &Cochain0, profile: &'a HyperboloidProfile) -> Result<Self> {
        Self::new(poset, twisted_delta(poset, f), profile)
    }

    pub fn poset(&self) -> &'a CausalPoset {
        self.poset
    }

    pub fn profile(&self) -> &'a HyperboloidProfile {
        self.profile
    }

    pub fn cochain(&self) -> &Cochain1 {
        &self.cochain
    }

    /// Corona weight of `b`, shared with `b̄`.
    pub fn corona(&self, b: Simplex1) -> Result<CoronaEstimate> {
        let b = Generator::of(b).simplex;
        let (ev, _) = parts(&self.cochain, b);
        let Some(key) = shape_key(self.poset, b, &ev) else {
            return corona_integral(self.poset, b, &ev, self.profile.config());
        };
        if let Some(c) = self.coronas.read().expect("corona lock").get(&key) {
            return Ok(*c);
        }
        let c = corona_integral(self.poset, b, &ev, self.profile.config())?;
        Ok(*self.coronas.write().expect("corona lock").entry(key).or_insert(c))
    }

    pub fn value(&self, b: Simplex1) -> Result<WeylElement> {
        let (_, odd) = parts(&self.cochain, b);
        if odd.is_zero() {
            return Ok(WeylElement::identity());
        }
        let c = self.corona(b)?;
        Ok(WeylElement::new(0.0, FieldFunction::from(&odd).scaled(c.value)))
    }

    pub fn holonomy(&self, w: &Word) -> Result<WeylElement> {
        holonomy(w, |b| self.value(b), self.profile)
    }

    /// Function-part norm `‖E_m(F_a − F_b)‖` and wrapped phase difference of
    /// two holonomies.
    pub fn distance(&self, a: &WeylElement, b: &WeylElement) -> Result<(f64, f64)> {
        let d = a.func.sub(&b.func);
        let norm = self.profile.inner(&d, &d)?.re.max(0.0).sqrt();
        Ok((norm, wrap_phase(a.phase - b.phase)))
    }
}

impl CommutatorProbe for FieldConnection<'_> {
    /// Phase of `u(g)u(h)u(g)⁻¹u(h)⁻¹`, infinite when a quadrature fails.
    fn commutator_deviation(&self, g: &Word, h: &Word) -> f64 {
        let run = || -> Result<f64> {
            let c = weyl_commutator(&self.holonomy(g)?, &self.holonomy(h)?, self.profile)?;
            Ok(wrap_phase(c.phase).abs() + if c.func.is_zero() { 0.0 } else { f64::INFINITY })
        };
        run().unwrap_or(f64::INFINITY)
    }
}

/// Separates words whose field holonomies differ beyond the configured
/// function and phase tolerances.
pub struct WeylSeparator<'c> {
    pub connection: &'c FieldConnection<'c>,
}

impl Separator for WeylSeparator<'_> {
    fn name(&self) -> String {
        "weyl".into()
    }

    fn separate(&self, a: &Word, b: &Word) -> Option<Separation> {
        let tol = &self.connection.profile.config().tolerances;
        let ha = self.connection.holonomy(a).ok()?;
        let hb = self.connection.holonomy(b).ok()?;
        let (norm, phase) = self.connection.distance(&ha, &hb).ok()?;
        (norm > tol.function || phase.abs() > tol.phase).then(|| Separation {
            separator: self.name(),
            detail: format!("holonomy phase difference {phase:.6e}, function-part norm {norm:.6e}"),
            magnitude: norm.max(phase.abs()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NontrivialityCertificate {
    pub simplex: Simplex1,
    /// `y` with `f_{∂₀b} = f_{∂₁b}(· − y)`.
    pub shift: [f64; 4],
    /// `‖E_m((δf)^odd_b)‖²` from the pair kernels.
    pub direct: f64,
    /// `∫ |E_m f_{∂₁b}|² |e^{ip·y} − 1|² dΩ_m` by spherical quadrature.
    pub factorized: f64,
    pub rel_err: f64,
    /// `direct / (2 ‖E_m f_{∂₁b}‖²)`.
    pub normalized: f64,
    pub threshold: f64,
}

impl NontrivialityCertificate {
    pub fn positive(&self) -> bool {
        self.normalized > self.threshold
    }
}

/// The shift carrying `g` onto `f`, if `f` is a translate of `g`.
fn translation_between(f: &TestFunction, g: &TestFunction) -> Option<[Q; 4]> {
    let (fa, ga) = (f.atoms(), g.atoms());
    if fa.len() != ga.len() || fa.is_empty() {
        return None;
    }
    let y: [Q; 4] = std::array::from_fn(|k| fa[0].center[k] - ga[0].center[k]);
    fa.iter()
        .zip(ga)
        .all(|(a, b)| a.scale == b.scale && a.amplitude == b.amplitude && (0..4).all(|k| a.center[k] - b.center[k] == y[k]))
        .then_some(y)
}

/// Orthonormal frame with third axis along `v`, or the standard frame.
fn frame(v: [f64; 3]) -> [[f64; 3]; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let e3 = v.map(|c| c / n);
    let helper = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * e3[0] + helper[1] * e3[1] + helper[2] * e3[2];
    let u = [helper[0] - dot * e3[0], helper[1] - dot * e3[1], helper[2] - dot * e3[2]];
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let e1 = u.map(|c| c / un);
    let e2 = [e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]];
    [e1, e2, e3]
}

/// `∫ |E_m g|² |e^{ip·y} − 1|² d³p/ω` on its own radial grid, with the
/// angles integrated about the axis `y⃗`.
fn factorized_norm(g: &FieldFunction, y: [f64; 4], prof: &HyperboloidProfile) -> f64 {
    let cfg = prof.config();
    let radial = CompositeRule::new(0.0, cfg.cutoff, cfg.panels * 3 / 2 + 1, cfg.nodes);
    let ys = [y[1], y[2], y[3]];
    let ylen = (ys[0] * ys[0] + ys[1] * ys[1] + ys[2] * ys[2]).sqrt();
    let axes = frame(ys);
    let atoms: Vec<(f64, [f64; 4], f64)> = g.iter().map(|((c, r), a)| (a, c.map(q_to_f64), q_to_f64(*r))).collect();
    let spread = atoms
        .iter()
        .flat_map(|(_, c, _)| atoms.iter().map(move |(_, d, _)| ((c[1] - d[1]).powi(2) + (c[2] - d[2]).powi(2) + (c[3] - d[3]).powi(2)).sqrt()))
        .fold(0.0, f64::max);
    let mu_rule = CompositeRule::new(-1.0, 1.0, 4 + (cfg.cutoff * (ylen + spread) / PI).ceil() as usize, cfg.nodes);
    let n_phi = if atoms.len() == 1 { 1 } else { 16 + 2 * (cfg.cutoff * spread).ceil() as usize };
    let total: f64 = radial
        .nodes
        .iter()
        .zip(&radial.weights)
        .map(|(&q, &wq)| {
            let om = cfg.omega(q);
            let fr: Vec<f64> = atoms.iter().map(|(_, _, r)| prof.radial(*r, q)).collect();
            let mut ang = 0.0;
            for (&mu, &wmu) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
                let st = (1.0 - mu * mu).max(0.0).sqrt();
                let factor = 2.0 - 2.0 * (om * y[0] - q * mu * ylen).cos();
                let mut ring = 0.0;
                for j in 0..n_phi {
                    let phi = 2.0 * PI * j as f64 / n_phi as f64;
                    let dir: [f64; 3] = std::array::from_fn(|k| {
                        st * phi.cos() * axes[0][k] + st * phi.sin() * axes[1][k] + mu * axes[2][k]
                    });
                    let mut e = Complex64::new(0.0, 0.0);
                    for ((a, c, _), f) in atoms.iter().zip(&fr) {
                        let phase = om * c[0] - q * (dir[0] * c[1] + dir[1] * c[2] + dir[2] * c[3]);
                        e += Complex64::from_polar(a * f, phase);
                    }
                    ring += e.norm_sqr();
                }
                ang += wmu * factor * ring * 2.0 * PI / n_phi as f64;
            }
            wq * q * q / om * ang
        })
        .sum();
    total / (2.0 * PI).powi(4)
}

/// `‖E_m((δf)^odd_b)‖²` for a simplex whose faces carry translates
/// `f_{∂₀b} = f_{∂₁b}(· − y)`, computed directly and through the factorized
/// identity `|E_m f_{∂₁b}|² |e^{ip·y} − 1|²`.
pub fn certify_nontrivial(
    p: &CausalPoset,
    f: &Cochain0,
    b: Simplex1,
    prof: &HyperboloidProfile,
) -> Result<NontrivialityCertificate> {
    let (f0, f1) = (f.value(&b.d0), f.value(&b.d1));
    let y = translation_between(&f0, &f1)
        .ok_or_else(|| Error::InvalidSimplex("face values are not translates".into()))?;
    let threshold = 1e-8;
    let (_, odd) = parts(&twisted_delta(p, f), b);
    let shift = y.map(q_to_f64);
    if odd.is_zero() {
        return Ok(NontrivialityCertificate {
            simplex: b,
            shift,
            direct: 0.0,
            factorized: 0.0,
            rel_err: 0.0,
            normalized: 0.0,
            threshold,
        });
    }
    let g = FieldFunction::from(&odd);
    let direct = prof.inner(&g, &g)?.re;
    let base = FieldFunction::from(&f1);
    let factorized = factorized_norm(&base, shift, prof);
    let rel_err = (direct - factorized).abs() / direct.abs().max(factorized.abs());
    let normalized = direct / (2.0 * prof.inner(&base, &base)?.re);
    Ok(NontrivialityCertificate { simplex: b, shift, direct, factorized, rel_err, normalized, threshold })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonflatWitness {
    pub simplex: Simplex2,
    /// Corona weights of `∂₀c, ∂₁c, ∂₂c`.
    pub weights: [f64; 3],
    /// `‖E_m(F₀ + F₂ − F₁)‖` between `u(∂₀c)u(∂₂c)` and `u(∂₁c)`.
    pub mismatch: f64,
    pub phase: f64,
    /// 2-simplices examined before the witness.
    pub examined: usize,
}

/// First 2-simplex off the nerve, in enumeration order, where
/// `u(∂₀c)u(∂₂c) ≠ u(∂₁c)` beyond tolerance; at most `cap` are examined.
pub fn certify_nonflat(conn: &FieldConnection, cap: usize) -> Result<NonflatWitness> {
    let p = conn.poset();
    let tol = &conn.profile().config().tolerances;
    let mut examined = 0;
    for s in p.elements() {
        for (c, nerve) in enumerate_2simplices_on(p, &[s], cap - examined).simplices {
            examined += 1;
            if nerve {
                continue;
            }
            let (u0, u1, u2) = (conn.value(c.f0)?, conn.value(c.f1)?, conn.value(c.f2)?);
            let lhs = super::weyl_multiply(&u0, &u2, conn.profile())?;
            let (mismatch, phase) = conn.distance(&lhs, &u1)?;
            if mismatch > tol.function || phase.abs() > tol.phase {
                let w = |b| conn.corona(b).map(|e| e.value);
                return Ok(NonflatWitness {
                    simplex: c,
                    weights: [w(c.f0)?, w(c.f1)?, w(c.f2)?],
                    mismatch,
                    phase,
                    examined,
                });
            }
        }
        if examined >= cap {
            break;
        }
    }
    Err(Error::NoWitnessFound)
}
