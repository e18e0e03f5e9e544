//! Representation backends: field holonomies in the Weyl algebra, and
//! dense unitary matrices on a tensor product with one factor per causal
//! component.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{operator_norm, LoopRepresentation, UnitaryValue, MATRIX_TOLERANCE, WEYL_TOLERANCE};
use crate::causet::{CausalPoset, ElemId, SymmetryAction};
use crate::error::{Error, Result};
use crate::loopgrp::{Generator, Word};
use crate::quotient::{Separation, Separator};
use crate::simplex::{morphism_image, tangent_simplices, Simplex1};
use crate::weyl::{weyl_multiply, wrap_phase, FieldConnection, WeylElement};

/// Field holonomies `w(p) = u(p)` of a [`FieldConnection`]. The symmetry
/// acts on `(phase, function)` data by pushing functions forward, so `Γ` is
/// never materialised.
pub struct WeylRepresentation<'c> {
    pub connection: &'c FieldConnection<'c>,
    pub action: Option<&'c SymmetryAction>,
}

impl<'c> WeylRepresentation<'c> {
    pub fn new(connection: &'c FieldConnection<'c>, action: Option<&'c SymmetryAction>) -> Self {
        WeylRepresentation { connection, action }
    }
}

/// Wrapped phase difference and coefficient difference relative to the
/// largest coefficient.
fn weyl_deviation(a: &WeylElement, b: &WeylElement) -> f64 {
    let scale = a.func.iter().chain(b.func.iter()).map(|(_, c)| c.abs()).fold(0.0, f64::max);
    let coeff = a
        .func
        .keys()
        .chain(b.func.keys())
        .map(|k| (a.func.coeff(k) - b.func.coeff(k)).abs())
        .fold(0.0, f64::max);
    let rel = if scale > 0.0 { coeff / scale } else { 0.0 };
    wrap_phase(a.phase - b.phase).abs().max(rel)
}

impl LoopRepresentation for WeylRepresentation<'_> {
    fn name(&self) -> &'static str {
        "weyl"
    }

    fn identity(&self) -> UnitaryValue {
        UnitaryValue::Weyl(WeylElement::identity())
    }

    fn word(&self, w: &Word) -> Result<UnitaryValue> {
        self.connection.holonomy(w).map(UnitaryValue::Weyl)
    }

    fn multiply(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<UnitaryValue> {
        weyl_multiply(a.as_weyl()?, b.as_weyl()?, self.connection.profile()).map(UnitaryValue::Weyl)
    }

    fn transport(&self, s: usize, a: &UnitaryValue) -> Result<UnitaryValue> {
        let act = self.action.ok_or_else(|| Error::InvalidAction("no symmetry attached".into()))?;
        Ok(UnitaryValue::Weyl(a.as_weyl()?.push_forward(act.geo(s)?)))
    }

    fn deviation(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<f64> {
        Ok(weyl_deviation(a.as_weyl()?, b.as_weyl()?))
    }

    fn tolerance(&self) -> f64 {
        WEYL_TOLERANCE
    }
}

/// Generators assigned unitaries on `(Cᵈ)^{⊗k}`: a letter whose support lies
/// under the component `Oᵢ` acts on factor `i` only, so loops under
/// different components commute. Other letters get unitaries on the whole
/// space, and involutive letters the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRepresentation {
    factor_dim: usize,
    components: Vec<ElemId>,
    generators: BTreeMap<Simplex1, DMatrix<Complex64>>,
    gammas: Option<Vec<DMatrix<Complex64>>>,
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// `1 ⊗ ⋯ ⊗ U ⊗ ⋯ ⊗ 1` with `U` on factor `i` of `k`.
fn embed(u: &DMatrix<Complex64>, i: usize, k: usize) -> DMatrix<Complex64> {
    let d = u.nrows();
    (0..k).fold(DMatrix::identity(1, 1), |acc, j| {
        if j == i {
            acc.kronecker(u)
        } else {
            acc.kronecker(&DMatrix::identity(d, d))
        }
    })
}

/// The unitary moving tensor factor `j` to factor `perm[j]`.
fn factor_permutation(perm: &[usize], d: usize) -> DMatrix<Complex64> {
    let k = perm.len();
    let n = d.pow(k as u32);
    let mut m = DMatrix::zeros(n, n);
    for idx in 0..n {
        let digits: Vec<usize> = (0..k).map(|j| idx / d.pow((k - 1 - j) as u32) % d).collect();
        let mut out = vec![0; k];
        for j in 0..k {
            out[perm[j]] = digits[j];
        }
        let target = out.iter().fold(0, |acc, &x| acc * d + x);
        m[(target, idx)] = Complex64::new(1.0, 0.0);
    }
    m
}

impl MatrixRepresentation {
    /// Checks that the components are pairwise causally disjoint, that every
    /// causally disjoint pair lies under two different components and that
    /// the action permutes the components, then draws the generators.
    pub fn tensor(
        p: &CausalPoset,
        components: &[ElemId],
        act: Option<&SymmetryAction>,
        factor_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if components.is_empty() || factor_dim == 0 {
            return Err(Error::InvalidRange("need at least one component and a positive factor dimension".into()));
        }
        for &c in components {
            p.check(c)?;
        }
        for (i, &c) in components.iter().enumerate() {
            for &e in &components[i + 1..] {
                if !p.perp(c, e) {
                    return Err(Error::NotCausallyDisjoint);
                }
            }
        }
        let under = |a: ElemId| components.iter().position(|&c| p.leq(a, c));
        for x in p.elements() {
            for y in p.elements().filter(|&y| x < y && p.perp(x, y)) {
                match (under(x), under(y)) {
                    (Some(i), Some(j)) if i != j => {}
                    _ => {
                        return Err(Error::InvalidRange(format!(
                            "{} ⊥ {} is not separated by the components",
                            p.label(x),
                            p.label(y)
                        )))
                    }
                }
            }
        }
        let k = components.len();
        let gammas = match act {
            None => None,
            Some(act) => Some(
                act.group()
                    .map(|s| {
                        let perm: Vec<usize> = components
                            .iter()
                            .map(|&c| components.iter().position(|&e| e == act.act(s, c)))
                            .collect::<Option<_>>()
                            .ok_or_else(|| Error::InvalidAction("symmetry does not permute the components".into()))?;
                        Ok(factor_permutation(&perm, factor_dim))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let dim = factor_dim.pow(k as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut generators: BTreeMap<Simplex1, DMatrix<Complex64>> = BTreeMap::new();
        for b in tangent_simplices(p) {
            let g = Generator::of(b);
            if g.inverted || generators.contains_key(&g.simplex) {
                continue;
            }
            if g.is_involution() {
                generators.insert(g.simplex, DMatrix::identity(dim, dim));
                continue;
            }
            let u = match under(g.simplex.support) {
                Some(i) => embed(&random_unitary(&mut rng, factor_dim), i, k),
                None => random_unitary(&mut rng, dim),
            };
            let (Some(act), Some(gammas)) = (act, &gammas) else {
                generators.insert(g.simplex, u);
                continue;
            };
            // carry the value around the orbit, falling back to the identity
            // when the orbit returns to the letter with a different value
            let mut orbit: BTreeMap<Simplex1, DMatrix<Complex64>> = BTreeMap::new();
            let mut consistent = true;
            for s in act.group() {
                let image = Generator::of(morphism_image(&act.morphism(s), g.simplex));
                let mut v = &gammas[s] * &u * gammas[s].adjoint();
                if image.inverted {
                    v = v.adjoint();
                }
                match orbit.get(&image.simplex) {
                    Some(prev) if operator_norm(&(prev - &v)) > MATRIX_TOLERANCE => consistent = false,
                    Some(_) => {}
                    None => {
                        orbit.insert(image.simplex, v);
                    }
                }
            }
            for (b, v) in orbit {
                generators.insert(b, if consistent { v } else { DMatrix::identity(dim, dim) });
            }
        }
        Ok(MatrixRepresentation { factor_dim, components: components.to_vec(), generators, gammas })
    }

    pub fn dim(&self) -> usize {
        self.factor_dim.pow(self.components.len() as u32)
    }

    pub fn components(&self) -> &[ElemId] {
        &self.components
    }

    /// Image of one letter.
    pub fn letter(&self, b: Simplex1) -> Result<DMatrix<Complex64>> {
        let g = Generator::of(b);
        let m = self.generators.get(&g.simplex).ok_or_else(|| Error::InvalidSimplex(format!("{b:?} is not tangent")))?;
        Ok(if g.inverted { m.adjoint() } else { m.clone() })
    }

    /// `Γ_s`, when a symmetry is attached.
    pub fn gamma(&self, s: usize) -> Option<&DMatrix<Complex64>> {
        self.gammas.as_ref().map(|g| &g[s])
    }
}

impl LoopRepresentation for MatrixRepresentation {
    fn name(&self) -> &'static str {
        "matrix"
    }

    fn identity(&self) -> UnitaryValue {
        UnitaryValue::Matrix(DMatrix::identity(self.dim(), self.dim()))
    }

    fn word(&self, w: &Word) -> Result<UnitaryValue> {
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        for &b in w.letters() {
            acc *= self.letter(b)?;
        }
        Ok(UnitaryValue::Matrix(acc))
    }

    fn multiply(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<UnitaryValue> {
        let (a, b) = (a.as_matrix()?, b.as_matrix()?);
        if a.ncols() != b.nrows() {
            return Err(Error::DimensionMismatch(format!("{} × {}", a.ncols(), b.nrows())));
        }
        Ok(UnitaryValue::Matrix(a * b))
    }

    fn transport(&self, s: usize, a: &UnitaryValue) -> Result<UnitaryValue> {
        let g = self.gamma(s).ok_or_else(|| Error::InvalidAction("no symmetry attached".into()))?;
        let a = a.as_matrix()?;
        if a.nrows() != g.nrows() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", a.nrows(), g.nrows())));
        }
        Ok(UnitaryValue::Matrix(g * a * g.adjoint()))
    }

    fn deviation(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<f64> {
        let (a, b) = (a.as_matrix()?, b.as_matrix()?);
        if a.shape() != b.shape() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
        }
        Ok(operator_norm(&(a - b)))
    }

    fn tolerance(&self) -> f64 {
        MATRIX_TOLERANCE
    }
}

/// Separates words whose matrix images differ in operator norm.
pub struct MatrixSeparator<'r> {
    pub rep: &'r MatrixRepresentation,
}

impl Separator for MatrixSeparator<'_> {
    fn name(&self) -> String {
        "matrix".into()
    }

    fn separate(&self, a: &Word, b: &Word) -> Option<Separation> {
        let d = self.rep.deviation(&self.rep.word(a).ok()?, &self.rep.word(b).ok()?).ok()?;
        (d > MATRIX_TOLERANCE).then(|| Separation {
            separator: self.name(),
            detail: format!("images differ by {d:.6e} in operator norm"),
            magnitude: d,
        })
    }
}
