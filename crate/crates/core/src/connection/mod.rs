//! Path-frames, connections induced by loop representations, connection
//! systems and gauge transformations.
//!
//! A path-frame over a pole `o` stores a path `p_(o,a)`, as a word starting
//! at `o` and ending at `a`, for every element `a` it reaches. A loop
//! representation `w` induces the connection `u(b) = w(p̄_(o,∂₀b) b p_(o,∂₁b))`,
//! whose holonomy around a loop at the pole is `w` itself.
//!
//! Maximal elements are faces of no tangent simplex, so frames and systems
//! range over the non-maximal elements.

pub mod backend;
pub mod frame;
pub mod gauge;
pub mod system;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loopgrp::Word;
use crate::simplex::Simplex1;
use crate::weyl::WeylElement;

pub use backend::{MatrixRepresentation, MatrixSeparator, WeylRepresentation};
pub use frame::{build_covariant_system, build_path_frame, check_obstruction, FrameOrder, PathFrame, PathFrameSystem};
pub use gauge::{apply_gauge, frame_change_gauge, gauge_group_generators, GaugeGenerator, GaugeTransformation};
pub use system::{
    build_connection_system, build_connection_system_on, check_system, connection_from_rep, CausalityCheck,
    ConnectionSystem, CovarianceCheck, SystemCheck, SystemReport,
};

/// Operator-norm tolerance for matrix equality.
pub const MATRIX_TOLERANCE: f64 = 1e-8;
/// Unitarity tolerance `‖U*U − 1‖` for matrices.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Phase and relative coefficient tolerance for Weyl equality.
pub const WEYL_TOLERANCE: f64 = 1e-9;

/// A unitary in one of the two representation backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "camelCase")]
pub enum UnitaryValue {
    Weyl(WeylElement),
    Matrix(#[serde(with = "matrix_serde")] DMatrix<Complex64>),
}

mod matrix_serde {
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Row-major entries as `[re, im]` pairs.
    #[derive(Serialize, Deserialize)]
    struct Dense {
        dim: usize,
        entries: Vec<[f64; 2]>,
    }

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let entries = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| [m[(i, j)].re, m[(i, j)].im])).collect();
        Dense { dim: m.nrows(), entries }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<Complex64>, D::Error> {
        let dense = Dense::deserialize(d)?;
        if dense.entries.len() != dense.dim * dense.dim {
            return Err(serde::de::Error::custom("matrix entries do not match dimension"));
        }
        Ok(DMatrix::from_fn(dense.dim, dense.dim, |i, j| {
            let [re, im] = dense.entries[i * dense.dim + j];
            Complex64::new(re, im)
        }))
    }
}

impl UnitaryValue {
    pub fn inverse(&self) -> UnitaryValue {
        match self {
            UnitaryValue::Weyl(w) => UnitaryValue::Weyl(w.inverse()),
            UnitaryValue::Matrix(m) => UnitaryValue::Matrix(m.adjoint()),
        }
    }

    pub fn as_weyl(&self) -> Result<&WeylElement> {
        match self {
            UnitaryValue::Weyl(w) => Ok(w),
            UnitaryValue::Matrix(_) => Err(Error::DimensionMismatch("expected a Weyl element, found a matrix".into())),
        }
    }

    pub fn as_matrix(&self) -> Result<&DMatrix<Complex64>> {
        match self {
            UnitaryValue::Matrix(m) => Ok(m),
            UnitaryValue::Weyl(_) => Err(Error::DimensionMismatch("expected a matrix, found a Weyl element".into())),
        }
    }

    /// `‖U*U − 1‖` in operator norm; zero for Weyl elements.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            UnitaryValue::Weyl(_) => 0.0,
            UnitaryValue::Matrix(m) => {
                operator_norm(&(m.adjoint() * m - DMatrix::<Complex64>::identity(m.nrows(), m.ncols())))
            }
        }
    }
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// A unitary representation of the free group on the tangent simplices,
/// together with the adjoint action `Ad_Γ` of a symmetry group when one is
/// attached.
pub trait LoopRepresentation: Sync {
    fn name(&self) -> &'static str;

    fn identity(&self) -> UnitaryValue;

    /// Image of a word, the ordered product of its letters' images.
    fn word(&self, w: &Word) -> Result<UnitaryValue>;

    fn multiply(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<UnitaryValue>;

    /// `Ad_{Γ_s}(a)`.
    fn transport(&self, s: usize, a: &UnitaryValue) -> Result<UnitaryValue>;

    /// Distance between two values in the backend's own units.
    fn deviation(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<f64>;

    fn tolerance(&self) -> f64;

    fn equal(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<bool> {
        Ok(self.deviation(a, b)? <= self.tolerance())
    }

    /// `abc` as one product.
    fn conjugate(&self, a: &UnitaryValue, b: &UnitaryValue, c: &UnitaryValue) -> Result<UnitaryValue> {
        self.multiply(&self.multiply(a, b)?, c)
    }

    /// Distance between `ab` and `ba`.
    fn commutator_deviation(&self, a: &UnitaryValue, b: &UnitaryValue) -> Result<f64> {
        self.deviation(&self.multiply(a, b)?, &self.multiply(b, a)?)
    }
}

/// Unitary values on tangent simplices; nerve simplices carry the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Connection1Cochain {
    values: BTreeMap<Simplex1, UnitaryValue>,
}

impl Connection1Cochain {
    pub fn from_values(values: impl IntoIterator<Item = (Simplex1, UnitaryValue)>) -> Self {
        Connection1Cochain { values: values.into_iter().collect() }
    }

    pub fn get(&self, b: &Simplex1) -> Option<&UnitaryValue> {
        self.values.get(b)
    }

    pub fn set(&mut self, b: Simplex1, v: UnitaryValue) {
        self.values.insert(b, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex1, &UnitaryValue)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = &Simplex1> {
        self.values.keys()
    }

    /// `u(b₀) u(b₁) ⋯`; the empty word gives the identity.
    pub fn holonomy(&self, rep: &dyn LoopRepresentation, w: &Word) -> Result<UnitaryValue> {
        let mut acc = rep.identity();
        for b in w.letters() {
            let v = self.values.get(b).ok_or_else(|| Error::MissingValue(format!("{b:?}")))?;
            acc = rep.multiply(&acc, v)?;
        }
        Ok(acc)
    }

    /// Largest deviation of `u(b̄)` from `u(b)⁻¹` over pairs both present.
    pub fn inverse_defect(&self, rep: &dyn LoopRepresentation) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (b, v) in &self.values {
            if let Some(vb) = self.values.get(&b.opposite()) {
                worst = worst.max(rep.deviation(vb, &v.inverse())?);
            }
        }
        Ok(worst)
    }
}
