//! Test functions as finite combinations of translated bumps.
//!
//! An atom `A · f_R(x − c)` uses `f_R(t, x⃗) = h(2t/R) · h(4|x⃗|²/R²)` with the
//! even bump `h(s) = exp(−1/(1 − s²))` on `|s| < 1`. Its support is the
//! cylinder `|t − c₀| < R/2`, `|x⃗ − c⃗| < R/2`, which lies in the closed double
//! cone of radius `R` about `c`. On circle posets the centre's first
//! coordinate is a position in segment units and `R` is an arc length.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::causet::{q_to_f64, GeoMap, Geometry, Q};

/// The even bump `exp(−1/(1 − s²))` on `(−1, 1)`.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// `f_R` at `(t, x⃗)`.
pub fn bump_profile(r: f64, x: &[f64; 4]) -> f64 {
    let rho2 = x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    bump(2.0 * x[0] / r) * bump(4.0 * rho2 / (r * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub center: [Q; 4],
    pub scale: Q,
    pub amplitude: Q,
}

impl Atom {
    pub fn new(center: [Q; 4], scale: Q, amplitude: Q) -> Self {
        Atom { center, scale, amplitude }
    }

    /// Unit atom filling the closure of a region.
    pub fn filling(g: &Geometry) -> Option<Atom> {
        match g {
            Geometry::Cone(c) => Some(Atom::new(c.center, c.radius, Q::from(1))),
            Geometry::Arc(a) => {
                let mut center = [Q::zero(); 4];
                center[0] = Q::from(a.start as i64) + Q::new(a.length as i64, 2);
                Some(Atom::new(center, Q::from(a.length as i64), Q::from(1)))
            }
            Geometry::Subset(_) => None,
        }
    }

    fn key(&self) -> ([Q; 4], Q) {
        (self.center, self.scale)
    }

    /// `f ∘ s⁻¹`, i.e. the atom carried along `s`. The bump is invariant under
    /// the signed permutations of space used by the fixtures.
    pub fn push_forward(&self, s: &GeoMap) -> Atom {
        let center = match s {
            GeoMap::Affine { .. } => s.apply_point(&self.center),
            GeoMap::CircleShift { n, k } => {
                let mut c = self.center;
                let n = Q::from(*n as i64);
                let mut t = c[0] + Q::from(*k as i64);
                while t >= n {
                    t -= n;
                }
                c[0] = t;
                c
            }
        };
        Atom { center, ..*self }
    }

    /// Support inside the closure of a region.
    pub fn inside(&self, g: &Geometry) -> bool {
        match g {
            Geometry::Cone(c) => {
                let r = c.radius - self.scale - (self.center[0] - c.center[0]).abs();
                let d2 = (1..4).map(|k| (self.center[k] - c.center[k]).pow(2)).fold(Q::zero(), |s, v| s + v);
                !r.is_negative() && d2 <= r * r
            }
            Geometry::Arc(a) => {
                let n = Q::from(a.n as i64);
                let half = self.scale / 2;
                let mut lo = self.center[0] - half - Q::from(a.start as i64);
                while lo.is_negative() {
                    lo += n;
                }
                while lo >= n {
                    lo -= n;
                }
                lo + self.scale <= Q::from(a.length as i64)
            }
            Geometry::Subset(_) => false,
        }
    }

    /// Value at a spacetime point.
    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        let c = self.center.map(q_to_f64);
        let y = [x[0] - c[0], x[1] - c[1], x[2] - c[2], x[3] - c[3]];
        q_to_f64(self.amplitude) * bump_profile(q_to_f64(self.scale), &y)
    }
}

/// A linear combination of atoms, merged by centre and scale with zero
/// amplitudes pruned, so equality of values is equality of lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestFunction {
    atoms: Vec<Atom>,
}

impl TestFunction {
    pub fn zero() -> Self {
        TestFunction { atoms: Vec::new() }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut merged: BTreeMap<([Q; 4], Q), Q> = BTreeMap::new();
        for a in atoms {
            *merged.entry(a.key()).or_insert_with(Q::zero) += a.amplitude;
        }
        TestFunction {
            atoms: merged
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((center, scale), amplitude)| Atom { center, scale, amplitude })
                .collect(),
        }
    }

    pub fn atom(a: Atom) -> Self {
        Self::from_atoms([a])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn add(&self, other: &TestFunction) -> TestFunction {
        Self::from_atoms(self.atoms.iter().chain(&other.atoms).copied())
    }

    pub fn sub(&self, other: &TestFunction) -> TestFunction {
        self.add(&other.scaled(Q::from(-1)))
    }

    pub fn scaled(&self, k: Q) -> TestFunction {
        Self::from_atoms(self.atoms.iter().map(|a| Atom { amplitude: a.amplitude * k, ..*a }))
    }

    pub fn push_forward(&self, s: &GeoMap) -> TestFunction {
        Self::from_atoms(self.atoms.iter().map(|a| a.push_forward(s)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| !a.amplitude.is_negative())
    }

    pub fn inside(&self, g: &Geometry) -> bool {
        self.atoms.iter().all(|a| a.inside(g))
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let c = a.center.map(q_to_f64);
            write!(f, "{}·f_{}({:?})", a.amplitude, a.scale, c)?;
        }
        Ok(())
    }
}
