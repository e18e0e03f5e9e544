//! Finite causal posets: an order relation together with an irreflexive,
//! symmetric, order-stable causal disjointness relation `⊥`.
//!
//! Relations are stored as dense boolean matrices indexed by [`ElemId`].
//! Geometric builders live in [`builders`], symmetry actions and morphisms in
//! [`symmetry`].

pub mod builders;
pub mod symmetry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builders::{
    build_causal_set_poset, build_circle, build_minkowski_lattice, ArcSpec, CausalSetSpec,
    DoubleConeSpec, Q, q_from_f64, q_to_f64,
};
pub use symmetry::{orbit_and_stabilizer, GeoMap, PosetMorphism, SymmetryAction};

/// Opaque element handle, an index into the poset's element list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElemId(pub u32);

impl ElemId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Geometric payload attached to an element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    Cone(DoubleConeSpec),
    Arc(ArcSpec),
    /// Indices into the poset's causal-set point list.
    Subset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalPoset {
    labels: Vec<String>,
    leq: Vec<bool>,
    perp: Vec<bool>,
    geometry: Option<Vec<Geometry>>,
    points: Option<Vec<[Q; 4]>>,
}

impl CausalPoset {
    /// Builds a poset from explicit relations. `leq` pairs are closed
    /// reflexively and transitively; `perp` pairs are symmetrised. No other
    /// repair is performed, so violations remain visible to [`validate_poset`].
    pub fn from_relations(
        labels: Vec<String>,
        leq_pairs: &[(usize, usize)],
        perp_pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyPoset);
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in leq_pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("{}", a.max(b))));
            }
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let mut perp = vec![false; n * n];
        for &(a, b) in perp_pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("{}", a.max(b))));
            }
            perp[a * n + b] = true;
            perp[b * n + a] = true;
        }
        Ok(Self { labels, leq, perp, geometry: None, points: None })
    }

    /// Builds a poset from full relation matrices without any closure.
    pub fn from_matrices(labels: Vec<String>, leq: Vec<bool>, perp: Vec<bool>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyPoset);
        }
        if leq.len() != n * n || perp.len() != n * n {
            return Err(Error::DimensionMismatch(format!("relation matrices must be {n}x{n}")));
        }
        Ok(Self { labels, leq, perp, geometry: None, points: None })
    }

    /// Replaces element labels; the count must match.
    pub fn relabel(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} elements",
                labels.len(),
                self.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub(crate) fn with_geometry(mut self, geometry: Vec<Geometry>) -> Self {
        debug_assert_eq!(geometry.len(), self.len());
        self.geometry = Some(geometry);
        self
    }

    pub(crate) fn with_points(mut self, points: Vec<[Q; 4]>) -> Self {
        self.points = Some(points);
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> + Clone {
        (0..self.len() as u32).map(ElemId)
    }

    pub fn contains(&self, a: ElemId) -> bool {
        a.idx() < self.len()
    }

    pub fn check(&self, a: ElemId) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::UnknownElement(format!("#{}", a.0)))
        }
    }

    #[inline]
    pub fn leq(&self, a: ElemId, b: ElemId) -> bool {
        self.leq[a.idx() * self.len() + b.idx()]
    }

    #[inline]
    pub fn lt(&self, a: ElemId, b: ElemId) -> bool {
        a != b && self.leq(a, b)
    }

    #[inline]
    pub fn perp(&self, a: ElemId, b: ElemId) -> bool {
        self.perp[a.idx() * self.len() + b.idx()]
    }

    pub fn label(&self, a: ElemId) -> &str {
        &self.labels[a.idx()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<ElemId> {
        self.labels.iter().position(|l| l == label).map(|i| ElemId(i as u32))
    }

    /// Looks up a label, failing with [`Error::UnknownElement`].
    pub fn id(&self, label: &str) -> Result<ElemId> {
        self.find(label).ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn geometry(&self) -> Option<&[Geometry]> {
        self.geometry.as_deref()
    }

    pub fn geometry_of(&self, a: ElemId) -> Option<&Geometry> {
        self.geometry.as_ref().map(|g| &g[a.idx()])
    }

    /// Double-cone payload of `a`, if the poset is a Minkowski lattice.
    pub fn cone(&self, a: ElemId) -> Option<&DoubleConeSpec> {
        match self.geometry_of(a) {
            Some(Geometry::Cone(c)) => Some(c),
            _ => None,
        }
    }

    pub fn points(&self) -> Option<&[[Q; 4]]> {
        self.points.as_deref()
    }

    /// Elements below `o`, in id order.
    pub fn lower_set(&self, o: ElemId) -> Vec<ElemId> {
        self.elements().filter(|&a| self.leq(a, o)).collect()
    }

    /// Elements above `o`, in id order.
    pub fn upper_set(&self, o: ElemId) -> Vec<ElemId> {
        self.elements().filter(|&a| self.leq(o, a)).collect()
    }

    pub fn is_maximal(&self, o: ElemId) -> bool {
        self.elements().all(|a| !self.lt(o, a))
    }

    pub fn is_minimal(&self, o: ElemId) -> bool {
        self.elements().all(|a| !self.lt(a, o))
    }

    /// Sub-poset on `{a : a ≤ o}` with the ambient relations, together with
    /// its inclusion morphism.
    pub fn restrict(&self, o: ElemId) -> Result<(CausalPoset, PosetMorphism)> {
        self.check(o)?;
        let keep = self.lower_set(o);
        self.induced(&keep)
    }

    /// Sub-poset induced on `keep` (in the given order).
    pub fn induced(&self, keep: &[ElemId]) -> Result<(CausalPoset, PosetMorphism)> {
        if keep.is_empty() {
            return Err(Error::EmptyPoset);
        }
        for &a in keep {
            self.check(a)?;
        }
        let m = keep.len();
        let mut leq = vec![false; m * m];
        let mut perp = vec![false; m * m];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                leq[i * m + j] = self.leq(a, b);
                perp[i * m + j] = self.perp(a, b);
            }
        }
        let labels = keep.iter().map(|&a| self.label(a).to_string()).collect();
        let mut sub = CausalPoset::from_matrices(labels, leq, perp)?;
        if let Some(g) = &self.geometry {
            sub.geometry = Some(keep.iter().map(|&a| g[a.idx()].clone()).collect());
        }
        sub.points = self.points.clone();
        let morphism = PosetMorphism::new(keep.to_vec(), self.len());
        Ok((sub, morphism))
    }

    /// Disjoint union with another poset; cross pairs are unrelated and not ⊥.
    pub fn disjoint_union(&self, other: &CausalPoset) -> CausalPoset {
        let n = self.len();
        let m = other.len();
        let t = n + m;
        let mut leq = vec![false; t * t];
        let mut perp = vec![false; t * t];
        for i in 0..n {
            for j in 0..n {
                leq[i * t + j] = self.leq[i * n + j];
                perp[i * t + j] = self.perp[i * n + j];
            }
        }
        for i in 0..m {
            for j in 0..m {
                leq[(n + i) * t + n + j] = other.leq[i * m + j];
                perp[(n + i) * t + n + j] = other.perp[i * m + j];
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().map(|l| format!("{l}'")));
        CausalPoset { labels, leq, perp, geometry: None, points: None }
    }

    /// Returns a copy with the ⊥ entry for `(a, b)` set (symmetrically unless
    /// `a == b`). Intended for fault injection in diagnostics.
    pub fn with_perp(&self, a: ElemId, b: ElemId, value: bool) -> CausalPoset {
        let mut p = self.clone();
        let n = p.len();
        p.perp[a.idx() * n + b.idx()] = value;
        p.perp[b.idx() * n + a.idx()] = value;
        p
    }

    /// Canonical adjacency-list form: strict order covers and ⊥ pairs with
    /// `a < b`, both by label.
    pub fn adjacency(&self) -> Adjacency {
        let mut order = Vec::new();
        let mut perp = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) {
                    order.push((self.label(a).to_string(), self.label(b).to_string()));
                }
                if a < b && self.perp(a, b) {
                    perp.push((self.label(a).to_string(), self.label(b).to_string()));
                }
            }
        }
        Adjacency { elements: self.labels.clone(), order, perp }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    pub perp: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub elements: Vec<String>,
}

/// Which of the four continuum-poset properties a finite poset satisfies,
/// with strict order standing in for compact inclusion and ⊥ for disjointness
/// of closures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuumProperties {
    /// every o has a < o < x
    pub bounded_between: bool,
    /// a < o implies some a < ã < o
    pub dense: bool,
    /// every o has some a ⊥ o
    pub has_disjoint: bool,
    /// a ⊥ o implies some x > a with x ⊥ o
    pub disjoint_enlargeable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub pathwise_connected: bool,
    pub continuum_properties: ContinuumProperties,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

/// Scans every axiom of a causal poset and lists each violation.
pub fn validate_poset(p: &CausalPoset) -> ValidationReport {
    let mut violations = Vec::new();
    let lab = |a: ElemId| p.label(a).to_string();
    let mut push = |axiom: &str, els: Vec<String>| {
        violations.push(Violation { axiom: axiom.to_string(), elements: els })
    };
    for a in p.elements() {
        if !p.leq(a, a) {
            push("reflexivity", vec![lab(a)]);
        }
        if p.perp(a, a) {
            push("irreflexive", vec![lab(a)]);
        }
    }
    for a in p.elements() {
        for b in p.elements() {
            if a < b && p.leq(a, b) && p.leq(b, a) {
                push("antisymmetry", vec![lab(a), lab(b)]);
            }
            if p.perp(a, b) != p.perp(b, a) {
                push("symmetric", vec![lab(a), lab(b)]);
            }
            if !p.leq(a, b) {
                continue;
            }
            for c in p.elements() {
                if p.leq(b, c) && !p.leq(a, c) {
                    push("transitivity", vec![lab(a), lab(b), lab(c)]);
                }
            }
        }
    }
    // ⊥-stability: o ⊥ a and x ≤ o force x ⊥ a.
    for o in p.elements() {
        for a in p.elements() {
            if !p.perp(o, a) {
                continue;
            }
            for x in p.elements() {
                if p.leq(x, o) && !p.perp(x, a) {
                    push("⊥-stability", vec![lab(x), lab(a)]);
                }
            }
            if o < a {
                if let Some(m) = p.elements().find(|&m| p.leq(m, o) && p.leq(m, a)) {
                    push("no-common-minorant", vec![lab(o), lab(a), lab(m)]);
                }
            }
        }
    }
    ValidationReport {
        violations,
        pathwise_connected: is_pathwise_connected(p),
        continuum_properties: continuum_properties(p),
    }
}

/// True iff the graph joining elements with a common majorant is connected.
pub fn is_pathwise_connected(p: &CausalPoset) -> bool {
    let n = p.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![ElemId(0)];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for o in p.upper_set(a) {
            for b in p.lower_set(o) {
                if !seen[b.idx()] {
                    seen[b.idx()] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn continuum_properties(p: &CausalPoset) -> ContinuumProperties {
    let els: Vec<ElemId> = p.elements().collect();
    let bounded_between = els.iter().all(|&o| {
        els.iter().any(|&a| p.lt(a, o)) && els.iter().any(|&x| p.lt(o, x))
    });
    let dense = els.iter().all(|&o| {
        els.iter()
            .filter(|&&a| p.lt(a, o))
            .all(|&a| els.iter().any(|&m| p.lt(a, m) && p.lt(m, o)))
    });
    let has_disjoint = els.iter().all(|&o| els.iter().any(|&a| p.perp(a, o)));
    let disjoint_enlargeable = els.iter().all(|&o| {
        els.iter()
            .filter(|&&a| p.perp(a, o))
            .all(|&a| els.iter().any(|&x| p.lt(a, x) && p.perp(x, o)))
    });
    ContinuumProperties { bounded_between, dense, has_disjoint, disjoint_enlargeable }
}
