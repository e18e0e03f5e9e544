//! Builders for the three geometric poset families: double cones in
//! Minkowski space, arcs of a discretised circle, and subsets of a causal set.
//!
//! Order and ⊥ predicates are evaluated in exact rational arithmetic; square
//! roots are avoided by comparing squared spatial distances.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CausalPoset, Geometry};
use crate::error::{Error, Result};

/// Exact rational scalar used by all geometry predicates.
pub type Q = Ratio<i64>;

/// Rounds to the nearest multiple of 1/1000.
pub fn q_from_f64(x: f64) -> Q {
    Q::new((x * 1000.0).round() as i64, 1000)
}

pub fn q_to_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn spatial_dist2(a: &[Q; 4], b: &[Q; 4]) -> Q {
    (1..4).map(|k| (a[k] - b[k]) * (a[k] - b[k])).fold(Q::zero(), |s, v| s + v)
}

/// Open double cone `{p : |p⃗ − c⃗| + |p_t − c_t| < R}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DoubleConeSpec {
    /// `(t, x, y, z)`
    pub center: [Q; 4],
    pub radius: Q,
}

impl DoubleConeSpec {
    pub fn new(center: [Q; 4], radius: Q) -> Self {
        Self { center, radius }
    }

    /// Rounds each coordinate to a multiple of 1/1000.
    pub fn from_f64(center: [f64; 4], radius: f64) -> Self {
        Self { center: center.map(q_from_f64), radius: q_from_f64(radius) }
    }

    pub fn center_f64(&self) -> [f64; 4] {
        self.center.map(q_to_f64)
    }

    pub fn radius_f64(&self) -> f64 {
        q_to_f64(self.radius)
    }

    /// `self ⊆ other` as regions.
    pub fn included_in(&self, other: &Self) -> bool {
        let r = other.radius - self.radius - (self.center[0] - other.center[0]).abs();
        !r.is_negative() && spatial_dist2(&self.center, &other.center) <= r * r
    }

    /// Spacelike separation of the closures.
    pub fn spacelike_to(&self, other: &Self) -> bool {
        let s = (self.center[0] - other.center[0]).abs() + self.radius + other.radius;
        spatial_dist2(&self.center, &other.center) >= s * s
    }

    /// Membership of a point in the open region, in floating point.
    pub fn contains_point(&self, p: &[f64; 4]) -> bool {
        let c = self.center_f64();
        let dx = ((p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2) + (p[3] - c[3]).powi(2)).sqrt();
        dx + (p[0] - c[0]).abs() < self.radius_f64()
    }
}

/// Double-cone poset: `≤` is inclusion, `⊥` is spacelike separation.
pub fn build_minkowski_lattice(spec: &[DoubleConeSpec]) -> Result<CausalPoset> {
    if spec.is_empty() {
        return Err(Error::EmptyPoset);
    }
    for (i, c) in spec.iter().enumerate() {
        if !c.radius.is_positive() {
            return Err(Error::InvalidGeometry(format!("cone {i} has non-positive radius")));
        }
    }
    let n = spec.len();
    let mut leq = vec![false; n * n];
    let mut perp = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            leq[i * n + j] = spec[i].included_in(&spec[j]);
            perp[i * n + j] = spec[i].spacelike_to(&spec[j]);
        }
    }
    let labels = (0..n).map(|i| format!("c{i}")).collect();
    let geometry = spec.iter().cloned().map(Geometry::Cone).collect();
    Ok(CausalPoset::from_matrices(labels, leq, perp)?.with_geometry(geometry))
}

/// Open arc `(start, start + length)` of a circle with `n` unit segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSpec {
    pub n: u32,
    pub start: u32,
    pub length: u32,
}

impl ArcSpec {
    pub fn new(n: u32, start: u32, length: u32) -> Result<Self> {
        if length == 0 || length >= n {
            return Err(Error::InvalidRange(format!("arc length {length} not in (0, {n})")));
        }
        Ok(Self { n, start: start % n, length })
    }

    /// `self ⊆ other`.
    pub fn included_in(&self, other: &Self) -> bool {
        let offset = (self.start + self.n - other.start) % self.n;
        offset + self.length <= other.length
    }

    /// Closures are disjoint.
    pub fn disjoint_closure(&self, other: &Self) -> bool {
        let d = (other.start + self.n - self.start) % self.n;
        d > self.length && self.n - d > other.length
    }

    pub fn rotated(&self, k: u32) -> Self {
        Self { start: (self.start + k) % self.n, ..*self }
    }

    /// Midpoint angle in radians.
    pub fn mid_angle(&self) -> f64 {
        std::f64::consts::TAU * (self.start as f64 + self.length as f64 / 2.0) / self.n as f64
    }
}

/// All arcs with length in `lengths`, ordered by (length, start).
pub fn build_circle(n: u32, lengths: std::ops::RangeInclusive<u32>) -> Result<CausalPoset> {
    if n < 4 {
        return Err(Error::InvalidRange(format!("circle needs n >= 4, got {n}")));
    }
    if lengths.is_empty() || *lengths.start() == 0 || *lengths.end() >= n {
        return Err(Error::InvalidRange(format!(
            "lengths {}..={} not within (0, {n})",
            lengths.start(),
            lengths.end()
        )));
    }
    let mut arcs = Vec::new();
    for len in lengths {
        for start in 0..n {
            arcs.push(ArcSpec::new(n, start, len)?);
        }
    }
    let m = arcs.len();
    let mut leq = vec![false; m * m];
    let mut perp = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            leq[i * m + j] = arcs[i].included_in(&arcs[j]);
            perp[i * m + j] = arcs[i].disjoint_closure(&arcs[j]);
        }
    }
    let labels = arcs.iter().map(|a| format!("[{},{})", a.start, a.start + a.length)).collect();
    let geometry = arcs.into_iter().map(Geometry::Arc).collect();
    Ok(CausalPoset::from_matrices(labels, leq, perp)?.with_geometry(geometry))
}

/// Default element cap for causal-set posets.
pub const CAUSAL_SET_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CausalSetSpec {
    pub points: Vec<[Q; 4]>,
    pub seed: u64,
    pub max_subset_size: usize,
}

impl CausalSetSpec {
    /// Sprinkles `count` points uniformly into `[0, extent]^4`, rounded to
    /// multiples of 1/1000.
    pub fn sprinkle(seed: u64, count: usize, extent: f64, max_subset_size: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<[Q; 4]> = Vec::with_capacity(count);
        while points.len() < count {
            let p = [0; 4].map(|_| q_from_f64(rng.gen::<f64>() * extent));
            if !points.contains(&p) {
                points.push(p);
            }
        }
        Self { points, seed, max_subset_size }
    }
}

/// `e ⪯ e′` iff `e′ − e` lies in the closed forward light cone.
pub fn causal_precedes(e: &[Q; 4], f: &[Q; 4]) -> bool {
    let dt = f[0] - e[0];
    !dt.is_negative() && dt * dt >= spatial_dist2(e, f)
}

fn count_subsets(n: usize, k_max: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for k in 1..=k_max.min(n) {
        binom = binom * (n + 1 - k) / k;
        total = total.saturating_add(binom);
    }
    total
}

/// Poset of nonempty point subsets of size at most `max_subset_size`.
pub fn build_causal_set_poset(spec: &CausalSetSpec, cap: usize) -> Result<CausalPoset> {
    let n = spec.points.len();
    if n == 0 || spec.max_subset_size == 0 {
        return Err(Error::EmptyPoset);
    }
    for i in 0..n {
        for j in 0..i {
            if spec.points[i] == spec.points[j] {
                return Err(Error::InvalidGeometry(format!("points {j} and {i} coincide")));
            }
        }
    }
    let count = count_subsets(n, spec.max_subset_size);
    if count > cap {
        return Err(Error::PosetTooLarge { count, cap });
    }
    let mut subsets: Vec<Vec<usize>> = Vec::with_capacity(count);
    fn extend(cur: &mut Vec<usize>, from: usize, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            extend(cur, i + 1, n, k, out);
            cur.pop();
        }
    }
    for k in 1..=spec.max_subset_size.min(n) {
        extend(&mut Vec::new(), 0, n, k, &mut subsets);
    }
    let mut comparable = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            comparable[i * n + j] = causal_precedes(&spec.points[i], &spec.points[j])
                || causal_precedes(&spec.points[j], &spec.points[i]);
        }
    }
    let m = subsets.len();
    let mut leq = vec![false; m * m];
    let mut perp = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            leq[i * m + j] = subsets[i].iter().all(|e| subsets[j].contains(e));
            perp[i * m + j] = subsets[i]
                .iter()
                .all(|&e| subsets[j].iter().all(|&f| !comparable[e * n + f]));
        }
    }
    let labels = subsets
        .iter()
        .map(|s| {
            let inner: Vec<String> = s.iter().map(|e| format!("p{e}")).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let geometry = subsets.into_iter().map(Geometry::Subset).collect();
    Ok(CausalPoset::from_matrices(labels, leq, perp)?
        .with_geometry(geometry)
        .with_points(spec.points.clone()))
}
