//! Quadrature configuration and the hyperboloid profile: radial transforms
//! of the bump, the pair kernels of the inner product on the mass
//! hyperboloid, and node-doubling convergence checks.
//!
//! With `F_R(p₀, q) = fTime(R, p₀) · fSpace(R, q)`, an atom `a · f_R(x − y)`
//! transforms to `(2π)⁻² a e^{i(ω y₀ − p⃗·y⃗)} F_R(ω, |p⃗|)` on the hyperboloid
//! `ω = √(|p⃗|² + m²)`. The measure is `d³p / ω`, and the angular integral of a
//! pair of atoms reduces to `4π sinc(q |Δ⃗|)`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FieldFunction;
use crate::causet::{q_to_f64, Q};
use crate::cochain::bump;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Tolerances {
    /// Node-doubling change, relative to the Cauchy–Schwarz scale of the
    /// quantity checked.
    pub quadrature: f64,
    /// Relative two-sigma half-width of a Monte Carlo estimate.
    pub monte_carlo: f64,
    /// Norm of a function-part difference counted as nonzero.
    pub function: f64,
    /// Phase difference counted as nonzero.
    pub phase: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quadrature: 1e-8, monte_carlo: 0.01, function: 1e-6, phase: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct QuadratureConfig {
    pub mass: f64,
    /// Momentum cutoff `Λ`; the default is `40 / R_min` for `R_min = 1`.
    pub cutoff: f64,
    /// Panels of the composite rule on `[0, Λ]`.
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Base panels of the profile integrals on `[0, 1]`, before adding one
    /// per half-oscillation.
    pub profile_panels: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            mass: 1.0,
            cutoff: 40.0,
            panels: 400,
            nodes: 16,
            profile_panels: 8,
            mc_samples: 200_000,
            seed: 0xC0FFEE,
            tolerances: Tolerances::default(),
        }
    }
}

impl QuadratureConfig {
    /// Default configuration with cutoff `40 / r_min`.
    pub fn for_min_scale(r_min: f64) -> Self {
        QuadratureConfig { cutoff: 40.0 / r_min, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let positive = [self.cutoff, t.quadrature, t.monte_carlo, t.function, t.phase].iter().all(|v| *v > 0.0)
            && self.mass >= 0.0
            && self.panels > 0
            && self.nodes > 0
            && self.profile_panels > 0
            && self.mc_samples >= 4;
        if positive {
            Ok(())
        } else {
            Err(Error::InvalidRange("quadrature parameters must be positive".into()))
        }
    }

    /// Twice the panels of every composite rule.
    pub fn refined(&self) -> Self {
        QuadratureConfig { panels: 2 * self.panels, profile_panels: 2 * self.profile_panels, ..self.clone() }
    }

    pub fn omega(&self, q: f64) -> f64 {
        (q * q + self.mass * self.mass).sqrt()
    }
}

/// Composite Gauss–Legendre rule on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("positive order"));
        let pairs = rule.as_node_weight_pairs();
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * pairs.len());
        let mut weights = Vec::with_capacity(panels * pairs.len());
        for k in 0..panels {
            let (l, r) = (a + h * k as f64, a + h * (k + 1) as f64);
            for &(x, w) in pairs {
                nodes.push(0.5 * ((r - l) * x + r + l));
                weights.push(0.5 * (r - l) * w);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `sin(x) / x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// One record of a node-doubling comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceEntry {
    pub what: String,
    pub rel_change: f64,
    pub tolerance: f64,
}

impl ConvergenceEntry {
    pub fn passed(&self) -> bool {
        self.rel_change <= self.tolerance
    }
}

/// Cache key of a pair kernel: time offset, squared spatial offset and the
/// two scales in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct KernelKey {
    dt: Q,
    r2: Q,
    ra: Q,
    rb: Q,
}

impl KernelKey {
    fn new(from: &([Q; 4], Q), to: &([Q; 4], Q)) -> Self {
        let d: Vec<Q> = (0..4).map(|k| to.0[k] - from.0[k]).collect();
        let r2 = d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
        let (ra, rb) = if from.1 <= to.1 { (from.1, to.1) } else { (to.1, from.1) };
        KernelKey { dt: d[0], r2, ra, rb }
    }

    fn diagonal(r: Q) -> Self {
        KernelKey { dt: Q::from(0), r2: Q::from(0), ra: r, rb: r }
    }
}

/// Radial transforms and pair kernels for one quadrature configuration.
/// Every cached value is a deterministic function of the configuration.
#[derive(Debug)]
pub struct HyperboloidProfile {
    config: QuadratureConfig,
    grid: CompositeRule,
    reference: Vec<(f64, f64)>,
    tables: RwLock<HashMap<Q, Arc<Vec<f64>>>>,
    kernels: RwLock<HashMap<KernelKey, Complex64>>,
    checked: Mutex<HashSet<KernelKey>>,
    audit: Mutex<Vec<ConvergenceEntry>>,
    refined: OnceLock<Box<HyperboloidProfile>>,
}

impl HyperboloidProfile {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        let grid = CompositeRule::new(0.0, config.cutoff, config.panels, config.nodes);
        let reference = CompositeRule::new(0.0, 1.0, 1, config.nodes);
        Ok(HyperboloidProfile {
            reference: reference.nodes.into_iter().zip(reference.weights).collect(),
            config,
            grid,
            tables: RwLock::default(),
            kernels: RwLock::default(),
            checked: Mutex::default(),
            audit: Mutex::default(),
            refined: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    pub fn mass(&self) -> f64 {
        self.config.mass
    }

    pub fn grid(&self) -> &CompositeRule {
        &self.grid
    }

    /// The same profile with every composite rule doubled.
    pub fn refined(&self) -> &HyperboloidProfile {
        self.refined.get_or_init(|| {
            Box::new(HyperboloidProfile::new(self.config.refined()).expect("refinement keeps a valid config"))
        })
    }

    /// `∫₀¹ g(u) du` with panels growing with the oscillation frequency `k`.
    fn unit_integral(&self, k: f64, g: impl Fn(f64) -> f64) -> f64 {
        let panels = self.config.profile_panels * (1 + (k.abs() / PI).ceil() as usize / 8);
        let h = 1.0 / panels as f64;
        let mut s = 0.0;
        for j in 0..panels {
            let l = h * j as f64;
            for &(x, w) in &self.reference {
                s += w * h * g(l + h * x);
            }
        }
        s
    }

    /// `fTime(R, p₀) = ∫ e^{i p₀ t} h(2t/R) dt = R ∫₀¹ cos(p₀ R s / 2) h(s) ds`.
    pub fn f_time(&self, r: f64, p0: f64) -> f64 {
        let k = p0 * r / 2.0;
        r * self.unit_integral(k, |s| (k * s).cos() * bump(s))
    }

    /// `fSpace(R, q) = (4π/q) ∫₀^∞ r sin(qr) h(4r²/R²) dr
    /// = 4π (R/2)³ ∫₀¹ u² sinc(q R u / 2) h(u²) du`.
    pub fn f_space(&self, r: f64, q: f64) -> f64 {
        let k = q * r / 2.0;
        let half = r / 2.0;
        4.0 * PI * half * half * half * self.unit_integral(k, |u| u * u * sinc(k * u) * bump(u * u))
    }

    /// `F_R(ω, q)` at one momentum magnitude.
    pub fn radial(&self, r: f64, q: f64) -> f64 {
        self.f_time(r, self.config.omega(q)) * self.f_space(r, q)
    }

    /// `F_R` on the nodes of the momentum grid.
    pub fn table(&self, scale: Q) -> Arc<Vec<f64>> {
        if let Some(t) = self.tables.read().expect("table lock").get(&scale) {
            return t.clone();
        }
        let r = q_to_f64(scale);
        let values: Vec<f64> = self.grid.nodes.par_iter().map(|&q| self.radial(r, q)).collect();
        self.tables.write().expect("table lock").entry(scale).or_insert_with(|| Arc::new(values)).clone()
    }

    fn compute_kernel(&self, key: &KernelKey) -> Complex64 {
        let (ta, tb) = (self.table(key.ra), self.table(key.rb));
        let (dt, r) = (q_to_f64(key.dt), q_to_f64(key.r2).sqrt());
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&q, &w)) in self.grid.nodes.iter().zip(&self.grid.weights).enumerate() {
            let om = self.config.omega(q);
            let radial = w * q * q / om * sinc(q * r) * ta[i] * tb[i];
            acc += Complex64::from_polar(radial, om * dt);
        }
        acc * (4.0 * PI / (2.0 * PI).powi(4))
    }

    fn kernel_by_key(&self, key: &KernelKey) -> Complex64 {
        if let Some(k) = self.kernels.read().expect("kernel lock").get(key) {
            return *k;
        }
        let k = self.compute_kernel(key);
        *self.kernels.write().expect("kernel lock").entry(*key).or_insert(k)
    }

    /// Compares a kernel with its node-doubled value once per key.
    fn check_kernel(&self, key: &KernelKey) -> Result<()> {
        if self.checked.lock().expect("check lock").contains(key) {
            return Ok(());
        }
        let coarse = self.kernel_by_key(key);
        let fine = self.refined().kernel_by_key(key);
        let scale = (self.kernel_by_key(&KernelKey::diagonal(key.ra)).re
            * self.kernel_by_key(&KernelKey::diagonal(key.rb)).re)
            .sqrt();
        let rel_change = (coarse - fine).norm() / scale;
        let what = format!(
            "pair kernel dt={} |dx|²={} R={},{}",
            key.dt, key.r2, key.ra, key.rb
        );
        self.record(what.clone(), rel_change);
        if rel_change > self.config.tolerances.quadrature {
            return Err(Error::NonConvergence { what, rel_change });
        }
        self.checked.lock().expect("check lock").insert(*key);
        Ok(())
    }

    fn record(&self, what: String, rel_change: f64) {
        let tolerance = self.config.tolerances.quadrature;
        self.audit.lock().expect("audit lock").push(ConvergenceEntry { what, rel_change, tolerance });
    }

    /// Every node-doubling comparison made so far.
    pub fn audit(&self) -> Vec<ConvergenceEntry> {
        self.audit.lock().expect("audit lock").clone()
    }

    /// `(2π)⁻⁴ ∫ e^{i p·Δ} F_A F_B d³p/ω` for unit atoms `from → to`, where
    /// `Δ = y_to − y_from`, checked against node doubling.
    pub fn kernel(&self, from: &([Q; 4], Q), to: &([Q; 4], Q)) -> Result<Complex64> {
        let key = KernelKey::new(from, to);
        self.check_kernel(&key)?;
        Ok(self.kernel_by_key(&key))
    }

    /// Relative node-doubling change of `fTime` and `fSpace` at scale `r`
    /// over sample momenta up to the cutoff.
    pub fn check_radial(&self, r: f64) -> Result<f64> {
        let fine = self.refined();
        let scale = self.radial(r, 0.0).abs();
        let mut worst: f64 = 0.0;
        for j in 0..=16 {
            let q = self.config.cutoff * j as f64 / 16.0;
            let om = self.config.omega(q);
            let dt = (self.f_time(r, om) - fine.f_time(r, om)).abs() / self.f_time(r, 0.0).abs();
            let ds = (self.f_space(r, q) - fine.f_space(r, q)).abs() / self.f_space(r, 0.0).abs();
            worst = worst.max(dt).max(ds);
        }
        let what = format!("radial profile R={r}");
        self.record(what.clone(), worst);
        if worst > self.config.tolerances.quadrature || !scale.is_finite() {
            return Err(Error::NonConvergence { what, rel_change: worst });
        }
        Ok(worst)
    }

    /// `⟨E_m f, E_m g⟩ = ∫ conj(E_m f) E_m g d³p/ω`.
    pub fn inner(&self, f: &FieldFunction, g: &FieldFunction) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (u, a) in f.iter() {
            for (v, b) in g.iter() {
                acc += a * b * self.kernel(u, v)?;
            }
        }
        Ok(acc)
    }

    /// `σ(f, g) = 2 Im⟨E_m f, E_m g⟩`, summed over unordered atom pairs so
    /// that antisymmetry and `σ(f, f) = 0` hold exactly.
    pub fn sigma(&self, f: &FieldFunction, g: &FieldFunction) -> Result<f64> {
        let mut keys: Vec<&([Q; 4], Q)> = f.keys().chain(g.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut acc = 0.0;
        for (i, u) in keys.iter().enumerate() {
            for v in &keys[i + 1..] {
                let d = f.coeff(u) * g.coeff(v) - f.coeff(v) * g.coeff(u);
                if d != 0.0 {
                    acc += d * 2.0 * self.kernel(u, v)?.im;
                }
            }
        }
        Ok(acc)
    }

    /// `E_m f` at spatial momenta.
    pub fn em_values(&self, f: &FieldFunction, momenta: &[[f64; 3]]) -> Vec<Complex64> {
        momenta
            .par_iter()
            .map(|p| {
                let q = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let om = self.config.omega(q);
                let mut radial: HashMap<Q, f64> = HashMap::new();
                let mut acc = Complex64::new(0.0, 0.0);
                for ((c, s), a) in f.iter() {
                    let fr = *radial.entry(*s).or_insert_with(|| self.radial(q_to_f64(*s), q));
                    let y = c.map(q_to_f64);
                    let phase = om * y[0] - p[0] * y[1] - p[1] * y[2] - p[2] * y[3];
                    acc += Complex64::from_polar(a * fr, phase);
                }
                acc / (2.0 * PI).powi(2)
            })
            .collect()
    }
}
