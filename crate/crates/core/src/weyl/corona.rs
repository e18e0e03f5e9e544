//! Corona integrals `∫_{b⊚} |f| d⁴x` over `b⊚ = |b| ∖ (∂₀b ∪ ∂₁b)`:
//! Gauss–Legendre in time, seeded Monte Carlo in space.
//!
//! Spatial samples are offsets from the centre of `|b|`, jittered over a grid
//! of cells with one ChaCha stream per cell, and each offset is used with its
//! four quarter turns about the z axis. The estimate therefore depends only
//! on the geometry relative to `|b|`: it is unchanged by translations, by
//! quarter turns, and by exchanging the faces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CompositeRule, QuadratureConfig};
use crate::causet::{q_to_f64, CausalPoset, DoubleConeSpec, ElemId, Q};
use crate::cochain::{bump, TestFunction};
use crate::error::{Error, Result};
use crate::simplex::Simplex1;

/// Largest number of strata per spatial axis.
const GRID: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoronaEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
    /// The two-sigma half-width exceeds the Monte Carlo tolerance.
    pub flagged: bool,
}

impl CoronaEstimate {
    pub fn zero() -> Self {
        CoronaEstimate { value: 0.0, std_err: 0.0, samples: 0, flagged: false }
    }
}

struct RelCone {
    center: [f64; 4],
    radius: f64,
}

impl RelCone {
    fn new(cone: &DoubleConeSpec, origin: &[Q; 4]) -> Self {
        RelCone { center: std::array::from_fn(|k| q_to_f64(cone.center[k] - origin[k])), radius: q_to_f64(cone.radius) }
    }
}

fn cone_of(p: &CausalPoset, a: ElemId) -> Result<&DoubleConeSpec> {
    match p.geometry_of(a) {
        Some(_) => p.cone(a).ok_or_else(|| Error::InvalidGeometry(format!("{} is not a double cone", p.label(a)))),
        None => Err(Error::MissingGeometry),
    }
}

/// Time interval of a cone above a spatial point, if any.
fn time_slice(c: &RelCone, x: &[f64; 3]) -> Option<(f64, f64)> {
    let d = [x[0] - c.center[1], x[1] - c.center[2], x[2] - c.center[3]];
    let half = c.radius - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    (half > 0.0).then(|| (c.center[0] - half, c.center[0] + half))
}

/// `[lo, hi]` minus the given open intervals.
fn subtract(lo: f64, hi: f64, holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pieces = vec![(lo, hi)];
    for &(a, b) in holes {
        pieces = pieces
            .into_iter()
            .flat_map(|(l, u)| [(l, u.min(a)), (l.max(b), u)])
            .filter(|(l, u)| u > l)
            .collect();
    }
    pieces
}

/// `∫_{b⊚} |f_ev(x)| d⁴x`; exactly zero when the corona is empty, that is
/// when the support equals a face. Above each spatial sample the corona is
/// a union of time intervals, integrated by Gauss–Legendre; the spatial
/// integral is a stratified Monte Carlo estimate.
pub fn corona_integral(
    p: &CausalPoset,
    b: Simplex1,
    f_ev: &TestFunction,
    cfg: &QuadratureConfig,
) -> Result<CoronaEstimate> {
    if b.support == b.d0 || b.support == b.d1 || f_ev.is_zero() {
        return Ok(CoronaEstimate::zero());
    }
    let sup = cone_of(p, b.support)?;
    let origin = sup.center;
    let s = RelCone::new(sup, &origin);
    let faces = [RelCone::new(cone_of(p, b.d0)?, &origin), RelCone::new(cone_of(p, b.d1)?, &origin)];
    let atoms: Vec<(f64, [f64; 4], f64)> = f_ev
        .atoms()
        .iter()
        .map(|a| (q_to_f64(a.amplitude), std::array::from_fn(|k| q_to_f64(a.center[k] - origin[k])), q_to_f64(a.scale)))
        .collect();
    let r = s.radius;
    let lo = |k: usize| atoms.iter().map(|(_, c, sc)| c[k] - sc / 2.0).fold(f64::INFINITY, f64::min).max(-r);
    let hi = |k: usize| atoms.iter().map(|(_, c, sc)| c[k] + sc / 2.0).fold(f64::NEG_INFINITY, f64::max).min(r);
    let (t_lo, t_hi, z_lo, z_hi) = (lo(0), hi(0), lo(3), hi(3));
    let w = [lo(1), hi(1), lo(2), hi(2)].iter().map(|v| v.abs()).fold(0.0, f64::max).min(r);
    if t_hi <= t_lo || z_hi <= z_lo || w == 0.0 {
        return Ok(CoronaEstimate::zero());
    }
    let rule = CompositeRule::new(0.0, 1.0, 2, 16);
    let column = |x: &[f64; 3]| -> f64 {
        let Some((sl, su)) = time_slice(&s, x) else { return 0.0 };
        let holes: Vec<(f64, f64)> = faces.iter().filter_map(|f| time_slice(f, x)).collect();
        let spatial: Vec<f64> = atoms
            .iter()
            .map(|(a, c, sc)| {
                let rho2 = (x[0] - c[1]).powi(2) + (x[1] - c[2]).powi(2) + (x[2] - c[3]).powi(2);
                a * bump(4.0 * rho2 / (sc * sc))
            })
            .collect();
        if spatial.iter().all(|g| *g == 0.0) {
            return 0.0;
        }
        subtract(sl.max(t_lo), su.min(t_hi), &holes)
            .into_iter()
            .map(|(l, u)| {
                (u - l)
                    * rule.integrate(|v| {
                        let t = l + (u - l) * v;
                        atoms.iter().zip(&spatial).map(|((_, c, sc), g)| g * bump(2.0 * (t - c[0]) / sc)).sum::<f64>().abs()
                    })
            })
            .sum()
    };
    let volume = 4.0 * w * w * (z_hi - z_lo);
    let base = cfg.mc_samples.div_ceil(4);
    let grid = (1..=GRID).rev().find(|g| 2 * g.pow(3) <= base).unwrap_or(1);
    let cells = grid.pow(3);
    let per_cell = (base / cells).max(2);
    let (blo, bhi) = ([-w, -w, z_lo], [w, w, z_hi]);
    let stats: Vec<(f64, f64)> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(cell as u64);
            let idx = [cell % grid, (cell / grid) % grid, cell / grid / grid];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..per_cell {
                let u: [f64; 3] = rng.gen();
                let x: [f64; 3] =
                    std::array::from_fn(|k| blo[k] + (bhi[k] - blo[k]) * (idx[k] as f64 + u[k]) / grid as f64);
                let quartet = [x, [-x[1], x[0], x[2]], [-x[0], -x[1], x[2]], [x[1], -x[0], x[2]]];
                let v = quartet.iter().map(&column).sum::<f64>() / 4.0;
                s1 += v;
                s2 += v * v;
            }
            let k = per_cell as f64;
            let mean = s1 / k;
            (mean, (s2 / k - mean * mean).max(0.0) * k / (k - 1.0))
        })
        .collect();
    let c = cells as f64;
    let value = volume * stats.iter().map(|s| s.0).sum::<f64>() / c;
    let std_err = volume * (stats.iter().map(|s| s.1).sum::<f64>() / (per_cell as f64 * c * c)).sqrt();
    let flagged = 2.0 * std_err > cfg.tolerances.monte_carlo * value.abs();
    Ok(CoronaEstimate { value, std_err, samples: 4 * cells * per_cell, flagged })
}
