#![allow(dead_code)]

use std::f64::consts::PI;

use loopnet::causet::{q_to_f64, CausalPoset, ElemId};
use loopnet::cochain::bump;
use loopnet::loopgrp::Word;
use loopnet::simplex::{tangent_simplices, Simplex1};
use loopnet::weyl::{CompositeRule, FieldFunction};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_word<R: Rng>(rng: &mut R, letters: &[Simplex1], len: usize) -> Word {
    Word::new((0..len).map(|_| *letters.choose(rng).unwrap()).collect())
}

/// A loop at `base` built from a random walk of tangent letters closed by a
/// single letter back to `base`; `None` if the walk cannot be closed.
pub fn random_loop<R: Rng>(rng: &mut R, p: &CausalPoset, letters: &[Simplex1], base: ElemId, steps: usize) -> Option<Word> {
    let mut walk: Vec<Simplex1> = Vec::new();
    let mut at = base;
    for _ in 0..steps {
        let out: Vec<&Simplex1> = letters.iter().filter(|b| b.d1 == at).collect();
        let b = **out.choose(rng)?;
        walk.insert(0, b);
        at = b.d0;
    }
    if at != base {
        let close: Vec<&Simplex1> = letters.iter().filter(|b| b.d1 == at && b.d0 == base).collect();
        walk.insert(0, **close.choose(rng)?);
    }
    let _ = p;
    Some(Word::new(walk))
}

/// Concatenation of random loops at random bases, optionally with stray
/// letters spliced in.
pub fn random_loop_product<R: Rng>(rng: &mut R, p: &CausalPoset, max_len: usize, stray: bool) -> Word {
    let letters = tangent_simplices(p);
    let bases: Vec<ElemId> = p.elements().filter(|&a| letters.iter().any(|b| b.d1 == a)).collect();
    let mut out: Vec<Simplex1> = Vec::new();
    while out.len() < max_len {
        if stray && rng.gen_bool(0.15) {
            out.push(*letters.choose(rng).unwrap());
            continue;
        }
        let base = *bases.choose(rng).unwrap();
        let steps = rng.gen_range(1..4);
        if let Some(l) = random_loop(rng, p, &letters, base, steps) {
            out.extend_from_slice(l.letters());
        }
    }
    out.truncate(max_len);
    Word::new(out)
}

/// Repeatedly removes the leftmost adjacent inverse pair until none remain.
pub fn reduce_fixpoint(w: &Word) -> Word {
    let mut v = w.letters().to_vec();
    loop {
        match (1..v.len()).find(|&i| v[i - 1] == v[i].opposite()) {
            Some(i) => {
                v.drain(i - 1..=i);
            }
            None => return Word::new(v),
        }
    }
}

pub fn loop_oracle(letters: &[Simplex1]) -> bool {
    if letters.is_empty() {
        return false;
    }
    let mut at = letters[letters.len() - 1].d1;
    let start = at;
    for b in letters.iter().rev() {
        if b.d1 != at {
            return false;
        }
        at = b.d0;
    }
    at == start
}

/// Tries every split of the reduced word into consecutive blocks.
pub fn partition_oracle(w: &Word) -> bool {
    let r = reduce_fixpoint(w);
    let n = r.len();
    if n == 0 {
        return true;
    }
    (0u32..1 << (n - 1)).any(|cuts| {
        let mut start = 0;
        for i in 1..=n {
            if i == n || cuts & (1 << (i - 1)) != 0 {
                if !loop_oracle(&r.letters()[start..i]) {
                    return false;
                }
                start = i;
            }
        }
        true
    })
}

/// `(2π)⁻² ∫ e^{i(ω t − p⃗·x⃗)} f(x) d⁴x` by tensor Gauss–Legendre over the
/// bounding box of each atom, summed over the product rule in separated form.
pub fn em_oracle(f: &FieldFunction, p: [f64; 3], mass: f64) -> Complex64 {
    let om = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + mass * mass).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for ((c, r), a) in f.iter() {
        let r = q_to_f64(*r);
        let c = c.map(q_to_f64);
        let rule = CompositeRule::new(-r / 2.0, r / 2.0, 8, 16);
        let time: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| Complex64::from_polar(w * bump(2.0 * t / r), om * (t + c[0])))
            .sum();
        let mut space = Complex64::new(0.0, 0.0);
        for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
            for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
                for (&z, &wz) in rule.nodes.iter().zip(&rule.weights) {
                    let rho2 = x * x + y * y + z * z;
                    let v = wx * wy * wz * bump(4.0 * rho2 / (r * r));
                    if v != 0.0 {
                        space += Complex64::from_polar(v, -(p[0] * (x + c[1]) + p[1] * (y + c[2]) + p[2] * (z + c[3])));
                    }
                }
            }
        }
        acc += a * time * space;
    }
    acc / (2.0 * PI).powi(2)
}
