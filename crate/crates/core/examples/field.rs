//! The free-field connection on the Minkowski lattice: symplectic form of
//! bump atoms, holonomies of site loops and their Weyl commutators.

use loopnet::causet::Q;
use loopnet::cochain::build_invariant_0cochain;
use loopnet::fixtures;
use loopnet::loopgrp::Word;
use loopnet::weyl::{sigma, weyl_commutator, FieldConnection, FieldFunction, HyperboloidProfile, QuadratureConfig};

fn main() -> loopnet::Result<()> {
    let prof = HyperboloidProfile::new(QuadratureConfig::default())?;
    let atom = |t: i64, x: i64, r: i64| FieldFunction::from_terms([(([t, x, 0, 0].map(Q::from), Q::from(r)), 1.0)]);
    for r in 1..=3 {
        let timelike = sigma(&atom(0, 0, r), &atom(3 * r, 0, r), &prof)?;
        let spacelike = sigma(&atom(0, 0, r), &atom(0, 6 * r, r), &prof)?;
        println!("R={r}: σ timelike {timelike:+.6e}, spacelike {spacelike:+.1e}");
    }

    let p = fixtures::minkowski();
    let act = fixtures::minkowski_symmetry(&p);
    let f0 = build_invariant_0cochain(&p, &act)?;
    let conn = FieldConnection::from_0cochain(&p, &f0, &prof)?;
    let l = fixtures::site_loops(&p, 0, 0);
    let far = fixtures::site_loops(&p, 1, 0);
    let h = |letters: Vec<_>| conn.holonomy(&Word::new(letters));
    let (hp, htop, hfar) = (h(l.p)?, h(l.p_top)?, h(far.p)?);
    println!("holonomy of p: phase {:+.3e}, {} atoms", hp.phase, hp.func.len());
    println!("[p, p_top] phase {:+.6e}", weyl_commutator(&hp, &htop, &prof)?.phase);
    println!("[p, p at (1,0)] phase {:+.1e}", weyl_commutator(&hp, &hfar, &prof)?.phase);
    Ok(())
}
