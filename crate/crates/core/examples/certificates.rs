//! Non-triviality and non-flatness certificates of the field connection on
//! the Minkowski lattice.

use loopnet::cochain::build_invariant_0cochain;
use loopnet::fixtures;
use loopnet::simplex::Simplex1;
use loopnet::weyl::{certify_nonflat, certify_nontrivial, FieldConnection, HyperboloidProfile, QuadratureConfig};

fn main() -> loopnet::Result<()> {
    let p = fixtures::minkowski();
    let act = fixtures::minkowski_symmetry(&p);
    let f0 = build_invariant_0cochain(&p, &act)?;
    let prof = HyperboloidProfile::new(QuadratureConfig::default())?;
    let (x, y, a) = (fixtures::site(&p, "x", 0, 0), fixtures::site(&p, "y", 0, 0), fixtures::site(&p, "a", 0, 0));
    let cert = certify_nontrivial(&p, &f0, Simplex1::new(a, y, x), &prof)?;
    println!(
        "nontrivial: direct {:.6e}, factorized {:.6e}, rel err {:.1e}, shift {:?}",
        cert.direct, cert.factorized, cert.rel_err, cert.shift
    );
    let control = certify_nontrivial(&p, &f0, Simplex1::new(a, x, x), &prof)?;
    println!("control with zero shift: {:.1e}", control.direct);

    let conn = FieldConnection::from_0cochain(&p, &f0, &prof)?;
    let w = certify_nonflat(&conn, 10_000)?;
    println!(
        "nonflat: support {}, mismatch {:.4e}, phase {:+.3e}, {} 2-simplices examined",
        p.label(w.simplex.support),
        w.mismatch,
        w.phase,
        w.examined
    );
    Ok(())
}
