//! Path-frame systems and gauge transformations: the obstructed swap
//! poset, and two covariant frame systems on the two towers related by a
//! gauge under a matrix representation.

use loopnet::connection::frame::build_covariant_system_with;
use loopnet::connection::*;
use loopnet::fixtures;

fn main() -> loopnet::Result<()> {
    let (sp, sact) = fixtures::swap();
    match build_covariant_system(&sp, &sact, 6) {
        Err(e) => println!("swap poset: {e}"),
        Ok(_) => println!("swap poset: unexpectedly covariant"),
    }

    let p = fixtures::two_towers();
    let act = fixtures::two_towers_symmetry(&p);
    let rep = MatrixRepresentation::tensor(&p, &[p.id("O1")?, p.id("O2")?], Some(&act), 2, 7)?;
    let sys_p = build_covariant_system_with(&p, &act, 6, FrameOrder::Ascending)?;
    let sys_q = build_covariant_system_with(&p, &act, 6, FrameOrder::Descending)?;
    let up = build_connection_system(&p, &rep, &sys_p)?;
    let uq = build_connection_system(&p, &rep, &sys_q)?;
    let report = check_system(&p, &rep, &up, Some(&act), &SystemCheck::default())?;
    println!(
        "system over {} bases: causality {:.1e}, covariance {:.1e}",
        up.per_base.len(),
        report.max_causality_deviation(),
        report.max_covariance_deviation()
    );
    let bases: Vec<_> = sys_p.poles().collect();
    let g = frame_change_gauge(&rep, &sys_p, &sys_q, &bases)?;
    let ug = apply_gauge(&rep, &up, &g)?;
    let mut worst: f64 = 0.0;
    for (o, c) in &uq.per_base {
        for (b, v) in c.iter() {
            worst = worst.max(rep.deviation(ug.base(*o).unwrap().get(b).unwrap(), v)?);
        }
    }
    println!("gauged system vs second frame system: {worst:.1e}");
    Ok(())
}
