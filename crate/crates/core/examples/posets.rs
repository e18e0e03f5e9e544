//! Builds the fixture posets, validates their axioms and prints the
//! symmetry orbits of the Minkowski lattice.

use loopnet::causet::{orbit_and_stabilizer, validate_poset};
use loopnet::fixtures;
use loopnet::simplex::tangent_simplices;

fn main() {
    for (name, p) in [
        ("diamond", fixtures::diamond()),
        ("two towers", fixtures::two_towers()),
        ("minkowski", fixtures::minkowski()),
        ("circle12", fixtures::circle12()),
        ("causal set", fixtures::causal_set7()),
    ] {
        let report = validate_poset(&p);
        println!(
            "{name:>10}: {:>3} elements, {:>4} tangent simplices, valid {}, pathwise connected {}",
            p.len(),
            tangent_simplices(&p).len(),
            report.is_valid(),
            report.pathwise_connected
        );
    }
    let p = fixtures::minkowski();
    let act = fixtures::minkowski_symmetry(&p);
    for name in ["x[1,0]", "x[1,1]", "T"] {
        let (orbit, stab) = orbit_and_stabilizer(&act, p.id(name).unwrap());
        let labels: Vec<&str> = orbit.iter().map(|&o| p.label(o)).collect();
        println!("orbit of {name}: {labels:?}, stabilizer order {}", stab.len());
    }
}
