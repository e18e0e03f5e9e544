//! Assembles the net of loop groups over the two-tower poset and checks
//! isotony, causality and covariance.

use loopnet::fixtures;
use loopnet::net::{check_net, Net};
use loopnet::quotient::{EngineConfig, QuotientEngine};

fn main() {
    let p = fixtures::two_towers();
    let act = fixtures::two_towers_symmetry(&p);
    let net = Net::build(&p, 3, 50_000);
    for f in &net.fibres {
        println!("{:>4}: {:>4} generators (loop length ≤ {})", p.label(f.base), f.len(), f.cap);
    }
    let engine = QuotientEngine::new(&p, EngineConfig::default());
    let r = check_net(&net, &engine, &act);
    println!(
        "isotony {} ({} pairs), causality {} ({} certificates), covariance {} ({} entries)",
        r.isotony_holds(),
        r.isotony.len(),
        r.causality_holds(),
        r.causality.len(),
        r.covariance_holds(),
        r.covariance.len()
    );
}
