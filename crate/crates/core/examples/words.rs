//! Word reduction, loop-group membership and the three-valued equality
//! engine on the two-tower poset.

use loopnet::fixtures;
use loopnet::loopgrp::{format_word, in_loop_group, inverse, multiply, parse_word, reduce, Word};
use loopnet::quotient::{EngineConfig, QuotientEngine, Verdict};

fn main() {
    let p = fixtures::two_towers();
    let l = fixtures::two_tower_loops(&p);
    let (pw, qw, pp) = (Word::new(l.p), Word::new(l.q), Word::new(l.p_prime));
    let padded = multiply(&multiply(&pw, &pp), &inverse(&pp));
    println!("word     {}", format_word(&p, &padded));
    println!("reduced  {}", format_word(&p, &reduce(&padded)));
    println!("blocks   {:?}", in_loop_group(&multiply(&pw, &qw)));
    let parsed = parse_word(&p, &format_word(&p, &pw)).unwrap();
    assert_eq!(parsed, pw);

    let engine = QuotientEngine::new(&p, EngineConfig::default());
    for (name, a, b) in [
        ("pq = qp", multiply(&pw, &qw), multiply(&qw, &pw)),
        ("pp' = p'p", multiply(&pw, &pp), multiply(&pp, &pw)),
        ("p = q", pw.clone(), qw.clone()),
    ] {
        let verdict = match engine.equal(&a, &b) {
            Verdict::Equal(cert) => format!("equal, {} rewrite steps", cert.steps.len()),
            Verdict::Unequal(sep) => format!("unequal: {}", sep.detail),
            Verdict::Unknown { explored } => format!("unknown after {explored} words"),
        };
        println!("{name:>10}: {verdict}");
    }
}
