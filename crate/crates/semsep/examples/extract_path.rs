//! Recovering a d-connected path from a refuting witness: the change to v is
//! traced back through the conditioned nodes whose repairs licensed it.
//!
//! Run with: cargo run --example extract_path

use std::collections::BTreeSet;

use semsep::dsep::is_blocked;
use semsep::graph::Graph;
use semsep::semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};
use semsep::witness::{extract_d_connected_path, WitnessSequence};

fn main() {
    // Two confounders feeding one conditioned node:
    //   a0 → u, a0 → z, a1 → z, a1 → v, conditioning on z.
    let g = Graph::build(
        &["u", "v", "z", "a0", "a1"],
        &[("a0", "u"), ("a0", "z"), ("a1", "z"), ("a1", "v")],
    )
    .unwrap();
    let (u, v, z) = (
        g.require("u").unwrap(),
        g.require("v").unwrap(),
        g.require("z").unwrap(),
    );
    let mut f = GraphFunction::new();
    f.set(g.require("a0").unwrap(), NodeFunction::CopyUnobserved);
    f.set(g.require("a1").unwrap(), NodeFunction::CopyUnobserved);
    f.set(u, NodeFunction::CopyParent(0));
    f.set(v, NodeFunction::CopyParent(0));
    f.set(
        z,
        NodeFunction::tabulate(ValueDomain::boolean(), 2, |_, ps| Value(ps[0].0 ^ ps[1].0))
            .unwrap(),
    );
    let az = Assignments::from_pairs([(z, Value(0))]);

    // Flip a0 (disturbing z), then repair z by flipping a1 — which moves v.
    let all_zero = Assignments::uniform(&g, Value(0));
    let mut u1 = all_zero.clone();
    u1.bind(g.require("a0").unwrap(), Value(1));
    let mut u2 = u1.clone();
    u2.bind(g.require("a1").unwrap(), Value(1));
    let w = WitnessSequence {
        alpha: Value(0),
        beta: Value(1),
        sequence: vec![all_zero, u1, u2],
    };

    let path = extract_d_connected_path(&g, u, v, &az, &f, &w).unwrap();
    println!("witness: flip a0, then repair z by flipping a1");
    println!("recovered path: {:?}", g.label_seq(path.nodes()));
    println!(
        "d-connected given {{z}}: {}",
        !is_blocked(&path, &g, &BTreeSet::from([z])).unwrap()
    );
    println!("\nThe conditioned node z appears as a collider on the recovered path,");
    println!("exactly the structure that lets influence pass once z is held fixed.");
}
