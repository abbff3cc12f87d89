//! Constructing a refuting witness from a clean d-connected path: lock values
//! along the path, then flip the path's sources one at a time. The resulting
//! sequence passes every witness condition and moves v.
//!
//! Run with: cargo run --example construct_witness

use std::collections::BTreeSet;

use semsep::dsep::find_clean_connection;
use semsep::graph::Graph;
use semsep::semantics::{evaluate, Assignments, NodeFunction, Value};
use semsep::witness::{
    build_partition, build_path_functions, build_witness_sequence, check_witness,
};

fn main() {
    let g = Graph::build(
        &["u", "t", "q", "r", "v", "p", "s", "y", "x"],
        &[
            ("u", "t"),
            ("u", "p"),
            ("t", "p"),
            ("p", "s"),
            ("t", "q"),
            ("r", "q"),
            ("q", "y"),
            ("y", "x"),
            ("r", "x"),
            ("r", "v"),
        ],
    )
    .unwrap();
    let u = g.require("u").unwrap();
    let v = g.require("v").unwrap();
    let z: BTreeSet<_> = [g.require("s").unwrap(), g.require("x").unwrap()]
        .into_iter()
        .collect();
    let az = Assignments::from_pairs(z.iter().map(|&n| (n, Value(0))));

    let cc = find_clean_connection(&g, u, v, &z).unwrap().expect("d-connected");
    let part = build_partition(&g, &cc, &az).unwrap();
    let f = build_path_functions(&g, &part, &az, &NodeFunction::Constant(Value(0))).unwrap();
    let base = Assignments::uniform(&g, Value(0));
    let w = build_witness_sequence(&g, &part, Value(0), Value(1), &base).unwrap();

    println!(
        "witness over path {:?}, flipping sources {:?}:\n",
        g.label_seq(cc.path.nodes()),
        g.label_seq(&part.sources)
    );
    for (i, terms) in w.sequence.iter().enumerate() {
        let vals = evaluate(&g, &f, terms).unwrap();
        println!(
            "  U{i}: u={} v={} s={} x={}",
            vals.get(u).unwrap().0,
            vals.get(v).unwrap().0,
            vals.get(g.require("s").unwrap()).unwrap().0,
            vals.get(g.require("x").unwrap()).unwrap().0,
        );
    }

    let verdict = check_witness(&g, &f, u, v, &az, &w).unwrap();
    println!("\nvalid: {}, v changed: {}", verdict.valid, verdict.v_changed);
    println!("The flip of u disturbs the conditioned nodes; flipping r is the");
    println!("legal repair, and once conditioning is restored v has moved.");
}
