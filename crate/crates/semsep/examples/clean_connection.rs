//! Clean d-connected paths: each collider carries its own directed route to a
//! conditioned descendant, with all routes disjoint from each other and from
//! the path. The partition built on top assigns every graph node a role.
//!
//! Run with: cargo run --example clean_connection

use std::collections::BTreeSet;

use semsep::dsep::find_clean_connection;
use semsep::graph::Graph;
use semsep::semantics::{Assignments, Value};
use semsep::witness::build_partition;

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

    let cc = find_clean_connection(&g, u, v, &z).unwrap().expect("d-connected");
    println!("clean d-connected path: {:?}", g.label_seq(cc.path.nodes()));
    for (c, route) in &cc.dmap {
        println!(
            "  collider {} reaches conditioned {} through {:?}",
            g.label(*c),
            g.label(route.terminal),
            g.label_seq(&route.interior)
        );
    }

    let az = Assignments::from_pairs(z.iter().map(|&n| (n, Value(0))));
    let part = build_partition(&g, &cc, &az).unwrap();
    println!("\nrole partition of every node:");
    println!("  sources       {:?}", g.label_seq(&part.sources));
    let show = |set: &BTreeSet<_>| g.label_seq(&set.iter().copied().collect::<Vec<_>>());
    println!("  transmitters  {:?}", show(&part.transmitters));
    println!("  colliders     {:?}", show(&part.colliders));
    println!("  descendants   {:?}", show(&part.descendants));
    println!("  conditioned   {:?}", show(&part.conditioned_rest));
    println!("  rest          {:?}", show(&part.rest));
}
