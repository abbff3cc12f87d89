//! Deciding semantic separation by brute force: enumerate every compatible
//! boolean world and every legal perturb-and-repair sequence.
//!
//! Run with: cargo run --release --example search_separation

use std::collections::BTreeSet;

use semsep::graph::Graph;
use semsep::search::semantic_separation_search;
use semsep::semantics::ValueDomain;

fn main() {
    let g = Graph::build(
        &["x", "u", "y", "v"],
        &[("x", "u"), ("u", "y"), ("y", "v")],
    )
    .unwrap();
    let u = g.require("u").unwrap();
    let v = g.require("v").unwrap();
    let y = g.require("y").unwrap();

    println!("chain x → u → y → v\n");

    let out =
        semantic_separation_search(&g, u, v, &BTreeSet::new(), ValueDomain::boolean(), u64::MAX)
            .unwrap();
    println!("separated(u, v | ∅)   = {}", out.separated);
    if let Some(w) = out.witness {
        println!("  refuted by a witness of {} step(s):", w.sequence.steps());
        for (i, terms) in w.sequence.sequence.iter().enumerate() {
            let rendered: Vec<String> = terms
                .iter()
                .map(|(n, val)| format!("{}={}", g.label(n), val.0))
                .collect();
            println!("    U{i}: {}", rendered.join(" "));
        }
    }

    let out = semantic_separation_search(
        &g,
        u,
        v,
        &BTreeSet::from([y]),
        ValueDomain::boolean(),
        u64::MAX,
    )
    .unwrap();
    println!("separated(u, v | y)   = {}", out.separated);
    println!("\nWith y held fixed, no compatible world and legal sequence can move v:");
    println!("the search exhausted every one of them.");
}
