//! Deciding d-separation on a small observational model.
//!
//! Run with: cargo run --example check_separation

use std::collections::BTreeSet;

use semsep::dsep::{d_separated, find_d_connected_path};
use semsep::graph::Graph;

fn main() {
    // Heavy courseload drives both caffeine intake and GPA; caffeine has no
    // arrow into GPA of its own.
    let g = Graph::build(
        &["caffeine", "courseload", "GPA"],
        &[("courseload", "caffeine"), ("courseload", "GPA")],
    )
    .unwrap();
    let caffeine = g.require("caffeine").unwrap();
    let gpa = g.require("GPA").unwrap();
    let courseload = g.require("courseload").unwrap();

    println!("model: courseload → caffeine, courseload → GPA\n");

    let unconditioned = BTreeSet::new();
    println!(
        "d-separated(caffeine, GPA | ∅)            = {}",
        d_separated(&g, caffeine, gpa, &unconditioned).unwrap()
    );
    if let Some(p) = find_d_connected_path(&g, caffeine, gpa, &unconditioned).unwrap() {
        println!(
            "  connected through the confounder:      {:?}",
            g.label_seq(p.nodes())
        );
    }

    let conditioned = BTreeSet::from([courseload]);
    println!(
        "d-separated(caffeine, GPA | courseload)  = {}",
        d_separated(&g, caffeine, gpa, &conditioned).unwrap()
    );
    println!("\nHolding courseload fixed blocks the only path, so any experiment");
    println!("that controls for it should see caffeine and GPA move independently.");
}
