//! Enumerating undirected paths and classifying interior nodes.
//!
//! Run with: cargo run --example enumerate_and_classify

use semsep::graph::Graph;
use semsep::roles::{classify_interior, dir_after, is_directed_path};

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

    println!("all acyclic undirected paths from u to v, in canonical order:\n");
    for p in g.enumerate_paths(u, v).unwrap() {
        let roles = classify_interior(&p, &g).unwrap();
        let annotated: Vec<String> = p
            .nodes()
            .iter()
            .map(|&n| match roles.get(&n) {
                Some(role) => format!("{} ({:?})", g.label(n), role),
                None => g.label(n).to_string(),
            })
            .collect();
        println!(
            "  {}  directed={}",
            annotated.join(" — "),
            is_directed_path(&p, &g).unwrap()
        );
        for &n in p.nodes() {
            if let Some(dir) = dir_after(&p, &g, n).unwrap() {
                print!("    after {}: {:?}  ", g.label(n), dir);
            }
        }
        println!("\n");
    }
}
