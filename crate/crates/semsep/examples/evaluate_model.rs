//! Evaluating a causal model: node functions over unobserved terms and
//! parents, visited in topological order.
//!
//! Run with: cargo run --example evaluate_model

use semsep::graph::Graph;
use semsep::semantics::{
    evaluate, properly_conditions, Assignments, GraphFunction, NodeFunction, Value, ValueDomain,
};

fn main() {
    // Sleep improves focus; the test score mixes focus and study time with
    // weights 6/10 and 4/10, over the integer domain {0, 1, 2, 3}.
    let g = Graph::build(
        &["sleep", "study", "focus", "score"],
        &[("sleep", "focus"), ("focus", "score"), ("study", "score")],
    )
    .unwrap();
    let dom = ValueDomain::new(4).unwrap();
    let mut f = GraphFunction::new();
    f.set(g.require("sleep").unwrap(), NodeFunction::CopyUnobserved);
    f.set(g.require("study").unwrap(), NodeFunction::CopyUnobserved);
    f.set(
        g.require("focus").unwrap(),
        NodeFunction::tabulate(dom, 1, |noise, ps| Value((ps[0].0 + noise.0).min(3))).unwrap(),
    );
    // Canonical parent order for score is ascending node id: study, focus.
    f.set(
        g.require("score").unwrap(),
        NodeFunction::tabulate(dom, 2, |noise, ps| {
            let (study, focus) = (ps[0].0 as u32, ps[1].0 as u32);
            Value((((6 * focus + 4 * study) / 10) as u8 + noise.0).min(3))
        })
        .unwrap(),
    );

    let u = Assignments::from_pairs([
        (g.require("sleep").unwrap(), Value(1)),
        (g.require("study").unwrap(), Value(1)),
        (g.require("focus").unwrap(), Value(0)),
        (g.require("score").unwrap(), Value(0)),
    ]);
    let vals = evaluate(&g, &f, &u).unwrap();
    println!("test-score model with sleep=1, study=1 and zero noise:");
    for n in g.nodes() {
        println!("  {:>6} = {}", g.label(n), vals.get(n).unwrap().0);
    }

    // A boolean collider: w is the exclusive-or of its two parents.
    let g = Graph::build(&["u", "w", "v"], &[("u", "w"), ("v", "w")]).unwrap();
    let mut f = GraphFunction::new();
    f.set(g.require("u").unwrap(), NodeFunction::CopyUnobserved);
    f.set(g.require("v").unwrap(), NodeFunction::CopyUnobserved);
    f.set(
        g.require("w").unwrap(),
        NodeFunction::tabulate(ValueDomain::boolean(), 2, |_, ps| Value(ps[0].0 ^ ps[1].0))
            .unwrap(),
    );
    let u = Assignments::from_pairs([
        (g.require("u").unwrap(), Value(0)),
        (g.require("v").unwrap(), Value(1)),
        (g.require("w").unwrap(), Value(0)),
    ]);
    let az = Assignments::from_pairs([(g.require("w").unwrap(), Value(1))]);
    println!("\nxor collider with terms u=0, v=1:");
    let vals = evaluate(&g, &f, &u).unwrap();
    for n in g.nodes() {
        println!("  {} = {}", g.label(n), vals.get(n).unwrap().0);
    }
    println!(
        "properly conditions on w=1: {}",
        properly_conditions(&g, &f, &u, &az).unwrap()
    );
}
