//! Experiment oracles: falsifying a hypothesized DAG against a world it does
//! not model, and staying consistent against one it does.
//!
//! Run with: cargo run --example falsify_hypothesis

use semsep::falsify::{falsify_single_condition, Action, Outcome, SimulatedWorld};
use semsep::graph::Graph;
use semsep::semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};

fn main() {
    // Hypothesis: caffeine and GPA are linked only through courseload.
    let hypothesis = Graph::build(
        &["caffeine", "courseload", "GPA"],
        &[("courseload", "caffeine"), ("courseload", "GPA")],
    )
    .unwrap();
    let caffeine = hypothesis.require("caffeine").unwrap();
    let gpa = hypothesis.require("GPA").unwrap();
    let courseload = hypothesis.require("courseload").unwrap();

    // Reality hides a direct caffeine → GPA effect.
    let truth = Graph::build(
        &["caffeine", "courseload", "GPA"],
        &[
            ("courseload", "caffeine"),
            ("courseload", "GPA"),
            ("caffeine", "GPA"),
        ],
    )
    .unwrap();
    let bool2 = ValueDomain::boolean();
    let mut f = GraphFunction::new();
    f.set(courseload, NodeFunction::CopyUnobserved);
    f.set(
        caffeine,
        NodeFunction::tabulate(bool2, 1, |e, ps| Value(e.0 ^ ps[0].0)).unwrap(),
    );
    f.set(
        gpa,
        NodeFunction::tabulate(bool2, 2, |_, ps| Value(ps[0].0 ^ ps[1].0)).unwrap(),
    );
    let initial = Assignments::uniform(&truth, Value(0));
    let mut world = SimulatedWorld::new(truth, f, initial).unwrap();

    // Protocol: intervene on caffeine within its unblocked ancestors; repair
    // courseload if the intervention disturbed it; compare GPA.
    let catalyst = Assignments::from_pairs([(caffeine, Value(1))]);
    let repair = Assignments::from_pairs([(courseload, Value(0))]);
    let verdict = falsify_single_condition(
        &mut world,
        &hypothesis,
        caffeine,
        gpa,
        courseload,
        &catalyst,
        Some(&repair),
    )
    .unwrap();
    println!("hidden-effect world: {:?}", verdict.outcome);
    for entry in &verdict.trace {
        match &entry.action {
            Action::Measure => {
                let seen: Vec<String> = entry
                    .observed
                    .iter()
                    .map(|(n, v)| format!("{}={}", hypothesis.label(n), v.0))
                    .collect();
                println!("  measure   {}", seen.join(" "));
            }
            Action::Intervene(declared) => {
                let names: Vec<_> = declared.iter().map(|&n| hypothesis.label(n)).collect();
                println!("  intervene {names:?}");
            }
        }
    }
    assert_eq!(verdict.outcome, Outcome::Falsified);

    // The same protocol against a world the hypothesis does model.
    let mut f = GraphFunction::new();
    f.set(courseload, NodeFunction::CopyUnobserved);
    f.set(
        caffeine,
        NodeFunction::tabulate(bool2, 1, |e, ps| Value(e.0 ^ ps[0].0)).unwrap(),
    );
    f.set(gpa, NodeFunction::CopyParent(0));
    let mut world = SimulatedWorld::new(
        hypothesis.clone(),
        f,
        Assignments::uniform(&hypothesis, Value(0)),
    )
    .unwrap();
    let verdict = falsify_single_condition(
        &mut world,
        &hypothesis,
        caffeine,
        gpa,
        courseload,
        &catalyst,
        Some(&repair),
    )
    .unwrap();
    println!("\ncompatible world:    {:?}", verdict.outcome);
    println!("\nA run that moves GPA while courseload stays put falsifies the");
    println!("hypothesis; a compatible world can never produce such a run.");
}
