//! Acceptance suite: one test per exit criterion, each printing a pass line
//! with its scope and timing. The sweeps in criteria 3–5 run a deterministic
//! 10% sample by default; the `*_full` variants (ignored by default) cover
//! the whole space.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use semsep::dsep::{d_separated, find_clean_connection, CleanConnection};
use semsep::error::Error;
use semsep::falsify::{
    falsify_single_condition, falsify_unconditional, Outcome, SimulatedWorld,
};
use semsep::graph::{enumerate_dags, Graph, NodeId};
use semsep::search::{equivalence_report, violation_for_function};
use semsep::semantics::{
    evaluate, Assignments, GraphFunction, NodeFunction, Value,
};
use semsep::witness::{
    build_partition, build_path_functions, build_witness_sequence, check_witness,
    extract_d_connected_path,
};

const SAMPLE_SEED: u64 = 0x5E9A_5E9A;
const SAMPLE_RATE: f64 = 0.10;

/// Iterates every d-connected `(graph, u, v, Z)` case on DAGs up to
/// `max_nodes` together with its clean connection; when `sample` is set, a
/// seeded coin gates each case before any work is done.
fn forward_sweep(
    max_nodes: usize,
    sample: Option<(u64, f64)>,
    mut on_case: impl FnMut(&Graph, NodeId, NodeId, &BTreeSet<NodeId>, &CleanConnection),
) -> (u64, u64) {
    let mut rng = sample.map(|(seed, _)| ChaCha8Rng::seed_from_u64(seed));
    let mut combos = 0u64;
    let mut cases = 0u64;
    for n in 1..=max_nodes {
        for g in enumerate_dags(n) {
            for (u, v, z) in all_triples(&g) {
                combos += 1;
                if let (Some(rng), Some((_, rate))) = (rng.as_mut(), sample) {
                    if rng.random::<f64>() >= rate {
                        continue;
                    }
                }
                let cc = find_clean_connection(&g, u, v, &z).expect("search in budget");
                // Clean connections exist exactly when the pair is d-connected.
                assert_eq!(
                    cc.is_some(),
                    !d_separated(&g, u, v, &z).unwrap(),
                    "connection/search disagreement on {:?} u={u} v={v} z={z:?}",
                    g.edges()
                );
                if let Some(cc) = cc {
                    cases += 1;
                    on_case(&g, u, v, &z, &cc);
                }
            }
        }
    }
    (combos, cases)
}

#[test]
fn criterion_1_figure_regression() {
    let started = Instant::now();

    let g = caffeine();
    let (c, gpa) = (g.require("caffeine").unwrap(), g.require("GPA").unwrap());
    assert!(d_separated(&g, c, gpa, &set(&g, &["courseload"])).unwrap());
    assert!(!d_separated(&g, c, gpa, &BTreeSet::new()).unwrap());

    let g = chain();
    let (u, v) = (g.require("u").unwrap(), g.require("v").unwrap());
    assert!(!d_separated(&g, u, v, &BTreeSet::new()).unwrap());
    assert!(d_separated(&g, u, v, &set(&g, &["y"])).unwrap());

    let g = collider();
    let (u, v) = (g.require("u").unwrap(), g.require("v").unwrap());
    assert!(d_separated(&g, u, v, &BTreeSet::new()).unwrap());
    assert!(!d_separated(&g, u, v, &set(&g, &["w"])).unwrap());

    let g = double_conditioning();
    let (u, v) = (g.require("u").unwrap(), g.require("v").unwrap());
    assert!(d_separated(&g, u, v, &set(&g, &["z1", "z2"])).unwrap());

    let g = unblocked_ancestors_figure();
    let anc = g
        .unblocked_ancestors(g.require("u").unwrap(), &set(&g, &["t"]))
        .unwrap();
    assert_eq!(anc, set(&g, &["u", "s", "y", "x"]));

    let g = partition_figure();
    let (u, v) = (g.require("u").unwrap(), g.require("v").unwrap());
    let z = set(&g, &["s", "x"]);
    let cc = find_clean_connection(&g, u, v, &z).unwrap().unwrap();
    let az = assign(&g, &[("s", 0), ("x", 0)]);
    let part = build_partition(&g, &cc, &az).unwrap();
    assert_eq!(g.label_seq(&part.sources), ["u", "r"]);
    assert_eq!(part.transmitters, set(&g, &["t", "v"]));
    assert_eq!(part.colliders, set(&g, &["q"]));
    assert_eq!(part.descendants, set(&g, &["y", "x"]));
    assert_eq!(part.conditioned_rest, set(&g, &["s"]));
    assert_eq!(part.rest, set(&g, &["p"]));

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "figure regression must finish within 1 s, took {elapsed:?}"
    );
    println!("criterion 1 (figure regression): pass in {elapsed:?}");
}

#[test]
fn criterion_2_exhaustive_equivalence_three_nodes() {
    let started = Instant::now();
    let report = equivalence_report(3, bool_domain(), u64::MAX).unwrap();
    assert_eq!(report.graphs, 25, "there are 25 labeled DAGs on 3 nodes");
    assert_eq!(report.triples, 300);
    assert!(
        report.mismatches.is_empty(),
        "criterion and search disagree: {:?}",
        report.mismatches
    );
    assert!(
        report.budget_exhausted.is_empty(),
        "no triple may exhaust its budget: {:?}",
        report.budget_exhausted
    );
    println!(
        "criterion 2 (exhaustive equivalence, 3 nodes): pass — {} graphs, {} triples ({} connected, {} separated), 0 mismatches, 0 exhausted in {:?}",
        report.graphs,
        report.triples,
        report.connected,
        report.separated,
        started.elapsed()
    );
}

fn run_forward_construction(sample: Option<(u64, f64)>) -> (u64, u64, u64) {
    let mut witnesses = 0u64;
    let (combos, cases) = forward_sweep(5, sample, |g, u, v, z, cc| {
        for az in all_boolean_conditionings(z) {
            let part = build_partition(g, cc, &az).expect("partition from clean connection");
            let f = build_path_functions(g, &part, &az, &NodeFunction::Constant(Value(0)))
                .expect("path functions");
            let base = Assignments::uniform(g, Value(0));
            let w = build_witness_sequence(g, &part, Value(0), Value(1), &base)
                .expect("witness sequence");
            let verdict = check_witness(g, &f, u, v, &az, &w).expect("witness check");
            assert!(
                verdict.valid && verdict.v_changed,
                "constructed witness failed on {:?} u={u} v={v} z={z:?} az={az:?}: {verdict:?}",
                g.edges()
            );
            witnesses += 1;
        }
    });
    (combos, cases, witnesses)
}

#[test]
fn criterion_3_forward_construction_sampled() {
    let started = Instant::now();
    let (combos, cases, witnesses) =
        run_forward_construction(Some((SAMPLE_SEED, SAMPLE_RATE)));
    let elapsed = started.elapsed();
    assert!(witnesses > 10_000, "sample unexpectedly small: {witnesses}");
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "10% sample must finish within 2 minutes, took {elapsed:?}"
    );
    println!(
        "criterion 3 (forward construction ≤ 5 nodes, 10% sample): pass — {combos} combos drawn from, {cases} connected cases, {witnesses} witnesses all valid in {elapsed:?}"
    );
}

#[test]
#[ignore = "full sweep of every DAG on ≤ 5 nodes; run explicitly"]
fn criterion_3_forward_construction_full() {
    let started = Instant::now();
    let (combos, cases, witnesses) = run_forward_construction(None);
    println!(
        "criterion 3 (forward construction ≤ 5 nodes, full): pass — {combos} combos, {cases} connected cases, {witnesses} witnesses all valid in {:?}",
        started.elapsed()
    );
}

fn run_backward_extraction(sample: Option<(u64, f64)>) -> u64 {
    let mut extracted = 0u64;
    forward_sweep(5, sample, |g, u, v, z, cc| {
        for az in all_boolean_conditionings(z) {
            let part = build_partition(g, cc, &az).unwrap();
            let f =
                build_path_functions(g, &part, &az, &NodeFunction::Constant(Value(0))).unwrap();
            let base = Assignments::uniform(g, Value(0));
            let w = build_witness_sequence(g, &part, Value(0), Value(1), &base).unwrap();
            let path = extract_d_connected_path(g, u, v, &az, &f, &w)
                .expect("extraction from constructed witness");
            assert_d_connected_path(g, &path, u, v, z);
            extracted += 1;
        }
    });
    extracted
}

#[test]
fn criterion_4_backward_extraction() {
    let started = Instant::now();
    let constructed = run_backward_extraction(Some((SAMPLE_SEED, SAMPLE_RATE)));

    // Randomly searched witnesses over random DAGs on up to 5 nodes.
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0xBACC);
    let target = 10_000u64;
    let mut found = 0u64;
    let mut attempts = 0u64;
    while found < target {
        attempts += 1;
        assert!(
            attempts < 40 * target,
            "random witness search hit rate collapsed ({found}/{attempts})"
        );
        let n = rng.random_range(2..=5usize);
        let mut pairs = Vec::new();
        for s in 0..n as u32 {
            for t in 0..n as u32 {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        let edges: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|_| rng.random::<f64>() < 0.4)
            .collect();
        let g = Graph::from_indices(n, &edges).unwrap();
        if !g.is_acyclic() {
            continue;
        }
        let nodes: Vec<NodeId> = g.nodes().collect();
        let u = nodes[rng.random_range(0..n)];
        let v = nodes[rng.random_range(0..n)];
        if u == v {
            continue;
        }
        let z: BTreeSet<NodeId> = nodes
            .iter()
            .copied()
            .filter(|&w| w != u && w != v && rng.random::<f64>() < 0.3)
            .collect();
        let f = seeded_world(&g, rng.random());
        let Some(hit) =
            violation_for_function(&g, u, v, &z, bool_domain(), &f, 2_000_000).unwrap()
        else {
            continue;
        };
        let path = extract_d_connected_path(&g, u, v, &hit.conditioning, &f, &hit.sequence)
            .expect("extraction from searched witness");
        assert_d_connected_path(&g, &path, u, v, &z);
        found += 1;
    }

    println!(
        "criterion 4 (backward extraction): pass — {constructed} constructed witnesses (10% sample) and {found} randomly searched witnesses ({attempts} attempts) all extract d-connected paths in {:?}",
        started.elapsed()
    );
}

#[test]
#[ignore = "extraction over the full ≤ 5-node sweep; run explicitly"]
fn criterion_4_backward_extraction_full() {
    let started = Instant::now();
    let extracted = run_backward_extraction(None);
    println!(
        "criterion 4 (backward extraction, full): pass — {extracted} witnesses in {:?}",
        started.elapsed()
    );
}

#[test]
fn criterion_5_value_locking_properties() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x75);
    let mut cases = 0u64;
    let mut checks = 0u64;
    forward_sweep(5, Some((SAMPLE_SEED, SAMPLE_RATE)), |g, _, _, z, cc| {
        let az = all_boolean_conditionings(z).into_iter().next().unwrap();
        let part = build_partition(g, cc, &az).unwrap();
        let f =
            build_path_functions(g, &part, &az, &NodeFunction::Constant(Value(0))).unwrap();
        let noncolliders = part.noncollider_path_nodes();
        cases += 1;
        for _ in 0..100 {
            // Random source-fixed assignment: sources share a random alpha,
            // everything else is free.
            let alpha = Value(rng.random_range(0..2u8) as u8);
            let mut u = Assignments::from_pairs(
                g.nodes().map(|n| (n, Value(rng.random_range(0..2u8) as u8))),
            );
            for &s in &part.sources {
                u.bind(s, alpha);
            }
            let vals = evaluate(g, &f, &u).unwrap();
            for &w in &noncolliders {
                assert_eq!(
                    vals.get(w),
                    Some(alpha),
                    "noncollider path node {} must take the source value",
                    g.label(w)
                );
            }
            for (zn, want) in az.iter() {
                assert_eq!(
                    vals.get(zn),
                    Some(want),
                    "conditioned node {} must hold its assigned value",
                    g.label(zn)
                );
            }
            checks += 1;
        }
    });
    println!(
        "criterion 5 (value locking under source-fixed terms): pass — {cases} cases × 100 random assignments = {checks} checks in {:?}",
        started.elapsed()
    );
}

#[test]
fn criterion_6_graph_foundation_oracles() {
    let started = Instant::now();
    let mut graphs = 0u64;
    let mut path_queries = 0u64;

    let mut check_graph = |g: &Graph| {
        graphs += 1;
        // Topological sort is absent exactly on cyclic graphs, and any
        // returned order satisfies edge precedence.
        match g.topological_sort() {
            Some(order) => {
                assert!(g.is_acyclic());
                assert!(is_valid_topological_order(g, &order));
            }
            None => assert!(!g.is_acyclic()),
        }
        // Path enumeration matches the brute-force DFS oracle as a set, is
        // duplicate-free, and every path satisfies its invariants.
        let nodes: Vec<NodeId> = g.nodes().collect();
        for &u in &nodes {
            for &v in &nodes {
                if u == v {
                    continue;
                }
                path_queries += 1;
                let ours = g.enumerate_paths(u, v).unwrap();
                let mut as_lists: Vec<Vec<NodeId>> =
                    ours.iter().map(|p| p.nodes().to_vec()).collect();
                let distinct: BTreeSet<Vec<NodeId>> = as_lists.iter().cloned().collect();
                assert_eq!(distinct.len(), as_lists.len(), "duplicate path emitted");
                as_lists.sort();
                let oracle = dfs_paths(g, u, v);
                assert_eq!(
                    distinct, oracle,
                    "path sets differ on {:?} u={u} v={v}",
                    g.edges()
                );
                for p in &ours {
                    p.validate_in(g).unwrap();
                    assert_eq!(p.start(), u);
                    assert_eq!(p.end(), v);
                }
            }
        }
    };

    for n in 1..=4 {
        for g in all_digraphs(n) {
            check_graph(&g);
        }
    }
    for seed in 0..150u64 {
        check_graph(&seeded_digraph(5, seed, 80));
        check_graph(&seeded_digraph(6, seed, 60));
    }

    println!(
        "criterion 6 (graph foundation oracles): pass — {graphs} graphs (all digraphs ≤ 4 nodes + 300 seeded 5/6-node), {path_queries} path queries in {:?}",
        started.elapsed()
    );
}

/// Soundness half: a world compatible with the hypothesis is never falsified.
#[test]
fn criterion_7_oracle_soundness() {
    let started = Instant::now();
    let mut runs = 0u64;

    let mut sound_runs = |g: &Graph, f: &GraphFunction, initial: &Assignments| {
        let world = SimulatedWorld::new(g.clone(), f.clone(), initial.clone()).unwrap();
        let nodes: Vec<NodeId> = g.nodes().collect();
        for &u in &nodes {
            for &v in &nodes {
                if u == v {
                    continue;
                }
                if d_separated(g, u, v, &BTreeSet::new()).unwrap() {
                    for delta in legal_interventions(&g.ancestors(u).unwrap()) {
                        let verdict =
                            falsify_unconditional(&mut world.clone(), g, u, v, &delta)
                                .unwrap();
                        assert_eq!(
                            verdict.outcome,
                            Outcome::Consistent,
                            "compatible world falsified: {:?} u={u} v={v} delta={delta:?}",
                            g.edges()
                        );
                        runs += 1;
                    }
                }
                for &z in &nodes {
                    if z == u || z == v {
                        continue;
                    }
                    if !d_separated(g, u, v, &BTreeSet::from([z])).unwrap() {
                        continue;
                    }
                    let catalysts =
                        legal_interventions(&g.unblocked_ancestors(u, &BTreeSet::from([z])).unwrap());
                    let repairs = legal_interventions(&g.ancestors(z).unwrap());
                    for catalyst in &catalysts {
                        let mut options: Vec<Option<&Assignments>> = vec![None];
                        options.extend(repairs.iter().map(Some));
                        for repair in options {
                            runs += 1;
                            match falsify_single_condition(
                                &mut world.clone(),
                                g,
                                u,
                                v,
                                z,
                                catalyst,
                                repair,
                            ) {
                                Ok(verdict) => assert_eq!(
                                    verdict.outcome,
                                    Outcome::Consistent,
                                    "compatible world falsified: {:?} u={u} v={v} z={z} catalyst={catalyst:?} repair={repair:?}",
                                    g.edges()
                                ),
                                Err(Error::InconclusiveRun(_)) => {}
                                Err(e) => panic!("unexpected oracle error: {e}"),
                            }
                        }
                    }
                }
            }
        }
    };

    // Exhaustive over every boolean world and initial assignment at ≤ 3 nodes.
    for n in 2..=3 {
        for g in enumerate_dags(n) {
            let qualifying = all_triples(&g)
                .into_iter()
                .any(|(u, v, z)| z.len() <= 1 && d_separated(&g, u, v, &z).unwrap());
            if !qualifying {
                continue;
            }
            for f in WorldOdometer::new(&g) {
                for initial in all_boolean_assignments(&g) {
                    sound_runs(&g, &f, &initial);
                }
            }
        }
    }
    // Exhaustive over graphs and interventions at 4 nodes, with worlds and
    // initial terms sampled: the full world space there is ~2^30 per dense
    // graph, far beyond enumeration.
    for g in enumerate_dags(4) {
        for seed in 0..6u64 {
            let f = seeded_world(&g, seed);
            for initial in [
                Assignments::uniform(&g, Value(0)),
                Assignments::uniform(&g, Value(1)),
            ] {
                sound_runs(&g, &f, &initial);
            }
        }
    }

    println!(
        "criterion 7 soundness: pass — {runs} legal runs against compatible worlds, zero falsifications in {:?}",
        started.elapsed()
    );
}

/// Detection half: on every hypothesis/truth pair distinguished by the graph
/// criterion somewhere, some legal run must return Falsified. This does not
/// hold for the intervention-only protocols (see the counterexample in the
/// failure message), so this test documents the gap honestly rather than
/// weakening the sweep.
#[test]
fn criterion_7_oracle_detection() {
    let started = Instant::now();
    let mut qualifying_pairs = 0u64;
    let mut detected_pairs = 0u64;
    let mut undetected: Vec<String> = Vec::new();
    let mut qualifying_combos = 0u64;
    let mut detected_combos = 0u64;

    for n in 2..=4 {
        let graphs = enumerate_dags(n);
        // Per graph: separation verdicts and unblocked-ancestor sets for every
        // combo with |Z| ≤ 1.
        struct Facts {
            sep: std::collections::HashMap<(u32, u32, u32), bool>,
            ubanc: std::collections::HashMap<(u32, u32), BTreeSet<NodeId>>,
        }
        let facts: Vec<Facts> = graphs
            .iter()
            .map(|g| {
                let mut sep = std::collections::HashMap::new();
                let mut ubanc = std::collections::HashMap::new();
                let nodes: Vec<NodeId> = g.nodes().collect();
                let zopts: Vec<(u32, BTreeSet<NodeId>)> =
                    std::iter::once((u32::MAX, BTreeSet::new()))
                        .chain(nodes.iter().map(|&z| (z.0, BTreeSet::from([z]))))
                        .collect();
                for &w in &nodes {
                    for (zid, zset) in &zopts {
                        ubanc.insert((w.0, *zid), g.unblocked_ancestors(w, zset).unwrap());
                    }
                }
                for &u in &nodes {
                    for &v in &nodes {
                        if u == v {
                            continue;
                        }
                        for (zid, zset) in &zopts {
                            if zset.contains(&u) || zset.contains(&v) {
                                continue;
                            }
                            sep.insert(
                                (u.0, v.0, *zid),
                                d_separated(g, u, v, zset).unwrap(),
                            );
                        }
                    }
                }
                Facts { sep, ubanc }
            })
            .collect();

        // Copy-chain world in the true graph: `a`'s term flows along a
        // conditioning-avoiding directed path to `v`; everything else is
        // constant, so conditioned nodes never move.
        let chain_world = |gt: &Graph, a: NodeId, v: NodeId, z: &BTreeSet<NodeId>| {
            let chain = gt
                .directed_unblocked_path(a, v, z)
                .unwrap()
                .or_else(|| if a == v { Some(vec![a]) } else { None })?;
            let mut f = GraphFunction::new();
            for node in gt.nodes() {
                f.set(node, NodeFunction::Constant(Value(0)));
            }
            f.set(a, NodeFunction::CopyUnobserved);
            for pair in chain.windows(2) {
                let idx = gt
                    .parents(pair[1])
                    .unwrap()
                    .iter()
                    .position(|&p| p == pair[0])
                    .unwrap();
                f.set(pair[1], NodeFunction::CopyParent(idx));
            }
            Some(f)
        };

        for (hi, gh) in graphs.iter().enumerate() {
            for (ti, gt) in graphs.iter().enumerate() {
                if hi == ti {
                    continue;
                }
                let nodes: Vec<NodeId> = gh.nodes().collect();
                let mut combos: Vec<(NodeId, NodeId, u32)> = Vec::new();
                for &u in &nodes {
                    for &v in &nodes {
                        if u == v {
                            continue;
                        }
                        for zid in std::iter::once(u32::MAX)
                            .chain(nodes.iter().map(|z| z.0))
                        {
                            if zid == u.0 || zid == v.0 {
                                continue;
                            }
                            let sep_h = facts[hi].sep.get(&(u.0, v.0, zid));
                            let con_t = facts[ti].sep.get(&(u.0, v.0, zid));
                            if sep_h == Some(&true) && con_t == Some(&false) {
                                combos.push((u, v, zid));
                            }
                        }
                    }
                }
                if combos.is_empty() {
                    continue;
                }
                qualifying_pairs += 1;
                qualifying_combos += combos.len() as u64;
                let mut pair_detected = false;

                for &(u, v, zid) in &combos {
                    let zset: BTreeSet<NodeId> = if zid == u32::MAX {
                        BTreeSet::new()
                    } else {
                        BTreeSet::from([NodeId(zid)])
                    };
                    let mut combo_detected = false;

                    // A change confined to u's hypothesis-side unblocked
                    // ancestors that reaches v in the true graph without
                    // touching the conditioned node.
                    let shared: Vec<NodeId> = facts[hi].ubanc[&(u.0, zid)]
                        .intersection(&facts[ti].ubanc[&(v.0, zid)])
                        .copied()
                        .collect();
                    for a in shared {
                        let Some(f) = chain_world(gt, a, v, &zset) else {
                            continue;
                        };
                        let initial = Assignments::uniform(gt, Value(0));
                        let mut world =
                            SimulatedWorld::new(gt.clone(), f, initial).unwrap();
                        let delta = Assignments::from_pairs([(a, Value(1))]);
                        let verdict = if zid == u32::MAX {
                            falsify_unconditional(&mut world, gh, u, v, &delta)
                        } else {
                            falsify_single_condition(
                                &mut world,
                                gh,
                                u,
                                v,
                                NodeId(zid),
                                &delta,
                                None,
                            )
                        };
                        if matches!(
                            verdict,
                            Ok(ref w) if w.outcome == Outcome::Falsified
                        ) {
                            combo_detected = true;
                            break;
                        }
                    }

                    // Otherwise drive the oracle with the constructed witness:
                    // the first flip is the catalyst, the remaining flips are
                    // the single repair.
                    if !combo_detected {
                        'witness: for az in all_boolean_conditionings(&zset) {
                            let Some(cc) = find_clean_connection(gt, u, v, &zset).unwrap()
                            else {
                                break;
                            };
                            let part = build_partition(gt, &cc, &az).unwrap();
                            let f = build_path_functions(
                                gt,
                                &part,
                                &az,
                                &NodeFunction::Constant(Value(0)),
                            )
                            .unwrap();
                            let base = Assignments::uniform(gt, Value(0));
                            let w =
                                build_witness_sequence(gt, &part, Value(0), Value(1), &base)
                                    .unwrap();
                            let steps = &w.sequence;
                            let catalyst_nodes = steps[0].differing_nodes(&steps[1]);
                            let catalyst = Assignments::from_pairs(
                                catalyst_nodes.iter().map(|&n| (n, Value(1))),
                            );
                            let repair_nodes =
                                steps[1].differing_nodes(steps.last().unwrap());
                            let repair = Assignments::from_pairs(
                                repair_nodes.iter().map(|&n| (n, Value(1))),
                            );
                            let initial = steps[0].clone();
                            let mut world = SimulatedWorld::new(
                                gt.clone(),
                                f.clone(),
                                initial,
                            )
                            .unwrap();
                            let verdict = if zid == u32::MAX {
                                let mut all = catalyst.clone();
                                for (n, val) in repair.iter() {
                                    all.bind(n, val);
                                }
                                falsify_unconditional(&mut world, gh, u, v, &all)
                            } else {
                                falsify_single_condition(
                                    &mut world,
                                    gh,
                                    u,
                                    v,
                                    NodeId(zid),
                                    &catalyst,
                                    if repair.is_empty() {
                                        None
                                    } else {
                                        Some(&repair)
                                    },
                                )
                            };
                            if matches!(
                                verdict,
                                Ok(ref w) if w.outcome == Outcome::Falsified
                            ) {
                                combo_detected = true;
                                break 'witness;
                            }
                        }
                    }

                    if combo_detected {
                        detected_combos += 1;
                        pair_detected = true;
                    }
                }

                if pair_detected {
                    detected_pairs += 1;
                } else if undetected.len() < 8 {
                    undetected.push(format!(
                        "hypothesis={:?} truth={:?} combos={:?}",
                        gh.edges()
                            .iter()
                            .map(|&(s, t)| (s.0, t.0))
                            .collect::<Vec<_>>(),
                        gt.edges()
                            .iter()
                            .map(|&(s, t)| (s.0, t.0))
                            .collect::<Vec<_>>(),
                        combos
                            .iter()
                            .map(|&(u, v, z)| (u.0, v.0, z))
                            .collect::<Vec<_>>()
                    ));
                }
            }
        }
    }

    println!(
        "criterion 7 detection: {qualifying_pairs} qualifying pairs ({qualifying_combos} combos), {detected_pairs} pairs detected ({detected_combos} combos) in {:?}",
        started.elapsed()
    );
    assert_eq!(
        qualifying_pairs,
        detected_pairs,
        "every criterion-distinguished pair must admit a falsifying legal run; \
         {} pairs admit none. The oracles only see interventions, so a pair \
         like hypothesis u→w←v vs truth u←w→v is distinguished by the \
         criterion at (u,v,∅) yet no intervention legal for the hypothesis \
         (confined to u's ancestors, i.e. {{u}}) can move anything in the \
         true fork world. First undetected pairs: {:#?}",
        qualifying_pairs - detected_pairs,
        undetected
    );
}

#[test]
fn criterion_8_cli_contract() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_semsep");
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs");
        (
            out.status.code().unwrap_or(-1),
            String::from_utf8_lossy(&out.stdout).trim_end().to_string(),
        )
    };
    let graph_arg = |name: &str| fixtures.join(name).to_string_lossy().to_string();

    let caffeine = graph_arg("caffeine.json");
    let (code, out) = run(&[
        "check", "--graph", &caffeine, "--u", "caffeine", "--v", "GPA", "--cond",
        "courseload",
    ]);
    assert_eq!((code, out.as_str()), (0, r#"{"result":"d-separated"}"#));

    let (code, out) = run(&["check", "--graph", &caffeine, "--u", "caffeine", "--v", "GPA"]);
    assert_eq!(
        (code, out.as_str()),
        (
            0,
            r#"{"path":["caffeine","courseload","GPA"],"result":"d-connected"}"#
        )
    );

    let fig = graph_arg("fig_partition.json");
    let (code, out) = run(&["paths", "--graph", &fig, "--u", "u", "--v", "v"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        r#"{"paths":[["u","t","q","r","v"],["u","p","t","q","r","v"],["u","t","q","y","x","r","v"],["u","p","t","q","y","x","r","v"]]}"#
    );

    let (code, out) = run(&[
        "clean-path", "--graph", &fig, "--u", "u", "--v", "v", "--cond", "s,x",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        r#"{"descendants":{"q":{"interior":["y"],"terminal":"x"}},"path":["u","t","q","r","v"],"result":"d-connected"}"#
    );

    // Witness bundle feeds back into check-witness.
    let (code, bundle) = run(&[
        "witness", "--graph", &fig, "--u", "u", "--v", "v", "--az", "s=0,x=0",
    ]);
    assert_eq!(code, 0);
    let tmp = std::env::temp_dir().join("semsep_acceptance_bundle.json");
    std::fs::write(&tmp, &bundle).unwrap();
    let (code, out) = run(&[
        "check-witness",
        "--graph",
        &fig,
        "--witness",
        &tmp.to_string_lossy(),
        "--u",
        "u",
        "--v",
        "v",
    ]);
    assert_eq!((code, out.as_str()), (0, r#"{"v_changed":true,"valid":true}"#));

    let (code, out) = run(&["verify-equivalence", "--max-nodes", "2"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        r#"{"budget_exhausted":0,"connected":4,"graphs":3,"max_nodes":2,"mismatches":0,"separated":2,"triples":6}"#
    );

    // Falsification exit codes: 2 for falsified, 0 for consistent.
    let world_hidden = graph_arg("world_hidden_effect.json");
    let world_ok = graph_arg("world_compatible.json");
    let u0 = graph_arg("initial_terms.json");
    let catalyst = graph_arg("catalyst_caffeine.json");
    let repair = graph_arg("repair_courseload.json");
    let falsify_args = |world: &str| {
        vec![
            "falsify".to_string(),
            "--world".into(),
            world.to_string(),
            "--init-u".into(),
            u0.clone(),
            "--graph".into(),
            caffeine.clone(),
            "--u".into(),
            "caffeine".into(),
            "--v".into(),
            "GPA".into(),
            "--z".into(),
            "courseload".into(),
            "--catalyst".into(),
            catalyst.clone(),
            "--repair".into(),
            repair.clone(),
        ]
    };
    let out = std::process::Command::new(bin)
        .args(falsify_args(&world_hidden))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains(r#""verdict":"falsified""#));

    let out = std::process::Command::new(bin)
        .args(falsify_args(&world_ok))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(r#""verdict":"consistent""#));

    // Usage and file-format exit codes.
    let (code, _) = run(&["no-such-command"]);
    assert_eq!(code, 64);
    let (code, _) = run(&["check", "--graph", "/nonexistent.json", "--u", "a", "--v", "b"]);
    assert_eq!(code, 65);

    // Round trip: parsing and re-serializing every graph fixture is identity.
    for name in [
        "caffeine.json",
        "chain.json",
        "collider.json",
        "double_conditioning.json",
        "fig_unblocked.json",
        "fig_partition.json",
    ] {
        let raw = std::fs::read_to_string(fixtures.join(name)).unwrap();
        let g = semsep::json::GraphDoc::parse(raw.as_bytes()).unwrap();
        let doc = semsep::json::GraphDoc::from_graph(&g);
        assert_eq!(
            semsep::json::to_json_string(&doc),
            raw.trim_end(),
            "round trip altered {name}"
        );
    }

    println!(
        "criterion 8 (CLI contract): pass — golden outputs, exit codes, and round trips in {:?}",
        started.elapsed()
    );
}
