//! Command-line surface. Machine-readable JSON goes to stdout, human
//! diagnostics to stderr.
//!
//! Exit codes: 0 success (or a consistent falsification run), 2 falsified,
//! 3 inconclusive run, 64 usage error, 65 unreadable or malformed input file,
//! 1 any other analysis error.

use std::collections::BTreeSet;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use crate::dsep;
use crate::error::{Error, Result};
use crate::falsify::{self, Action, FalsificationVerdict, Outcome, SimulatedWorld};
use crate::graph::{Graph, NodeId};
use crate::json::{
    assignments_from_map, assignments_to_map, parse_json, BundleDoc, GraphDoc, WitnessDoc,
    WorldDoc,
};
use crate::search;
use crate::semantics::{Assignments, Value, ValueDomain};
use crate::witness;

#[derive(Parser)]
#[command(
    name = "semsep",
    about = "Separation analysis for causal DAGs: the graph criterion, its functional semantics, and falsification oracles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphQuery {
    /// Graph JSON file
    #[arg(long)]
    graph: std::path::PathBuf,
    /// First endpoint (node name)
    #[arg(long)]
    u: String,
    /// Second endpoint (node name)
    #[arg(long)]
    v: String,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two nodes are d-separated given a conditioning set
    Check {
        #[command(flatten)]
        query: GraphQuery,
        /// Comma-separated conditioning node names (empty for none)
        #[arg(long, default_value = "")]
        cond: String,
    },
    /// Enumerate all acyclic undirected paths between two nodes
    Paths {
        #[command(flatten)]
        query: GraphQuery,
    },
    /// Find a d-connected path with disjoint collider descendant routes
    CleanPath {
        #[command(flatten)]
        query: GraphQuery,
        #[arg(long, default_value = "")]
        cond: String,
    },
    /// Construct a refuting witness (world plus assignment sequence)
    Witness {
        #[command(flatten)]
        query: GraphQuery,
        /// Comma-separated conditioning values, e.g. "s=0,x=0" (empty for none)
        #[arg(long, default_value = "")]
        az: String,
        #[arg(long, default_value_t = 0)]
        alpha: u8,
        #[arg(long, default_value_t = 1)]
        beta: u8,
    },
    /// Check a witness file against the five sequence conditions
    CheckWitness {
        #[command(flatten)]
        query: GraphQuery,
        /// Witness JSON (bare witness or the output of `witness`)
        #[arg(long)]
        witness: std::path::PathBuf,
        /// World JSON (may be omitted when the witness file bundles one)
        #[arg(long)]
        world: Option<std::path::PathBuf>,
    },
    /// Exhaustively cross-check the graph criterion against witness search
    VerifyEquivalence {
        /// Largest node count to sweep (every labeled DAG up to this size)
        #[arg(long)]
        max_nodes: usize,
        /// Step budget per endpoint/conditioning triple
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// Run an intervention/repair protocol against a world
    Falsify {
        /// World JSON (defines the true structure and functions)
        #[arg(long)]
        world: std::path::PathBuf,
        /// Initial unobserved-terms assignment JSON
        #[arg(long)]
        init_u: std::path::PathBuf,
        /// Hypothesized graph JSON
        #[arg(long)]
        graph: std::path::PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        /// Conditioned node name (switches to the single-condition protocol)
        #[arg(long)]
        z: Option<String>,
        /// Catalyst intervention JSON
        #[arg(long)]
        catalyst: std::path::PathBuf,
        /// Repair intervention JSON
        #[arg(long)]
        repair: Option<std::path::PathBuf>,
    },
}

fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(Error::Io)
}

fn load_graph(path: &std::path::Path) -> Result<Graph> {
    GraphDoc::parse(&read_file(path)?)
}

fn parse_cond(g: &Graph, cond: &str) -> Result<BTreeSet<NodeId>> {
    let mut out = BTreeSet::new();
    for name in cond.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        out.insert(g.require(name)?);
    }
    Ok(out)
}

fn parse_value_list(g: &Graph, spec: &str, domain: ValueDomain) -> Result<Assignments> {
    let mut out = Assignments::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, raw) = item.split_once('=').ok_or_else(|| {
            Error::SchemaViolation(format!("expected name=value, got {item:?}"))
        })?;
        let val: u8 = raw
            .trim()
            .parse()
            .map_err(|_| Error::SchemaViolation(format!("bad value in {item:?}")))?;
        let v = Value(val);
        if !domain.contains(v) {
            return Err(Error::SchemaViolation(format!(
                "value {val} outside the boolean domain"
            )));
        }
        out.bind(g.require(name.trim())?, v);
    }
    Ok(out)
}

fn labels(g: &Graph, nodes: &[NodeId]) -> Json {
    json!(g.label_seq(nodes))
}

fn cmd_check(query: &GraphQuery, cond: &str) -> Result<Json> {
    let g = load_graph(&query.graph)?;
    let (u, v) = (g.require(&query.u)?, g.require(&query.v)?);
    let z = parse_cond(&g, cond)?;
    match dsep::find_d_connected_path(&g, u, v, &z)? {
        None => Ok(json!({"result": "d-separated"})),
        Some(p) => Ok(json!({"result": "d-connected", "path": labels(&g, p.nodes())})),
    }
}

fn cmd_paths(query: &GraphQuery) -> Result<Json> {
    let g = load_graph(&query.graph)?;
    let (u, v) = (g.require(&query.u)?, g.require(&query.v)?);
    let paths = g.enumerate_paths(u, v)?;
    Ok(json!({
        "paths": paths.iter().map(|p| labels(&g, p.nodes())).collect::<Vec<_>>()
    }))
}

fn clean_connection_json(g: &Graph, cc: &dsep::CleanConnection) -> Json {
    let descendants: serde_json::Map<String, Json> = cc
        .dmap
        .iter()
        .map(|(c, route)| {
            (
                g.label(*c).to_string(),
                json!({
                    "interior": labels(g, &route.interior),
                    "terminal": g.label(route.terminal),
                }),
            )
        })
        .collect();
    json!({
        "result": "d-connected",
        "path": labels(g, cc.path.nodes()),
        "descendants": descendants,
    })
}

fn cmd_clean_path(query: &GraphQuery, cond: &str) -> Result<Json> {
    let g = load_graph(&query.graph)?;
    let (u, v) = (g.require(&query.u)?, g.require(&query.v)?);
    let z = parse_cond(&g, cond)?;
    match dsep::find_clean_connection(&g, u, v, &z)? {
        None => Ok(json!({"result": "d-separated"})),
        Some(cc) => Ok(clean_connection_json(&g, &cc)),
    }
}

fn cmd_witness(query: &GraphQuery, az_spec: &str, alpha: u8, beta: u8) -> Result<Json> {
    let g = load_graph(&query.graph)?;
    let (u, v) = (g.require(&query.u)?, g.require(&query.v)?);
    let domain = ValueDomain::boolean();
    let az = parse_value_list(&g, az_spec, domain)?;
    let z = az.domain();
    let Some(cc) = dsep::find_clean_connection(&g, u, v, &z)? else {
        return Ok(json!({"result": "d-separated"}));
    };
    let partition = witness::build_partition(&g, &cc, &az)?;
    let functions = witness::build_path_functions(
        &g,
        &partition,
        &az,
        &crate::semantics::NodeFunction::Constant(Value(0)),
    )?;
    let base = Assignments::uniform(&g, Value(alpha));
    let seq = witness::build_witness_sequence(&g, &partition, Value(alpha), Value(beta), &base)?;
    let bundle = BundleDoc {
        world: WorldDoc::from_model(&g, &functions, domain)?,
        witness: WitnessDoc::from_witness(&g, &seq, &az),
    };
    Ok(serde_json::to_value(bundle).expect("bundle serializes"))
}

fn cmd_check_witness(
    query: &GraphQuery,
    witness_path: &std::path::Path,
    world_path: Option<&std::path::Path>,
) -> Result<Json> {
    let g = load_graph(&query.graph)?;
    let (u, v) = (g.require(&query.u)?, g.require(&query.v)?);
    let raw = read_file(witness_path)?;
    let (witness_doc, bundled_world) = match parse_json::<BundleDoc>(&raw) {
        Ok(bundle) => (bundle.witness, Some(bundle.world)),
        Err(_) => (parse_json::<WitnessDoc>(&raw)?, None),
    };
    let world_doc = match world_path {
        Some(p) => parse_json::<WorldDoc>(&read_file(p)?)?,
        None => bundled_world.ok_or_else(|| {
            Error::SchemaViolation(
                "witness file has no bundled world; pass --world".into(),
            )
        })?,
    };
    let domain = world_doc.domain()?;
    let (world_graph, functions) = world_doc.to_model(&g)?;
    if !world_graph.same_structure(&g) {
        return Err(Error::SchemaViolation(
            "the world's structure differs from the graph under check".into(),
        ));
    }
    let (seq, az) = witness_doc.to_witness(&g, domain)?;
    let verdict = witness::check_witness(&g, &functions, u, v, &az, &seq)?;
    let mut out = json!({
        "valid": verdict.valid,
        "v_changed": verdict.v_changed,
    });
    if let Some(cond) = verdict.failed_condition {
        out["failed_condition"] = json!(format!("{cond:?}"));
    }
    Ok(out)
}

fn cmd_verify_equivalence(max_nodes: usize, budget: u64) -> Result<(Json, i32)> {
    if max_nodes < 2 || max_nodes > 4 {
        return Err(Error::SchemaViolation(
            "--max-nodes must be between 2 and 4".into(),
        ));
    }
    let mut totals = (0usize, 0usize, 0usize, 0usize);
    let mut mismatches: Vec<String> = Vec::new();
    let mut exhausted: Vec<String> = Vec::new();
    for n in 2..=max_nodes {
        let report = search::equivalence_report(n, ValueDomain::boolean(), budget)?;
        eprintln!(
            "nodes={n}: graphs={} triples={} connected={} separated={} mismatches: {}",
            report.graphs,
            report.triples,
            report.connected,
            report.separated,
            report.mismatches.len()
        );
        totals.0 += report.graphs;
        totals.1 += report.triples;
        totals.2 += report.connected;
        totals.3 += report.separated;
        mismatches.extend(report.mismatches);
        exhausted.extend(report.budget_exhausted);
    }
    let ok = mismatches.is_empty() && exhausted.is_empty();
    let out = json!({
        "max_nodes": max_nodes,
        "graphs": totals.0,
        "triples": totals.1,
        "connected": totals.2,
        "separated": totals.3,
        "mismatches": mismatches.len(),
        "budget_exhausted": exhausted.len(),
    });
    Ok((out, if ok { 0 } else { 1 }))
}

fn trace_json(g: &Graph, verdict: &FalsificationVerdict) -> Json {
    let entries: Vec<Json> = verdict
        .trace
        .iter()
        .map(|e| match &e.action {
            Action::Measure => json!({
                "action": "measure",
                "observed": assignments_to_map(g, &e.observed),
            }),
            Action::Intervene(declared) => json!({
                "action": "intervene",
                "declared": g.label_seq(&declared.iter().copied().collect::<Vec<_>>()),
            }),
        })
        .collect();
    json!(entries)
}

#[allow(clippy::too_many_arguments)]
fn cmd_falsify(
    world_path: &std::path::Path,
    init_u: &std::path::Path,
    graph_path: &std::path::Path,
    u: &str,
    v: &str,
    z: Option<&str>,
    catalyst_path: &std::path::Path,
    repair_path: Option<&std::path::Path>,
) -> Result<(Json, i32)> {
    let hypothesis = load_graph(graph_path)?;
    let (u, v) = (hypothesis.require(u)?, hypothesis.require(v)?);
    let world_doc: WorldDoc = parse_json(&read_file(world_path)?)?;
    let domain = world_doc.domain()?;
    let (true_graph, functions) = world_doc.to_model(&hypothesis)?;
    let load_assignments = |path: &std::path::Path, what: &str| -> Result<Assignments> {
        let map = parse_json(&read_file(path)?)?;
        assignments_from_map(&hypothesis, domain, &map, what)
    };
    let initial = load_assignments(init_u, "init-u")?;
    let catalyst = load_assignments(catalyst_path, "catalyst")?;
    let repair = repair_path
        .map(|p| load_assignments(p, "repair"))
        .transpose()?;
    let mut world = SimulatedWorld::new(true_graph, functions, initial)?;
    let verdict = match z {
        None => falsify::falsify_unconditional(&mut world, &hypothesis, u, v, &catalyst)?,
        Some(z) => falsify::falsify_single_condition(
            &mut world,
            &hypothesis,
            u,
            v,
            hypothesis.require(z)?,
            &catalyst,
            repair.as_ref(),
        )?,
    };
    let (name, code) = match verdict.outcome {
        Outcome::Consistent => ("consistent", 0),
        Outcome::Falsified => ("falsified", 2),
    };
    Ok((
        json!({"verdict": name, "trace": trace_json(&hypothesis, &verdict)}),
        code,
    ))
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::MalformedJson(_) | Error::SchemaViolation(_) => 65,
        Error::InconclusiveRun(_) => 3,
        _ => 1,
    }
}

/// Parses arguments, dispatches, prints, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; everything else is usage.
            let code = if e.exit_code() == 0 { 0 } else { 64 };
            let _ = e.print();
            return code;
        }
    };
    let result: std::result::Result<(Json, i32), Error> = match &cli.command {
        Command::Check { query, cond } => cmd_check(query, cond).map(|j| (j, 0)),
        Command::Paths { query } => cmd_paths(query).map(|j| (j, 0)),
        Command::CleanPath { query, cond } => cmd_clean_path(query, cond).map(|j| (j, 0)),
        Command::Witness {
            query,
            az,
            alpha,
            beta,
        } => cmd_witness(query, az, *alpha, *beta).map(|j| (j, 0)),
        Command::CheckWitness {
            query,
            witness,
            world,
        } => cmd_check_witness(query, witness, world.as_deref()).map(|j| (j, 0)),
        Command::VerifyEquivalence { max_nodes, budget } => {
            cmd_verify_equivalence(*max_nodes, *budget)
        }
        Command::Falsify {
            world,
            init_u,
            graph,
            u,
            v,
            z,
            catalyst,
            repair,
        } => cmd_falsify(
            world,
            init_u,
            graph,
            u,
            v,
            z.as_deref(),
            catalyst,
            repair.as_deref(),
        ),
    };
    match result {
        Ok((out, code)) => {
            println!("{out}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code_for(&e);
            if code == 3 {
                println!("{}", json!({"verdict": "inconclusive", "reason": e.to_string()}));
            } else {
                println!("{}", json!({"error": e.name(), "message": e.to_string()}));
            }
            code
        }
    }
}
