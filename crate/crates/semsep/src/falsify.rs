//! Experiment oracles: run intervention/repair protocols against an opaque
//! world and soundly report falsification of a hypothesized DAG.
//!
//! The hypothesized graph supplies the legality contract (which unobserved
//! terms an intervention may touch) while the world supplies measurements.
//! If a run stays within its contract and still moves a node the hypothesis
//! says cannot move, the hypothesis is falsified. Runs whose side conditions
//! fail prove nothing and are reported as inconclusive.

use std::collections::BTreeSet;

use crate::dsep::d_separated;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::semantics::{node_value, Assignments, GraphFunction, Value};

/// An opaque experimental subject: measurements are deterministic between
/// interventions, and an intervention replaces unobserved terms exactly on
/// the nodes it declares (the domain of its assignment).
pub trait World {
    fn measure(&mut self, node: NodeId) -> Result<Value>;
    fn intervene(&mut self, delta: &Assignments) -> Result<()>;
}

/// In-process world backed by a graph function and an unobserved-terms
/// assignment. The grounding graph may differ from any hypothesis under test.
#[derive(Debug, Clone)]
pub struct SimulatedWorld {
    graph: Graph,
    functions: GraphFunction,
    unobserved: Assignments,
}

impl SimulatedWorld {
    pub fn new(graph: Graph, functions: GraphFunction, initial: Assignments) -> Result<SimulatedWorld> {
        functions.validate(&graph)?;
        for v in graph.nodes() {
            if initial.get(v).is_none() {
                return Err(Error::MissingUnobservedTerm(graph.label(v).to_string()));
            }
        }
        Ok(SimulatedWorld {
            graph,
            functions,
            unobserved: initial,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

impl World for SimulatedWorld {
    fn measure(&mut self, node: NodeId) -> Result<Value> {
        node_value(&self.graph, &self.functions, &self.unobserved, node)
    }

    fn intervene(&mut self, delta: &Assignments) -> Result<()> {
        for (n, _) in delta.iter() {
            if !self.graph.contains(n) {
                return Err(Error::UnknownNode(format!("{n}")));
            }
        }
        self.unobserved = self.unobserved.overridden(delta);
        Ok(())
    }
}

/// What a completed run showed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Falsified,
    Consistent,
}

/// One step of the protocol, with the measurements taken right after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub action: Action,
    pub observed: Assignments,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Measure,
    Intervene(BTreeSet<NodeId>),
}

/// Verdict of a completed run together with its full trace. The outcome is a
/// pure function of the trace's measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsificationVerdict {
    pub outcome: Outcome,
    pub trace: Vec<TraceEntry>,
}

fn measure_all<W: World>(
    world: &mut W,
    nodes: &[NodeId],
    action: Action,
    trace: &mut Vec<TraceEntry>,
) -> Result<Assignments> {
    let mut observed = Assignments::new();
    for &n in nodes {
        observed.bind(n, world.measure(n)?);
    }
    trace.push(TraceEntry {
        action,
        observed: observed.clone(),
    });
    Ok(observed)
}

fn check_change_set(
    g: &Graph,
    delta: &Assignments,
    allowed: &BTreeSet<NodeId>,
    what: &str,
) -> Result<()> {
    for (n, _) in delta.iter() {
        if !allowed.contains(&n) {
            return Err(Error::IllegalIntervention(format!(
                "{what} declares {}, outside its permitted change set",
                g.label(n)
            )));
        }
    }
    Ok(())
}

/// Unconditional oracle: with `u` and `v` d-separated in the hypothesis given
/// nothing, an intervention confined to `u`'s ancestors must never move `v`.
/// Measures `v`, intervenes, remeasures; falsified exactly when `v` moved.
pub fn falsify_unconditional<W: World>(
    world: &mut W,
    g: &Graph,
    u: NodeId,
    v: NodeId,
    intervention: &Assignments,
) -> Result<FalsificationVerdict> {
    if !d_separated(g, u, v, &BTreeSet::new())? {
        return Err(Error::PreconditionViolated(format!(
            "{} and {} are not d-separated unconditionally in the hypothesis",
            g.label(u),
            g.label(v)
        )));
    }
    check_change_set(g, intervention, &g.ancestors(u)?, "intervention")?;

    let mut trace = Vec::new();
    let before = measure_all(world, &[v], Action::Measure, &mut trace)?;
    world.intervene(intervention)?;
    trace.push(TraceEntry {
        action: Action::Intervene(intervention.domain()),
        observed: Assignments::new(),
    });
    let after = measure_all(world, &[v], Action::Measure, &mut trace)?;

    let outcome = if before.get(v) != after.get(v) {
        Outcome::Falsified
    } else {
        Outcome::Consistent
    };
    Ok(FalsificationVerdict { outcome, trace })
}

/// Single-condition oracle: with `u` and `v` d-separated in the hypothesis
/// given `{z}`, a catalyst confined to `u`'s unblocked ancestors, repaired (if
/// it disturbed `z`) by a step confined to `z`'s ancestors that restores `z`
/// without moving `u`, must never move `v`.
///
/// The run adapts to what the catalyst did: if `z` never moved, no repair is
/// applied and `v` is compared directly; if `z` moved, the repair is required
/// and must restore it. Side-condition failures end the run as inconclusive.
pub fn falsify_single_condition<W: World>(
    world: &mut W,
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: NodeId,
    catalyst: &Assignments,
    repair: Option<&Assignments>,
) -> Result<FalsificationVerdict> {
    if z == u || z == v {
        return Err(Error::EndpointConditioned(g.label(z).to_string()));
    }
    let zset = BTreeSet::from([z]);
    if !d_separated(g, u, v, &zset)? {
        return Err(Error::PreconditionViolated(format!(
            "{} and {} are not d-separated given {} in the hypothesis",
            g.label(u),
            g.label(v),
            g.label(z)
        )));
    }
    check_change_set(g, catalyst, &g.unblocked_ancestors(u, &zset)?, "catalyst")?;
    if let Some(repair) = repair {
        check_change_set(g, repair, &g.ancestors(z)?, "repair")?;
    }

    let mut trace = Vec::new();
    let initial = measure_all(world, &[u, v, z], Action::Measure, &mut trace)?;
    world.intervene(catalyst)?;
    trace.push(TraceEntry {
        action: Action::Intervene(catalyst.domain()),
        observed: Assignments::new(),
    });
    let after_catalyst = measure_all(world, &[u, z], Action::Measure, &mut trace)?;

    let final_v = if after_catalyst.get(z) == initial.get(z) {
        // The conditioned node was untouched; the catalyst alone is a
        // complete run and v must not have moved.
        measure_all(world, &[v], Action::Measure, &mut trace)?
    } else {
        let repair = repair.ok_or_else(|| {
            Error::InconclusiveRun(format!(
                "catalyst disturbed {} and no repair was supplied",
                g.label(z)
            ))
        })?;
        world.intervene(repair)?;
        trace.push(TraceEntry {
            action: Action::Intervene(repair.domain()),
            observed: Assignments::new(),
        });
        let after_repair = measure_all(world, &[u, z, v], Action::Measure, &mut trace)?;
        if after_repair.get(z) != initial.get(z) {
            return Err(Error::InconclusiveRun(format!(
                "repair did not restore {}",
                g.label(z)
            )));
        }
        if after_repair.get(u) != after_catalyst.get(u) {
            return Err(Error::InconclusiveRun(format!(
                "repair moved {}",
                g.label(u)
            )));
        }
        after_repair
    };

    let outcome = if final_v.get(v) != initial.get(v) {
        Outcome::Falsified
    } else {
        Outcome::Consistent
    };
    Ok(FalsificationVerdict { outcome, trace })
}
