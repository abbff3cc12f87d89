//! Brute-force decision of semantic separation over finite domains, and the
//! exhaustive equivalence sweep between the graph criterion and the witness
//! semantics.
//!
//! Separation quantifies over every compatible graph function, conditioning
//! assignment, and legal witness sequence, so the search enumerates node
//! functions as truth tables and explores assignment sequences with the
//! step-locality constraints applied directly: successors of a sequence state
//! are generated only over the currently permitted ancestor sets. A violation
//! is reported with its full witness; separation is reported only after the
//! whole space is exhausted. An exhausted step budget is a distinct verdict —
//! never evidence of separation.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::dsep::d_separated;
use crate::error::{Error, Result};
use crate::graph::{enumerate_dags, Graph, NodeId};
use crate::semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};
use crate::witness::WitnessSequence;

/// Outcome of a completed separation search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub separated: bool,
    /// Present exactly when `separated` is false.
    pub witness: Option<SearchWitness>,
}

/// A concrete refutation of separation: the graph function, the conditioning
/// assignment, and the witness sequence that moves `v`.
#[derive(Debug, Clone)]
pub struct SearchWitness {
    pub functions: GraphFunction,
    pub conditioning: Assignments,
    pub sequence: WitnessSequence,
}

/// Aggregate result of the equivalence sweep at one node count.
#[derive(Debug, Clone, Default)]
pub struct EquivalenceReport {
    pub node_count: usize,
    pub graphs: usize,
    pub triples: usize,
    pub connected: usize,
    pub separated: usize,
    /// Triples where the graph criterion and the search disagree.
    pub mismatches: Vec<String>,
    /// Triples where the search ran out of budget.
    pub budget_exhausted: Vec<String>,
}

/// Graph compiled for dense evaluation: assignments are mixed-radix indices
/// with one digit per node.
struct DenseModel {
    size: usize,
    n: usize,
    states: usize,
    topo: Vec<usize>,
    parents: Vec<Vec<usize>>,
    stride: Vec<usize>,
}

impl DenseModel {
    fn compile(g: &Graph, domain: ValueDomain) -> Result<DenseModel> {
        let topo = g.topological_sort().ok_or(Error::CyclicGraph)?;
        let size = domain.size();
        let n = g.node_count();
        let mut states: usize = 1;
        for _ in 0..n {
            states = states
                .checked_mul(size)
                .filter(|&s| s <= 1 << 24)
                .ok_or(Error::BudgetExhausted)?;
        }
        let mut stride = vec![1usize; n];
        for v in 1..n {
            stride[v] = stride[v - 1] * size;
        }
        Ok(DenseModel {
            size,
            n,
            states,
            topo: topo.iter().map(|v| v.index()).collect(),
            parents: (0..n)
                .map(|v| {
                    g.parents(NodeId(v as u32))
                        .expect("dense nodes")
                        .iter()
                        .map(|p| p.index())
                        .collect()
                })
                .collect(),
            stride,
        })
    }

    fn digit(&self, idx: usize, v: usize) -> usize {
        idx / self.stride[v] % self.size
    }

    fn with_digit(&self, idx: usize, v: usize, val: usize) -> usize {
        idx - self.digit(idx, v) * self.stride[v] + val * self.stride[v]
    }

    fn eval(&self, tables: &[Vec<u8>], u_idx: usize) -> Vec<u8> {
        let mut vals = vec![0u8; self.n];
        for &v in &self.topo {
            let mut t = self.digit(u_idx, v);
            for &p in &self.parents[v] {
                t = t * self.size + vals[p] as usize;
            }
            vals[v] = tables[v][t];
        }
        vals
    }

    fn changed_nodes(&self, a: usize, b: usize) -> u64 {
        let mut mask = 0u64;
        for v in 0..self.n {
            if self.digit(a, v) != self.digit(b, v) {
                mask |= 1 << v;
            }
        }
        mask
    }

    /// All indices obtained from `base` by rebinding the digits at
    /// `positions`, in lexicographic combo order.
    fn rebind_all(&self, base: usize, positions: &[usize], out: &mut Vec<usize>) {
        out.clear();
        let combos = self.size.pow(positions.len() as u32);
        for mut c in 0..combos {
            let mut idx = base;
            for &pos in positions {
                idx = self.with_digit(idx, pos, c % self.size);
                c /= self.size;
            }
            out.push(idx);
        }
    }
}

fn mask_of(positions: &BTreeSet<NodeId>) -> u64 {
    positions.iter().fold(0u64, |m, v| m | 1 << v.index())
}

/// Static, function-independent data for one `(g, u, v, Z)` query.
struct Query {
    u: usize,
    v: usize,
    /// Conditioned node positions in ascending order.
    z: Vec<usize>,
    /// Unblocked ancestors of `u`, as digit positions.
    u_anc: Vec<usize>,
    /// Per conditioned node: (position, ancestor mask, ancestor positions).
    z_anc: Vec<(usize, u64, Vec<usize>)>,
}

impl Query {
    fn prepare(g: &Graph, u: NodeId, v: NodeId, z: &BTreeSet<NodeId>) -> Result<Query> {
        if u == v {
            return Err(Error::SameEndpoints);
        }
        if z.contains(&u) {
            return Err(Error::EndpointConditioned(g.label(u).to_string()));
        }
        if z.contains(&v) {
            return Err(Error::EndpointConditioned(g.label(v).to_string()));
        }
        let u_anc: Vec<usize> = g
            .unblocked_ancestors(u, z)?
            .iter()
            .map(|a| a.index())
            .collect();
        let mut z_anc = Vec::new();
        for &zn in z {
            let anc = g.unblocked_ancestors(zn, z)?;
            z_anc.push((
                zn.index(),
                mask_of(&anc),
                anc.iter().map(|a| a.index()).collect(),
            ));
        }
        Ok(Query {
            u: u.index(),
            v: v.index(),
            z: z.iter().map(|n| n.index()).collect(),
            u_anc,
            z_anc,
        })
    }
}

/// Reusable buffers for the sequence-state exploration.
#[derive(Default)]
struct Workspace {
    visited: HashSet<u64>,
    pred: HashMap<u64, u64>,
    queue: std::collections::VecDeque<(usize, usize, usize)>,
    rebound: Vec<usize>,
}

struct Budget {
    limit: u64,
    spent: u64,
}

impl Budget {
    fn step(&mut self) -> Result<()> {
        self.spent += 1;
        if self.spent > self.limit {
            Err(Error::BudgetExhausted)
        } else {
            Ok(())
        }
    }
}

/// Searches one graph function for a legal sequence that moves `v`. Returns
/// the sequence as assignment indices `[U₀, …, U_ℓ]`.
fn violating_sequence(
    model: &DenseModel,
    query: &Query,
    tables: &[Vec<u8>],
    ws: &mut Workspace,
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    let max_steps = model.n + 1;
    let mut evals: Vec<Option<Vec<u8>>> = vec![None; model.states];
    macro_rules! eval {
        ($idx:expr) => {{
            let idx = $idx;
            if evals[idx].is_none() {
                evals[idx] = Some(model.eval(tables, idx));
            }
            evals[idx].as_ref().expect("just computed")
        }};
    }

    for u0 in 0..model.states {
        budget.step()?;
        // The conditioning values are read off U₀; any U₀ then properly
        // conditions by construction, and the final assignment must restore
        // exactly these values.
        let az: Vec<(usize, u8)> = {
            let vals = eval!(u0);
            query.z.iter().map(|&z| (z, vals[z])).collect()
        };
        let v0 = eval!(u0)[query.v];

        ws.visited.clear();
        ws.pred.clear();
        ws.queue.clear();
        let key = |prev: usize, cur: usize| (prev * model.states + cur) as u64;

        // Catalyst candidates: every rebinding of u's unblocked ancestors.
        let mut starts = Vec::new();
        model.rebind_all(u0, &query.u_anc, &mut starts);
        for &u1 in &starts {
            if ws.visited.insert(key(u0, u1)) {
                ws.queue.push_back((u0, u1, 1));
            }
        }

        while let Some((prev, cur, depth)) = ws.queue.pop_front() {
            budget.step()?;
            // Acceptance: conditioning restored and u holding the value the
            // catalyst gave it. A violation additionally moves v.
            let conditioned_ok = {
                let vals = eval!(cur);
                az.iter().all(|&(z, want)| vals[z] == want)
            };
            if conditioned_ok {
                let unkey = |k: u64| {
                    (
                        (k / model.states as u64) as usize,
                        (k % model.states as u64) as usize,
                    )
                };
                // Walk back to the chain's start; its second component is U₁,
                // which pins the value u must hold at acceptance.
                let mut p = (prev, cur);
                while let Some(&pk) = ws.pred.get(&key(p.0, p.1)) {
                    p = unkey(pk);
                }
                let beta = eval!(p.1)[query.u];
                let cur_u = eval!(cur)[query.u];
                let cur_v = eval!(cur)[query.v];
                if cur_u == beta && cur_v != v0 {
                    // Reconstruct the index sequence.
                    let mut chain = vec![cur];
                    let mut p = (prev, cur);
                    loop {
                        chain.push(p.0);
                        match ws.pred.get(&key(p.0, p.1)) {
                            Some(&pk) => p = unkey(pk),
                            None => break,
                        }
                    }
                    chain.reverse();
                    return Ok(Some(chain));
                }
            }
            if depth >= max_steps {
                continue;
            }
            // Repairs may touch only unblocked ancestors of conditioned nodes
            // disturbed by the previous transition.
            let trigger = model.changed_nodes(prev, cur);
            let mut permitted_mask = 0u64;
            for &(_, anc_mask, _) in &query.z_anc {
                if anc_mask & trigger != 0 {
                    permitted_mask |= anc_mask;
                }
            }
            if permitted_mask == 0 {
                continue;
            }
            let positions: Vec<usize> =
                (0..model.n).filter(|&p| permitted_mask >> p & 1 == 1).collect();
            let mut rebound = std::mem::take(&mut ws.rebound);
            model.rebind_all(cur, &positions, &mut rebound);
            for &next in &rebound {
                if next == cur {
                    continue;
                }
                let k = key(cur, next);
                if ws.visited.insert(k) {
                    ws.pred.insert(k, key(prev, cur));
                    ws.queue.push_back((cur, next, depth + 1));
                }
            }
            ws.rebound = rebound;
        }
    }
    Ok(None)
}

fn tables_for(g: &Graph, domain: ValueDomain, f: &GraphFunction) -> Result<Vec<Vec<u8>>> {
    let mut tables = Vec::with_capacity(g.node_count());
    for v in g.nodes() {
        let arity = g.parents(v)?.len();
        let nf = f
            .get(v)
            .ok_or_else(|| Error::MissingNodeFunction(g.label(v).to_string()))?;
        let table = nf
            .to_table(domain, arity)
            .map_err(|_| Error::ArityMismatch(g.label(v).to_string()))?;
        tables.push(table.into_iter().map(|val| val.0).collect());
    }
    Ok(tables)
}

fn dense_witness(
    g: &Graph,
    domain: ValueDomain,
    model: &DenseModel,
    tables: &[Vec<u8>],
    query: &Query,
    chain: &[usize],
) -> SearchWitness {
    let to_assignments = |idx: usize| {
        Assignments::from_pairs(
            (0..model.n).map(|v| (NodeId(v as u32), Value(model.digit(idx, v) as u8))),
        )
    };
    let first_vals = model.eval(tables, chain[0]);
    let u1_vals = model.eval(tables, chain[1]);
    let conditioning = Assignments::from_pairs(
        query
            .z
            .iter()
            .map(|&z| (NodeId(z as u32), Value(first_vals[z]))),
    );
    let mut functions = GraphFunction::new();
    for v in g.nodes() {
        functions.set(
            v,
            NodeFunction::Table {
                domain_size: domain.size() as u8,
                values: tables[v.index()].iter().map(|&b| Value(b)).collect(),
            },
        );
    }
    SearchWitness {
        functions,
        conditioning,
        sequence: WitnessSequence {
            alpha: Value(first_vals[query.u]),
            beta: Value(u1_vals[query.u]),
            sequence: chain.iter().map(|&idx| to_assignments(idx)).collect(),
        },
    }
}

/// Searches a single graph function for a refuting witness.
pub fn violation_for_function(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
    domain: ValueDomain,
    f: &GraphFunction,
    budget: u64,
) -> Result<Option<SearchWitness>> {
    let model = DenseModel::compile(g, domain)?;
    let query = Query::prepare(g, u, v, z)?;
    let tables = tables_for(g, domain, f)?;
    let mut ws = Workspace::default();
    let mut budget = Budget {
        limit: budget,
        spent: 0,
    };
    Ok(
        violating_sequence(&model, &query, &tables, &mut ws, &mut budget)?
            .map(|chain| dense_witness(g, domain, &model, &tables, &query, &chain)),
    )
}

/// Iterator over every graph function compatible with `g`, as dense tables.
struct TableOdometer {
    tables: Vec<Vec<u8>>,
    size: u8,
    done: bool,
}

impl TableOdometer {
    fn new(g: &Graph, domain: ValueDomain) -> Result<TableOdometer> {
        let size = domain.size();
        let mut tables = Vec::with_capacity(g.node_count());
        for v in g.nodes() {
            let arity = g.parents(v)?.len();
            let len = size
                .checked_pow(arity as u32 + 1)
                .filter(|&l| l <= 1 << 20)
                .ok_or(Error::BudgetExhausted)?;
            tables.push(vec![0u8; len]);
        }
        Ok(TableOdometer {
            tables,
            size: size as u8,
            done: false,
        })
    }

    fn advance(&mut self) -> bool {
        for table in self.tables.iter_mut() {
            for digit in table.iter_mut() {
                if *digit + 1 < self.size {
                    *digit += 1;
                    return true;
                }
                *digit = 0;
            }
        }
        self.done = true;
        false
    }
}

/// Decides semantic separation by exhausting every compatible graph function
/// over `domain`, every conditioning assignment (read off each initial
/// assignment), and every legal sequence within the termination bound.
pub fn semantic_separation_search(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
    domain: ValueDomain,
    budget: u64,
) -> Result<SearchOutcome> {
    let model = DenseModel::compile(g, domain)?;
    let query = Query::prepare(g, u, v, z)?;
    let mut odometer = TableOdometer::new(g, domain)?;
    let mut ws = Workspace::default();
    let mut budget = Budget {
        limit: budget,
        spent: 0,
    };
    loop {
        budget.step()?;
        if let Some(chain) =
            violating_sequence(&model, &query, &odometer.tables, &mut ws, &mut budget)?
        {
            let witness = dense_witness(g, domain, &model, &odometer.tables, &query, &chain);
            return Ok(SearchOutcome {
                separated: false,
                witness: Some(witness),
            });
        }
        if !odometer.advance() {
            return Ok(SearchOutcome {
                separated: true,
                witness: None,
            });
        }
    }
}

/// Runs the full equivalence sweep on every labeled DAG with `node_count`
/// nodes: for every ordered endpoint pair and every conditioning subset, the
/// graph criterion and the separation search must agree. Graphs are processed
/// in parallel; the report aggregates order-independent counts.
pub fn equivalence_report(
    node_count: usize,
    domain: ValueDomain,
    per_triple_budget: u64,
) -> Result<EquivalenceReport> {
    let graphs = enumerate_dags(node_count);
    let results: Vec<EquivalenceReport> = graphs
        .par_iter()
        .map(|g| {
            let mut report = EquivalenceReport::default();
            let nodes: Vec<NodeId> = g.nodes().collect();
            let describe = |u: NodeId, v: NodeId, z: &BTreeSet<NodeId>| {
                format!(
                    "edges={:?} u={} v={} z={:?}",
                    g.edges()
                        .iter()
                        .map(|&(s, t)| (s.0, t.0))
                        .collect::<Vec<_>>(),
                    u.0,
                    v.0,
                    z.iter().map(|n| n.0).collect::<Vec<_>>()
                )
            };
            for &u in &nodes {
                for &v in &nodes {
                    if u == v {
                        continue;
                    }
                    let rest: Vec<NodeId> = nodes
                        .iter()
                        .copied()
                        .filter(|&w| w != u && w != v)
                        .collect();
                    for mask in 0u32..1 << rest.len() {
                        let z: BTreeSet<NodeId> = rest
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &w)| w)
                            .collect();
                        report.triples += 1;
                        let criterion =
                            d_separated(g, u, v, &z).expect("valid query");
                        if criterion {
                            report.separated += 1;
                        } else {
                            report.connected += 1;
                        }
                        match semantic_separation_search(
                            g,
                            u,
                            v,
                            &z,
                            domain,
                            per_triple_budget,
                        ) {
                            Ok(outcome) => {
                                if outcome.separated != criterion {
                                    report.mismatches.push(describe(u, v, &z));
                                }
                            }
                            Err(Error::BudgetExhausted) => {
                                report.budget_exhausted.push(describe(u, v, &z));
                            }
                            Err(e) => panic!("unexpected search failure: {e}"),
                        }
                    }
                }
            }
            report
        })
        .collect();

    let mut total = EquivalenceReport {
        node_count,
        graphs: graphs.len(),
        ..Default::default()
    };
    for r in results {
        total.triples += r.triples;
        total.connected += r.connected;
        total.separated += r.separated;
        total.mismatches.extend(r.mismatches);
        total.budget_exhausted.extend(r.budget_exhausted);
    }
    Ok(total)
}
