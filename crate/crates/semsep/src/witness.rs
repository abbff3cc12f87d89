//! Perturb-and-repair witness sequences over a causal model.
//!
//! A witness sequence `U₀ … U_ℓ` records an intervention on `u` (the catalyst)
//! followed by stepwise repairs that restore every conditioned node, subject
//! to locality: each step may only touch unblocked ancestors of nodes whose
//! conditioning the previous step disturbed. A valid sequence that changes the
//! value of `v` refutes separation between `u` and `v`.
//!
//! This module checks witnesses against that contract, constructs refuting
//! witnesses from clean d-connected paths (partition the nodes by their role
//! relative to the path, lock values along it, then flip the path's source
//! terms one by one), and recovers a d-connected path from any valid refuting
//! witness.

use std::collections::{BTreeMap, BTreeSet};

use crate::dsep::{is_blocked, validate_clean_connection, CleanConnection};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Path};
use crate::semantics::{
    evaluate, Assignments, GraphFunction, NodeFunction, Value,
};

/// The five conditions a witness sequence must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessCondition {
    /// `U₀` gives `u` the value alpha and properly conditions.
    Initialization,
    /// `U₁` gives `u` the value beta and differs from `U₀` only on unblocked
    /// ancestors of `u`.
    CatalystUpdate,
    /// Each later step touches only unblocked ancestors of conditioned nodes
    /// disturbed by the previous step.
    ReparativePropagation,
    /// `1 ≤ ℓ ≤ |V| + 1`.
    Termination,
    /// `U_ℓ` gives `u` the value beta and properly conditions again.
    RestoredConditioning,
}

/// Result of checking a witness sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessVerdict {
    pub valid: bool,
    pub failed_condition: Option<WitnessCondition>,
    /// Whether the value of `v` differs between `U₀` and `U_ℓ`.
    pub v_changed: bool,
}

/// A candidate witness: the claimed endpoint values and the assignment
/// sequence `U₀ … U_ℓ`. Validity is established by [`check_witness`], never
/// assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSequence {
    pub alpha: Value,
    pub beta: Value,
    pub sequence: Vec<Assignments>,
}

impl WitnessSequence {
    /// Number of steps `ℓ` (one less than the number of assignments).
    pub fn steps(&self) -> usize {
        self.sequence.len().saturating_sub(1)
    }
}

/// Memoized unblocked-ancestor queries for one graph and conditioning set.
struct AncestorCache<'g> {
    g: &'g Graph,
    conditioned: BTreeSet<NodeId>,
    memo: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl<'g> AncestorCache<'g> {
    fn new(g: &'g Graph, conditioned: BTreeSet<NodeId>) -> AncestorCache<'g> {
        AncestorCache {
            g,
            conditioned,
            memo: BTreeMap::new(),
        }
    }

    fn unblocked(&mut self, w: NodeId) -> Result<&BTreeSet<NodeId>> {
        if !self.memo.contains_key(&w) {
            let set = self.g.unblocked_ancestors(w, &self.conditioned)?;
            self.memo.insert(w, set);
        }
        Ok(&self.memo[&w])
    }

    fn intersects(&mut self, w: NodeId, set: &BTreeSet<NodeId>) -> Result<bool> {
        Ok(!self.unblocked(w)?.is_disjoint(set))
    }
}

fn check_endpoints(g: &Graph, u: NodeId, v: NodeId, conditioning: &Assignments) -> Result<()> {
    if u == v {
        return Err(Error::SameEndpoints);
    }
    for (w, label) in [(u, g.label(u)), (v, g.label(v))] {
        if conditioning.get(w).is_some() {
            return Err(Error::EndpointConditioned(label.to_string()));
        }
    }
    Ok(())
}

/// Checks a witness sequence against all five conditions and reports whether
/// the value of `v` changed end to end.
pub fn check_witness(
    g: &Graph,
    functions: &GraphFunction,
    u: NodeId,
    v: NodeId,
    conditioning: &Assignments,
    witness: &WitnessSequence,
) -> Result<WitnessVerdict> {
    check_endpoints(g, u, v, conditioning)?;
    if witness.sequence.is_empty() {
        return Err(Error::MalformedWitness("empty assignment sequence".into()));
    }
    let evals: Vec<Assignments> = witness
        .sequence
        .iter()
        .map(|ui| evaluate(g, functions, ui))
        .collect::<Result<_>>()?;
    let steps = witness.steps();
    let last = &evals[steps];
    let v_changed = evals[0].get(v) != last.get(v);
    let conditions_on = |vals: &Assignments| {
        conditioning
            .iter()
            .all(|(z, want)| vals.get(z) == Some(want))
    };
    let fail = |condition: WitnessCondition| {
        Ok(WitnessVerdict {
            valid: false,
            failed_condition: Some(condition),
            v_changed,
        })
    };

    // Bounds first: the remaining conditions index into the sequence.
    if steps < 1 || steps > g.node_count() + 1 {
        return fail(WitnessCondition::Termination);
    }
    if evals[0].get(u) != Some(witness.alpha) || !conditions_on(&evals[0]) {
        return fail(WitnessCondition::Initialization);
    }
    let mut anc = AncestorCache::new(g, conditioning.domain());
    let catalyst_changes = witness.sequence[0].differing_nodes(&witness.sequence[1]);
    if evals[1].get(u) != Some(witness.beta) || !catalyst_changes.is_subset(anc.unblocked(u)?) {
        return fail(WitnessCondition::CatalystUpdate);
    }
    for i in 2..=steps {
        let trigger = witness.sequence[i - 2].differing_nodes(&witness.sequence[i - 1]);
        let mut permitted: BTreeSet<NodeId> = BTreeSet::new();
        for (z, _) in conditioning.iter() {
            if anc.intersects(z, &trigger)? {
                permitted.extend(anc.unblocked(z)?.iter().copied());
            }
        }
        let changes = witness.sequence[i - 1].differing_nodes(&witness.sequence[i]);
        if !changes.is_subset(&permitted) {
            return fail(WitnessCondition::ReparativePropagation);
        }
    }
    if last.get(u) != Some(witness.beta) || !conditions_on(last) {
        return fail(WitnessCondition::RestoredConditioning);
    }
    Ok(WitnessVerdict {
        valid: true,
        failed_condition: None,
        v_changed,
    })
}

/// Parent-index bindings for a collider on the path: compare the parents at
/// `left` and `right`; emit `equal` (the conditioned terminal's value) when
/// they agree and `differ` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColliderBinding {
    pub left: usize,
    pub right: usize,
    pub equal: Value,
    pub differ: Value,
}

/// Partition of all graph nodes by their role relative to a clean connection,
/// together with the parent-index bindings needed to lock values along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolePartition {
    /// Path nodes with no neighboring path parent, in path order.
    pub sources: Vec<NodeId>,
    /// Path nodes with exactly one neighboring path parent.
    pub transmitters: BTreeSet<NodeId>,
    /// Path nodes whose two path neighbors are both parents.
    pub colliders: BTreeSet<NodeId>,
    /// Nodes on descendant routes from unconditioned colliders.
    pub descendants: BTreeSet<NodeId>,
    /// Conditioned nodes not covered above.
    pub conditioned_rest: BTreeSet<NodeId>,
    /// Everything else.
    pub rest: BTreeSet<NodeId>,
    /// Transmitter → index of its designated path parent in canonical order.
    pub transmitter_parent: BTreeMap<NodeId, usize>,
    /// Collider → its comparison binding.
    pub collider_bindings: BTreeMap<NodeId, ColliderBinding>,
    /// Descendant-route node → index of its route predecessor.
    pub descendant_parent: BTreeMap<NodeId, usize>,
}

impl RolePartition {
    /// All noncollider path nodes (sources and transmitters).
    pub fn noncollider_path_nodes(&self) -> BTreeSet<NodeId> {
        self.sources
            .iter()
            .copied()
            .chain(self.transmitters.iter().copied())
            .collect()
    }
}

fn parent_index(g: &Graph, child: NodeId, parent: NodeId) -> Result<usize> {
    g.parents(child)?
        .iter()
        .position(|&p| p == parent)
        .ok_or_else(|| {
            Error::Internal(format!(
                "{} is not a parent of {}",
                g.label(parent),
                g.label(child)
            ))
        })
}

/// Partitions the nodes of `g` by their role relative to a clean connection,
/// using the conditioning assignment to pin collider comparison values.
pub fn build_partition(
    g: &Graph,
    cc: &CleanConnection,
    conditioning: &Assignments,
) -> Result<RolePartition> {
    let z = conditioning.domain();
    validate_clean_connection(g, cc.path.start(), cc.path.end(), &z, cc)
        .map_err(|e| Error::InvalidCleanConnection(e.to_string()))?;

    let nodes = cc.path.nodes();
    let mut sources = Vec::new();
    let mut transmitters = BTreeSet::new();
    let mut colliders = BTreeSet::new();
    let mut transmitter_parent = BTreeMap::new();
    let mut collider_bindings = BTreeMap::new();
    for (k, &w) in nodes.iter().enumerate() {
        let path_parents: Vec<NodeId> = [k.checked_sub(1), Some(k + 1)]
            .into_iter()
            .flatten()
            .filter_map(|i| nodes.get(i).copied())
            .filter(|&nb| g.has_edge(nb, w))
            .collect();
        match path_parents.as_slice() {
            [] => sources.push(w),
            [p] => {
                transmitters.insert(w);
                transmitter_parent.insert(w, parent_index(g, w, *p)?);
            }
            [prev, next] => {
                colliders.insert(w);
                let route = &cc.dmap[&w];
                let equal = conditioning.get(route.terminal).ok_or_else(|| {
                    Error::ConditioningMismatch(g.label(route.terminal).to_string())
                })?;
                collider_bindings.insert(
                    w,
                    ColliderBinding {
                        left: parent_index(g, w, *prev)?,
                        right: parent_index(g, w, *next)?,
                        equal,
                        differ: if equal.0 == 0 { Value(1) } else { Value(0) },
                    },
                );
            }
            _ => unreachable!("a path node has at most two neighbors"),
        }
    }

    let mut descendants = BTreeSet::new();
    let mut descendant_parent = BTreeMap::new();
    for (&c, route) in &cc.dmap {
        if z.contains(&c) {
            continue;
        }
        let full: Vec<NodeId> = std::iter::once(c)
            .chain(route.interior.iter().copied())
            .chain(std::iter::once(route.terminal))
            .collect();
        for pair in full.windows(2) {
            descendants.insert(pair[1]);
            descendant_parent.insert(pair[1], parent_index(g, pair[1], pair[0])?);
        }
    }

    let covered: BTreeSet<NodeId> = sources
        .iter()
        .copied()
        .chain(transmitters.iter().copied())
        .chain(colliders.iter().copied())
        .chain(descendants.iter().copied())
        .collect();
    let conditioned_rest: BTreeSet<NodeId> =
        z.iter().copied().filter(|n| !covered.contains(n)).collect();
    let rest: BTreeSet<NodeId> = g
        .nodes()
        .filter(|n| !covered.contains(n) && !conditioned_rest.contains(n))
        .collect();

    Ok(RolePartition {
        sources,
        transmitters,
        colliders,
        descendants,
        conditioned_rest,
        rest,
        transmitter_parent,
        collider_bindings,
        descendant_parent,
    })
}

/// Assembles the graph function that locks values along the partitioned path:
/// sources copy their unobserved term, transmitters and descendant-route nodes
/// copy their designated parent, colliders compare their two path parents and
/// emit the conditioned terminal's value exactly on agreement, remaining
/// conditioned nodes are constant, and everything else gets `default`.
pub fn build_path_functions(
    g: &Graph,
    partition: &RolePartition,
    conditioning: &Assignments,
    default: &NodeFunction,
) -> Result<GraphFunction> {
    let mut f = GraphFunction::new();
    for &s in &partition.sources {
        f.set(s, NodeFunction::CopyUnobserved);
    }
    for (&w, &i) in &partition.transmitter_parent {
        f.set(w, NodeFunction::CopyParent(i));
    }
    for (&c, b) in &partition.collider_bindings {
        f.set(
            c,
            NodeFunction::EquateParents {
                left: b.left,
                right: b.right,
                equal: b.equal,
                differ: b.differ,
            },
        );
    }
    for (&w, &i) in &partition.descendant_parent {
        f.set(w, NodeFunction::CopyParent(i));
    }
    for &w in &partition.conditioned_rest {
        let v = conditioning
            .get(w)
            .ok_or_else(|| Error::ConditioningMismatch(g.label(w).to_string()))?;
        f.set(w, NodeFunction::Constant(v));
    }
    for &w in &partition.rest {
        f.set(w, default.clone());
    }
    f.validate(g)?;
    Ok(f)
}

/// Constructs the refuting witness sequence for a partitioned clean
/// connection: `U₀` is `base` with every source fixed to `alpha`, and each
/// step flips the next source (in path order) to `beta`.
pub fn build_witness_sequence(
    g: &Graph,
    partition: &RolePartition,
    alpha: Value,
    beta: Value,
    base: &Assignments,
) -> Result<WitnessSequence> {
    if alpha == beta {
        return Err(Error::AlphaBetaEqual);
    }
    for v in g.nodes() {
        if base.get(v).is_none() {
            return Err(Error::MissingUnobservedTerm(g.label(v).to_string()));
        }
    }
    let mut current = base.clone();
    for &s in &partition.sources {
        current.bind(s, alpha);
    }
    let mut sequence = vec![current.clone()];
    for &s in &partition.sources {
        current.bind(s, beta);
        sequence.push(current.clone());
    }
    Ok(WitnessSequence {
        alpha,
        beta,
        sequence,
    })
}

/// The conditioned nodes disturbed over a witness sequence, window by window:
/// for each consecutive pair of assignments that is followed by at least one
/// more assignment, every conditioned node (in ascending id order) whose
/// unblocked ancestors intersect the changed nodes of that pair.
pub fn changed_conditioned_nodes(
    g: &Graph,
    conditioning: &Assignments,
    witness: &WitnessSequence,
) -> Result<Vec<NodeId>> {
    let mut anc = AncestorCache::new(g, conditioning.domain());
    let seq = &witness.sequence;
    let mut out = Vec::new();
    if seq.len() < 3 {
        return Ok(out);
    }
    for window in 0..=seq.len() - 3 {
        let changed = seq[window].differing_nodes(&seq[window + 1]);
        for (z, _) in conditioning.iter() {
            if anc.intersects(z, &changed)? {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Context for recovering a d-connected path from a refuting witness.
struct Extraction<'g> {
    g: &'g Graph,
    zset: BTreeSet<NodeId>,
    seq: Vec<Assignments>,
    anc: AncestorCache<'g>,
}

impl<'g> Extraction<'g> {
    fn changed(&self, window: usize) -> BTreeSet<NodeId> {
        self.seq[window].differing_nodes(&self.seq[window + 1])
    }

    /// Whether some unblocked ancestor of `z` changed in the given window.
    fn window_affects(&mut self, z: NodeId, window: usize) -> Result<bool> {
        let changed = self.changed(window);
        self.anc.intersects(z, &changed)
    }

    /// Smallest-id unblocked ancestor of `w` whose term changed in the window.
    fn changed_ancestor(&mut self, w: NodeId, window: usize) -> Result<NodeId> {
        let changed = self.changed(window);
        self.anc
            .unblocked(w)?
            .iter()
            .copied()
            .find(|a| changed.contains(a))
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no unblocked ancestor of {} changed in window {window}",
                    self.g.label(w)
                ))
            })
    }

    /// Shortest directed path from `from` to `to` whose nodes other than `to`
    /// avoid the conditioning set.
    fn directed(&self, from: NodeId, to: NodeId) -> Result<Vec<NodeId>> {
        self.g
            .directed_unblocked_path(from, to, &self.zset)?
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no unblocked directed path from {} to {}",
                    self.g.label(from),
                    self.g.label(to)
                ))
            })
    }

    /// A d-connected path between two nodes sharing the unblocked ancestor
    /// `a`: directed when `a` is an endpoint, otherwise two directed segments
    /// meeting at a confounder, trimmed at their first shared node.
    fn shared_ancestor_path(&mut self, a: NodeId, w1: NodeId, w2: NodeId) -> Result<Path> {
        if a == w1 {
            return Path::from_nodes(self.directed(w1, w2)?);
        }
        if a == w2 {
            let mut nodes = self.directed(w2, w1)?;
            nodes.reverse();
            return Path::from_nodes(nodes);
        }
        let to_w1 = self.directed(a, w1)?;
        let to_w2 = self.directed(a, w2)?;
        let mut up: Vec<NodeId> = to_w1.into_iter().rev().collect(); // w1 … a
        let in_w2: BTreeSet<NodeId> = to_w2.iter().copied().collect();
        let meet = up
            .iter()
            .position(|n| in_w2.contains(n))
            .expect("both segments contain a");
        up.truncate(meet + 1);
        let meet_node = up[meet];
        let tail_start = to_w2
            .iter()
            .position(|&n| n == meet_node)
            .expect("meet node is on the second segment");
        up.extend(to_w2[tail_start + 1..].iter().copied());
        Path::from_nodes(up)
    }

    /// Concatenates a path `u … m` with a path `m … w`, trimming overlaps: if
    /// `u` lies on the second path or `w` on the first, the appropriate
    /// subpath is taken; otherwise the paths are joined at the first node of
    /// the first path that the second path contains.
    fn concat(&self, first: &Path, second: &Path) -> Result<Path> {
        let u = first.start();
        let w = second.end();
        if let Some(k) = second.position(u) {
            return Path::from_nodes(second.nodes()[k..].to_vec());
        }
        if let Some(k) = first.position(w) {
            return Path::from_nodes(first.nodes()[..=k].to_vec());
        }
        let in_second: BTreeSet<NodeId> = second.nodes().iter().copied().collect();
        let meet = first
            .nodes()
            .iter()
            .position(|n| in_second.contains(n))
            .expect("paths share their junction");
        let meet_node = first.nodes()[meet];
        let tail = second
            .position(meet_node)
            .expect("meet node is on the second path");
        let mut nodes = first.nodes()[..=meet].to_vec();
        nodes.extend(second.nodes()[tail + 1..].iter().copied());
        Path::from_nodes(nodes)
    }

    /// A d-connected path from `u` to the conditioned node `z`, entering `z`
    /// along its final edge, given that `z` was disturbed at `window`.
    fn path_into_conditioned(&mut self, u: NodeId, z: NodeId, window: usize) -> Result<Path> {
        let a = self.changed_ancestor(z, window)?;
        if window == 0 || self.anc.unblocked(u)?.contains(&a) {
            return self.shared_ancestor_path(a, u, z);
        }
        // The change of `a` at this window was licensed by a conditioned node
        // disturbed one window earlier.
        let licensor = self.find_licensor(a, window - 1)?;
        if licensor == z {
            return self.path_into_conditioned(u, z, window - 1);
        }
        let head = self.path_into_conditioned(u, licensor, window - 1)?;
        let bridge = self.shared_ancestor_path(a, licensor, z)?;
        self.concat(&head, &bridge)
    }

    /// The smallest-id conditioned node that was disturbed at `window` and has
    /// `a` among its unblocked ancestors.
    fn find_licensor(&mut self, a: NodeId, window: usize) -> Result<NodeId> {
        let zs: Vec<NodeId> = self.zset.iter().copied().collect();
        for z in zs {
            if self.anc.unblocked(z)?.contains(&a) && self.window_affects(z, window)? {
                return Ok(z);
            }
        }
        Err(Error::Internal(format!(
            "no conditioned node licenses the change of {} at window {window}",
            self.g.label(a)
        )))
    }
}

/// Recovers a d-connected path from `u` to `v` out of a valid refuting
/// witness: locate an unblocked ancestor of `v` whose term changed end to
/// end; if `u` shares it, the two are linked through it directly, otherwise
/// the change is traced backwards through the conditioned nodes that licensed
/// it, and the pieces are concatenated with overlap trimming.
pub fn extract_d_connected_path(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    conditioning: &Assignments,
    functions: &GraphFunction,
    witness: &WitnessSequence,
) -> Result<Path> {
    let verdict = check_witness(g, functions, u, v, conditioning, witness)?;
    if !verdict.valid {
        return Err(Error::NotAWitness(format!(
            "sequence violates {:?}",
            verdict.failed_condition.expect("invalid verdicts name a condition")
        )));
    }
    if !verdict.v_changed {
        return Err(Error::NotAWitness(
            "sequence does not change the value of v".into(),
        ));
    }
    let zset = conditioning.domain();
    let mut ctx = Extraction {
        g,
        zset: zset.clone(),
        seq: witness.sequence.clone(),
        anc: AncestorCache::new(g, zset),
    };
    let steps = witness.steps();
    let first = &ctx.seq[0];
    let last = &ctx.seq[steps];
    let moved = first.differing_nodes(last);
    let a = ctx
        .anc
        .unblocked(v)?
        .iter()
        .copied()
        .find(|x| moved.contains(x))
        .ok_or_else(|| {
            Error::Internal("no unblocked ancestor of v changed end to end".into())
        })?;

    let path = if ctx.anc.unblocked(u)?.contains(&a) {
        ctx.shared_ancestor_path(a, u, v)?
    } else {
        // `a` was still untouched after the catalyst, so its first change sits
        // at some later transition, licensed by a disturbed conditioned node.
        let t = (1..steps)
            .find(|&i| ctx.seq[i].get(a) != ctx.seq[i + 1].get(a))
            .ok_or_else(|| Error::Internal("changed ancestor never changes".into()))?;
        let z = ctx.find_licensor(a, t - 1)?;
        let head = ctx.path_into_conditioned(u, z, t - 1)?;
        let tail = ctx.shared_ancestor_path(a, z, v)?;
        ctx.concat(&head, &tail)?
    };

    if path.start() != u || path.end() != v {
        return Err(Error::Internal("extracted path has wrong endpoints".into()));
    }
    path.validate_in(g)?;
    if is_blocked(&path, g, &ctx.zset)? {
        return Err(Error::Internal("extracted path is blocked".into()));
    }
    Ok(path)
}
