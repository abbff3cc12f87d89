//! The decidable graph criterion: path blocking, d-separation, d-connected
//! witness paths, and clean d-connected paths with disjoint descendant routes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Path};
use crate::roles::{classify_interior, NodeRole};

/// Default step budget for the clean-connection search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Directed route from a collider to a conditioned terminal. An empty interior
/// with `terminal == collider` records a collider that is itself conditioned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendantRoute {
    pub interior: Vec<NodeId>,
    pub terminal: NodeId,
}

impl DescendantRoute {
    /// Every node the route occupies, including the collider that owns it.
    fn occupied(&self, collider: NodeId) -> BTreeSet<NodeId> {
        let mut s: BTreeSet<NodeId> = self.interior.iter().copied().collect();
        s.insert(collider);
        s.insert(self.terminal);
        s
    }
}

/// Per-collider descendant routes for one path.
pub type DescendantMap = BTreeMap<NodeId, DescendantRoute>;

/// A d-connected path bundled with pairwise-disjoint descendant routes that
/// also avoid the path itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanConnection {
    pub path: Path,
    pub dmap: DescendantMap,
}

fn check_conditioning(g: &Graph, z: &BTreeSet<NodeId>) -> Result<()> {
    for &n in z {
        if !g.contains(n) {
            return Err(Error::UnknownNode(format!("{n}")));
        }
    }
    Ok(())
}

fn check_endpoints(g: &Graph, u: NodeId, v: NodeId, z: &BTreeSet<NodeId>) -> Result<()> {
    if z.contains(&u) {
        return Err(Error::EndpointConditioned(g.label(u).to_string()));
    }
    if z.contains(&v) {
        return Err(Error::EndpointConditioned(g.label(v).to_string()));
    }
    Ok(())
}

/// True iff `z` blocks `p`: some mediator or confounder on `p` is in `z`, or
/// some collider on `p` has no descendant in `z`.
pub fn is_blocked(p: &Path, g: &Graph, z: &BTreeSet<NodeId>) -> Result<bool> {
    check_conditioning(g, z)?;
    let roles = classify_interior(p, g)?;
    for (&node, &role) in &roles {
        match role {
            NodeRole::Mediator | NodeRole::Confounder => {
                if z.contains(&node) {
                    return Ok(true);
                }
            }
            NodeRole::Collider => {
                if g.descendants(node)?.is_disjoint(z) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// True iff every path between `u` and `v` is blocked by `z`.
pub fn d_separated(g: &Graph, u: NodeId, v: NodeId, z: &BTreeSet<NodeId>) -> Result<bool> {
    check_conditioning(g, z)?;
    check_endpoints(g, u, v, z)?;
    if !g.is_acyclic() {
        return Err(Error::CyclicGraph);
    }
    for p in g.enumerate_paths(u, v)? {
        if !is_blocked(&p, g, z)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First unblocked path in canonical enumeration order, or `None` iff the two
/// nodes are d-separated.
pub fn find_d_connected_path(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
) -> Result<Option<Path>> {
    check_conditioning(g, z)?;
    check_endpoints(g, u, v, z)?;
    if !g.is_acyclic() {
        return Err(Error::CyclicGraph);
    }
    for p in g.enumerate_paths(u, v)? {
        if !is_blocked(&p, g, z)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

struct RouteSearch<'g> {
    g: &'g Graph,
    z: &'g BTreeSet<NodeId>,
    budget: u64,
    spent: u64,
}

impl<'g> RouteSearch<'g> {
    fn step(&mut self) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::BudgetExhausted);
        }
        Ok(())
    }

    /// All candidate routes for one collider, in deterministic DFS order:
    /// directed walks out of `collider` that avoid the main path and stop at
    /// the first conditioned node they reach.
    fn routes_for(&mut self, collider: NodeId, path_nodes: &BTreeSet<NodeId>) -> Result<Vec<DescendantRoute>> {
        if self.z.contains(&collider) {
            return Ok(vec![DescendantRoute {
                interior: Vec::new(),
                terminal: collider,
            }]);
        }
        let mut found = Vec::new();
        let mut trail: Vec<NodeId> = Vec::new();
        self.extend_routes(collider, collider, path_nodes, &mut trail, &mut found)?;
        Ok(found)
    }

    fn extend_routes(
        &mut self,
        collider: NodeId,
        at: NodeId,
        path_nodes: &BTreeSet<NodeId>,
        trail: &mut Vec<NodeId>,
        found: &mut Vec<DescendantRoute>,
    ) -> Result<()> {
        for &c in self.g.children(at)? {
            self.step()?;
            if c == collider || trail.contains(&c) || path_nodes.contains(&c) {
                continue;
            }
            if self.z.contains(&c) {
                found.push(DescendantRoute {
                    interior: trail.clone(),
                    terminal: c,
                });
                continue;
            }
            trail.push(c);
            self.extend_routes(collider, c, path_nodes, trail, found)?;
            trail.pop();
        }
        Ok(())
    }

    /// Backtracking assignment of one route per collider under the pairwise
    /// disjointness constraint.
    fn assign(
        &mut self,
        colliders: &[NodeId],
        options: &[Vec<DescendantRoute>],
        chosen: &mut Vec<DescendantRoute>,
        used: &BTreeSet<NodeId>,
    ) -> Result<bool> {
        let k = chosen.len();
        if k == colliders.len() {
            return Ok(true);
        }
        for route in &options[k] {
            self.step()?;
            let occupied = route.occupied(colliders[k]);
            if occupied.is_disjoint(used) {
                let mut next_used = used.clone();
                next_used.extend(occupied);
                chosen.push(route.clone());
                if self.assign(colliders, options, chosen, &next_used)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }
}

/// Searches for a clean d-connected path: the first (in canonical enumeration
/// order) unblocked path that admits pairwise-disjoint descendant routes for
/// all of its colliders. `None` iff the endpoints are d-separated; whenever
/// they are d-connected, some path admits such routes, so the search succeeds.
pub fn find_clean_connection(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
) -> Result<Option<CleanConnection>> {
    find_clean_connection_with_budget(g, u, v, z, DEFAULT_SEARCH_BUDGET)
}

/// As [`find_clean_connection`], with an explicit step budget.
pub fn find_clean_connection_with_budget(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
    budget: u64,
) -> Result<Option<CleanConnection>> {
    check_conditioning(g, z)?;
    check_endpoints(g, u, v, z)?;
    if !g.is_acyclic() {
        return Err(Error::CyclicGraph);
    }
    let mut search = RouteSearch {
        g,
        z,
        budget,
        spent: 0,
    };
    for p in g.enumerate_paths(u, v)? {
        if is_blocked(&p, g, z)? {
            continue;
        }
        let roles = classify_interior(&p, g)?;
        // Colliders in path order.
        let colliders: Vec<NodeId> = p
            .nodes()
            .iter()
            .copied()
            .filter(|n| roles.get(n) == Some(&NodeRole::Collider))
            .collect();
        let path_nodes: BTreeSet<NodeId> = p.nodes().iter().copied().collect();
        let mut options = Vec::with_capacity(colliders.len());
        for &c in &colliders {
            options.push(search.routes_for(c, &path_nodes)?);
        }
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut chosen = Vec::new();
        if search.assign(&colliders, &options, &mut chosen, &BTreeSet::new())? {
            let dmap: DescendantMap = colliders.into_iter().zip(chosen).collect();
            let cc = CleanConnection { path: p, dmap };
            validate_clean_connection(g, u, v, z, &cc)?;
            return Ok(Some(cc));
        }
    }
    Ok(None)
}

/// Checks every clause of the clean-connection contract from scratch:
/// the path is valid and d-connected, the map covers exactly its colliders,
/// each route is a directed walk to a first-conditioned terminal avoiding the
/// path, and routes are pairwise disjoint.
pub fn validate_clean_connection(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
    cc: &CleanConnection,
) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidCleanConnection(msg));
    if cc.path.start() != u || cc.path.end() != v {
        return fail("endpoints do not match".into());
    }
    cc.path
        .validate_in(g)
        .map_err(|e| Error::InvalidCleanConnection(e.to_string()))?;
    if is_blocked(&cc.path, g, z)? {
        return fail("path is blocked".into());
    }
    let roles = classify_interior(&cc.path, g)?;
    let colliders: BTreeSet<NodeId> = roles
        .iter()
        .filter(|(_, &r)| r == NodeRole::Collider)
        .map(|(&n, _)| n)
        .collect();
    let mapped: BTreeSet<NodeId> = cc.dmap.keys().copied().collect();
    if colliders != mapped {
        return fail("descendant map does not cover exactly the path's colliders".into());
    }
    let path_nodes: BTreeSet<NodeId> = cc.path.nodes().iter().copied().collect();
    let mut occupied_sets: Vec<(NodeId, BTreeSet<NodeId>)> = Vec::new();
    for (&c, route) in &cc.dmap {
        if z.contains(&c) {
            if !route.interior.is_empty() || route.terminal != c {
                return fail(format!(
                    "conditioned collider {} must map to itself with an empty route",
                    g.label(c)
                ));
            }
        } else {
            let full: Vec<NodeId> = std::iter::once(c)
                .chain(route.interior.iter().copied())
                .chain(std::iter::once(route.terminal))
                .collect();
            let distinct: BTreeSet<NodeId> = full.iter().copied().collect();
            if distinct.len() != full.len() {
                return fail(format!("route for {} repeats a node", g.label(c)));
            }
            for pair in full.windows(2) {
                if !g.has_edge(pair[0], pair[1]) {
                    return fail(format!(
                        "route for {} is not a directed path",
                        g.label(c)
                    ));
                }
            }
            if !z.contains(&route.terminal) {
                return fail(format!(
                    "route for {} does not end in the conditioning set",
                    g.label(c)
                ));
            }
            if route.interior.iter().any(|n| z.contains(n)) {
                return fail(format!(
                    "route for {} passes through the conditioning set",
                    g.label(c)
                ));
            }
            if route.interior.iter().any(|n| path_nodes.contains(n))
                || path_nodes.contains(&route.terminal)
            {
                return fail(format!("route for {} touches the path", g.label(c)));
            }
        }
        occupied_sets.push((c, route.occupied(c)));
    }
    for i in 0..occupied_sets.len() {
        for j in i + 1..occupied_sets.len() {
            if !occupied_sets[i].1.is_disjoint(&occupied_sets[j].1) {
                return fail(format!(
                    "routes for {} and {} overlap",
                    g.label(occupied_sets[i].0),
                    g.label(occupied_sets[j].0)
                ));
            }
        }
    }
    Ok(())
}
