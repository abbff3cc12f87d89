//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles here (path enumeration by plain DFS, edge-precedence checking,
//! d-connection straight from the blocking clauses) are deliberately written
//! against the definitions rather than the library's algorithms, so the two
//! sides can disagree when one is wrong.

#![allow(dead_code)]

use std::collections::BTreeSet;

use semsep::dsep::CleanConnection;
use semsep::graph::{Graph, NodeId, Path};
use semsep::roles::{classify_interior, NodeRole};
use semsep::semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};

pub fn set(g: &Graph, labels: &[&str]) -> BTreeSet<NodeId> {
    labels.iter().map(|l| g.require(l).unwrap()).collect()
}

pub fn assign(g: &Graph, pairs: &[(&str, u8)]) -> Assignments {
    Assignments::from_pairs(
        pairs
            .iter()
            .map(|&(l, v)| (g.require(l).unwrap(), Value(v))),
    )
}

// -- figure corpus ---------------------------------------------------------

pub fn caffeine() -> Graph {
    Graph::build(
        &["caffeine", "courseload", "GPA"],
        &[("courseload", "caffeine"), ("courseload", "GPA")],
    )
    .unwrap()
}

pub fn chain() -> Graph {
    Graph::build(
        &["x", "u", "y", "v"],
        &[("x", "u"), ("u", "y"), ("y", "v")],
    )
    .unwrap()
}

pub fn collider() -> Graph {
    Graph::build(&["u", "w", "v"], &[("u", "w"), ("v", "w")]).unwrap()
}

pub fn double_conditioning() -> Graph {
    Graph::build(
        &["u", "z1", "z2", "v"],
        &[("u", "z1"), ("z1", "z2"), ("v", "z2")],
    )
    .unwrap()
}

pub fn unblocked_ancestors_figure() -> Graph {
    Graph::build(
        &["x", "r", "t", "s", "y", "u"],
        &[
            ("x", "t"),
            ("r", "t"),
            ("t", "s"),
            ("x", "y"),
            ("s", "u"),
            ("y", "u"),
        ],
    )
    .unwrap()
}

pub fn partition_figure() -> Graph {
    Graph::build(
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
    .unwrap()
}

// -- graph generators ------------------------------------------------------

/// Every directed graph (cyclic or not) on `n` nodes, as edge masks.
pub fn all_digraphs(n: usize) -> Vec<Graph> {
    let mut pairs = Vec::new();
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s != t {
                pairs.push((s, t));
            }
        }
    }
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Graph::from_indices(n, &edges).unwrap()
        })
        .collect()
}

/// Deterministic digraph from a seed: each possible edge independently kept.
pub fn seeded_digraph(n: usize, seed: u64, density_per_256: u8) -> Graph {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut edges = Vec::new();
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s != t && ((next() & 0xFF) as u8) < density_per_256 {
                edges.push((s, t));
            }
        }
    }
    Graph::from_indices(n, &edges).unwrap()
}

// -- independent oracles ---------------------------------------------------

/// Brute-force enumeration of acyclic undirected paths by recursive DFS,
/// independent of the library's iterative edge extension.
pub fn dfs_paths(g: &Graph, u: NodeId, v: NodeId) -> BTreeSet<Vec<NodeId>> {
    fn recurse(
        g: &Graph,
        v: NodeId,
        trail: &mut Vec<NodeId>,
        out: &mut BTreeSet<Vec<NodeId>>,
    ) {
        let at = *trail.last().unwrap();
        if at == v {
            out.insert(trail.clone());
            return;
        }
        for next in g.nodes() {
            if g.adjacent(at, next) && !trail.contains(&next) {
                trail.push(next);
                recurse(g, v, trail, out);
                trail.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut trail = vec![u];
    recurse(g, v, &mut trail, &mut out);
    out.remove(&vec![u]);
    out
}

/// Checks a topological order directly against the definition.
pub fn is_valid_topological_order(g: &Graph, order: &[NodeId]) -> bool {
    let distinct: BTreeSet<NodeId> = order.iter().copied().collect();
    if distinct.len() != order.len() || distinct != g.node_set() {
        return false;
    }
    let position = |v: NodeId| order.iter().position(|&w| w == v).unwrap();
    g.edges().iter().all(|&(s, t)| position(s) < position(t))
}

/// d-connection of one path straight from the two blocking clauses.
pub fn path_d_connected(g: &Graph, p: &Path, z: &BTreeSet<NodeId>) -> bool {
    let roles = classify_interior(p, g).unwrap();
    roles.iter().all(|(&n, &role)| match role {
        NodeRole::Mediator | NodeRole::Confounder => !z.contains(&n),
        NodeRole::Collider => !g.descendants(n).unwrap().is_disjoint(z),
    })
}

/// Validates an extracted path as a d-connected witness from `u` to `v`.
pub fn assert_d_connected_path(g: &Graph, p: &Path, u: NodeId, v: NodeId, z: &BTreeSet<NodeId>) {
    assert_eq!(p.start(), u, "path must start at u");
    assert_eq!(p.end(), v, "path must end at v");
    p.validate_in(g).expect("path must be valid in the graph");
    assert!(
        path_d_connected(g, p, z),
        "path {:?} is blocked given {:?}",
        g.label_seq(p.nodes()),
        z
    );
}

/// All `(u, v, Z)` triples over a graph, in canonical order.
pub fn all_triples(g: &Graph) -> Vec<(NodeId, NodeId, BTreeSet<NodeId>)> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let mut out = Vec::new();
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
                out.push((u, v, z));
            }
        }
    }
    out
}

/// Every assignment of boolean values to `z`, in canonical order.
pub fn all_boolean_conditionings(z: &BTreeSet<NodeId>) -> Vec<Assignments> {
    let zs: Vec<NodeId> = z.iter().copied().collect();
    (0u32..1 << zs.len())
        .map(|mask| {
            Assignments::from_pairs(
                zs.iter()
                    .enumerate()
                    .map(|(i, &n)| (n, Value((mask >> i & 1) as u8))),
            )
        })
        .collect()
}

/// Exhaustive odometer over every boolean world compatible with `g` (one
/// truth table per node), independent of the library's function enumeration.
pub struct WorldOdometer {
    nodes: Vec<NodeId>,
    tables: Vec<Vec<u8>>,
    finished: bool,
}

impl WorldOdometer {
    pub fn new(g: &Graph) -> WorldOdometer {
        WorldOdometer {
            nodes: g.nodes().collect(),
            tables: g
                .nodes()
                .map(|v| vec![0u8; 1 << (g.parents(v).unwrap().len() + 1)])
                .collect(),
            finished: false,
        }
    }

    /// Total number of worlds this odometer will emit.
    pub fn count(g: &Graph) -> u128 {
        g.nodes()
            .map(|v| 1u128 << (1 << (g.parents(v).unwrap().len() + 1)))
            .product()
    }
}

impl Iterator for WorldOdometer {
    type Item = GraphFunction;

    fn next(&mut self) -> Option<GraphFunction> {
        if self.finished {
            return None;
        }
        let mut f = GraphFunction::new();
        for (&v, table) in self.nodes.iter().zip(&self.tables) {
            f.set(
                v,
                NodeFunction::Table {
                    domain_size: 2,
                    values: table.iter().map(|&b| Value(b)).collect(),
                },
            );
        }
        self.finished = true;
        'carry: for table in self.tables.iter_mut() {
            for digit in table.iter_mut() {
                if *digit == 0 {
                    *digit = 1;
                    self.finished = false;
                    break 'carry;
                }
                *digit = 0;
            }
        }
        Some(f)
    }
}

/// Deterministic pseudorandom boolean world for `g`.
pub fn seeded_world(g: &Graph, seed: u64) -> GraphFunction {
    let mut state = seed.wrapping_mul(0xA24B_AED4_963E_E407).wrapping_add(3);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut f = GraphFunction::new();
    for v in g.nodes() {
        let len = 1usize << (g.parents(v).unwrap().len() + 1);
        f.set(
            v,
            NodeFunction::Table {
                domain_size: 2,
                values: (0..len).map(|_| Value((next() & 1) as u8)).collect(),
            },
        );
    }
    f
}

/// Every boolean intervention whose declared set lies within `allowed`: all
/// value maps over all subsets, the empty intervention included.
pub fn legal_interventions(allowed: &BTreeSet<NodeId>) -> Vec<Assignments> {
    let nodes: Vec<NodeId> = allowed.iter().copied().collect();
    let mut out = Vec::new();
    for subset in 0u32..1 << nodes.len() {
        let members: Vec<NodeId> = nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| subset >> i & 1 == 1)
            .map(|(_, &n)| n)
            .collect();
        for values in 0u32..1 << members.len() {
            out.push(Assignments::from_pairs(
                members
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| (n, Value((values >> i & 1) as u8))),
            ));
        }
    }
    out
}

/// All unobserved-term assignments over the boolean domain.
pub fn all_boolean_assignments(g: &Graph) -> Vec<Assignments> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    (0u32..1 << nodes.len())
        .map(|mask| {
            Assignments::from_pairs(
                nodes
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| (n, Value((mask >> i & 1) as u8))),
            )
        })
        .collect()
}

/// The boolean value domain, shared by most suites.
pub fn bool_domain() -> ValueDomain {
    ValueDomain::boolean()
}

/// Independent check of every clean-connection clause, written directly
/// against the route requirements.
pub fn assert_clean_connection(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    z: &BTreeSet<NodeId>,
    cc: &CleanConnection,
) {
    assert_eq!(cc.path.start(), u);
    assert_eq!(cc.path.end(), v);
    cc.path.validate_in(g).unwrap();
    assert!(path_d_connected(g, &cc.path, z), "path must be d-connected");
    let roles = classify_interior(&cc.path, g).unwrap();
    let colliders: BTreeSet<NodeId> = roles
        .iter()
        .filter(|(_, &r)| r == NodeRole::Collider)
        .map(|(&n, _)| n)
        .collect();
    assert_eq!(
        colliders,
        cc.dmap.keys().copied().collect::<BTreeSet<_>>(),
        "descendant map must cover exactly the colliders"
    );
    let path_nodes: BTreeSet<NodeId> = cc.path.nodes().iter().copied().collect();
    let mut seen: Vec<BTreeSet<NodeId>> = Vec::new();
    for (&c, route) in &cc.dmap {
        let mut occupied: BTreeSet<NodeId> = BTreeSet::from([c]);
        if z.contains(&c) {
            assert!(route.interior.is_empty() && route.terminal == c);
        } else {
            let full: Vec<NodeId> = std::iter::once(c)
                .chain(route.interior.iter().copied())
                .chain(std::iter::once(route.terminal))
                .collect();
            for pair in full.windows(2) {
                assert!(g.has_edge(pair[0], pair[1]), "route must be directed");
            }
            assert_eq!(
                full.iter().copied().collect::<BTreeSet<_>>().len(),
                full.len(),
                "route must be acyclic"
            );
            assert!(z.contains(&route.terminal));
            assert!(route.interior.iter().all(|n| !z.contains(n)));
            assert!(route
                .interior
                .iter()
                .chain(std::iter::once(&route.terminal))
                .all(|n| !path_nodes.contains(n)));
            occupied.extend(full);
        }
        for prior in &seen {
            assert!(prior.is_disjoint(&occupied), "routes must be disjoint");
        }
        seen.push(occupied);
    }
}
