//! Immutable directed graphs with the algorithms the rest of the crate builds on:
//! construction and canonicalization, cycle detection, topological sorting,
//! undirected acyclic path enumeration, and ancestor/descendant queries.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on node count. Path enumeration is exponential, so graphs are
/// rejected at construction beyond this size unless a caller raises the limit.
pub const DEFAULT_NODE_LIMIT: usize = 64;

/// Dense nonnegative node identifier, assigned in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A directed graph over labeled nodes. Immutable after construction.
///
/// Canonical form: node ids follow label declaration order, duplicate edges are
/// dropped (keeping the first occurrence), and self-loops are rejected. The
/// stored edge order is the canonical order used by path enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a canonicalized graph from node labels and labeled edge pairs.
    pub fn build<S: AsRef<str>>(labels: &[S], edges: &[(S, S)]) -> Result<Graph> {
        Self::build_with_limit(labels, edges, DEFAULT_NODE_LIMIT)
    }

    /// As [`Graph::build`] with an explicit node-count limit.
    pub fn build_with_limit<S: AsRef<str>>(
        labels: &[S],
        edges: &[(S, S)],
        limit: usize,
    ) -> Result<Graph> {
        if labels.len() > limit {
            return Err(Error::NodeLimitExceeded {
                limit,
                actual: labels.len(),
            });
        }
        let mut names: Vec<String> = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            if names.iter().any(|n| n == l) {
                return Err(Error::DuplicateNode(l.to_string()));
            }
            names.push(l.to_string());
        }
        let lookup = |l: &str| -> Result<NodeId> {
            names
                .iter()
                .position(|n| n == l)
                .map(|i| NodeId(i as u32))
                .ok_or_else(|| Error::UnknownEndpoint(l.to_string()))
        };
        let mut edge_list: Vec<(NodeId, NodeId)> = Vec::with_capacity(edges.len());
        for (s, t) in edges {
            let (s, t) = (s.as_ref(), t.as_ref());
            if s == t {
                return Err(Error::SelfLoop(s.to_string()));
            }
            let e = (lookup(s)?, lookup(t)?);
            if !edge_list.contains(&e) {
                edge_list.push(e);
            }
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        for &(s, t) in &edge_list {
            parents[t.index()].push(s);
            children[s.index()].push(t);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Graph {
            labels: names,
            edges: edge_list,
            parents,
            children,
        })
    }

    /// Builds a graph over `n` anonymous nodes (labeled `n0`, `n1`, ...) from
    /// index pairs. Intended for generated graphs in sweeps and tests.
    pub fn from_indices(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let labels: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let named: Vec<(String, String)> = edges
            .iter()
            .map(|&(s, t)| {
                (
                    labels
                        .get(s as usize)
                        .cloned()
                        .unwrap_or_else(|| format!("n{s}")),
                    labels
                        .get(t as usize)
                        .cloned()
                        .unwrap_or_else(|| format!("n{t}")),
                )
            })
            .collect();
        Self::build(&labels, &named)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.nodes().collect()
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.labels.len()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| NodeId(i as u32))
    }

    /// Resolves a label, erroring with `UnknownNode` if absent.
    pub fn require(&self, label: &str) -> Result<NodeId> {
        self.node_by_label(label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn has_edge(&self, s: NodeId, t: NodeId) -> bool {
        self.contains(s) && self.children[s.index()].binary_search(&t).is_ok()
    }

    /// Adjacent in at least one direction.
    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Same labels and same edge set, ignoring edge declaration order.
    pub fn same_structure(&self, other: &Graph) -> bool {
        self.labels == other.labels
            && self.edges.iter().collect::<BTreeSet<_>>()
                == other.edges.iter().collect::<BTreeSet<_>>()
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("{v}")))
        }
    }

    fn check_subset(&self, set: &BTreeSet<NodeId>) -> Result<()> {
        for &v in set {
            self.check_node(v)?;
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<()> {
        if self.is_acyclic() {
            Ok(())
        } else {
            Err(Error::CyclicGraph)
        }
    }

    /// Parents of `v` in ascending id order. This is the canonical parent
    /// order: node functions consume parent values in exactly this order.
    pub fn parents(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check_node(v)?;
        Ok(&self.parents[v.index()])
    }

    pub fn children(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check_node(v)?;
        Ok(&self.children[v.index()])
    }

    /// True iff the graph has no directed cycle. Uses iterative three-color
    /// DFS, independent of `topological_sort` so the two can cross-check.
    pub fn is_acyclic(&self) -> bool {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.node_count();
        let mut color = vec![WHITE; n];
        for root in 0..n {
            if color[root] != WHITE {
                continue;
            }
            // (node, next child index to explore)
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            color[root] = GRAY;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&c) = self.children[v].get(*next) {
                    *next += 1;
                    match color[c.index()] {
                        GRAY => return false,
                        WHITE => {
                            color[c.index()] = GRAY;
                            stack.push((c.index(), 0));
                        }
                        _ => {}
                    }
                } else {
                    color[v] = BLACK;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Kahn's indegree algorithm, taking the smallest-id ready node first so
    /// the result is deterministic. `None` iff the graph is cyclic.
    pub fn topological_sort(&self) -> Option<Vec<NodeId>> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = (0..n).map(|v| self.parents[v].len()).collect();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (0..n).find(|&v| !placed[v] && indegree[v] == 0)?;
            placed[next] = true;
            order.push(NodeId(next as u32));
            for &c in &self.children[next] {
                indegree[c.index()] -= 1;
            }
        }
        Some(order)
    }

    /// All nodes reachable from `v` along directed edges, including `v`.
    pub fn descendants(&self, v: NodeId) -> Result<BTreeSet<NodeId>> {
        self.check_node(v)?;
        self.check_acyclic()?;
        Ok(self.reach(v, |w| &self.children[w.index()]))
    }

    /// All nodes with a directed path to `v`, including `v`.
    pub fn ancestors(&self, v: NodeId) -> Result<BTreeSet<NodeId>> {
        self.check_node(v)?;
        self.check_acyclic()?;
        Ok(self.reach(v, |w| &self.parents[w.index()]))
    }

    fn reach<'a, F>(&'a self, v: NodeId, step: F) -> BTreeSet<NodeId>
    where
        F: Fn(NodeId) -> &'a [NodeId],
    {
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut frontier = vec![v];
        seen.insert(v);
        while let Some(w) = frontier.pop() {
            for &x in step(w) {
                if seen.insert(x) {
                    frontier.push(x);
                }
            }
        }
        seen
    }

    /// The unblocked ancestors of `w` given a conditioning set: `w` itself plus
    /// every node `a ∉ Z` with a directed path `a → … → w` whose nodes other
    /// than `w` all avoid `Z`.
    pub fn unblocked_ancestors(
        &self,
        w: NodeId,
        conditioned: &BTreeSet<NodeId>,
    ) -> Result<BTreeSet<NodeId>> {
        self.check_node(w)?;
        self.check_subset(conditioned)?;
        self.check_acyclic()?;
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut frontier = vec![w];
        seen.insert(w);
        while let Some(x) = frontier.pop() {
            for &p in &self.parents[x.index()] {
                if !conditioned.contains(&p) && seen.insert(p) {
                    frontier.push(p);
                }
            }
        }
        Ok(seen)
    }

    /// A shortest directed path `from → … → to` whose nodes other than `to`
    /// avoid `conditioned`, as the full node sequence. `None` if none exists.
    pub fn directed_unblocked_path(
        &self,
        from: NodeId,
        to: NodeId,
        conditioned: &BTreeSet<NodeId>,
    ) -> Result<Option<Vec<NodeId>>> {
        self.check_node(from)?;
        self.check_node(to)?;
        if from == to {
            return Err(Error::SameEndpoints);
        }
        if conditioned.contains(&from) {
            return Ok(None);
        }
        let n = self.node_count();
        let mut pred: Vec<Option<NodeId>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from.index()] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &c in &self.children[x.index()] {
                if seen[c.index()] {
                    continue;
                }
                if c == to {
                    let mut rev = vec![to, x];
                    let mut cur = x;
                    while let Some(p) = pred[cur.index()] {
                        rev.push(p);
                        cur = p;
                    }
                    rev.reverse();
                    return Ok(Some(rev));
                }
                if !conditioned.contains(&c) {
                    seen[c.index()] = true;
                    pred[c.index()] = Some(x);
                    queue.push_back(c);
                }
            }
        }
        Ok(None)
    }

    /// Enumerates every acyclic undirected path from `u` to `v`, in the
    /// deterministic order produced by iterative edge extension: paths grow by
    /// one edge at a time, with edges applied in canonical graph order, and
    /// each pass extending the list produced so far.
    pub fn enumerate_paths(&self, u: NodeId, v: NodeId) -> Result<Vec<Path>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SameEndpoints);
        }
        let mut work: Vec<Vec<NodeId>> = Vec::new();
        let mut seen: BTreeSet<Vec<NodeId>> = BTreeSet::new();
        for &(s, t) in &self.edges {
            let ext = if s == u {
                Some(vec![u, t])
            } else if t == u {
                Some(vec![u, s])
            } else {
                None
            };
            if let Some(p) = ext {
                if seen.insert(p.clone()) {
                    work.push(p);
                }
            }
        }
        for _ in 0..self.node_count() {
            let mut grew = false;
            for &(s, t) in &self.edges {
                // Snapshot: extensions made by this edge are not re-extended
                // by the same edge within the pass.
                let len = work.len();
                for i in 0..len {
                    let last = *work[i].last().expect("paths are nonempty");
                    let next = if last == s {
                        t
                    } else if last == t {
                        s
                    } else {
                        continue;
                    };
                    if work[i].contains(&next) {
                        continue;
                    }
                    let mut extended = work[i].clone();
                    extended.push(next);
                    if seen.insert(extended.clone()) {
                        work.push(extended);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Ok(work
            .into_iter()
            .filter(|p| *p.last().expect("nonempty") == v)
            .map(|nodes| Path { nodes })
            .collect())
    }

    /// Renders a path (or any node sequence) with labels, for diagnostics.
    pub fn label_seq(&self, nodes: &[NodeId]) -> Vec<String> {
        nodes.iter().map(|&v| self.label(v).to_string()).collect()
    }
}

/// An acyclic undirected path: at least two distinct nodes, no repeats, each
/// consecutive pair adjacent in the underlying graph in at least one direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    /// Builds a path from start, end, and interior nodes, checking the
    /// graph-independent invariants (distinct endpoints, no repeated node).
    pub fn new(start: NodeId, end: NodeId, interior: Vec<NodeId>) -> Result<Path> {
        let mut nodes = Vec::with_capacity(interior.len() + 2);
        nodes.push(start);
        nodes.extend(interior);
        nodes.push(end);
        Path::from_nodes(nodes)
    }

    /// Builds a path from its full node sequence.
    pub fn from_nodes(nodes: Vec<NodeId>) -> Result<Path> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath("fewer than two nodes".into()));
        }
        if nodes.first() == nodes.last() {
            return Err(Error::SameEndpoints);
        }
        let distinct: BTreeSet<&NodeId> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::InvalidPath("repeated node".into()));
        }
        Ok(Path { nodes })
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().expect("paths are nonempty")
    }

    pub fn interior(&self) -> &[NodeId] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Full node sequence `[start] ++ interior ++ [end]`.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.nodes.iter().position(|&w| w == v)
    }

    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Path { nodes }
    }

    /// Checks that every consecutive pair is adjacent in `g`.
    pub fn validate_in(&self, g: &Graph) -> Result<()> {
        for &v in &self.nodes {
            if !g.contains(v) {
                return Err(Error::UnknownNode(format!("{v}")));
            }
        }
        for pair in self.nodes.windows(2) {
            if !g.adjacent(pair[0], pair[1]) {
                return Err(Error::InvalidPath(format!(
                    "{} and {} are not adjacent",
                    g.label(pair[0]),
                    g.label(pair[1])
                )));
            }
        }
        Ok(())
    }
}

/// Enumerates every labeled DAG on `n` nodes (all acyclic subsets of the
/// `n·(n-1)` possible directed edges). Feasible for `n ≤ 5`.
pub fn enumerate_dags(n: usize) -> Vec<Graph> {
    assert!(n <= 5, "DAG enumeration is exponential; capped at 5 nodes");
    let mut pairs = Vec::new();
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            if s != t {
                pairs.push((s, t));
            }
        }
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_indices(n, &edges).expect("generated edges are well-formed");
        if g.is_acyclic() {
            out.push(g);
        }
    }
    out
}
