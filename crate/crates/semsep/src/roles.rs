//! Classification of interior path nodes and path-direction bookkeeping.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Path};

/// Structural role of an interior node, determined by the orientation of its
/// two path edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Chain through the node: `a → b → c` or `c → b → a`.
    Mediator,
    /// Both edges leave the node: `a ← b → c`.
    Confounder,
    /// Both edges enter the node: `a → b ← c`.
    Collider,
}

/// Orientation of the edge leaving a node toward its successor on a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

fn validate(p: &Path, g: &Graph) -> Result<()> {
    p.validate_in(g)?;
    if !g.is_acyclic() {
        return Err(Error::CyclicGraph);
    }
    Ok(())
}

/// Assigns every interior node of `p` its unique role. Endpoints are excluded.
pub fn classify_interior(p: &Path, g: &Graph) -> Result<BTreeMap<NodeId, NodeRole>> {
    validate(p, g)?;
    let nodes = p.nodes();
    let mut roles = BTreeMap::new();
    for k in 1..nodes.len() - 1 {
        let (prev, me, next) = (nodes[k - 1], nodes[k], nodes[k + 1]);
        let into_left = g.has_edge(prev, me);
        let into_right = g.has_edge(next, me);
        let role = match (into_left, into_right) {
            (true, true) => NodeRole::Collider,
            (false, false) => NodeRole::Confounder,
            _ => NodeRole::Mediator,
        };
        roles.insert(me, role);
    }
    Ok(roles)
}

/// Direction of the path immediately after `w`: `None` if `w` is absent from
/// the path or is its final node.
pub fn dir_after(p: &Path, g: &Graph, w: NodeId) -> Result<Option<Direction>> {
    validate(p, g)?;
    let nodes = p.nodes();
    match nodes.iter().position(|&x| x == w) {
        None => Ok(None),
        Some(k) if k == nodes.len() - 1 => Ok(None),
        Some(k) => {
            let next = nodes[k + 1];
            if g.has_edge(w, next) {
                Ok(Some(Direction::Forward))
            } else {
                Ok(Some(Direction::Backward))
            }
        }
    }
}

/// True iff every consecutive pair `(a, b)` along `p` is a directed edge.
pub fn is_directed_path(p: &Path, g: &Graph) -> Result<bool> {
    validate(p, g)?;
    Ok(p.nodes()
        .windows(2)
        .all(|pair| g.has_edge(pair[0], pair[1])))
}
