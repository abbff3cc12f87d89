//! Deterministic functional semantics for causal DAGs: finite value domains,
//! per-node functions over an unobserved term and parent values, and
//! evaluation in topological order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// An element of a finite value domain, identified by its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(pub u8);

/// A finite ordered value domain with at least two elements. Elements are
/// opaque: callers attach meaning to the indices `0 .. size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueDomain {
    size: u8,
}

impl ValueDomain {
    pub fn new(size: u8) -> Result<ValueDomain> {
        if size < 2 {
            return Err(Error::DomainTooSmall);
        }
        Ok(ValueDomain { size })
    }

    /// The two-element domain used by all serialized formats.
    pub fn boolean() -> ValueDomain {
        ValueDomain { size: 2 }
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn contains(&self, v: Value) -> bool {
        v.0 < self.size
    }

    pub fn values(&self) -> impl Iterator<Item = Value> {
        (0..self.size).map(Value)
    }

    /// The first domain element distinct from `x`, in domain order.
    pub fn first_other(&self, x: Value) -> Value {
        if x.0 == 0 {
            Value(1)
        } else {
            Value(0)
        }
    }
}

/// A total function from an unobserved term and parent values to a value.
///
/// Parent values are always consumed in canonical parent order (ascending node
/// id). Tables are indexed with the unobserved term as the most significant
/// digit, followed by the parent values, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeFunction {
    /// Emit the unobserved term, ignoring parents.
    CopyUnobserved,
    /// Emit the parent at the given index in canonical parent order.
    CopyParent(usize),
    /// Compare the parents at two indices: emit `equal` when they agree and
    /// `differ` otherwise.
    EquateParents {
        left: usize,
        right: usize,
        equal: Value,
        differ: Value,
    },
    /// Emit a fixed value regardless of inputs.
    Constant(Value),
    /// Explicit truth table over a domain of the given size.
    Table { domain_size: u8, values: Vec<Value> },
}

impl NodeFunction {
    /// Materializes any rule as a table over `domain` at a fixed arity.
    pub fn tabulate<F>(domain: ValueDomain, arity: usize, rule: F) -> Result<NodeFunction>
    where
        F: Fn(Value, &[Value]) -> Value,
    {
        let size = domain.size();
        let mut entries: usize = 1;
        for _ in 0..=arity {
            entries = entries
                .checked_mul(size)
                .filter(|&e| e <= 1 << 20)
                .ok_or_else(|| Error::ArityMismatch("table too large".into()))?;
        }
        let mut values = Vec::with_capacity(entries);
        let mut digits = vec![Value(0); arity + 1];
        for idx in 0..entries {
            let mut rem = idx;
            for d in (0..=arity).rev() {
                digits[d] = Value((rem % size) as u8);
                rem /= size;
            }
            let out = rule(digits[0], &digits[1..]);
            if !domain.contains(out) {
                return Err(Error::DomainMismatch("tabulated rule".into()));
            }
            values.push(out);
        }
        Ok(NodeFunction::Table {
            domain_size: domain.size,
            values,
        })
    }

    /// Converts this function to an explicit table at the given arity.
    pub fn to_table(&self, domain: ValueDomain, arity: usize) -> Result<Vec<Value>> {
        let tabled = NodeFunction::tabulate(domain, arity, |u, ps| {
            self.apply(u, ps).unwrap_or(Value(0))
        })?;
        // Reject rules that are not total at this arity before handing out a
        // table that silently papered over the failure.
        self.check_arity(arity)?;
        match tabled {
            NodeFunction::Table { values, .. } => Ok(values),
            _ => unreachable!(),
        }
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        let ok = match self {
            NodeFunction::CopyUnobserved | NodeFunction::Constant(_) => true,
            NodeFunction::CopyParent(i) => *i < arity,
            NodeFunction::EquateParents { left, right, .. } => *left < arity && *right < arity,
            NodeFunction::Table { domain_size, values } => {
                let size = *domain_size as usize;
                let mut entries: usize = 1;
                for _ in 0..=arity {
                    match entries.checked_mul(size) {
                        Some(e) => entries = e,
                        None => return Err(Error::ArityMismatch("table too large".into())),
                    }
                }
                values.len() == entries
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ArityMismatch("node function".into()))
        }
    }

    /// Applies the function to an unobserved term and parent values.
    pub fn apply(&self, unobserved: Value, parents: &[Value]) -> Result<Value> {
        match self {
            NodeFunction::CopyUnobserved => Ok(unobserved),
            NodeFunction::CopyParent(i) => parents
                .get(*i)
                .copied()
                .ok_or_else(|| Error::ArityMismatch("parent index out of range".into())),
            NodeFunction::EquateParents {
                left,
                right,
                equal,
                differ,
            } => {
                let l = parents
                    .get(*left)
                    .ok_or_else(|| Error::ArityMismatch("parent index out of range".into()))?;
                let r = parents
                    .get(*right)
                    .ok_or_else(|| Error::ArityMismatch("parent index out of range".into()))?;
                Ok(if l == r { *equal } else { *differ })
            }
            NodeFunction::Constant(v) => Ok(*v),
            NodeFunction::Table { domain_size, values } => {
                let size = *domain_size as usize;
                let expected = size
                    .checked_pow(parents.len() as u32 + 1)
                    .ok_or_else(|| Error::ArityMismatch("table too large".into()))?;
                if values.len() != expected {
                    return Err(Error::ArityMismatch("table length".into()));
                }
                if unobserved.0 as usize >= size {
                    return Err(Error::DomainMismatch("unobserved term".into()));
                }
                let mut idx = unobserved.0 as usize;
                for p in parents {
                    if p.0 as usize >= size {
                        return Err(Error::DomainMismatch("parent value".into()));
                    }
                    idx = idx * size + p.0 as usize;
                }
                Ok(values[idx])
            }
        }
    }
}

/// Assignment of node functions to every node of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphFunction {
    per_node: BTreeMap<NodeId, NodeFunction>,
}

impl GraphFunction {
    pub fn new() -> GraphFunction {
        GraphFunction::default()
    }

    pub fn set(&mut self, v: NodeId, f: NodeFunction) {
        self.per_node.insert(v, f);
    }

    pub fn get(&self, v: NodeId) -> Option<&NodeFunction> {
        self.per_node.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &NodeFunction)> {
        self.per_node.iter().map(|(&v, f)| (v, f))
    }

    fn require(&self, g: &Graph, v: NodeId) -> Result<&NodeFunction> {
        self.per_node
            .get(&v)
            .ok_or_else(|| Error::MissingNodeFunction(g.label(v).to_string()))
    }

    /// Checks totality and arity compatibility against a graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        for v in g.nodes() {
            let f = self.require(g, v)?;
            f.check_arity(g.parents(v)?.len())
                .map_err(|_| Error::ArityMismatch(g.label(v).to_string()))?;
        }
        Ok(())
    }
}

/// Partial map from nodes to values; canonicalized, at most one binding per
/// node. Plays the role of both unobserved-term assignments and conditioning
/// assignments.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Assignments {
    bindings: BTreeMap<NodeId, Value>,
}

impl Assignments {
    pub fn new() -> Assignments {
        Assignments::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (NodeId, Value)>>(pairs: I) -> Assignments {
        Assignments {
            bindings: pairs.into_iter().collect(),
        }
    }

    /// Binds every node of `g` to the same value.
    pub fn uniform(g: &Graph, v: Value) -> Assignments {
        Assignments {
            bindings: g.nodes().map(|n| (n, v)).collect(),
        }
    }

    pub fn bind(&mut self, node: NodeId, v: Value) {
        self.bindings.insert(node, v);
    }

    pub fn get(&self, node: NodeId) -> Option<Value> {
        self.bindings.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn domain(&self) -> std::collections::BTreeSet<NodeId> {
        self.bindings.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Value)> + '_ {
        self.bindings.iter().map(|(&n, &v)| (n, v))
    }

    /// A copy with `delta`'s bindings taking precedence.
    pub fn overridden(&self, delta: &Assignments) -> Assignments {
        let mut out = self.clone();
        for (n, v) in delta.iter() {
            out.bind(n, v);
        }
        out
    }

    /// Nodes bound in either assignment whose values disagree (a binding
    /// missing on one side counts as a disagreement).
    pub fn differing_nodes(&self, other: &Assignments) -> std::collections::BTreeSet<NodeId> {
        let mut out = std::collections::BTreeSet::new();
        for (n, v) in self.iter() {
            if other.get(n) != Some(v) {
                out.insert(n);
            }
        }
        for (n, v) in other.iter() {
            if self.get(n) != Some(v) {
                out.insert(n);
            }
        }
        out
    }
}

/// Evaluates every node of `g` under `functions` and unobserved terms `u`,
/// visiting nodes in topological order. The result is independent of which
/// valid topological order is used.
pub fn evaluate(g: &Graph, functions: &GraphFunction, u: &Assignments) -> Result<Assignments> {
    let order = g.topological_sort().ok_or(Error::CyclicGraph)?;
    for v in g.nodes() {
        if u.get(v).is_none() {
            return Err(Error::MissingUnobservedTerm(g.label(v).to_string()));
        }
    }
    let mut out = Assignments::new();
    for v in order {
        let parents = g.parents(v)?;
        let pvals: Vec<Value> = parents
            .iter()
            .map(|&p| out.get(p).expect("parents precede children"))
            .collect();
        let f = functions.require(g, v)?;
        let val = f.apply(u.get(v).expect("checked above"), &pvals).map_err(|e| match e {
            Error::ArityMismatch(_) => Error::ArityMismatch(g.label(v).to_string()),
            Error::DomainMismatch(_) => Error::DomainMismatch(g.label(v).to_string()),
            other => other,
        })?;
        out.bind(v, val);
    }
    Ok(out)
}

/// The value of a single node under `functions` and `u`.
pub fn node_value(
    g: &Graph,
    functions: &GraphFunction,
    u: &Assignments,
    v: NodeId,
) -> Result<Value> {
    if !g.contains(v) {
        return Err(Error::UnknownNode(format!("{v}")));
    }
    Ok(evaluate(g, functions, u)?
        .get(v)
        .expect("evaluate is total"))
}

/// True iff every conditioned node evaluates to its assigned value.
pub fn properly_conditions(
    g: &Graph,
    functions: &GraphFunction,
    u: &Assignments,
    conditioning: &Assignments,
) -> Result<bool> {
    for (z, _) in conditioning.iter() {
        if !g.contains(z) {
            return Err(Error::UnknownNode(format!("{z}")));
        }
    }
    let vals = evaluate(g, functions, u)?;
    Ok(conditioning
        .iter()
        .all(|(z, want)| vals.get(z) == Some(want)))
}
