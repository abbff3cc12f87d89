//! On-disk JSON formats and their conversions to core types.
//!
//! Graphs: `{"nodes": ["u", "t", ...], "edges": [["u", "t"], ...]}` — node
//! order fixes id assignment.
//!
//! Worlds: `{"domain": "bool", "functions": {"w": {"parents": ["u", "v"],
//! "table": [0,1,1,0,1,0,0,1]}}}` — the table is indexed with the unobserved
//! term as the most significant bit, then parent values in canonical parent
//! order, most significant first; its length must be `2^(arity+1)`. The
//! listed parents define the world's own graph and must appear in canonical
//! order.
//!
//! Witnesses: `{"alpha": 0, "beta": 1, "sequence": [{"u": 0, ...}, ...],
//! "az": {"w": 1}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::semantics::{Assignments, GraphFunction, NodeFunction, Value, ValueDomain};
use crate::witness::WitnessSequence;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeFunctionDoc {
    pub parents: Vec<String>,
    pub table: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldDoc {
    pub domain: String,
    pub functions: BTreeMap<String, NodeFunctionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub alpha: u8,
    pub beta: u8,
    pub sequence: Vec<BTreeMap<String, u8>>,
    pub az: BTreeMap<String, u8>,
}

/// Output of the witness command: the constructed world plus the sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleDoc {
    pub world: WorldDoc,
    pub witness: WitnessDoc,
}

pub fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::MalformedJson(e.to_string()))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents serialize")
}

impl GraphDoc {
    pub fn parse(bytes: &[u8]) -> Result<Graph> {
        let doc: GraphDoc = parse_json(bytes)?;
        doc.to_graph()
    }

    pub fn to_graph(&self) -> Result<Graph> {
        let edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|e| (e[0].as_str(), e[1].as_str()))
            .collect();
        let labels: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        Graph::build(&labels, &edges)
    }

    pub fn from_graph(g: &Graph) -> GraphDoc {
        GraphDoc {
            nodes: g.nodes().map(|v| g.label(v).to_string()).collect(),
            edges: g
                .edges()
                .iter()
                .map(|&(s, t)| [g.label(s).to_string(), g.label(t).to_string()])
                .collect(),
        }
    }
}

fn value_in(domain: ValueDomain, raw: u8, what: &str) -> Result<Value> {
    let v = Value(raw);
    if domain.contains(v) {
        Ok(v)
    } else {
        Err(Error::SchemaViolation(format!(
            "{what}: value {raw} outside the {}-element domain",
            domain.size()
        )))
    }
}

impl WorldDoc {
    pub fn domain(&self) -> Result<ValueDomain> {
        match self.domain.as_str() {
            "bool" => Ok(ValueDomain::boolean()),
            other => Err(Error::SchemaViolation(format!(
                "domain: unsupported value {other:?} (only \"bool\" is serialized)"
            ))),
        }
    }

    /// Reconstructs the world's own graph and graph function, using `naming`
    /// for the node universe and id assignment. The world must cover exactly
    /// the named nodes; each function's parents define the world graph's
    /// edges and must be listed in canonical (ascending id) order.
    pub fn to_model(&self, naming: &Graph) -> Result<(Graph, GraphFunction)> {
        let domain = self.domain()?;
        for name in self.functions.keys() {
            if naming.node_by_label(name).is_none() {
                return Err(Error::SchemaViolation(format!(
                    "functions: unknown node {name:?}"
                )));
            }
        }
        let labels: Vec<String> = naming.nodes().map(|v| naming.label(v).to_string()).collect();
        let mut edges: Vec<(String, String)> = Vec::new();
        for (name, f) in &self.functions {
            for p in &f.parents {
                if naming.node_by_label(p).is_none() {
                    return Err(Error::SchemaViolation(format!(
                        "functions.{name}.parents: unknown node {p:?}"
                    )));
                }
                edges.push((p.clone(), name.clone()));
            }
        }
        let graph = Graph::build(&labels, &edges)?;
        let mut functions = GraphFunction::new();
        for v in graph.nodes() {
            let name = graph.label(v);
            let doc = self.functions.get(name).ok_or_else(|| {
                Error::SchemaViolation(format!("functions: missing entry for {name:?}"))
            })?;
            let canonical: Vec<&str> = graph
                .parents(v)?
                .iter()
                .map(|&p| graph.label(p))
                .collect();
            let listed: Vec<&str> = doc.parents.iter().map(String::as_str).collect();
            if listed != canonical {
                return Err(Error::SchemaViolation(format!(
                    "functions.{name}.parents: expected canonical order {canonical:?}, got {listed:?}"
                )));
            }
            let expected = domain.size().pow(doc.parents.len() as u32 + 1);
            if doc.table.len() != expected {
                return Err(Error::SchemaViolation(format!(
                    "functions.{name}.table: expected {expected} entries, got {}",
                    doc.table.len()
                )));
            }
            let values = doc
                .table
                .iter()
                .map(|&b| value_in(domain, b, &format!("functions.{name}.table")))
                .collect::<Result<Vec<Value>>>()?;
            functions.set(
                v,
                NodeFunction::Table {
                    domain_size: domain.size() as u8,
                    values,
                },
            );
        }
        Ok((graph, functions))
    }

    /// Serializes a graph function over `g` as explicit boolean tables.
    pub fn from_model(g: &Graph, functions: &GraphFunction, domain: ValueDomain) -> Result<WorldDoc> {
        if domain.size() != 2 {
            return Err(Error::SchemaViolation(
                "only the boolean domain is serialized".into(),
            ));
        }
        let mut docs = BTreeMap::new();
        for v in g.nodes() {
            let parents = g.parents(v)?;
            let nf = functions
                .get(v)
                .ok_or_else(|| Error::MissingNodeFunction(g.label(v).to_string()))?;
            let table = nf.to_table(domain, parents.len())?;
            docs.insert(
                g.label(v).to_string(),
                NodeFunctionDoc {
                    parents: parents.iter().map(|&p| g.label(p).to_string()).collect(),
                    table: table.into_iter().map(|val| val.0).collect(),
                },
            );
        }
        Ok(WorldDoc {
            domain: "bool".into(),
            functions: docs,
        })
    }
}

/// Converts a name-keyed assignment map, validating names and values.
pub fn assignments_from_map(
    g: &Graph,
    domain: ValueDomain,
    map: &BTreeMap<String, u8>,
    what: &str,
) -> Result<Assignments> {
    let mut out = Assignments::new();
    for (name, &raw) in map {
        let node = g
            .node_by_label(name)
            .ok_or_else(|| Error::SchemaViolation(format!("{what}: unknown node {name:?}")))?;
        out.bind(node, value_in(domain, raw, what)?);
    }
    Ok(out)
}

pub fn assignments_to_map(g: &Graph, a: &Assignments) -> BTreeMap<String, u8> {
    a.iter()
        .map(|(n, v)| (g.label(n).to_string(), v.0))
        .collect()
}

impl WitnessDoc {
    pub fn to_witness(
        &self,
        g: &Graph,
        domain: ValueDomain,
    ) -> Result<(WitnessSequence, Assignments)> {
        let sequence = self
            .sequence
            .iter()
            .enumerate()
            .map(|(i, m)| assignments_from_map(g, domain, m, &format!("sequence[{i}]")))
            .collect::<Result<Vec<Assignments>>>()?;
        let witness = WitnessSequence {
            alpha: value_in(domain, self.alpha, "alpha")?,
            beta: value_in(domain, self.beta, "beta")?,
            sequence,
        };
        let az = assignments_from_map(g, domain, &self.az, "az")?;
        Ok((witness, az))
    }

    pub fn from_witness(g: &Graph, witness: &WitnessSequence, az: &Assignments) -> WitnessDoc {
        WitnessDoc {
            alpha: witness.alpha.0,
            beta: witness.beta.0,
            sequence: witness
                .sequence
                .iter()
                .map(|u| assignments_to_map(g, u))
                .collect(),
            az: assignments_to_map(g, az),
        }
    }
}
