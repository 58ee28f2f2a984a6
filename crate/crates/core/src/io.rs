//! JSON interchange for discrete graphs and metric-graph models.
//!
//! Two tagged document kinds are accepted:
//!
//! ```json
//! {"type":"discrete","vertices":[{"id":"v0","m":1.0}],"edges":[{"u":"v0","v":"v1","b":1.0}]}
//! {"type":"metric","vertices":["v0","v1"],"edges":[{"id":"e0","u":"v0","v":"v1","length":1.0,"mu":1.0,"nu":1.0}]}
//! ```
//!
//! Unknown keys are rejected. Metric documents may carry an optional
//! `provenance` object (written by cable-system realization). Writers emit
//! keys in alphabetical order and numbers in shortest round-trip form, so
//! equal graphs serialize byte-identically.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::correspondence::{CableProvenance, CableSystem};
use crate::graph::{DiscreteGraph, EdgeId, MetricEdge, MetricGraphModel, VertexId};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum Document {
    Discrete {
        vertices: Vec<DiscreteVertexDoc>,
        edges: Vec<DiscreteEdgeDoc>,
    },
    Metric {
        vertices: Vec<String>,
        edges: Vec<MetricEdgeDoc>,
        #[serde(default)]
        provenance: Option<Value>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteVertexDoc {
    id: String,
    m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteEdgeDoc {
    u: String,
    v: String,
    b: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricEdgeDoc {
    id: String,
    u: String,
    v: String,
    length: f64,
    mu: f64,
    nu: f64,
}

/// A parsed graph document of either kind.
#[derive(Debug)]
pub enum GraphDocument {
    Discrete(DiscreteGraph),
    Metric {
        model: MetricGraphModel,
        provenance: Option<Value>,
    },
}

/// Parses either document kind; unknown keys and duplicate ids fail.
pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    match doc {
        Document::Discrete { vertices, edges } => {
            let g = DiscreteGraph::new(
                vertices.into_iter().map(|v| (VertexId::from(v.id), v.m)),
                edges
                    .into_iter()
                    .map(|e| (VertexId::from(e.u), VertexId::from(e.v), e.b)),
            )?;
            Ok(GraphDocument::Discrete(g))
        }
        Document::Metric {
            vertices,
            edges,
            provenance,
        } => {
            let model = MetricGraphModel::new(
                vertices.into_iter().map(VertexId::from),
                edges.into_iter().map(|e| MetricEdge {
                    id: EdgeId::new(e.id),
                    initial: VertexId::from(e.u),
                    terminal: VertexId::from(e.v),
                    length: e.length,
                    mu: e.mu,
                    nu: e.nu,
                }),
            )?;
            Ok(GraphDocument::Metric { model, provenance })
        }
    }
}

/// Parses a document that must be a discrete graph.
pub fn parse_discrete(text: &str) -> Result<DiscreteGraph> {
    match parse_graph(text)? {
        GraphDocument::Discrete(g) => Ok(g),
        GraphDocument::Metric { .. } => Err(Error::Json(
            "expected a discrete graph, got a metric model".into(),
        )),
    }
}

/// Parses a document that must be a metric model.
pub fn parse_model(text: &str) -> Result<MetricGraphModel> {
    match parse_graph(text)? {
        GraphDocument::Metric { model, .. } => Ok(model),
        GraphDocument::Discrete(_) => Err(Error::Json(
            "expected a metric model, got a discrete graph".into(),
        )),
    }
}

/// Serializes a discrete graph; edges are emitted once per unordered pair
/// in vertex-index order.
pub fn discrete_to_json(g: &DiscreteGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, id)| json!({"id": id.as_str(), "m": g.measure(i)}))
        .collect();
    let edges: Vec<Value> = g
        .edge_pairs()
        .map(|(u, v, w)| json!({"u": g.vertex(u).as_str(), "v": g.vertex(v).as_str(), "b": w}))
        .collect();
    json!({"type": "discrete", "vertices": vertices, "edges": edges})
}

/// Serializes a metric model, optionally with a provenance object.
pub fn model_to_json(model: &MetricGraphModel, provenance: Option<&Value>) -> Value {
    let vertices: Vec<Value> = model
        .vertices()
        .iter()
        .map(|v| Value::String(v.as_str().to_owned()))
        .collect();
    let edges: Vec<Value> = model
        .edges()
        .iter()
        .map(|e| {
            json!({
                "id": e.id.as_str(),
                "u": e.initial.as_str(),
                "v": e.terminal.as_str(),
                "length": e.length,
                "mu": e.mu,
                "nu": e.nu,
            })
        })
        .collect();
    let mut doc = json!({"type": "metric", "vertices": vertices, "edges": edges});
    if let Some(p) = provenance {
        doc.as_object_mut()
            .unwrap()
            .insert("provenance".into(), p.clone());
    }
    doc
}

/// Serializes a cable system as a metric model with provenance.
pub fn cable_system_to_json(cs: &CableSystem) -> Value {
    model_to_json(&cs.model, Some(&provenance_to_json(&cs.provenance)))
}

fn provenance_to_json(p: &CableProvenance) -> Value {
    let loops: Vec<Value> = p
        .loops_at
        .iter()
        .map(|(v, d)| json!({"vertex": v.as_str(), "deficit": d}))
        .collect();
    let weight: Vec<Value> = p
        .weight
        .iter()
        .map(|(u, v, w)| json!({"u": u.as_str(), "v": v.as_str(), "p": w}))
        .collect();
    json!({"construction": p.construction, "loops": loops, "weight": weight})
}
