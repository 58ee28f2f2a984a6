//! Core data model: weighted discrete graphs `(V, m; b)`, metric-graph
//! models `(V, E, |·|, μ, ν)` with loops and parallel edges, simple
//! combinatorial graphs, and piecewise-linear functions on metric graphs.
//!
//! All values are immutable after construction. Constructors reject
//! *malformed* input (unknown vertices, duplicate ids, non-finite numbers);
//! the *structural* invariants of the models (symmetry of `b`, vanishing
//! diagonal, positivity of `m`, connectivity) are checked by the
//! `validate_*` operations, which return a report instead of failing, so
//! that diagnostic tooling can inspect broken graphs.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::{Error, Result};

/// Opaque vertex identifier, unique within a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

/// Opaque metric-edge identifier; distinguishes parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(String);

impl EdgeId {
    pub fn new(id: impl Into<String>) -> Self {
        EdgeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}

/// One violated invariant, with the offending vertex or pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `b(u,v) != b(v,u)`.
    Asymmetry {
        u: VertexId,
        v: VertexId,
        b_uv: f64,
        b_vu: f64,
    },
    /// `b(v,v) > 0`.
    NonzeroDiagonal { v: VertexId, b: f64 },
    /// `m(v) <= 0`.
    NonpositiveMeasure { v: VertexId, m: f64 },
    /// The support graph splits into more than one component.
    Disconnected { components: usize },
    /// An edge quantity that must lie in `(0, ∞)` does not.
    NonpositiveEdgeQuantity {
        edge: EdgeId,
        field: &'static str,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetry { u, v, b_uv, b_vu } => {
                write!(f, "asymmetry at ({u},{v}): b(u,v)={b_uv}, b(v,u)={b_vu}")
            }
            Violation::NonzeroDiagonal { v, b } => {
                write!(f, "nonzero diagonal at {v}: b(v,v)={b}")
            }
            Violation::NonpositiveMeasure { v, m } => {
                write!(f, "nonpositive measure at {v}: m={m}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
            Violation::NonpositiveEdgeQuantity { edge, field, value } => {
                write!(f, "edge {edge}: {field}={value} not in (0, inf)")
            }
        }
    }
}

/// Result of `validate_discrete` / `validate_model`: empty means valid.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A weighted discrete graph `(V, m; b)`: vertex measure `m > 0` and a
/// symmetric edge weight `b` with vanishing diagonal.
///
/// `b` is stored as directed nonzero entries so that asymmetric (invalid)
/// data can be represented and then diagnosed by [`validate_discrete`].
#[derive(Clone, Debug)]
pub struct DiscreteGraph {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    m: Vec<f64>,
    /// Directed entries `(u, v) -> b(u, v)`, nonzero only.
    entries: BTreeMap<(usize, usize), f64>,
    /// Outgoing view: `adj[u] = [(v, b(u,v))]`, sorted by `v`.
    adj: Vec<Vec<(usize, f64)>>,
}

impl DiscreteGraph {
    /// Builds a graph from vertex measures and *unordered* edge weights;
    /// each `(u, v, w)` sets both `b(u,v)` and `b(v,u)`.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, f64)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let mut directed = Vec::new();
        let mut seen = HashSet::new();
        let edges: Vec<_> = edges.into_iter().collect();
        for (u, v, _) in &edges {
            let key = if u <= v {
                (u.clone(), v.clone())
            } else {
                (v.clone(), u.clone())
            };
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(format!("{u}-{v}")));
            }
        }
        for (u, v, w) in edges {
            if u != v {
                directed.push((u.clone(), v.clone(), w));
                directed.push((v, u, w));
            } else {
                directed.push((u, v, w));
            }
        }
        Self::from_directed_entries(vertices, directed)
    }

    /// Builds a graph from raw *directed* assignments `b(u,v) = w`.
    ///
    /// This deliberately admits asymmetric data; use [`validate_discrete`]
    /// to diagnose it. Entries with `w = 0` are dropped.
    pub fn from_directed_entries(
        vertices: impl IntoIterator<Item = (VertexId, f64)>,
        entries: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let mut ids = Vec::new();
        let mut m = Vec::new();
        let mut index = HashMap::new();
        for (id, mv) in vertices {
            if !mv.is_finite() {
                return Err(Error::NonFinite(format!("m({id})")));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateVertex(id.to_string()));
            }
            ids.push(id);
            m.push(mv);
        }
        if ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut map = BTreeMap::new();
        for (u, v, w) in entries {
            let ui = *index
                .get(&u)
                .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
            let vi = *index
                .get(&v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NonFinite(format!("b({u},{v}) = {w}")));
            }
            if w > 0.0 && map.insert((ui, vi), w).is_some() {
                return Err(Error::DuplicateEdge(format!("{u}->{v}")));
            }
        }
        let mut adj = vec![Vec::new(); ids.len()];
        for (&(u, v), &w) in &map {
            adj[u].push((v, w));
        }
        Ok(DiscreteGraph {
            vertices: ids,
            index,
            m,
            entries: map,
            adj,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexId {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Vertex measure `m(v)` by index.
    pub fn measure(&self, i: usize) -> f64 {
        self.m[i]
    }

    pub fn measures(&self) -> &[f64] {
        &self.m
    }

    /// `b(u, v)` as stored (directed lookup; 0 when absent).
    pub fn b(&self, u: usize, v: usize) -> f64 {
        self.entries.get(&(u, v)).copied().unwrap_or(0.0)
    }

    /// Outgoing neighbors `(v, b(u,v))` with positive weight, sorted by `v`.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    /// `W(v) = Σ_u b(v, u)`, the unnormalized weighted degree.
    pub fn weight_sum(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum()
    }

    /// Iterates directed entries `(u, v, b(u,v))` in index order.
    pub fn directed_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// Iterates unordered pairs `u < v` with `b(u,v) > 0` (valid graphs).
    pub fn edge_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries
            .iter()
            .filter(|(&(u, v), _)| u < v)
            .map(|(&(u, v), &w)| (u, v, w))
    }

    /// Looks up a vertex-keyed map into an index-aligned vector.
    pub fn aligned_values(&self, values: &BTreeMap<VertexId, f64>) -> Result<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| {
                values
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::MissingValue(v.to_string()))
            })
            .collect()
    }
}

/// Checks the structural invariants of `(V, m; b)`: symmetry, vanishing
/// diagonal, `m > 0`, connectivity of the support graph. Local finiteness
/// holds by construction for materialized graphs.
pub fn validate_discrete(g: &DiscreteGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, &mv) in g.m.iter().enumerate() {
        if mv <= 0.0 {
            report.violations.push(Violation::NonpositiveMeasure {
                v: g.vertices[i].clone(),
                m: mv,
            });
        }
    }
    for (&(u, v), &w) in &g.entries {
        if u == v {
            report.violations.push(Violation::NonzeroDiagonal {
                v: g.vertices[u].clone(),
                b: w,
            });
            continue;
        }
        // Report each asymmetric pair once.
        let back = g.b(v, u);
        if u < v && back != w {
            report.violations.push(Violation::Asymmetry {
                u: g.vertices[u].clone(),
                v: g.vertices[v].clone(),
                b_uv: w,
                b_vu: back,
            });
        }
        if u > v && back == 0.0 {
            report.violations.push(Violation::Asymmetry {
                u: g.vertices[v].clone(),
                v: g.vertices[u].clone(),
                b_uv: 0.0,
                b_vu: w,
            });
        }
    }
    let components = count_components(g.len(), |u| {
        g.adj[u].iter().map(|&(v, _)| v).collect::<Vec<_>>()
    });
    if components > 1 {
        report
            .violations
            .push(Violation::Disconnected { components });
    }
    report
}

fn count_components(n: usize, neighbors: impl Fn(usize) -> Vec<usize>) -> usize {
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    components
}

/// One edge of a metric-graph model. The ordered endpoints identify the
/// edge with the interval `[0, length]`; `initial == terminal` is a loop.
#[derive(Clone, Debug)]
pub struct MetricEdge {
    pub id: EdgeId,
    pub initial: VertexId,
    pub terminal: VertexId,
    pub length: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Internal resolved form of a metric edge: endpoint indices.
#[derive(Clone, Copy, Debug)]
pub struct EdgeRef {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    pub mu: f64,
    pub nu: f64,
}

impl EdgeRef {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// A model `(V, E, |·|, μ, ν)` of a weighted metric graph. Loops and
/// parallel edges are permitted; each edge carries an opaque id.
#[derive(Clone, Debug)]
pub struct MetricGraphModel {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<MetricEdge>,
    refs: Vec<EdgeRef>,
}

impl MetricGraphModel {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = MetricEdge>,
    ) -> Result<Self> {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        for id in vertices {
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateVertex(id.to_string()));
            }
            ids.push(id);
        }
        if ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut list = Vec::new();
        let mut refs = Vec::new();
        let mut edge_ids = HashSet::new();
        for e in edges {
            if !edge_ids.insert(e.id.clone()) {
                return Err(Error::DuplicateEdge(e.id.to_string()));
            }
            let u = *index
                .get(&e.initial)
                .ok_or_else(|| Error::UnknownVertex(e.initial.to_string()))?;
            let v = *index
                .get(&e.terminal)
                .ok_or_else(|| Error::UnknownVertex(e.terminal.to_string()))?;
            for (field, value) in [("length", e.length), ("mu", e.mu), ("nu", e.nu)] {
                if value.is_nan() {
                    return Err(Error::NonFinite(format!("{field} of edge {}", e.id)));
                }
            }
            refs.push(EdgeRef {
                u,
                v,
                length: e.length,
                mu: e.mu,
                nu: e.nu,
            });
            list.push(e);
        }
        Ok(MetricGraphModel {
            vertices: ids,
            index,
            edges: list,
            refs,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexId {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn edges(&self) -> &[MetricEdge] {
        &self.edges
    }

    pub fn edge_refs(&self) -> &[EdgeRef] {
        &self.refs
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Combinatorial degree: non-loop incidences plus twice the loops.
    pub fn degree(&self, v: &VertexId) -> Result<usize> {
        let i = self
            .index_of(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        Ok(self.degree_idx(i))
    }

    pub fn degree_idx(&self, i: usize) -> usize {
        self.refs
            .iter()
            .map(|e| {
                if e.is_loop() && e.u == i {
                    2
                } else if e.u == i || e.v == i {
                    1
                } else {
                    0
                }
            })
            .sum()
    }
}

/// Checks a metric-graph model: every edge quantity in `(0, ∞)` and the
/// topological graph connected. Loops and parallel edges are accepted.
pub fn validate_model(g: &MetricGraphModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (e, r) in g.edges.iter().zip(&g.refs) {
        for (field, value) in [("length", r.length), ("mu", r.mu), ("nu", r.nu)] {
            if !(value > 0.0 && value.is_finite()) {
                report.violations.push(Violation::NonpositiveEdgeQuantity {
                    edge: e.id.clone(),
                    field,
                    value,
                });
            }
        }
    }
    let mut adj = vec![Vec::new(); g.len()];
    for r in &g.refs {
        adj[r.u].push(r.v);
        adj[r.v].push(r.u);
    }
    let components = count_components(g.len(), |u| adj[u].clone());
    if components > 1 {
        report
            .violations
            .push(Violation::Disconnected { components });
    }
    report
}

/// A simple combinatorial graph: no loops, no parallel edges.
#[derive(Clone, Debug)]
pub struct SimpleGraph {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    neighbors: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        for id in vertices {
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateVertex(id.to_string()));
            }
            ids.push(id);
        }
        if ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut neighbors = vec![Vec::new(); ids.len()];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            let ui = *index
                .get(&u)
                .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
            let vi = *index
                .get(&v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            if ui == vi {
                return Err(Error::NotSimple(format!("loop at {u}")));
            }
            if !seen.insert((ui.min(vi), ui.max(vi))) {
                return Err(Error::NotSimple(format!("parallel edge {u}-{v}")));
            }
            neighbors[ui].push(vi);
            neighbors[vi].push(ui);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(SimpleGraph {
            vertices: ids,
            index,
            neighbors,
        })
    }

    /// The combinatorial graph underlying a metric model; errors when the
    /// model has loops or multiple edges.
    pub fn from_model(model: &MetricGraphModel) -> Result<Self> {
        let edges: Vec<_> = model
            .edge_refs()
            .iter()
            .map(|r| (model.vertex(r.u).clone(), model.vertex(r.v).clone()))
            .collect();
        SimpleGraph::new(model.vertices().to_vec(), edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors[u].len()
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (u, list) in self.neighbors.iter().enumerate() {
            for &v in list {
                if u < v {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    pub fn is_connected(&self) -> bool {
        count_components(self.len(), |u| self.neighbors[u].clone()) == 1
    }
}

/// The simple graph `G_b` of a weighted graph: `u ~ v` exactly when
/// `b(u,v) > 0` in either stored direction. No thresholding.
pub fn support_graph(g: &DiscreteGraph) -> SimpleGraph {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (u, v, _) in g.directed_entries() {
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((g.vertex(key.0).clone(), g.vertex(key.1).clone()));
        }
    }
    SimpleGraph::new(g.vertices().to_vec(), edges)
        .expect("support graph of a discrete graph is simple by construction")
}

/// A function on a metric graph, stored as vertex values plus per-edge
/// values at equally spaced nodes (length-2 rows are edgewise affine).
///
/// Rows run from the edge's initial to its terminal endpoint and are kept
/// aligned with the model's edge list by index.
#[derive(Clone, Debug)]
pub struct EdgewiseFunction {
    vertex_values: Vec<f64>,
    edge_values: Vec<Vec<f64>>,
}

impl EdgewiseFunction {
    /// Wraps raw data after shape checks. Continuity at vertices is *not*
    /// enforced here; operations that require it check and report.
    pub fn new(
        model: &MetricGraphModel,
        vertex_values: Vec<f64>,
        edge_values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if vertex_values.len() != model.len() {
            return Err(Error::Shape(format!(
                "expected {} vertex values, got {}",
                model.len(),
                vertex_values.len()
            )));
        }
        if edge_values.len() != model.edge_count() {
            return Err(Error::Shape(format!(
                "expected {} edge rows, got {}",
                model.edge_count(),
                edge_values.len()
            )));
        }
        for (i, row) in edge_values.iter().enumerate() {
            if row.len() < 2 {
                return Err(Error::Shape(format!("edge row {i} has fewer than 2 nodes")));
            }
        }
        Ok(EdgewiseFunction {
            vertex_values,
            edge_values,
        })
    }

    pub fn vertex_values(&self) -> &[f64] {
        &self.vertex_values
    }

    pub fn edge_values(&self) -> &[Vec<f64>] {
        &self.edge_values
    }

    /// Whether every edge trace equals the vertex value at both endpoints.
    pub fn is_continuous(&self, model: &MetricGraphModel) -> bool {
        model
            .edge_refs()
            .iter()
            .zip(&self.edge_values)
            .all(|(r, row)| {
                row[0] == self.vertex_values[r.u] && *row.last().unwrap() == self.vertex_values[r.v]
            })
    }

    /// The vertex trace `f|_V`, keyed by vertex id.
    pub fn vertex_trace(&self, model: &MetricGraphModel) -> BTreeMap<VertexId, f64> {
        model
            .vertices()
            .iter()
            .cloned()
            .zip(self.vertex_values.iter().copied())
            .collect()
    }
}
