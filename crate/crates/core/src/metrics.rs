//! Intrinsic and path metrics on both sides of the dictionary.
//!
//! On a weighted metric graph the intrinsic metric is the path metric of
//! the edge density `η = √(μ/ν)`; for vertex-to-vertex distances the
//! infimum over paths is attained along edge sequences, so Dijkstra on the
//! vertex skeleton with costs `η(e)` is exact. On a discrete graph every
//! positive weight `p` on the support of `b` generates the path metric
//! `ϱ_p(u,v) = inf Σ p(v_{k-1}, v_k)`, and a metric is *intrinsic* when
//! `Σ_u b(u,v) d(u,v)² ≤ m(v)` at every vertex.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correspondence::{eta_length, intrinsic_size, IntrinsicWeight};
use crate::graph::{DiscreteGraph, EdgeId, MetricGraphModel, VertexId};
use crate::{Error, Result};

/// Relative slack tolerance of the intrinsic-metric inequality.
pub const INTRINSIC_REL_TOL: f64 = 1e-12;

/// Which construction produced a vertex metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricSource {
    /// Path metric of `p ≡ 1` (combinatorial distance).
    Combinatorial,
    /// Path metric of a supplied positive weight.
    PathWeight,
    /// Restriction of the intrinsic metric `ϱ_η` of a metric graph.
    EtaRestriction,
}

/// A symmetric distance table over the vertex set of a finite graph.
#[derive(Clone, Debug)]
pub struct MetricOnVertices {
    source: MetricSource,
    vertices: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    dist: Vec<f64>, // n x n row-major
}

impl MetricOnVertices {
    fn new(source: MetricSource, vertices: Vec<VertexId>, dist: Vec<f64>) -> Self {
        let index = vertices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        MetricOnVertices {
            source,
            vertices,
            index,
            dist,
        }
    }

    pub fn source(&self) -> MetricSource {
        self.source
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn d(&self, u: &VertexId, v: &VertexId) -> Result<f64> {
        let i = *self
            .index
            .get(u)
            .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
        let j = *self
            .index
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        Ok(self.d_idx(i, j))
    }

    pub fn d_idx(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.vertices.len() + j]
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the cheapest first.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra over an adjacency list with nonnegative costs.
/// Unreachable vertices get `f64::INFINITY`.
pub(crate) fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        cost: 0.0,
        node: source,
    });
    while let Some(HeapItem { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                heap.push(HeapItem {
                    cost: c,
                    node: next,
                });
            }
        }
    }
    dist
}

/// The vertex skeleton of a model under η-costs: parallel edges keep
/// their minimum η, loops are dropped (they never shorten a path).
fn eta_skeleton(g: &MetricGraphModel) -> Vec<Vec<(usize, f64)>> {
    let mut best: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edge_refs() {
        if e.is_loop() {
            continue;
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        let eta = eta_length(e.length, e.mu, e.nu);
        best.entry(key)
            .and_modify(|m| *m = m.min(eta))
            .or_insert(eta);
    }
    let mut adj = vec![Vec::new(); g.len()];
    for (&(u, v), &eta) in &best {
        adj[u].push((v, eta));
        adj[v].push((u, eta));
    }
    adj
}

/// Intrinsic edge lengths `η(e) = |e|·√(μ(e)/ν(e))`, keyed by edge id.
pub fn eta_lengths(g: &MetricGraphModel) -> BTreeMap<EdgeId, f64> {
    g.edges()
        .iter()
        .map(|e| (e.id.clone(), eta_length(e.length, e.mu, e.nu)))
        .collect()
}

/// Single-source intrinsic distances `ϱ_η(source, ·)` on the vertex set.
pub fn intrinsic_metric_vertices(
    g: &MetricGraphModel,
    source: &VertexId,
) -> Result<BTreeMap<VertexId, f64>> {
    let s = g
        .index_of(source)
        .ok_or_else(|| Error::UnknownVertex(source.to_string()))?;
    let dist = dijkstra(&eta_skeleton(g), s);
    if dist.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidGraph("model is not connected".into()));
    }
    Ok(g.vertices().iter().cloned().zip(dist).collect())
}

/// Index-aligned single-source η-distances (internal fast path).
pub(crate) fn eta_distances_from(g: &MetricGraphModel, source: usize) -> Vec<f64> {
    dijkstra(&eta_skeleton(g), source)
}

fn all_pairs(adj: &[Vec<(usize, f64)>]) -> Result<Vec<f64>> {
    let n = adj.len();
    let mut table = vec![0.0; n * n];
    for s in 0..n {
        let dist = dijkstra(adj, s);
        if dist.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        table[s * n..(s + 1) * n].copy_from_slice(&dist);
    }
    // Sweeps from opposite endpoints sum the same path in different
    // orders and can disagree in the last ulp; take the smaller one so
    // the table is exactly symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = table[i * n + j].min(table[j * n + i]);
            table[i * n + j] = d;
            table[j * n + i] = d;
        }
    }
    Ok(table)
}

/// The path metric `ϱ_p` of a positive weight on the support of `b`.
pub fn path_metric(g: &DiscreteGraph, p: &IntrinsicWeight) -> Result<MetricOnVertices> {
    let mut adj = vec![Vec::new(); g.len()];
    for (u, v, _) in g.edge_pairs() {
        let w = p.p(u, v);
        if w <= 0.0 {
            return Err(Error::Shape(format!(
                "weight missing on pair ({}, {})",
                g.vertex(u),
                g.vertex(v)
            )));
        }
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let table = all_pairs(&adj)?;
    Ok(MetricOnVertices::new(
        MetricSource::PathWeight,
        g.vertices().to_vec(),
        table,
    ))
}

/// The combinatorial distance: path metric of `p ≡ 1`.
pub fn combinatorial_metric(g: &DiscreteGraph) -> Result<MetricOnVertices> {
    let mut adj = vec![Vec::new(); g.len()];
    for (u, v, _) in g.edge_pairs() {
        adj[u].push((v, 1.0));
        adj[v].push((u, 1.0));
    }
    let table = all_pairs(&adj)?;
    Ok(MetricOnVertices::new(
        MetricSource::Combinatorial,
        g.vertices().to_vec(),
        table,
    ))
}

/// The restriction `ϱ_V = ϱ_η|_{V×V}` of the intrinsic metric of a model.
pub fn restrict_metric(g: &MetricGraphModel) -> Result<MetricOnVertices> {
    let table = all_pairs(&eta_skeleton(g))?;
    Ok(MetricOnVertices::new(
        MetricSource::EtaRestriction,
        g.vertices().to_vec(),
        table,
    ))
}

/// Outcome of the intrinsic-metric inequality check.
#[derive(Clone, Debug)]
pub struct IntrinsicCheck {
    pub ok: bool,
    /// Vertex with the least slack `m(v) − Σ_u b(u,v) d(u,v)²`.
    pub worst_vertex: VertexId,
    pub min_slack: f64,
}

/// Checks `Σ_u b(u,v)·d(u,v)² ≤ m(v)` at every vertex of `g`.
pub fn is_intrinsic(g: &DiscreteGraph, d: &MetricOnVertices) -> Result<IntrinsicCheck> {
    let mut worst: Option<(usize, f64)> = None;
    let mut ok = true;
    for v in 0..g.len() {
        let mut sum = 0.0;
        for &(u, b) in g.neighbors(v) {
            let duv = d.d(g.vertex(u), g.vertex(v))?;
            sum += b * duv * duv;
        }
        let slack = g.measure(v) - sum;
        if slack < -INTRINSIC_REL_TOL * g.measure(v) {
            ok = false;
        }
        if worst.is_none_or(|(_, s)| slack < s) {
            worst = Some((v, slack));
        }
    }
    let (v, min_slack) = worst.ok_or(Error::EmptyGraph)?;
    Ok(IntrinsicCheck {
        ok,
        worst_vertex: g.vertex(v).clone(),
        min_slack,
    })
}

/// `sup { d(u,v) : b(u,v) > 0 }`, the jump size of a metric.
pub fn jump_size(g: &DiscreteGraph, d: &MetricOnVertices) -> Result<f64> {
    let mut sup = 0.0f64;
    for (u, v, _) in g.edge_pairs() {
        sup = sup.max(d.d(g.vertex(u), g.vertex(v))?);
    }
    Ok(sup)
}

/// Result of verifying that vertex inclusion is a quasi-isometry between
/// `(V, ϱ_V)` and `(G, ϱ_η)` with constants `a = 1`, `b = 0`, `R = η*`.
#[derive(Clone, Debug)]
pub struct QuasiIsometryReport {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub seed: u64,
    pub vertex_pairs_checked: usize,
    pub edge_points_checked: usize,
    pub violations: Vec<String>,
}

impl QuasiIsometryReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples vertex pairs (distance equality under restriction) and edge
/// points (the `R`-net property) and reports any violation.
pub fn quasi_isometry_check(
    g: &MetricGraphModel,
    samples: usize,
    seed: u64,
) -> Result<QuasiIsometryReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let restricted = restrict_metric(g)?;
    let r = intrinsic_size(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();

    let n = g.len();
    for _ in 0..samples {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let direct = eta_distances_from(g, u)[v];
        let tabled = restricted.d_idx(u, v);
        if direct != tabled {
            violations.push(format!(
                "distance mismatch at ({}, {}): {} vs {}",
                g.vertex(u),
                g.vertex(v),
                tabled,
                direct
            ));
        }
    }

    let edges = g.edge_refs();
    let mut points = 0;
    if !edges.is_empty() {
        for _ in 0..samples {
            let e = &edges[rng.random_range(0..edges.len())];
            let t: f64 = rng.random_range(0.0..=e.length);
            let density = (e.mu / e.nu).sqrt();
            let to_nearest = (t * density).min((e.length - t) * density);
            points += 1;
            if to_nearest > r {
                violations.push(format!(
                    "edge point at parameter {t} lies {to_nearest} from V, beyond R = {r}"
                ));
            }
        }
    }

    Ok(QuasiIsometryReport {
        a: 1.0,
        b: 0.0,
        r,
        seed,
        vertex_pairs_checked: samples,
        edge_points_checked: points,
        violations,
    })
}

/// A metric ball around a vertex: the vertices inside and its measure
/// (vertex-measure sum for discrete graphs, μ-measure with partial edges
/// for metric graphs).
#[derive(Clone, Debug)]
pub struct BallReport {
    pub center: VertexId,
    pub radius: f64,
    pub inside: Vec<VertexId>,
    pub measure: f64,
}

/// Ball in a discrete graph under a supplied vertex metric.
pub fn ball_discrete(
    g: &DiscreteGraph,
    d: &MetricOnVertices,
    center: &VertexId,
    r: f64,
) -> Result<BallReport> {
    if r < 0.0 {
        return Err(Error::InvalidParameter("radius must be nonnegative".into()));
    }
    g.index_of(center)
        .ok_or_else(|| Error::UnknownVertex(center.to_string()))?;
    let mut inside = Vec::new();
    let mut measure = 0.0;
    for (i, v) in g.vertices().iter().enumerate() {
        if d.d(center, v)? <= r {
            inside.push(v.clone());
            measure += g.measure(i);
        }
    }
    Ok(BallReport {
        center: center.clone(),
        radius: r,
        inside,
        measure,
    })
}

/// Ball `{x : ϱ_η(x, center) ≤ r}` in a metric graph. Each edge
/// contributes `μ(e)` times the Lebesgue length of the covered
/// sub-segments, covered from both endpoints and clipped to `|e|`.
pub fn ball_metric(g: &MetricGraphModel, center: &VertexId, r: f64) -> Result<BallReport> {
    let c = g
        .index_of(center)
        .ok_or_else(|| Error::UnknownVertex(center.to_string()))?;
    if r < 0.0 {
        return Err(Error::InvalidParameter("radius must be nonnegative".into()));
    }
    let dist = eta_distances_from(g, c);
    Ok(ball_metric_from_distances(g, &dist, center, r))
}

/// Ball measure from precomputed η-distances (shared with the volume
/// growth test, which sweeps many radii over one distance map).
pub(crate) fn ball_metric_from_distances(
    g: &MetricGraphModel,
    dist: &[f64],
    center: &VertexId,
    r: f64,
) -> BallReport {
    let mut measure = 0.0;
    for e in g.edge_refs() {
        let density = (e.mu / e.nu).sqrt(); // η-length per unit Lebesgue length
        let from_u = ((r - dist[e.u]).max(0.0)) / density;
        let from_v = ((r - dist[e.v]).max(0.0)) / density;
        let covered = (from_u + from_v).min(e.length);
        measure += e.mu * covered;
    }
    let inside = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|&(i, _)| dist[i] <= r)
        .map(|(_, v)| v.clone())
        .collect();
    BallReport {
        center: center.clone(),
        radius: r,
        inside,
        measure,
    }
}
