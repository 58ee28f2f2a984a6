//! The discrete–continuous dictionary.
//!
//! A metric model `(V, E, |·|, μ, ν)` induces vertex data
//!
//! - `b(u,v) = Σ_{e between u≠v} ν(e)/|e|` (loops contribute nothing),
//! - `m(v) = Σ over oriented incidences of |e|·μ(e)` (loops count twice),
//!
//! and conversely every `(V, m; b)` with an intrinsic weight `p` is
//! realized by a cable system: one edge of length `p(u,v)` with
//! `μ = ν = b(u,v)·p(u,v)` per neighbor pair, plus a loop of length `1/2`
//! carrying the mass deficit `δ(v) = m(v) − Σ_u b(u,v)p(u,v)²` wherever it
//! is positive. Discretizing the result reproduces `(m, b)` exactly.

use std::collections::BTreeMap;

use crate::graph::{
    validate_discrete, validate_model, DiscreteGraph, EdgeId, EdgewiseFunction, MetricEdge,
    MetricGraphModel, VertexId,
};
use crate::{Error, Result};

/// Deficits within this relative tolerance of zero get no loop; more
/// negative deficits are a hard error.
pub const DEFICIT_REL_TOL: f64 = 1e-12;

/// A symmetric edge weight `p` supported exactly where `b > 0`, intended
/// to satisfy `Σ_u b(u,v) p(u,v)² ≤ m(v)`. The inequality itself is
/// checked by [`realize`] (and reported by `metrics::is_intrinsic`), not
/// at construction, so that violating weights can be diagnosed.
#[derive(Clone, Debug)]
pub struct IntrinsicWeight {
    /// Keys are index pairs `u < v` of the graph the weight was built for.
    entries: BTreeMap<(usize, usize), f64>,
}

impl IntrinsicWeight {
    /// Builds a weight from per-pair values; the support must coincide
    /// with `{b > 0}` and every value must be positive and finite.
    pub fn new(g: &DiscreteGraph, values: &BTreeMap<(VertexId, VertexId), f64>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for ((u, v), &p) in values {
            let ui = g
                .index_of(u)
                .ok_or_else(|| Error::UnknownVertex(u.to_string()))?;
            let vi = g
                .index_of(v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::NonFinite(format!("p({u},{v}) = {p}")));
            }
            if g.b(ui, vi) <= 0.0 {
                return Err(Error::Shape(format!("p({u},{v}) set where b = 0")));
            }
            if entries.insert((ui.min(vi), ui.max(vi)), p).is_some() {
                return Err(Error::DuplicateEdge(format!("p({u},{v}) set twice")));
            }
        }
        let support: usize = g.edge_pairs().count();
        if entries.len() != support {
            return Err(Error::Shape(format!(
                "weight covers {} pairs, support of b has {}",
                entries.len(),
                support
            )));
        }
        Ok(IntrinsicWeight { entries })
    }

    pub(crate) fn from_entries(entries: BTreeMap<(usize, usize), f64>) -> Self {
        IntrinsicWeight { entries }
    }

    /// `p(u, v)`; 0 where `b` vanishes.
    pub fn p(&self, u: usize, v: usize) -> f64 {
        self.entries
            .get(&(u.min(v), u.max(v)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(u, v), &p)| (u, v, p))
    }

    /// Largest value of `p` over the support (the jump size of its path
    /// metric is at most this).
    pub fn max_value(&self) -> f64 {
        self.entries.values().fold(0.0, |a, &p| a.max(p))
    }
}

fn require_valid_model(g: &MetricGraphModel) -> Result<()> {
    let report = validate_model(g);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidGraph(v.to_string())),
    }
}

fn require_valid_discrete(g: &DiscreteGraph) -> Result<()> {
    let report = validate_discrete(g);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidGraph(v.to_string())),
    }
}

/// The vertex data `(V, m; b)` induced by a metric model.
pub fn discretize(g: &MetricGraphModel) -> Result<DiscreteGraph> {
    require_valid_model(g)?;
    let mut m = vec![0.0; g.len()];
    let mut b: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edge_refs() {
        // Oriented incidences: a loop is both outgoing and incoming.
        m[e.u] += e.length * e.mu;
        m[e.v] += e.length * e.mu;
        if !e.is_loop() {
            let key = (e.u.min(e.v), e.u.max(e.v));
            *b.entry(key).or_insert(0.0) += e.nu / e.length;
        }
    }
    DiscreteGraph::new(
        g.vertices().iter().cloned().zip(m),
        b.into_iter()
            .map(|((u, v), w)| (g.vertex(u).clone(), g.vertex(v).clone(), w)),
    )
}

/// Intrinsic length of one edge: `η(e) = |e|·√(μ(e)/ν(e))`.
pub fn eta_length(length: f64, mu: f64, nu: f64) -> f64 {
    length * (mu / nu).sqrt()
}

/// The intrinsic size `η*(E) = sup_e η(e)`; finite for finite models.
pub fn intrinsic_size(g: &MetricGraphModel) -> f64 {
    g.edge_refs()
        .iter()
        .map(|e| eta_length(e.length, e.mu, e.nu))
        .fold(0.0, f64::max)
}

/// The canonical intrinsic weight `p(u,v) = min(m(u)/W(u), m(v)/W(v))^{1/2}`
/// with `W(v) = Σ_u b(u,v)`. Then `Σ_u b(u,v)p(u,v)² ≤ m(v)` holds at every
/// vertex, with equality exactly when the minimum is attained at `v` on all
/// incident edges.
pub fn default_intrinsic_weight(g: &DiscreteGraph) -> Result<IntrinsicWeight> {
    require_valid_discrete(g)?;
    let ratios: Vec<f64> = (0..g.len())
        .map(|v| {
            let w = g.weight_sum(v);
            if w > 0.0 {
                g.measure(v) / w
            } else {
                f64::INFINITY // single-vertex graph: no edges to weight
            }
        })
        .collect();
    let mut entries = BTreeMap::new();
    for (u, v, _) in g.edge_pairs() {
        entries.insert((u, v), ratios[u].min(ratios[v]).sqrt());
    }
    Ok(IntrinsicWeight::from_entries(entries))
}

/// A realized cable system: the model plus how it was built.
#[derive(Clone, Debug)]
pub struct CableSystem {
    pub model: MetricGraphModel,
    pub provenance: CableProvenance,
}

/// Records the construction choices so that a cable system is auditable:
/// which vertices received deficit loops and which weight was used.
#[derive(Clone, Debug)]
pub struct CableProvenance {
    pub construction: &'static str,
    pub loops_at: Vec<(VertexId, f64)>,
    pub weight: Vec<(VertexId, VertexId, f64)>,
}

/// Realizes `(V, m; b)` as a cable system for a given intrinsic weight.
///
/// Non-loop edges get `|e| = p(u,v)` and `μ = ν = b(u,v)·p(u,v)`, so their
/// intrinsic length is `p(u,v)` and they reproduce `b` under
/// [`discretize`]. The vertex-mass deficit is carried by a loop of length
/// `1/2` with `μ = ν = δ(v)` (intrinsic length `1/2`), which leaves `b`
/// untouched. Negative deficits beyond tolerance reject the weight.
pub fn realize(g: &DiscreteGraph, p: &IntrinsicWeight) -> Result<CableSystem> {
    require_valid_discrete(g)?;
    let support: usize = g.edge_pairs().count();
    if p.entries.len() != support {
        return Err(Error::Shape(format!(
            "weight covers {} pairs, support of b has {}",
            p.entries.len(),
            support
        )));
    }
    let mut edges = Vec::new();
    let mut mass = vec![0.0; g.len()];
    let mut weight_used = Vec::new();
    for (i, (u, v, b)) in g.edge_pairs().enumerate() {
        let puv = p.p(u, v);
        if puv <= 0.0 {
            return Err(Error::Shape(format!(
                "weight missing on pair ({}, {})",
                g.vertex(u),
                g.vertex(v)
            )));
        }
        edges.push(MetricEdge {
            id: EdgeId::new(format!("e{i}")),
            initial: g.vertex(u).clone(),
            terminal: g.vertex(v).clone(),
            length: puv,
            mu: b * puv,
            nu: b * puv,
        });
        mass[u] += b * puv * puv;
        mass[v] += b * puv * puv;
        weight_used.push((g.vertex(u).clone(), g.vertex(v).clone(), puv));
    }
    let mut loops_at = Vec::new();
    for (v, &used) in mass.iter().enumerate() {
        let deficit = g.measure(v) - used;
        let tol = DEFICIT_REL_TOL * g.measure(v);
        if deficit < -tol {
            return Err(Error::NotIntrinsic {
                vertex: g.vertex(v).to_string(),
                deficit,
            });
        }
        if deficit > tol {
            edges.push(MetricEdge {
                id: EdgeId::new(format!("loop{v}")),
                initial: g.vertex(v).clone(),
                terminal: g.vertex(v).clone(),
                length: 0.5,
                mu: deficit,
                nu: deficit,
            });
            loops_at.push((g.vertex(v).clone(), deficit));
        }
    }
    let model = MetricGraphModel::new(g.vertices().to_vec(), edges)?;
    Ok(CableSystem {
        model,
        provenance: CableProvenance {
            construction: "edges |e|=p, mu=nu=b*p; deficit loops of length 1/2",
            loops_at,
            weight: weight_used,
        },
    })
}

/// The vertex trace `f|_V` of a function on a metric graph.
pub fn restrict_to_vertices(
    model: &MetricGraphModel,
    f: &EdgewiseFunction,
) -> BTreeMap<VertexId, f64> {
    f.vertex_trace(model)
}

/// The unique continuous edgewise-affine function with a given vertex
/// trace; on a loop the interpolation of equal endpoint values is the
/// constant.
pub fn extend_affine(
    model: &MetricGraphModel,
    fv: &BTreeMap<VertexId, f64>,
) -> Result<EdgewiseFunction> {
    let values: Vec<f64> = model
        .vertices()
        .iter()
        .map(|v| {
            fv.get(v)
                .copied()
                .ok_or_else(|| Error::MissingValue(v.to_string()))
        })
        .collect::<Result<_>>()?;
    let rows = model
        .edge_refs()
        .iter()
        .map(|e| vec![values[e.u], values[e.v]])
        .collect();
    EdgewiseFunction::new(model, values, rows)
}

/// The Kirchhoff defect `Σ_{e at v} ν(e)·(inward derivative)` at every
/// vertex; zero everywhere iff `f` satisfies the Kirchhoff conditions.
///
/// For the affine extension of a vertex function this equals
/// `Σ (ν(e)/|e|)(fv(u) − fv(v)) = −m(v)·(L fv)(v)` with `(m, b)` from
/// [`discretize`].
pub fn kirchhoff_defect(
    model: &MetricGraphModel,
    f: &EdgewiseFunction,
) -> Result<BTreeMap<VertexId, f64>> {
    let defect = kirchhoff_defect_vec(model, f)?;
    Ok(model.vertices().iter().cloned().zip(defect).collect())
}

/// Index-aligned variant of [`kirchhoff_defect`].
pub fn kirchhoff_defect_vec(model: &MetricGraphModel, f: &EdgewiseFunction) -> Result<Vec<f64>> {
    if !f.is_continuous(model) {
        return Err(Error::Discontinuous);
    }
    let mut defect = vec![0.0; model.len()];
    for (e, row) in model.edge_refs().iter().zip(f.edge_values()) {
        let seg = e.length / (row.len() - 1) as f64;
        // Inward derivative at the initial endpoint, and at the terminal.
        let d_in = (row[1] - row[0]) / seg;
        let d_out = (row[row.len() - 2] - row[row.len() - 1]) / seg;
        defect[e.u] += e.nu * d_in;
        defect[e.v] += e.nu * d_out;
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn unit_edge(id: &str, u: &str, v: &str, length: f64) -> MetricEdge {
        MetricEdge {
            id: EdgeId::new(id),
            initial: vid(u),
            terminal: vid(v),
            length,
            mu: 1.0,
            nu: 1.0,
        }
    }

    fn unit_star3() -> MetricGraphModel {
        MetricGraphModel::new(
            [vid("c"), vid("l0"), vid("l1"), vid("l2")],
            [
                unit_edge("e0", "c", "l0", 1.0),
                unit_edge("e1", "c", "l1", 1.0),
                unit_edge("e2", "c", "l2", 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn equilateral_discretizes_to_normalized_data() {
        let g = discretize(&unit_star3()).unwrap();
        let c = g.index_of(&vid("c")).unwrap();
        assert_eq!(g.measure(c), 3.0);
        for leaf in ["l0", "l1", "l2"] {
            let i = g.index_of(&vid(leaf)).unwrap();
            assert_eq!(g.measure(i), 1.0);
            assert_eq!(g.b(c, i), 1.0);
        }
    }

    #[test]
    fn single_loop_discretizes_to_mass_only() {
        let model = MetricGraphModel::new([vid("v")], [unit_edge("l", "v", "v", 2.0)]).unwrap();
        let g = discretize(&model).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.measure(0), 4.0); // loop counted in both orientations
        assert_eq!(g.edge_pairs().count(), 0);
    }

    #[test]
    fn parallel_edges_add_their_conductances() {
        let model = MetricGraphModel::new(
            [vid("u"), vid("v")],
            [
                unit_edge("e0", "u", "v", 1.0),
                unit_edge("e1", "u", "v", 2.0),
            ],
        )
        .unwrap();
        let g = discretize(&model).unwrap();
        let (u, v) = (
            g.index_of(&vid("u")).unwrap(),
            g.index_of(&vid("v")).unwrap(),
        );
        assert_eq!(g.b(u, v), 1.5);
        assert_eq!(g.measure(u), 3.0);
        assert_eq!(g.measure(v), 3.0);
    }

    #[test]
    fn intrinsic_size_is_the_sup() {
        let model = MetricGraphModel::new(
            [vid("a"), vid("b"), vid("c")],
            [
                MetricEdge {
                    id: EdgeId::new("e0"),
                    initial: vid("a"),
                    terminal: vid("b"),
                    length: 2.0,
                    mu: 1.0,
                    nu: 4.0,
                },
                MetricEdge {
                    id: EdgeId::new("e1"),
                    initial: vid("b"),
                    terminal: vid("c"),
                    length: 1.0,
                    mu: 4.0,
                    nu: 1.0,
                },
            ],
        )
        .unwrap();
        // eta lengths: 2*sqrt(1/4) = 1 and 1*sqrt(4) = 2.
        assert_eq!(intrinsic_size(&model), 2.0);
    }

    fn path3() -> DiscreteGraph {
        DiscreteGraph::new(
            [(vid("v0"), 1.0), (vid("v1"), 1.0), (vid("v2"), 1.0)],
            [(vid("v0"), vid("v1"), 1.0), (vid("v1"), vid("v2"), 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn default_weight_on_cycle_is_tight() {
        let ids = ["a", "b", "c", "d"];
        let g = DiscreteGraph::new(
            ids.iter().map(|s| (vid(s), 1.0)),
            (0..4).map(|i| (vid(ids[i]), vid(ids[(i + 1) % 4]), 1.0)),
        )
        .unwrap();
        let p = default_intrinsic_weight(&g).unwrap();
        for (u, v, value) in p.entries() {
            assert_relative_eq!(value, 1.0 / 2f64.sqrt(), max_relative = 1e-15);
            let _ = (u, v);
        }
        // Tight: sum of b p^2 equals m at every vertex.
        for v in 0..g.len() {
            let sum: f64 = g
                .neighbors(v)
                .iter()
                .map(|&(u, b)| b * p.p(u, v) * p.p(u, v))
                .sum();
            assert_relative_eq!(sum, g.measure(v), max_relative = 1e-15);
        }
    }

    #[test]
    fn default_weight_on_star() {
        let g = DiscreteGraph::new(
            [
                (vid("c"), 1.0),
                (vid("l0"), 1.0),
                (vid("l1"), 1.0),
                (vid("l2"), 1.0),
            ],
            [
                (vid("c"), vid("l0"), 1.0),
                (vid("c"), vid("l1"), 1.0),
                (vid("c"), vid("l2"), 1.0),
            ],
        )
        .unwrap();
        let p = default_intrinsic_weight(&g).unwrap();
        let c = g.index_of(&vid("c")).unwrap();
        let sum: f64 = g
            .neighbors(c)
            .iter()
            .map(|&(u, b)| b * p.p(u, c) * p.p(u, c))
            .sum();
        for (_, _, value) in p.entries() {
            assert_relative_eq!(value, (1.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        }
        assert_relative_eq!(sum, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn default_weight_on_two_path_is_one() {
        let g = DiscreteGraph::new(
            [(vid("u"), 1.0), (vid("v"), 1.0)],
            [(vid("u"), vid("v"), 1.0)],
        )
        .unwrap();
        let p = default_intrinsic_weight(&g).unwrap();
        assert_eq!(p.p(0, 1), 1.0);
    }

    #[test]
    fn realize_path_adds_end_loops() {
        let g = path3();
        let p = default_intrinsic_weight(&g).unwrap();
        let cs = realize(&g, &p).unwrap();
        let loops: Vec<_> = cs
            .model
            .edge_refs()
            .iter()
            .filter(|e| e.is_loop())
            .collect();
        assert_eq!(loops.len(), 2);
        for l in &loops {
            assert_eq!(l.length, 0.5);
            assert_relative_eq!(l.mu, 0.5, max_relative = 1e-12);
        }
        assert_eq!(cs.provenance.loops_at.len(), 2);
        // Interior vertex has zero deficit.
        assert!(cs.provenance.loops_at.iter().all(|(v, _)| v != &vid("v1")));
    }

    #[test]
    fn realize_round_trips_through_discretize() {
        let g = path3();
        let p = default_intrinsic_weight(&g).unwrap();
        let cs = realize(&g, &p).unwrap();
        let back = discretize(&cs.model).unwrap();
        for v in 0..g.len() {
            let i = back.index_of(g.vertex(v)).unwrap();
            assert_relative_eq!(back.measure(i), g.measure(v), max_relative = 1e-12);
        }
        for (u, v, w) in g.edge_pairs() {
            let (bu, bv) = (
                back.index_of(g.vertex(u)).unwrap(),
                back.index_of(g.vertex(v)).unwrap(),
            );
            assert_relative_eq!(back.b(bu, bv), w, max_relative = 1e-12);
        }
    }

    #[test]
    fn normalized_data_with_unit_weight_realizes_equilateral() {
        // m = deg, b = adjacency on the 3-star; p = 1 everywhere.
        let g = DiscreteGraph::new(
            [
                (vid("c"), 3.0),
                (vid("l0"), 1.0),
                (vid("l1"), 1.0),
                (vid("l2"), 1.0),
            ],
            [
                (vid("c"), vid("l0"), 1.0),
                (vid("c"), vid("l1"), 1.0),
                (vid("c"), vid("l2"), 1.0),
            ],
        )
        .unwrap();
        let ones: BTreeMap<_, _> = g
            .edge_pairs()
            .map(|(u, v, _)| ((g.vertex(u).clone(), g.vertex(v).clone()), 1.0))
            .collect();
        let p = IntrinsicWeight::new(&g, &ones).unwrap();
        let cs = realize(&g, &p).unwrap();
        assert!(cs.model.edge_refs().iter().all(|e| !e.is_loop()));
        assert!(cs.model.edge_refs().iter().all(|e| e.length == 1.0));
        assert!(cs
            .model
            .edge_refs()
            .iter()
            .all(|e| e.mu == 1.0 && e.nu == 1.0));
    }

    #[test]
    fn combinatorial_cycle_weight_needs_no_loops() {
        let ids = ["a", "b", "c", "d", "e"];
        let n = ids.len();
        let g = DiscreteGraph::new(
            ids.iter().map(|s| (vid(s), 1.0)),
            (0..n).map(|i| (vid(ids[i]), vid(ids[(i + 1) % n]), 1.0)),
        )
        .unwrap();
        let p = default_intrinsic_weight(&g).unwrap();
        let cs = realize(&g, &p).unwrap();
        assert!(cs.model.edge_refs().iter().all(|e| !e.is_loop()));
    }

    #[test]
    fn weight_given_in_both_orientations_is_rejected() {
        let g = DiscreteGraph::new(
            [(vid("u"), 1.0), (vid("v"), 1.0)],
            [(vid("u"), vid("v"), 1.0)],
        )
        .unwrap();
        let both: BTreeMap<_, _> =
            [((vid("u"), vid("v")), 0.5), ((vid("v"), vid("u")), 0.7)].into();
        assert!(matches!(
            IntrinsicWeight::new(&g, &both),
            Err(Error::DuplicateEdge(_))
        ));
    }

    #[test]
    fn violating_weight_is_rejected_with_vertex() {
        let g = path3();
        let big: BTreeMap<_, _> = g
            .edge_pairs()
            .map(|(u, v, _)| ((g.vertex(u).clone(), g.vertex(v).clone()), 10.0))
            .collect();
        let p = IntrinsicWeight::new(&g, &big).unwrap();
        match realize(&g, &p) {
            Err(Error::NotIntrinsic { deficit, .. }) => assert!(deficit < 0.0),
            other => panic!("expected NotIntrinsic, got {other:?}"),
        }
    }

    #[test]
    fn realized_eta_equals_p_and_intrinsic_size_caps_at_half() {
        let g = path3();
        let p = default_intrinsic_weight(&g).unwrap();
        let cs = realize(&g, &p).unwrap();
        for e in cs.model.edge_refs() {
            if !e.is_loop() {
                let eta = eta_length(e.length, e.mu, e.nu);
                assert_relative_eq!(eta, p.p(e.u, e.v), max_relative = 1e-12);
            } else {
                assert_eq!(eta_length(e.length, e.mu, e.nu), 0.5);
            }
        }
        let size = intrinsic_size(&cs.model);
        assert_relative_eq!(size, p.max_value().max(0.5), max_relative = 1e-12);
    }

    #[test]
    fn affine_extension_and_trace() {
        let model = MetricGraphModel::new(
            [vid("v0"), vid("v1"), vid("v2")],
            [
                unit_edge("e0", "v0", "v1", 1.0),
                unit_edge("e1", "v1", "v2", 1.0),
            ],
        )
        .unwrap();
        let fv: BTreeMap<_, _> = [(vid("v0"), 0.0), (vid("v1"), 0.5), (vid("v2"), 1.0)].into();
        let f = extend_affine(&model, &fv).unwrap();
        assert_eq!(restrict_to_vertices(&model, &f), fv);
        let defect = kirchhoff_defect(&model, &f).unwrap();
        assert_relative_eq!(defect[&vid("v1")], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn defect_of_nonharmonic_trace() {
        let model = MetricGraphModel::new(
            [vid("v0"), vid("v1"), vid("v2")],
            [
                unit_edge("e0", "v0", "v1", 1.0),
                unit_edge("e1", "v1", "v2", 1.0),
            ],
        )
        .unwrap();
        let fv: BTreeMap<_, _> = [(vid("v0"), 0.0), (vid("v1"), 1.0), (vid("v2"), 1.0)].into();
        let f = extend_affine(&model, &fv).unwrap();
        let defect = kirchhoff_defect(&model, &f).unwrap();
        assert_relative_eq!(defect[&vid("v1")], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn extension_on_loop_is_constant() {
        let model = MetricGraphModel::new([vid("v")], [unit_edge("l", "v", "v", 1.0)]).unwrap();
        let fv: BTreeMap<_, _> = [(vid("v"), 3.5)].into();
        let f = extend_affine(&model, &fv).unwrap();
        assert_eq!(f.edge_values()[0], vec![3.5, 3.5]);
        let defect = kirchhoff_defect(&model, &f).unwrap();
        assert_eq!(defect[&vid("v")], 0.0);
    }

    #[test]
    fn discontinuous_function_is_rejected() {
        let model =
            MetricGraphModel::new([vid("u"), vid("v")], [unit_edge("e", "u", "v", 1.0)]).unwrap();
        let f = EdgewiseFunction::new(&model, vec![0.0, 1.0], vec![vec![0.0, 0.9]]).unwrap();
        assert!(matches!(
            kirchhoff_defect(&model, &f),
            Err(Error::Discontinuous)
        ));
    }

    #[test]
    fn missing_vertex_value_is_an_error() {
        let model = unit_star3();
        let fv: BTreeMap<_, _> = [(vid("c"), 0.0)].into();
        assert!(matches!(
            extend_affine(&model, &fv),
            Err(Error::MissingValue(_))
        ));
    }
}
