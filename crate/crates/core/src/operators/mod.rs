//! Discrete Laplacians, energy forms, Kirchhoff spectra via P1 finite
//! elements, heat semigroups, and the equilateral spectral reduction.
//!
//! The discrete Laplacian of `(V, m; b)` acts by
//! `(Lf)(v) = m(v)^{-1} Σ_u b(v,u)(f(v) − f(u))` and appears here as the
//! generalized pencil `(A, M)` with `A(v,v) = Σ_u b(v,u)`,
//! `A(v,u) = −b(v,u)`, `M = diag(m)`. The Kirchhoff Laplacian is
//! discretized by conforming P1 elements ([`fem`]); both pencils go
//! through the same dense solver ([`eigen`]).

pub mod eigen;
pub mod fem;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

pub use eigen::generalized_symmetric_eigen;
pub use fem::{assemble_fem, Dof, FemSystem};

use crate::graph::EdgewiseFunction;
use crate::graph::{DiscreteGraph, MetricGraphModel, SimpleGraph, VertexId};
use crate::{Error, Result};

/// Default eigensolver cap; the CLI lets `CABLEKIT_MAX_DOFS` override it.
pub const DEFAULT_MAX_DOFS: usize = 5000;

/// Eigenvalues closer than this relative gap are reported as one cluster.
pub const MULTIPLICITY_REL_GAP: f64 = 1e-8;

/// Threshold on `|sin(√λ·ℓ)|` below which an eigenvalue belongs to the
/// exceptional (Dirichlet-type) spectrum of the equilateral reduction.
pub const EXCEPTIONAL_SIN_TOL: f64 = 1e-6;

/// Coefficient of the `h²·λ` mesh-error allowance in the equilateral
/// check, calibrated on the interval spectrum (see module tests).
pub const EQUILATERAL_TOL_COEFF: f64 = 0.5;

/// The pencil `(A, M)` of a finite discrete graph: `A f = λ M f` is the
/// eigenproblem of `L` in `ℓ²(V; m)`.
#[derive(Clone, Debug)]
pub struct DiscreteOperatorMatrix {
    pub a: DMatrix<f64>,
    pub m_diag: DVector<f64>,
}

/// Builds the matrix pair of the discrete Laplacian.
pub fn discrete_operator(g: &DiscreteGraph) -> DiscreteOperatorMatrix {
    let n = g.len();
    let mut a = DMatrix::zeros(n, n);
    for v in 0..n {
        for &(u, w) in g.neighbors(v) {
            a[(v, v)] += w;
            a[(v, u)] -= w;
        }
    }
    DiscreteOperatorMatrix {
        a,
        m_diag: DVector::from_iterator(n, g.measures().iter().copied()),
    }
}

/// `(Lf)(v) = m(v)^{-1} Σ_u b(v,u)(f(v) − f(u))` on an index-aligned slice.
pub fn apply_discrete_laplacian_vec(g: &DiscreteGraph, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != g.len() {
        return Err(Error::Shape(format!(
            "expected {} values, got {}",
            g.len(),
            f.len()
        )));
    }
    let mut out = vec![0.0; g.len()];
    for v in 0..g.len() {
        let mut acc = 0.0;
        for &(u, w) in g.neighbors(v) {
            acc += w * (f[v] - f[u]);
        }
        out[v] = acc / g.measure(v);
    }
    Ok(out)
}

/// Map-keyed form of [`apply_discrete_laplacian_vec`].
pub fn apply_discrete_laplacian(
    g: &DiscreteGraph,
    f: &BTreeMap<VertexId, f64>,
) -> Result<BTreeMap<VertexId, f64>> {
    let aligned = g.aligned_values(f)?;
    let out = apply_discrete_laplacian_vec(g, &aligned)?;
    Ok(g.vertices().iter().cloned().zip(out).collect())
}

/// `(V, m; b)` of the combinatorial Laplacian: `m ≡ 1`, `b` = adjacency.
pub fn combinatorial_laplacian(g: &SimpleGraph) -> Result<DiscreteGraph> {
    DiscreteGraph::new(
        g.vertices().iter().map(|v| (v.clone(), 1.0)),
        g.edge_pairs()
            .into_iter()
            .map(|(u, v)| (g.vertices()[u].clone(), g.vertices()[v].clone(), 1.0)),
    )
}

/// `(V, m; b)` of the normalized Laplacian: `m = deg`, `b` = adjacency.
/// The associated operator is `I` minus the Markov averaging operator.
pub fn normalized_laplacian(g: &SimpleGraph) -> Result<DiscreteGraph> {
    for (i, v) in g.vertices().iter().enumerate() {
        if g.degree(i) == 0 {
            return Err(Error::InvalidGraph(format!(
                "isolated vertex {v} has degree 0"
            )));
        }
    }
    DiscreteGraph::new(
        g.vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), g.degree(i) as f64)),
        g.edge_pairs()
            .into_iter()
            .map(|(u, v)| (g.vertices()[u].clone(), g.vertices()[v].clone(), 1.0)),
    )
}

/// The weighted degree `Deg(v) = m(v)^{-1} Σ_u b(u,v)`; `L` is bounded on
/// `ℓ²(V; m)` iff this is, and then `‖Deg‖_∞ ≤ ‖L‖ ≤ 2‖Deg‖_∞`.
pub fn weighted_degree(g: &DiscreteGraph) -> BTreeMap<VertexId, f64> {
    (0..g.len())
        .map(|v| (g.vertex(v).clone(), g.weight_sum(v) / g.measure(v)))
        .collect()
}

/// The energy form `q[f] = ½ Σ_{u,v} b(v,u)|f(v) − f(u)|²` on an
/// index-aligned slice; equals `⟨Lf, f⟩_m` on finite graphs.
pub fn energy_form_discrete(g: &DiscreteGraph, f: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::Shape(format!(
            "expected {} values, got {}",
            g.len(),
            f.len()
        )));
    }
    let mut q = 0.0;
    for v in 0..g.len() {
        for &(u, w) in g.neighbors(v) {
            let diff = f[v] - f[u];
            q += w * diff * diff;
        }
    }
    Ok(0.5 * q)
}

/// `Q[f] = Σ_e ν(e) ∫_e |f'|²` for an edgewise piecewise-linear function.
pub fn energy_form_metric(model: &MetricGraphModel, f: &EdgewiseFunction) -> f64 {
    let mut q = 0.0;
    for (e, row) in model.edge_refs().iter().zip(f.edge_values()) {
        let seg = e.length / (row.len() - 1) as f64;
        for w in row.windows(2) {
            let slope = (w[1] - w[0]) / seg;
            q += e.nu * slope * slope * seg;
        }
    }
    q
}

/// The mass matrix a spectral result was computed against.
#[derive(Clone, Debug)]
pub enum MassMatrix {
    Diagonal(DVector<f64>),
    Dense(DMatrix<f64>),
}

impl MassMatrix {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            MassMatrix::Diagonal(d) => {
                DVector::from_iterator(d.len(), d.iter().zip(x.iter()).map(|(m, v)| m * v))
            }
            MassMatrix::Dense(m) => m * x,
        }
    }
}

/// Solver metadata carried with every spectrum for reproducibility.
#[derive(Clone, Copy, Debug)]
pub struct SolverMeta {
    pub matrix_size: usize,
    pub mesh_h: Option<f64>,
}

/// Ascending eigenvalues, optionally with `M`-orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
    pub mass: Option<MassMatrix>,
    pub meta: SolverMeta,
}

impl SpectralResult {
    /// Clusters eigenvalues whose relative gap is below
    /// [`MULTIPLICITY_REL_GAP`], returning `(representative, multiplicity)`.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &lambda in &self.eigenvalues {
            match out.last_mut() {
                Some((rep, count))
                    if (lambda - *rep).abs() <= MULTIPLICITY_REL_GAP * rep.abs().max(1.0) =>
                {
                    *count += 1;
                }
                _ => out.push((lambda, 1)),
            }
        }
        out
    }

    pub fn max_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Full eigendecomposition of the discrete Laplacian on `ℓ²(V; m)`.
pub fn spectrum_discrete(g: &DiscreteGraph, max_dofs: usize) -> Result<SpectralResult> {
    let n = g.len();
    if n > max_dofs {
        return Err(Error::SizeCap {
            size: n,
            cap: max_dofs,
        });
    }
    let pencil = discrete_operator(g);
    // Diagonal mass: scale instead of factorizing.
    let half: Vec<f64> = pencil.m_diag.iter().map(|&m| m.sqrt()).collect();
    if half.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::MassNotPositiveDefinite);
    }
    let mut c = pencil.a.clone();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] /= half[i] * half[j];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, i)] / half[row];
        }
    }
    for mut col in vectors.column_iter_mut() {
        let mut lead = 0.0f64;
        for &v in col.iter() {
            if v.abs() > lead.abs() {
                lead = v;
            }
        }
        if lead < 0.0 {
            col.neg_mut();
        }
    }
    Ok(SpectralResult {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        mass: Some(MassMatrix::Diagonal(pencil.m_diag)),
        meta: SolverMeta {
            matrix_size: n,
            mesh_h: None,
        },
    })
}

/// Lowest `k` Kirchhoff eigenvalues of a finite model at mesh size `h`
/// (eigenvalues converge at order `h²`).
pub fn spectrum_metric(
    model: &MetricGraphModel,
    h: f64,
    k: usize,
    dirichlet: Option<&BTreeSet<VertexId>>,
    max_dofs: usize,
) -> Result<SpectralResult> {
    let (mut result, _) = kirchhoff_eigen(model, h, dirichlet, max_dofs, false)?;
    if k > result.eigenvalues.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the dof count {}",
            result.eigenvalues.len()
        )));
    }
    result.eigenvalues.truncate(k);
    Ok(result)
}

/// Like [`spectrum_metric`] but keeps all eigenpairs and the mass matrix,
/// as needed by [`heat_semigroup`].
pub fn spectrum_metric_full(
    model: &MetricGraphModel,
    h: f64,
    dirichlet: Option<&BTreeSet<VertexId>>,
    max_dofs: usize,
) -> Result<(SpectralResult, FemSystem)> {
    kirchhoff_eigen(model, h, dirichlet, max_dofs, true)
}

fn kirchhoff_eigen(
    model: &MetricGraphModel,
    h: f64,
    dirichlet: Option<&BTreeSet<VertexId>>,
    max_dofs: usize,
    want_vectors: bool,
) -> Result<(SpectralResult, FemSystem)> {
    let sys = assemble_fem(model, h, dirichlet)?;
    let n = sys.dof_count();
    if n > max_dofs {
        return Err(Error::SizeCap {
            size: n,
            cap: max_dofs,
        });
    }
    let (values, vectors) = generalized_symmetric_eigen(&sys.k, &sys.m, want_vectors)?;
    let result = SpectralResult {
        eigenvalues: values,
        eigenvectors: vectors,
        mass: want_vectors.then(|| MassMatrix::Dense(sys.m.clone())),
        meta: SolverMeta {
            matrix_size: n,
            mesh_h: Some(h),
        },
    };
    Ok((result, sys))
}

/// Heat-semigroup action `f(t) = Σ_j e^{−λ_j t} ⟨f0, φ_j⟩_M φ_j`; requires
/// a full eigendecomposition.
pub fn heat_semigroup(spec: &SpectralResult, t: f64, f0: &[f64]) -> Result<Vec<f64>> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time t = {t} must be nonnegative"
        )));
    }
    let vectors = spec
        .eigenvectors
        .as_ref()
        .ok_or(Error::MissingEigenvectors)?;
    let mass = spec.mass.as_ref().ok_or(Error::MissingEigenvectors)?;
    let n = vectors.nrows();
    if f0.len() != n {
        return Err(Error::Shape(format!(
            "expected {} values, got {}",
            n,
            f0.len()
        )));
    }
    let f0 = DVector::from_column_slice(f0);
    let weighted = mass.apply(&f0);
    let mut out = DVector::zeros(n);
    for (j, &lambda) in spec.eigenvalues.iter().enumerate() {
        let phi = vectors.column(j);
        let coeff = phi.dot(&weighted) * (-lambda * t).exp();
        out.axpy(coeff, &phi, 1.0);
    }
    Ok(out.iter().copied().collect())
}

/// One eigenvalue row of the equilateral correspondence check.
#[derive(Clone, Debug)]
pub struct EquilateralRow {
    pub lambda: f64,
    /// `1 − cos(√λ·ℓ)`, defined for non-exceptional eigenvalues.
    pub mapped: Option<f64>,
    pub nearest: Option<f64>,
    pub distance: Option<f64>,
    pub exempt: bool,
}

/// Report of the equilateral spectral reduction check.
#[derive(Clone, Debug)]
pub struct EquilateralReport {
    pub edge_length: f64,
    pub mesh_h: f64,
    pub lambda_cap: f64,
    pub tolerance_coeff: f64,
    pub normalized_spectrum: Vec<f64>,
    pub rows: Vec<EquilateralRow>,
    pub ok: bool,
}

impl EquilateralReport {
    /// Largest distance among non-exempt rows.
    pub fn worst_distance(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.distance)
            .fold(0.0, f64::max)
    }
}

/// Checks the spectral reduction on a unit-weight equilateral model: a
/// Kirchhoff eigenvalue `λ` with `sin(√λ·ℓ) ≠ 0` forces, via the edgewise
/// solution `A cos(√λ x) + B sin(√λ x)` and the Kirchhoff conditions, the
/// vertex relation `(Markov op) φ = cos(√λ·ℓ) φ` — so `1 − cos(√λ·ℓ)`
/// must lie in `σ(L_norm)`. Eigenvalues with `|sin(√λ·ℓ)| ≤ τ` are
/// exceptional (Dirichlet-type) and exempted.
pub fn equilateral_correspondence_check(
    model: &MetricGraphModel,
    h: f64,
    lambda_cap: f64,
    max_dofs: usize,
) -> Result<EquilateralReport> {
    let simple = SimpleGraph::from_model(model)?;
    let refs = model.edge_refs();
    if refs.is_empty() {
        return Err(Error::InvalidParameter("model has no edges".into()));
    }
    let ell = refs[0].length;
    for e in refs {
        if (e.length - ell).abs() > 1e-12 * ell.abs() {
            return Err(Error::InvalidParameter(format!(
                "model is not equilateral: lengths {} and {}",
                ell, e.length
            )));
        }
        if e.mu != 1.0 || e.nu != 1.0 {
            return Err(Error::InvalidParameter(
                "equilateral check requires unit weights mu = nu = 1".into(),
            ));
        }
    }

    let kirchhoff = kirchhoff_eigen(model, h, None, max_dofs, false)?.0;
    let norm_graph = normalized_laplacian(&simple)?;
    let norm_spec = spectrum_discrete(&norm_graph, max_dofs)?;

    let mut rows = Vec::new();
    let mut ok = true;
    for &lambda in &kirchhoff.eigenvalues {
        if lambda > lambda_cap {
            break;
        }
        let angle = lambda.max(0.0).sqrt() * ell;
        if angle.sin().abs() <= EXCEPTIONAL_SIN_TOL {
            rows.push(EquilateralRow {
                lambda,
                mapped: None,
                nearest: None,
                distance: None,
                exempt: true,
            });
            continue;
        }
        let mapped = 1.0 - angle.cos();
        let (nearest, distance) = norm_spec
            .eigenvalues
            .iter()
            .map(|&theta| (theta, (mapped - theta).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let tol = 1e-9 + EQUILATERAL_TOL_COEFF * h * h * lambda.max(1.0);
        if distance > tol {
            ok = false;
        }
        rows.push(EquilateralRow {
            lambda,
            mapped: Some(mapped),
            nearest: Some(nearest),
            distance: Some(distance),
            exempt: false,
        });
    }

    Ok(EquilateralReport {
        edge_length: ell,
        mesh_h: h,
        lambda_cap,
        tolerance_coeff: EQUILATERAL_TOL_COEFF,
        normalized_spectrum: norm_spec.eigenvalues,
        rows,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeId, MetricEdge};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn triangle_comb() -> DiscreteGraph {
        let sg = SimpleGraph::new(
            [vid("v0"), vid("v1"), vid("v2")],
            [
                (vid("v0"), vid("v1")),
                (vid("v1"), vid("v2")),
                (vid("v0"), vid("v2")),
            ],
        )
        .unwrap();
        combinatorial_laplacian(&sg).unwrap()
    }

    #[test]
    fn laplacian_on_the_triangle() {
        let g = triangle_comb();
        let lf = apply_discrete_laplacian_vec(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lf, vec![2.0, -1.0, -1.0]);
        let zero = apply_discrete_laplacian_vec(&g, &[3.0, 3.0, 3.0]).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        // Combinatorial data: weighted degree is the plain degree.
        assert!(weighted_degree(&g).values().all(|&d| d == 2.0));
    }

    #[test]
    fn markov_form_on_normalized_data() {
        let sg = SimpleGraph::new(
            [vid("v0"), vid("v1"), vid("v2")],
            [
                (vid("v0"), vid("v1")),
                (vid("v1"), vid("v2")),
                (vid("v0"), vid("v2")),
            ],
        )
        .unwrap();
        let g = normalized_laplacian(&sg).unwrap();
        let lf = apply_discrete_laplacian_vec(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lf, vec![1.0, -0.5, -0.5]);
        let deg = weighted_degree(&g);
        assert!(deg.values().all(|&d| d <= 1.0 + 1e-15));
    }

    #[test]
    fn weighted_degree_formula() {
        let g = DiscreteGraph::new(
            [(vid("u"), 2.0), (vid("v"), 1.0)],
            [(vid("u"), vid("v"), 3.0)],
        )
        .unwrap();
        let deg = weighted_degree(&g);
        assert_eq!(deg[&vid("u")], 1.5);
        assert_eq!(deg[&vid("v")], 3.0);
    }

    #[test]
    fn triangle_combinatorial_spectrum() {
        // Closed form 2 - 2cos(2πk/3): {0, 3, 3}.
        let spec = spectrum_discrete(&triangle_comb(), DEFAULT_MAX_DOFS).unwrap();
        assert_relative_eq!(spec.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(spec.eigenvalues[1], 3.0, max_relative = 1e-12);
        assert_relative_eq!(spec.eigenvalues[2], 3.0, max_relative = 1e-12);
        let mult = spec.multiplicities();
        assert_eq!(mult.len(), 2);
        assert_eq!(mult[1].1, 2);
    }

    #[test]
    fn star_normalized_spectrum() {
        let sg = SimpleGraph::new(
            [vid("c"), vid("l0"), vid("l1"), vid("l2")],
            [
                (vid("c"), vid("l0")),
                (vid("c"), vid("l1")),
                (vid("c"), vid("l2")),
            ],
        )
        .unwrap();
        let g = normalized_laplacian(&sg).unwrap();
        let spec = spectrum_discrete(&g, DEFAULT_MAX_DOFS).unwrap();
        let expect = [0.0, 1.0, 1.0, 2.0];
        for (have, want) in spec.eigenvalues.iter().zip(expect) {
            assert_relative_eq!(*have, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn p2_normalized_spectrum() {
        let sg = SimpleGraph::new([vid("u"), vid("v")], [(vid("u"), vid("v"))]).unwrap();
        let g = normalized_laplacian(&sg).unwrap();
        let spec = spectrum_discrete(&g, DEFAULT_MAX_DOFS).unwrap();
        assert_relative_eq!(spec.eigenvalues[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(spec.eigenvalues[1], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn energy_matches_inner_product() {
        let g = triangle_comb();
        let f = [1.0, 0.0, 0.0];
        assert_eq!(energy_form_discrete(&g, &f).unwrap(), 2.0);
        let lf = apply_discrete_laplacian_vec(&g, &f).unwrap();
        let inner: f64 = lf
            .iter()
            .zip(&f)
            .enumerate()
            .map(|(v, (l, x))| l * x * g.measure(v))
            .sum();
        assert_relative_eq!(inner, 2.0, max_relative = 1e-15);
        assert_eq!(energy_form_discrete(&g, &[5.0, 5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn pencil_invariants() {
        let g = triangle_comb();
        let p = discrete_operator(&g);
        let ones = DVector::from_element(3, 1.0);
        assert!((&p.a * &ones).norm() < 1e-14);
        assert_eq!(p.a, p.a.transpose());
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = triangle_comb();
        assert!(matches!(
            spectrum_discrete(&g, 2),
            Err(Error::SizeCap { size: 3, cap: 2 })
        ));
    }

    fn interval(length: f64) -> MetricGraphModel {
        MetricGraphModel::new(
            [vid("a"), vid("b")],
            [MetricEdge {
                id: EdgeId::new("e"),
                initial: vid("a"),
                terminal: vid("b"),
                length,
                mu: 1.0,
                nu: 1.0,
            }],
        )
        .unwrap()
    }

    fn circle(length: f64) -> MetricGraphModel {
        MetricGraphModel::new(
            [vid("v")],
            [MetricEdge {
                id: EdgeId::new("l"),
                initial: vid("v"),
                terminal: vid("v"),
                length,
                mu: 1.0,
                nu: 1.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn interval_neumann_spectrum() {
        let spec = spectrum_metric(&interval(1.0), 0.01, 3, None, DEFAULT_MAX_DOFS).unwrap();
        let exact = [0.0, PI * PI, 4.0 * PI * PI];
        assert!(spec.eigenvalues[0].abs() < 1e-9);
        for (have, want) in spec.eigenvalues.iter().zip(exact).skip(1) {
            let rel = (have - want).abs() / want;
            assert!(rel < 1e-3, "rel err {rel}");
        }
    }

    #[test]
    fn interval_dirichlet_spectrum() {
        let set: BTreeSet<_> = [vid("a"), vid("b")].into();
        let spec = spectrum_metric(&interval(1.0), 0.01, 2, Some(&set), DEFAULT_MAX_DOFS).unwrap();
        for (k, lambda) in spec.eigenvalues.iter().enumerate() {
            let exact = ((k + 1) as f64 * PI).powi(2);
            let rel = (lambda - exact).abs() / exact;
            assert!(rel < 1e-3, "k = {k}: rel err {rel}");
        }
    }

    #[test]
    fn circle_spectrum_has_double_eigenvalues() {
        let spec = spectrum_metric(&circle(1.0), 0.01, 3, None, DEFAULT_MAX_DOFS).unwrap();
        let four_pi_sq = 4.0 * PI * PI;
        assert!(spec.eigenvalues[0].abs() < 1e-9);
        for k in 1..3 {
            let rel = (spec.eigenvalues[k] - four_pi_sq).abs() / four_pi_sq;
            assert!(rel < 1e-3, "k = {k}: rel err {rel}");
        }
    }

    #[test]
    fn dirichlet_dominates_neumann() {
        let model = interval(1.0);
        let set: BTreeSet<_> = [vid("a")].into();
        let neumann = spectrum_metric(&model, 0.05, 5, None, DEFAULT_MAX_DOFS).unwrap();
        let dirichlet = spectrum_metric(&model, 0.05, 5, Some(&set), DEFAULT_MAX_DOFS).unwrap();
        for k in 0..5 {
            assert!(dirichlet.eigenvalues[k] >= neumann.eigenvalues[k] - 1e-10);
        }
    }

    #[test]
    fn galerkin_monotone_under_refinement() {
        let model = interval(1.0);
        let coarse = spectrum_metric(&model, 0.1, 5, None, DEFAULT_MAX_DOFS).unwrap();
        let fine = spectrum_metric(&model, 0.05, 5, None, DEFAULT_MAX_DOFS).unwrap();
        for k in 0..5 {
            assert!(fine.eigenvalues[k] <= coarse.eigenvalues[k] + 1e-10);
        }
    }

    #[test]
    fn norm_sandwich_on_the_triangle() {
        let g = triangle_comb();
        let spec = spectrum_discrete(&g, DEFAULT_MAX_DOFS).unwrap();
        let top = spec.max_eigenvalue().unwrap();
        let deg_max = weighted_degree(&g).values().cloned().fold(0.0, f64::max);
        assert!(top >= deg_max - 1e-9 && top <= 2.0 * deg_max + 1e-9);
    }

    #[test]
    fn heat_flow_on_the_triangle() {
        let g = triangle_comb();
        let spec = spectrum_discrete(&g, DEFAULT_MAX_DOFS).unwrap();
        let f0 = [1.0, 0.0, 0.0];
        let at_zero = heat_semigroup(&spec, 0.0, &f0).unwrap();
        for (a, b) in at_zero.iter().zip(&f0) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let late = heat_semigroup(&spec, 50.0, &f0).unwrap();
        for v in late {
            assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-10);
        }
        assert!(heat_semigroup(&spec, -1.0, &f0).is_err());
    }

    #[test]
    fn heat_conserves_metric_mass_without_constraints() {
        let model = interval(1.0);
        let (spec, sys) = spectrum_metric_full(&model, 0.05, None, DEFAULT_MAX_DOFS).unwrap();
        let mut f0 = vec![0.0; sys.dof_count()];
        f0[0] = 1.0;
        let before = sys.mass_integral(&f0);
        let after = sys.mass_integral(&heat_semigroup(&spec, 0.7, &f0).unwrap());
        assert_relative_eq!(before, after, max_relative = 1e-10);
    }

    #[test]
    fn metric_energy_of_affine_extension_matches_discrete_energy() {
        use crate::correspondence::{discretize, extend_affine};
        let model = MetricGraphModel::new(
            [vid("a"), vid("b"), vid("c")],
            [
                MetricEdge {
                    id: EdgeId::new("e0"),
                    initial: vid("a"),
                    terminal: vid("b"),
                    length: 2.0,
                    mu: 1.5,
                    nu: 0.7,
                },
                MetricEdge {
                    id: EdgeId::new("e1"),
                    initial: vid("b"),
                    terminal: vid("c"),
                    length: 0.5,
                    mu: 2.0,
                    nu: 3.0,
                },
            ],
        )
        .unwrap();
        let fv: BTreeMap<_, _> = [(vid("a"), 0.3), (vid("b"), -1.2), (vid("c"), 2.0)].into();
        let f = extend_affine(&model, &fv).unwrap();
        let q_metric = energy_form_metric(&model, &f);
        let g = discretize(&model).unwrap();
        let aligned = g.aligned_values(&fv).unwrap();
        let q_discrete = energy_form_discrete(&g, &aligned).unwrap();
        assert_relative_eq!(q_metric, q_discrete, max_relative = 1e-12);
    }

    #[test]
    fn single_edge_unit_slope_energy() {
        let model = interval(1.0);
        let fv: BTreeMap<_, _> = [(vid("a"), 0.0), (vid("b"), 1.0)].into();
        let f = crate::correspondence::extend_affine(&model, &fv).unwrap();
        assert_relative_eq!(energy_form_metric(&model, &f), 1.0, max_relative = 1e-15);
        let constant: BTreeMap<_, _> = [(vid("a"), 4.0), (vid("b"), 4.0)].into();
        let c = crate::correspondence::extend_affine(&model, &constant).unwrap();
        assert_eq!(energy_form_metric(&model, &c), 0.0);
    }

    #[test]
    fn equilateral_check_on_p2() {
        let report =
            equilateral_correspondence_check(&interval(1.0), 0.005, 50.0, DEFAULT_MAX_DOFS)
                .unwrap();
        assert!(report.ok, "worst distance {}", report.worst_distance());
        // sigma(L_norm) of P2 is {0, 2}.
        assert_relative_eq!(report.normalized_spectrum[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(report.normalized_spectrum[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_check_rejects_uneven_lengths() {
        let model = MetricGraphModel::new(
            [vid("a"), vid("b"), vid("c")],
            [
                MetricEdge {
                    id: EdgeId::new("e0"),
                    initial: vid("a"),
                    terminal: vid("b"),
                    length: 1.0,
                    mu: 1.0,
                    nu: 1.0,
                },
                MetricEdge {
                    id: EdgeId::new("e1"),
                    initial: vid("b"),
                    terminal: vid("c"),
                    length: 2.0,
                    mu: 1.0,
                    nu: 1.0,
                },
            ],
        )
        .unwrap();
        assert!(equilateral_correspondence_check(&model, 0.01, 50.0, DEFAULT_MAX_DOFS).is_err());
    }

    #[test]
    fn equilateral_tolerance_coefficient_covers_the_interval_oracle() {
        // Calibration gate: on the interval the mapped distance must stay
        // below the h^2-scaled allowance at both mesh sizes used by the
        // acceptance suite.
        for h in [0.01, 0.005] {
            let report =
                equilateral_correspondence_check(&interval(1.0), h, 50.0, DEFAULT_MAX_DOFS)
                    .unwrap();
            assert!(report.ok, "h = {h}: worst {}", report.worst_distance());
        }
    }
}
