//! Conforming P1 finite elements for the Kirchhoff Laplacian.
//!
//! Each edge is split into `⌈|e|/h⌉` equal elements with piecewise-linear
//! hat functions; endpoint dofs are shared across the vertex, which
//! imposes continuity, and the Kirchhoff derivative condition is natural
//! for the form `Q[f] = Σ_e ν(e) ∫ |f'|²` in `L²(G; μ)`. An optional
//! Dirichlet vertex set is eliminated from rows and columns.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::graph::{validate_model, EdgewiseFunction, MetricGraphModel, VertexId};
use crate::{Error, Result};

/// One retained degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dof {
    Vertex(usize),
    /// Interior node `node ∈ 1..elements` of an edge, counted from the
    /// initial endpoint.
    Interior {
        edge: usize,
        node: usize,
    },
}

/// Assembled stiffness/mass pair with the dof bookkeeping needed to map
/// coefficient vectors back to functions on the graph.
#[derive(Clone, Debug)]
pub struct FemSystem {
    pub k: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub dofs: Vec<Dof>,
    pub mesh_h: f64,
    /// Model vertex index -> reduced dof index; `None` when constrained.
    pub vertex_dof: Vec<Option<usize>>,
    /// Per edge: number of elements.
    pub elements: Vec<usize>,
    /// Per edge: reduced dof index of its first interior node.
    first_interior: Vec<usize>,
}

impl FemSystem {
    pub fn dof_count(&self) -> usize {
        self.dofs.len()
    }

    /// Reconstructs an edgewise piecewise-linear function from reduced
    /// coefficients; constrained vertices take the value 0.
    pub fn edgewise_function(
        &self,
        model: &MetricGraphModel,
        coeffs: &[f64],
    ) -> Result<EdgewiseFunction> {
        if coeffs.len() != self.dofs.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                self.dofs.len(),
                coeffs.len()
            )));
        }
        let vertex_values: Vec<f64> = self
            .vertex_dof
            .iter()
            .map(|d| d.map_or(0.0, |i| coeffs[i]))
            .collect();
        let mut rows = Vec::with_capacity(model.edge_count());
        for (e, r) in model.edge_refs().iter().enumerate() {
            let n = self.elements[e];
            let mut row = Vec::with_capacity(n + 1);
            row.push(vertex_values[r.u]);
            for node in 0..n.saturating_sub(1) {
                row.push(coeffs[self.first_interior[e] + node]);
            }
            row.push(vertex_values[r.v]);
            rows.push(row);
        }
        EdgewiseFunction::new(model, vertex_values, rows)
    }

    /// `∫ f dμ` of the reconstructed function: row sums of `M` against the
    /// coefficients. Meaningful for conservation checks without
    /// constraints.
    pub fn mass_integral(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.m.row(i).sum())
            .sum()
    }
}

/// Assembles the P1 system for a finite model at target mesh size `h`.
pub fn assemble_fem(
    model: &MetricGraphModel,
    h: f64,
    dirichlet: Option<&BTreeSet<VertexId>>,
) -> Result<FemSystem> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mesh size h = {h} must be positive"
        )));
    }
    let report = validate_model(model);
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidGraph(v.to_string()));
    }
    let mut constrained = vec![false; model.len()];
    if let Some(set) = dirichlet {
        for v in set {
            let i = model
                .index_of(v)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            constrained[i] = true;
        }
    }

    // Full numbering: vertices first, then edge interiors in edge order.
    let n_vertices = model.len();
    let mut elements = Vec::with_capacity(model.edge_count());
    let mut full_first_interior = Vec::with_capacity(model.edge_count());
    let mut full_size = n_vertices;
    for r in model.edge_refs() {
        let n = (r.length / h).ceil().max(1.0) as usize;
        elements.push(n);
        full_first_interior.push(full_size);
        full_size += n - 1;
    }

    let mut k = DMatrix::zeros(full_size, full_size);
    let mut m = DMatrix::zeros(full_size, full_size);
    for (e, r) in model.edge_refs().iter().enumerate() {
        let n = elements[e];
        let le = r.length / n as f64;
        let k_loc = r.nu / le;
        let m_diag = r.mu * le / 3.0;
        let m_off = r.mu * le / 6.0;
        let node_dof = |node: usize| -> usize {
            if node == 0 {
                r.u
            } else if node == n {
                r.v
            } else {
                full_first_interior[e] + node - 1
            }
        };
        for el in 0..n {
            let (a, b) = (node_dof(el), node_dof(el + 1));
            k[(a, a)] += k_loc;
            k[(b, b)] += k_loc;
            k[(a, b)] -= k_loc;
            k[(b, a)] -= k_loc;
            m[(a, a)] += m_diag;
            m[(b, b)] += m_diag;
            m[(a, b)] += m_off;
            m[(b, a)] += m_off;
        }
    }

    // Reduce out the constrained vertex dofs.
    let mut keep = Vec::with_capacity(full_size);
    let mut dofs = Vec::new();
    let mut vertex_dof = vec![None; n_vertices];
    for v in 0..n_vertices {
        if !constrained[v] {
            vertex_dof[v] = Some(keep.len());
            keep.push(v);
            dofs.push(Dof::Vertex(v));
        }
    }
    let mut first_interior = Vec::with_capacity(model.edge_count());
    for (e, &n) in elements.iter().enumerate() {
        first_interior.push(keep.len());
        for node in 1..n {
            keep.push(full_first_interior[e] + node - 1);
            dofs.push(Dof::Interior { edge: e, node });
        }
    }
    let k = k.select_rows(keep.iter()).select_columns(keep.iter());
    let m = m.select_rows(keep.iter()).select_columns(keep.iter());

    Ok(FemSystem {
        k,
        m,
        dofs,
        mesh_h: h,
        vertex_dof,
        elements,
        first_interior,
    })
}
