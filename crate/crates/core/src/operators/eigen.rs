//! Dense symmetric generalized eigensolver.
//!
//! `K f = λ M f` with `K` symmetric positive semidefinite and `M`
//! symmetric positive definite is reduced by the Cholesky factor
//! `M = L Lᵀ` to the standard symmetric problem `(L⁻¹ K L⁻ᵀ) y = λ y`,
//! then handed to nalgebra's symmetric solver. Back-substituted
//! eigenvectors `f = L⁻ᵀ y` are `M`-orthonormal. Adequate up to the
//! desk-scale dof cap; no iterative solver is needed.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Solves `K f = λ M f`; eigenvalues ascending, eigenvectors (columns)
/// `M`-orthonormal with a canonical sign (largest-magnitude entry
/// positive) so results are reproducible byte for byte.
pub fn generalized_symmetric_eigen(
    k: &DMatrix<f64>,
    m: &DMatrix<f64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape(format!(
            "K is {}x{}, M is {}x{}",
            k.nrows(),
            k.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    let chol = m.clone().cholesky().ok_or(Error::MassNotPositiveDefinite)?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(k)
        .ok_or(Error::MassNotPositiveDefinite)?;
    let mut c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::MassNotPositiveDefinite)?;
    // Symmetrize against rounding before the symmetric solver.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }

    if !want_vectors {
        let mut values: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok((values, None));
    }

    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let mut y = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        y.set_column(col, &eig.eigenvectors.column(i));
    }
    let mut vectors = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(Error::MassNotPositiveDefinite)?;
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
    Ok((values, Some(vectors)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plain_symmetric_case() {
        // K = [[2,-1],[-1,2]], M = I: eigenvalues 1 and 3.
        let k = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let m = DMatrix::identity(2, 2);
        let (values, vectors) = generalized_symmetric_eigen(&k, &m, true).unwrap();
        assert_relative_eq!(values[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(values[1], 3.0, max_relative = 1e-12);
        let v = vectors.unwrap();
        // M-orthonormal here means plain orthonormal.
        assert_relative_eq!(v.column(0).dot(&v.column(1)), 0.0, epsilon = 1e-12);
        assert_relative_eq!(v.column(0).norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn generalized_case_is_m_orthonormal() {
        let k = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let (values, vectors) = generalized_symmetric_eigen(&k, &m, true).unwrap();
        let v = vectors.unwrap();
        for (i, &lambda) in values.iter().enumerate() {
            for j in 0..3 {
                let prod = (v.column(i).transpose() * &m * v.column(j))[(0, 0)];
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod, expect, epsilon = 1e-10);
            }
            // Residual of the generalized problem.
            let r = &k * v.column(i) - &m * v.column(i) * lambda;
            assert!(r.norm() < 1e-9, "residual {}", r.norm());
        }
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn indefinite_mass_is_rejected() {
        let k = DMatrix::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            generalized_symmetric_eigen(&k, &m, false),
            Err(Error::MassNotPositiveDefinite)
        ));
    }
}
