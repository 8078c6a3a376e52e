//! Dense linear-algebra helpers used by the solvers and the verification
//! machinery: symmetric (generalized) eigendecompositions, conjugate
//! gradients, numerical rank.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Eigendecomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = 0.5 * (a + a.transpose());
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Generalized symmetric eigenproblem A x = lambda B x with B symmetric
/// positive definite, via the Cholesky transform. Eigenvalues ascending; the
/// returned eigenvector matrix X satisfies X^T B X = I.
pub fn generalized_sym_eigen(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularVBlock("B factor in generalized eigenproblem is not SPD".into()))?;
    let l = chol.l();
    // C = L^-1 A L^-T
    let mut c = a.clone();
    l.solve_lower_triangular_mut(&mut c);
    let mut ct = c.transpose();
    l.solve_lower_triangular_mut(&mut ct);
    let (vals, y) = sym_eigen(&ct);
    // x = L^-T y
    let x = l.transpose().solve_upper_triangular(&y).ok_or_else(|| {
        Error::SingularVBlock("triangular back-substitution failed".into())
    })?;
    Ok((vals, x))
}

/// Conjugate gradients for an SPD operator given as a closure.
pub fn cg_solve<F>(apply: F, rhs: &DVector<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = rhs.len();
    let mut x = DVector::zeros(n);
    let mut r = rhs.clone();
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(x);
    }
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    for _ in 0..max_iter {
        let ap = apply(&p);
        let denom = p.dot(&ap);
        if denom <= 0.0 {
            return Err(Error::NoConvergence(
                "CG hit a non-positive curvature direction (operator not SPD?)".into(),
            ));
        }
        let alpha = rs / denom;
        x += alpha * &p;
        r -= alpha * &ap;
        let rs_new = r.dot(&r);
        if rs_new.sqrt() <= tol * rhs_norm {
            return Ok(x);
        }
        p = &r + (rs_new / rs) * p;
        rs = rs_new;
    }
    Err(Error::NoConvergence(format!(
        "CG did not reach tolerance {tol} in {max_iter} iterations (residual {:.3e})",
        r.norm() / rhs_norm
    )))
}

/// Numerical rank from singular values with relative threshold `tol`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Orthonormal basis of the null space of `m` (columns), from the symmetric
/// eigendecomposition of m^T m.
pub fn null_space_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let gram = m.transpose() * m;
    let (vals, vecs) = sym_eigen(&gram);
    let vmax = vals[n - 1].max(0.0);
    let thresh = tol * tol * vmax;
    let dim = vals.iter().filter(|&&v| v <= thresh).count();
    let mut basis = DMatrix::zeros(n, dim);
    for k in 0..dim {
        basis.set_column(k, &vecs.column(k));
    }
    basis
}
