//! Solvers for the symmetric indefinite saddle systems
//!
//! ```text
//!   [ V  B^T ] [x]   [r1]
//!   [ B   0  ] [y] = [r2]
//! ```
//!
//! arising at every time step. The default path is a direct dense LU with
//! partial pivoting (deterministic, reused across steps); a Schur-complement
//! path with conjugate gradients on `B V^-1 B^T` serves as an independent
//! cross-check when the V-block is positive definite. Problem sizes here are
//! desk scale, so robustness wins over sparsity.

use crate::error::{Error, Result};
use crate::linalg;
use crate::sparse::SparseMatrix;
use nalgebra::{DMatrix, DVector};

/// The 2x2 block operator of one step: symmetric V-block and constraint B.
/// `b_block` may have zero rows (unconstrained systems).
pub struct SaddleOperator {
    pub v_block: SparseMatrix,
    pub b_block: SparseMatrix,
}

impl SaddleOperator {
    pub fn new(v_block: SparseMatrix, b_block: SparseMatrix) -> Result<Self> {
        if v_block.n_rows() != v_block.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "V-block must be square, got {}x{}",
                v_block.n_rows(),
                v_block.n_cols()
            )));
        }
        if b_block.n_cols() != v_block.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "B has {} columns but V is {}x{}",
                b_block.n_cols(),
                v_block.n_rows(),
                v_block.n_cols()
            )));
        }
        Ok(Self { v_block, b_block })
    }

    pub fn n_primal(&self) -> usize {
        self.v_block.n_rows()
    }

    pub fn n_dual(&self) -> usize {
        self.b_block.n_rows()
    }

    pub fn assemble_dense(&self) -> DMatrix<f64> {
        let n = self.n_primal();
        let m = self.n_dual();
        let mut full = DMatrix::zeros(n + m, n + m);
        full.view_mut((0, 0), (n, n)).copy_from(&self.v_block.to_dense());
        let b = self.b_block.to_dense();
        full.view_mut((n, 0), (m, n)).copy_from(&b);
        full.view_mut((0, n), (n, m)).copy_from(&b.transpose());
        full
    }

    /// Factor the full block matrix. On singularity the error names the
    /// offending block: a rank-deficient B (redundant constraints) or a
    /// V-block singular on ker B.
    pub fn factorize(&self) -> Result<Factorization> {
        let full = self.assemble_dense();
        let lu = full.clone().lu();
        // probe invertibility with a solve
        let probe = DVector::from_element(full.nrows(), 1.0);
        let ok = lu
            .solve(&probe)
            .map(|x| x.iter().all(|v| v.is_finite()))
            .unwrap_or(false);
        let scale = full.abs().max().max(1.0);
        let tiny_pivot = (0..full.nrows())
            .any(|i| lu.u()[(i, i)].abs() <= 1e-13 * scale);
        if !ok || tiny_pivot {
            return Err(self.diagnose_singularity());
        }
        Ok(Factorization {
            lu,
            matrix: full,
            n_primal: self.n_primal(),
            n_dual: self.n_dual(),
        })
    }

    fn diagnose_singularity(&self) -> Error {
        let b = self.b_block.to_dense();
        let m = self.n_dual();
        if m > 0 && linalg::numerical_rank(&b, 1e-12) < m {
            return Error::RankDeficientConstraint(format!(
                "B has {} rows but numerical rank {}",
                m,
                linalg::numerical_rank(&b, 1e-12)
            ));
        }
        let z = if m > 0 {
            linalg::null_space_basis(&b, 1e-12)
        } else {
            DMatrix::identity(self.n_primal(), self.n_primal())
        };
        let v = self.v_block.to_dense();
        let vz = z.transpose() * &v * &z;
        Error::SingularVBlock(format!(
            "V restricted to ker B is {}x{} with numerical rank {}",
            vz.nrows(),
            vz.ncols(),
            linalg::numerical_rank(&vz, 1e-12)
        ))
    }

    /// Schur-complement path: requires a positive definite V-block. Solves
    /// `B V^-1 B^T y = B V^-1 r1 - r2` by CG, then back-substitutes for x.
    pub fn schur_solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n_primal();
        let m = self.n_dual();
        if rhs.len() != n + m {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, expected {}",
                rhs.len(),
                n + m
            )));
        }
        let v = self.v_block.to_dense();
        let chol = v.cholesky().ok_or_else(|| {
            Error::VBlockIndefinite(
                "Cholesky of the V-block failed; the Schur path needs V positive definite".into(),
            )
        })?;
        let r1 = rhs.rows(0, n).into_owned();
        let r2 = rhs.rows(n, m).into_owned();
        let bt = self.b_block.transpose();
        if m == 0 {
            let mut x = DVector::zeros(n + m);
            x.rows_mut(0, n).copy_from(&chol.solve(&r1));
            return Ok(x);
        }
        let schur_rhs = self.b_block.matvec(&chol.solve(&r1)) - r2;
        let apply = |y: &DVector<f64>| {
            let w = bt.matvec(y);
            self.b_block.matvec(&chol.solve(&w))
        };
        let y = linalg::cg_solve(apply, &schur_rhs, 1e-12, 50 * (m + 10))?;
        let x1 = chol.solve(&(r1 - bt.matvec(&y)));
        let mut out = DVector::zeros(n + m);
        out.rows_mut(0, n).copy_from(&x1);
        out.rows_mut(n, m).copy_from(&y);
        Ok(out)
    }
}

/// Reusable LU factorization of the assembled saddle matrix.
pub struct Factorization {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    matrix: DMatrix<f64>,
    n_primal: usize,
    n_dual: usize,
}

impl Factorization {
    pub fn n_primal(&self) -> usize {
        self.n_primal
    }

    pub fn n_dual(&self) -> usize {
        self.n_dual
    }

    /// Solve with one step of iterative refinement; backward error is kept
    /// at or below 1e-12 relative.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        if rhs.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, expected {}",
                rhs.len(),
                self.matrix.nrows()
            )));
        }
        let mut x = self
            .lu
            .solve(rhs)
            .ok_or_else(|| Error::SingularVBlock("LU solve failed".into()))?;
        let resid = rhs - &self.matrix * &x;
        if let Some(dx) = self.lu.solve(&resid) {
            x += dx;
        }
        Ok(x)
    }
}

/// Dense LU for general (nonsymmetric) step matrices, e.g. the coupled
/// Radau stage system. Same backward-error contract as [`Factorization`].
pub struct DenseLu {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    matrix: DMatrix<f64>,
}

impl DenseLu {
    pub fn new(matrix: DMatrix<f64>, context: &str) -> Result<Self> {
        let lu = matrix.clone().lu();
        let scale = matrix.abs().max().max(1.0);
        let tiny = (0..matrix.nrows()).any(|i| lu.u()[(i, i)].abs() <= 1e-14 * scale);
        if tiny {
            return Err(Error::SingularVBlock(format!(
                "singular step matrix ({context})"
            )));
        }
        Ok(Self { lu, matrix })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let mut x = self
            .lu
            .solve(rhs)
            .ok_or_else(|| Error::SingularVBlock("LU solve failed".into()))?;
        let resid = rhs - &self.matrix * &x;
        if let Some(dx) = self.lu.solve(&resid) {
            x += dx;
        }
        Ok(x)
    }
}
