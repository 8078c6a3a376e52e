//! The constrained operator systems as block index-2 DAEs
//!
//! ```text
//!   E x' + A x + B^T lambda = load(t),      B x = constraint_data(t),
//! ```
//!
//! with `x = [u; p]` (or just `u` for the Dirichlet forms). All constrained
//! builders emit the same block shape, so the time integrators are
//! formulation-agnostic.

use crate::assembly::{
    assemble_alpha_boundary, assemble_coupling, assemble_load_boundary, assemble_load_bulk,
    assemble_mass_boundary, assemble_mass_bulk, assemble_stiffness_boundary,
    assemble_stiffness_bulk, assemble_trace_matrix, CoefficientSet, CouplingSpec,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::mesh::{extract_boundary_mesh, BoundaryMesh, BulkMesh, Point};
use crate::saddle::SaddleOperator;
use crate::sparse::SparseMatrix;
use nalgebra::DVector;
use serde::Serialize;
use std::sync::Arc;

/// Bulk data f(x, t).
pub type BulkData = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
/// Boundary data g(x, n, t) with outward normal n.
pub type BoundaryData = Arc<dyn Fn(Point, Point, f64) -> f64 + Send + Sync>;

pub fn zero_bulk_data() -> BulkData {
    Arc::new(|_, _| 0.0)
}

pub fn zero_boundary_data() -> BoundaryData {
    Arc::new(|_, _, _| 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    HomogeneousDirichlet,
    DirichletPdae,
    Wentzell,
    Nonlocal,
}

/// Assembled constituent operators, kept for verification and elimination.
pub struct SystemBlocks {
    pub mass_bulk: SparseMatrix,
    pub stiffness_bulk: SparseMatrix,
    pub mass_boundary: Option<SparseMatrix>,
    pub stiffness_boundary: Option<SparseMatrix>,
    pub alpha_boundary: Option<SparseMatrix>,
    pub trace: Option<SparseMatrix>,
}

pub type TimeVector = Box<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// One of the block DAE formulations, immutable after build.
pub struct PdaeSystem {
    pub formulation: Formulation,
    /// Block mass, symmetric positive definite.
    pub e: SparseMatrix,
    /// Block stiffness.
    pub a: SparseMatrix,
    /// Constraint matrix, full row rank (may have zero rows).
    pub b: SparseMatrix,
    load: TimeVector,
    constraint: TimeVector,
    pub n_u: usize,
    pub n_p: usize,
    pub n_lambda: usize,
    pub blocks: SystemBlocks,
    /// For the homogeneous Dirichlet reduction: bulk node ids of the interior
    /// unknowns.
    pub interior_ids: Option<Vec<usize>>,
}

impl PdaeSystem {
    /// Assemble a system directly from its blocks. Used for reduced systems
    /// (constraint elimination) and small hand-built test problems.
    pub fn from_parts(
        formulation: Formulation,
        e: SparseMatrix,
        a: SparseMatrix,
        b: SparseMatrix,
        load: TimeVector,
        constraint: TimeVector,
        n_u: usize,
        n_p: usize,
    ) -> Result<Self> {
        let n_lambda = b.n_rows();
        let blocks = SystemBlocks {
            mass_bulk: e.clone(),
            stiffness_bulk: a.clone(),
            mass_boundary: None,
            stiffness_boundary: None,
            alpha_boundary: None,
            trace: None,
        };
        let sys = PdaeSystem {
            formulation,
            e,
            a,
            b,
            load,
            constraint,
            n_u,
            n_p,
            n_lambda,
            blocks,
            interior_ids: None,
        };
        validate_structure(&sys)?;
        Ok(sys)
    }

    pub fn n_x(&self) -> usize {
        self.n_u + self.n_p
    }

    pub fn load(&self, t: f64) -> DVector<f64> {
        (self.load)(t)
    }

    pub fn constraint_data(&self, t: f64) -> DVector<f64> {
        (self.constraint)(t)
    }

    /// Replace the constraint data (testing hook for inconsistent
    /// initialization; the coupled formulations use 0).
    pub fn with_constraint_data(mut self, c: TimeVector) -> Self {
        self.constraint = c;
        self
    }

    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&self.e.matvec(x))
    }

    pub fn constraint_residual(&self, x: &DVector<f64>, t: f64) -> f64 {
        if self.n_lambda == 0 {
            return 0.0;
        }
        (self.b.matvec(x) - self.constraint_data(t)).norm()
    }

    pub fn summary(&self, consistency_residual: Option<f64>) -> SystemSummary {
        SystemSummary {
            formulation: self.formulation,
            n_u: self.n_u,
            n_p: self.n_p,
            n_lambda: self.n_lambda,
            nnz_e: self.e.nnz(),
            nnz_a: self.a.nnz(),
            nnz_b: self.b.nnz(),
            consistency_residual,
        }
    }
}

/// Run-manifest serialization of the system dimensions.
#[derive(Serialize)]
pub struct SystemSummary {
    pub formulation: Formulation,
    pub n_u: usize,
    pub n_p: usize,
    pub n_lambda: usize,
    pub nnz_e: usize,
    pub nnz_a: usize,
    pub nnz_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency_residual: Option<f64>,
}

/// Shared structural checks: E SPD, B full row rank, consistent dimensions.
fn validate_structure(sys: &PdaeSystem) -> Result<()> {
    let n_x = sys.n_x();
    if sys.e.n_rows() != n_x || sys.a.n_rows() != n_x || sys.b.n_cols() != n_x {
        return Err(Error::DimensionMismatch(
            "block dimensions are inconsistent".into(),
        ));
    }
    if sys.e.symmetry_defect() > 1e-13 {
        return Err(Error::Incompatible("block mass E is not symmetric".into()));
    }
    if sys.e.to_dense().cholesky().is_none() {
        return Err(Error::Incompatible(
            "block mass E is not positive definite".into(),
        ));
    }
    if sys.n_lambda > 0 {
        let rank = linalg::numerical_rank(&sys.b.to_dense(), 1e-12);
        if rank < sys.n_lambda {
            return Err(Error::RankDeficientConstraint(format!(
                "B has {} rows but numerical rank {rank}",
                sys.n_lambda
            )));
        }
    }
    Ok(())
}

/// Unconstrained baseline: homogeneous Dirichlet conditions, dynamics on the
/// interior degrees of freedom only.
pub fn build_homogeneous_dirichlet(
    mesh: &BulkMesh,
    coeffs: &CoefficientSet,
    f: BulkData,
) -> Result<PdaeSystem> {
    let mass = assemble_mass_bulk(mesh);
    let stiff = assemble_stiffness_bulk(mesh, &coeffs.kappa)?;
    let boundary: std::collections::BTreeSet<usize> =
        mesh.boundary_node_ids.iter().copied().collect();
    let interior: Vec<usize> = (0..mesh.nodes.len())
        .filter(|i| !boundary.contains(i))
        .collect();
    if interior.is_empty() {
        return Err(Error::InvalidMesh(
            "mesh has no interior nodes; refine it".into(),
        ));
    }
    let restrict = |m: &SparseMatrix| {
        let mut pos = vec![usize::MAX; m.n_rows()];
        for (k, &i) in interior.iter().enumerate() {
            pos[i] = k;
        }
        let mut coo = crate::sparse::CooBuilder::new(interior.len(), interior.len());
        for (k, &i) in interior.iter().enumerate() {
            let (cols, vals) = m.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if pos[*c] != usize::MAX {
                    coo.push(k, pos[*c], *v);
                }
            }
        }
        coo.build()
    };
    let e = restrict(&mass);
    let a = restrict(&stiff);
    let n = interior.len();
    let mesh_c = mesh.clone();
    let interior_c = interior.clone();
    let load: TimeVector = Box::new(move |t| {
        let full = assemble_load_bulk(&mesh_c, &|x| f(x, t));
        DVector::from_fn(interior_c.len(), |k, _| full[interior_c[k]])
    });
    let sys = PdaeSystem {
        formulation: Formulation::HomogeneousDirichlet,
        e,
        a,
        b: SparseMatrix::zeros(0, n),
        load,
        constraint: Box::new(|_| DVector::zeros(0)),
        n_u: n,
        n_p: 0,
        n_lambda: 0,
        blocks: SystemBlocks {
            mass_bulk: mass,
            stiffness_bulk: stiff,
            mass_boundary: None,
            stiffness_boundary: None,
            alpha_boundary: None,
            trace: None,
        },
        interior_ids: Some(interior),
    };
    validate_structure(&sys)?;
    Ok(sys)
}

/// Dirichlet conditions as an explicit constraint `D u = g`, enforced weakly
/// through the boundary mass: B = M_Gamma T.
pub fn build_dirichlet_pdae(
    mesh: &BulkMesh,
    coeffs: &CoefficientSet,
    f: BulkData,
    g: BoundaryData,
) -> Result<PdaeSystem> {
    let bmesh = extract_boundary_mesh(mesh)?;
    let mass = assemble_mass_bulk(mesh);
    let stiff = assemble_stiffness_bulk(mesh, &coeffs.kappa)?;
    let mg = assemble_mass_boundary(&bmesh);
    let trace = assemble_trace_matrix(mesh, &bmesh)?;
    let b = mg.matmul(&trace)?;
    let n_u = mesh.nodes.len();
    let mesh_c = mesh.clone();
    let f_c = f.clone();
    let load: TimeVector = Box::new(move |t| assemble_load_bulk(&mesh_c, &|x| f_c(x, t)));
    let bmesh_c = bmesh.clone();
    let mg_c = mg.clone();
    let constraint: TimeVector = Box::new(move |t| {
        let nodal = DVector::from_fn(bmesh_c.n_nodes(), |i, _| {
            g(bmesh_c.node_point(i), bmesh_c.normals[i.min(bmesh_c.normals.len() - 1)], t)
        });
        mg_c.matvec(&nodal)
    });
    let n_lambda = b.n_rows();
    let sys = PdaeSystem {
        formulation: Formulation::DirichletPdae,
        e: mass.clone(),
        a: stiff.clone(),
        b,
        load,
        constraint,
        n_u,
        n_p: 0,
        n_lambda,
        blocks: SystemBlocks {
            mass_bulk: mass,
            stiffness_bulk: stiff,
            mass_boundary: Some(mg),
            stiffness_boundary: None,
            alpha_boundary: None,
            trace: Some(trace),
        },
        interior_ids: None,
    };
    validate_structure(&sys)?;
    Ok(sys)
}

/// Locally reacting (beta = 0) dynamic boundary conditions as a coupled block
/// DAE with constraint `p - D u = 0`.
pub fn build_wentzell_pdae(
    mesh: &BulkMesh,
    multiplier_mesh: Option<&BoundaryMesh>,
    coeffs: &CoefficientSet,
    f: BulkData,
    g: BoundaryData,
) -> Result<PdaeSystem> {
    if coeffs.beta != 0.0 {
        return Err(Error::InvalidCoefficient(format!(
            "the locally reacting builder requires beta = 0, got {} (use the nonlocal builder)",
            coeffs.beta
        )));
    }
    build_coupled(mesh, multiplier_mesh, coeffs, f, g, Formulation::Wentzell)
}

/// Nonlocal (beta > 0) dynamic boundary conditions: surface diffusion via the
/// Laplace-Beltrami stiffness in the boundary block.
pub fn build_nonlocal_pdae(
    mesh: &BulkMesh,
    multiplier_mesh: Option<&BoundaryMesh>,
    coeffs: &CoefficientSet,
    f: BulkData,
    g: BoundaryData,
) -> Result<PdaeSystem> {
    if coeffs.beta <= 0.0 {
        return Err(Error::InvalidCoefficient(format!(
            "the nonlocal builder requires beta > 0, got {}",
            coeffs.beta
        )));
    }
    if mesh.dim != 2 {
        return Err(Error::Incompatible(
            "beta > 0 requires a 2D domain: the Laplace-Beltrami operator is undefined on isolated boundary points"
                .into(),
        ));
    }
    build_coupled(mesh, multiplier_mesh, coeffs, f, g, Formulation::Nonlocal)
}

fn build_coupled(
    mesh: &BulkMesh,
    multiplier_mesh: Option<&BoundaryMesh>,
    coeffs: &CoefficientSet,
    f: BulkData,
    g: BoundaryData,
    formulation: Formulation,
) -> Result<PdaeSystem> {
    let bmesh = extract_boundary_mesh(mesh)?;
    let mass = assemble_mass_bulk(mesh);
    let stiff = assemble_stiffness_bulk(mesh, &coeffs.kappa)?;
    let mg = assemble_mass_boundary(&bmesh);
    let kg = assemble_stiffness_boundary(&bmesh);
    let na = assemble_alpha_boundary(&bmesh, &coeffs.alpha);
    let trace = assemble_trace_matrix(mesh, &bmesh)?;
    let mult = multiplier_mesh.unwrap_or(&bmesh);
    let spec = CouplingSpec {
        trace_mesh: &bmesh,
        multiplier_mesh: mult,
    };
    let b = assemble_coupling(&spec, &trace)?;
    let e = mass.block_diag(&mg);
    let boundary_block = kg.scale(coeffs.beta).add_scaled(&na, 1.0)?;
    let a = stiff.block_diag(&boundary_block);
    let n_u = mesh.nodes.len();
    let n_p = bmesh.n_nodes();
    let n_lambda = b.n_rows();
    let mesh_c = mesh.clone();
    let bmesh_c = bmesh.clone();
    let load: TimeVector = Box::new(move |t| {
        let fu = assemble_load_bulk(&mesh_c, &|x| f(x, t));
        let gp = assemble_load_boundary(&bmesh_c, &|x, n| g(x, n, t));
        let mut out = DVector::zeros(fu.len() + gp.len());
        out.rows_mut(0, fu.len()).copy_from(&fu);
        out.rows_mut(fu.len(), gp.len()).copy_from(&gp);
        out
    });
    let m_rows = n_lambda;
    let sys = PdaeSystem {
        formulation,
        e,
        a,
        b,
        load,
        constraint: Box::new(move |_| DVector::zeros(m_rows)),
        n_u,
        n_p,
        n_lambda,
        blocks: SystemBlocks {
            mass_bulk: mass,
            stiffness_bulk: stiff,
            mass_boundary: Some(mg),
            stiffness_boundary: Some(kg),
            alpha_boundary: Some(na),
            trace: Some(trace),
        },
        interior_ids: None,
    };
    validate_structure(&sys)?;
    Ok(sys)
}

/// Initial state with its constraint-consistency residual.
pub struct InitialState {
    pub x0: DVector<f64>,
    pub consistency_residual: f64,
}

impl InitialState {
    pub fn u0<'a>(&'a self, sys: &PdaeSystem) -> nalgebra::DVectorView<'a, f64> {
        self.x0.rows(0, sys.n_u)
    }

    pub fn p0<'a>(&'a self, sys: &PdaeSystem) -> nalgebra::DVectorView<'a, f64> {
        self.x0.rows(sys.n_u, sys.n_p)
    }
}

pub const TOL_CONSISTENCY: f64 = 1e-10;

/// Produce consistent initial data. If `p0_raw` is absent, `p0 := T u0`
/// (exactly consistent in the matching case); otherwise, and whenever the
/// constraint is violated, the raw pair is projected onto
/// `{x : B x = constraint_data(0)}` in the E-inner product.
pub fn consistent_init(
    sys: &PdaeSystem,
    u0_raw: &DVector<f64>,
    p0_raw: Option<&DVector<f64>>,
) -> Result<InitialState> {
    if u0_raw.len() != sys.n_u {
        return Err(Error::DimensionMismatch(format!(
            "u0 has length {}, expected {}",
            u0_raw.len(),
            sys.n_u
        )));
    }
    let mut x = DVector::zeros(sys.n_x());
    x.rows_mut(0, sys.n_u).copy_from(u0_raw);
    if sys.n_p > 0 {
        match p0_raw {
            Some(p0) => {
                if p0.len() != sys.n_p {
                    return Err(Error::DimensionMismatch(format!(
                        "p0 has length {}, expected {}",
                        p0.len(),
                        sys.n_p
                    )));
                }
                x.rows_mut(sys.n_u, sys.n_p).copy_from(p0);
            }
            None => {
                let trace = sys.blocks.trace.as_ref().ok_or_else(|| {
                    Error::Incompatible("system has no trace matrix for p0 := T u0".into())
                })?;
                let tu = trace.matvec(u0_raw);
                x.rows_mut(sys.n_u, sys.n_p).copy_from(&tu);
            }
        }
    }
    if sys.n_lambda == 0 {
        return Ok(InitialState {
            x0: x,
            consistency_residual: 0.0,
        });
    }
    let c0 = sys.constraint_data(0.0);
    let resid = (sys.b.matvec(&x) - &c0).norm();
    if resid <= 1e-12 * (1.0 + c0.norm()) {
        return Ok(InitialState {
            x0: x,
            consistency_residual: resid,
        });
    }
    // E-orthogonal projection onto the constraint manifold: a saddle solve
    let op = SaddleOperator::new(sys.e.clone(), sys.b.clone())?;
    let fact = op.factorize()?;
    let mut rhs = DVector::zeros(sys.n_x() + sys.n_lambda);
    rhs.rows_mut(0, sys.n_x()).copy_from(&sys.e.matvec(&x));
    rhs.rows_mut(sys.n_x(), sys.n_lambda).copy_from(&c0);
    let sol = fact.solve(&rhs)?;
    let x_proj = sol.rows(0, sys.n_x()).into_owned();
    let resid = (sys.b.matvec(&x_proj) - &c0).norm();
    Ok(InitialState {
        x0: x_proj,
        consistency_residual: resid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_independent_boundary_mesh, build_interval_mesh, build_square_mesh};

    fn unit_coeffs(beta: f64) -> CoefficientSet {
        CoefficientSet::constant(1.0, 1.0, beta).unwrap()
    }

    #[test]
    fn homogeneous_dirichlet_eliminates_boundary() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let sys =
            build_homogeneous_dirichlet(&mesh, &unit_coeffs(0.0), zero_bulk_data()).unwrap();
        assert_eq!(sys.n_u, 3);
        assert_eq!(sys.n_lambda, 0);
        assert_eq!(sys.interior_ids.as_ref().unwrap(), &vec![1, 2, 3]);
    }

    #[test]
    fn dirichlet_pdae_structure() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let g: BoundaryData = Arc::new(|_, _, t| t);
        let sys = build_dirichlet_pdae(&mesh, &unit_coeffs(0.0), zero_bulk_data(), g).unwrap();
        assert_eq!((sys.n_u, sys.n_p, sys.n_lambda), (5, 0, 2));
        // d = 1: M_Gamma = I, so B = T and constraint data = nodal g
        let c = sys.constraint_data(0.7);
        assert!((c[0] - 0.7).abs() < 1e-15);
        assert!((c[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn wentzell_requires_beta_zero() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let err = build_wentzell_pdae(
            &mesh,
            None,
            &unit_coeffs(0.5),
            zero_bulk_data(),
            zero_boundary_data(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn nonlocal_requires_2d() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let err = build_nonlocal_pdae(
            &mesh,
            None,
            &unit_coeffs(1.0),
            zero_bulk_data(),
            zero_boundary_data(),
        );
        assert!(matches!(err, Err(Error::Incompatible(_))));
        let err = build_nonlocal_pdae(
            &build_square_mesh(2).unwrap(),
            None,
            &unit_coeffs(0.0),
            zero_bulk_data(),
            zero_boundary_data(),
        );
        assert!(matches!(err, Err(Error::InvalidCoefficient(_))));
    }

    #[test]
    fn coupled_builders_share_block_shape() {
        let mesh = build_square_mesh(2).unwrap();
        let w = build_wentzell_pdae(
            &mesh,
            None,
            &unit_coeffs(0.0),
            zero_bulk_data(),
            zero_boundary_data(),
        )
        .unwrap();
        let n = build_nonlocal_pdae(
            &mesh,
            None,
            &unit_coeffs(1.0),
            zero_bulk_data(),
            zero_boundary_data(),
        )
        .unwrap();
        assert_eq!((w.n_u, w.n_p, w.n_lambda), (n.n_u, n.n_p, n.n_lambda));
        assert_eq!(w.e.n_rows(), n.e.n_rows());
        assert_eq!(w.b.n_rows(), n.b.n_rows());
    }

    #[test]
    fn nonmatching_multiplier_mesh_builds() {
        let mesh = build_square_mesh(2).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        let mult = build_independent_boundary_mesh(&bmesh.curve, 6, 0.1).unwrap();
        let sys = build_wentzell_pdae(
            &mesh,
            Some(&mult),
            &unit_coeffs(0.0),
            zero_bulk_data(),
            zero_boundary_data(),
        )
        .unwrap();
        assert_eq!(sys.n_lambda, 6);
        assert_eq!(sys.n_p, 8);
    }

    #[test]
    fn consistent_init_matching_trace_is_exact() {
        let mesh = build_square_mesh(2).unwrap();
        let sys = build_wentzell_pdae(
            &mesh,
            None,
            &unit_coeffs(0.0),
            zero_bulk_data(),
            zero_boundary_data(),
        )
        .unwrap();
        let u0 = DVector::from_fn(sys.n_u, |i, _| (i as f64).cos());
        let init = consistent_init(&sys, &u0, None).unwrap();
        assert!(init.consistency_residual <= 1e-13);
    }

    #[test]
    fn consistent_init_projects_perturbed_pair() {
        let mesh = build_square_mesh(2).unwrap();
        let sys = build_wentzell_pdae(
            &mesh,
            None,
            &unit_coeffs(0.0),
            zero_bulk_data(),
            zero_boundary_data(),
        )
        .unwrap();
        let u0 = DVector::from_fn(sys.n_u, |i, _| (i as f64 * 0.31).sin());
        let trace = sys.blocks.trace.as_ref().unwrap();
        let eps = 1e-3;
        let p0 = trace.matvec(&u0) + DVector::from_element(sys.n_p, eps);
        let init = consistent_init(&sys, &u0, Some(&p0)).unwrap();
        assert!(init.consistency_residual <= 1e-12);
        // the projection moves the pair by O(eps)
        let mut raw = DVector::zeros(sys.n_x());
        raw.rows_mut(0, sys.n_u).copy_from(&u0);
        raw.rows_mut(sys.n_u, sys.n_p).copy_from(&p0);
        let dist = (&init.x0 - &raw).norm();
        assert!(dist > 0.0 && dist < 10.0 * eps, "moved by {dist}");
        // oracle: direct dense solve of the projection saddle system
        let op = SaddleOperator::new(sys.e.clone(), sys.b.clone()).unwrap();
        let mut rhs = DVector::zeros(sys.n_x() + sys.n_lambda);
        rhs.rows_mut(0, sys.n_x()).copy_from(&sys.e.matvec(&raw));
        let full = op.assemble_dense();
        let sol = full.lu().solve(&rhs).unwrap();
        assert!((sol.rows(0, sys.n_x()) - &init.x0).amax() < 1e-10);
    }

    #[test]
    fn consistent_init_dirichlet_consistent_data() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let g: BoundaryData = Arc::new(|x, _, _| x[0] * x[0] + 1.0);
        let sys = build_dirichlet_pdae(&mesh, &unit_coeffs(0.0), zero_bulk_data(), g).unwrap();
        let u0 = DVector::from_fn(sys.n_u, |i, _| {
            let x = i as f64 * 0.25;
            x * x + 1.0
        });
        let init = consistent_init(&sys, &u0, None).unwrap();
        assert!(init.consistency_residual <= 1e-12);
    }

    #[test]
    fn summary_serializes() {
        let mesh = build_interval_mesh(2, 0.0, 1.0).unwrap();
        let sys = build_homogeneous_dirichlet(&mesh, &unit_coeffs(0.0), zero_bulk_data()).unwrap();
        let s = serde_json::to_string(&sys.summary(Some(0.0))).unwrap();
        assert!(s.contains("\"formulation\":\"homogeneous_dirichlet\""));
        assert!(s.contains("\"n_u\":1"));
    }
}
