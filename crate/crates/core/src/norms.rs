//! Discrete norm matrices and error norms
//!
//! Fractional boundary norms are built spectrally from the generalized
//! eigenpairs of (M + K, M) on the boundary: with Z^T M Z = I and
//! eigenvalues L, the order-s matrix is X_s = M Z L^s Z^T M. This gives
//! X_1 = M + K and X_0 = M exactly, and the duality identity
//! M X_{1/2}^{-1} M = X_{-1/2} holds to rounding.

use crate::assembly::{
    assemble_mass_boundary, assemble_mass_bulk, assemble_stiffness_boundary,
    assemble_stiffness_bulk, constant_fn, GAUSS5, TRI6,
};
use crate::error::Result;
use crate::linalg::generalized_sym_eigen;
use crate::mesh::{BoundaryMesh, BoundaryTopology, BulkMesh, Elements, Point};
use crate::sparse::SparseMatrix;
use nalgebra::{DMatrix, DVector};

/// H^1-type bulk norm matrix M + K with unit diffusion.
pub fn bulk_h1_matrix(mesh: &BulkMesh) -> Result<SparseMatrix> {
    let m = assemble_mass_bulk(mesh);
    let k = assemble_stiffness_bulk(mesh, &constant_fn(1.0))?;
    m.add_scaled(&k, 1.0)
}

/// Boundary norm matrix of fractional order `s` in [-1, 1].
pub fn fractional_boundary_matrix(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    s: f64,
) -> Result<DMatrix<f64>> {
    let x1 = mass + stiffness;
    let (vals, z) = generalized_sym_eigen(&x1, mass)?;
    let pow = DMatrix::from_diagonal(&vals.map(|v| v.powf(s)));
    let mz = mass * &z;
    Ok(&mz * pow * mz.transpose())
}

/// The boundary norm family used by the stability estimates.
pub struct BoundaryNorms {
    pub mass: DMatrix<f64>,
    pub x_one: DMatrix<f64>,
    pub x_half: DMatrix<f64>,
    pub x_minus_half: DMatrix<f64>,
}

pub fn boundary_norms(bmesh: &BoundaryMesh) -> Result<BoundaryNorms> {
    let mass = assemble_mass_boundary(bmesh).to_dense();
    let stiffness = assemble_stiffness_boundary(bmesh).to_dense();
    Ok(BoundaryNorms {
        x_one: &mass + &stiffness,
        x_half: fractional_boundary_matrix(&mass, &stiffness, 0.5)?,
        x_minus_half: fractional_boundary_matrix(&mass, &stiffness, -0.5)?,
        mass,
    })
}

/// L^2(Omega) distance between a P1 coefficient vector and a smooth field,
/// by element-wise quadrature of degree >= 4.
pub fn l2_error_bulk(mesh: &BulkMesh, u_h: &DVector<f64>, exact: &dyn Fn(Point) -> f64) -> f64 {
    let mut acc = 0.0;
    match &mesh.elements {
        Elements::Segments(segs) => {
            for e in segs {
                let x0 = mesh.nodes[e[0]][0];
                let x1 = mesh.nodes[e[1]][0];
                let h = x1 - x0;
                for &(q, w) in GAUSS5.iter() {
                    let xi = 0.5 * (q + 1.0);
                    let x = x0 + xi * h;
                    let uh = (1.0 - xi) * u_h[e[0]] + xi * u_h[e[1]];
                    let d = uh - exact([x, 0.0]);
                    acc += 0.5 * h * w * d * d;
                }
            }
        }
        Elements::Triangles(tris) => {
            for e in tris {
                let p = [mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]]];
                let area = crate::mesh::triangle_area(p[0], p[1], p[2]);
                for &(bary, w) in TRI6.iter() {
                    let x = [
                        bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
                        bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
                    ];
                    let uh = bary[0] * u_h[e[0]] + bary[1] * u_h[e[1]] + bary[2] * u_h[e[2]];
                    let d = uh - exact(x);
                    acc += area * w * d * d;
                }
            }
        }
    }
    acc.sqrt()
}

/// L^2(Gamma) distance between a boundary coefficient vector and a smooth
/// field. For an interval domain the boundary measure counts the two
/// endpoints; on a closed curve the segments are integrated by Gauss rules.
pub fn l2_error_boundary(
    bmesh: &BoundaryMesh,
    p_h: &DVector<f64>,
    exact: &dyn Fn(Point) -> f64,
) -> f64 {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => {
            let mut acc = 0.0;
            for i in 0..2 {
                let d = p_h[i] - exact(bmesh.node_point(i));
                acc += d * d;
            }
            acc.sqrt()
        }
        BoundaryTopology::ClosedCurve => {
            let n = bmesh.n_nodes();
            let mut acc = 0.0;
            for (k, seg) in bmesh.segments.iter().enumerate() {
                let h = bmesh.segment_length(k);
                let s0 = bmesh.arc_coords[seg[0]];
                for &(q, w) in GAUSS5.iter() {
                    let xi = 0.5 * (q + 1.0);
                    let s = s0 + xi * h;
                    let x = bmesh.curve.embed(s);
                    let ph = (1.0 - xi) * p_h[seg[0]] + xi * p_h[seg[1] % n];
                    let d = ph - exact(x);
                    acc += 0.5 * h * w * d * d;
                }
            }
            acc.sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_interval_mesh, build_square_mesh, extract_boundary_mesh};

    #[test]
    fn fractional_endpoints_reproduce_mass_and_h1() {
        let mesh = build_square_mesh(3).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        let mass = assemble_mass_boundary(&bmesh).to_dense();
        let stiff = assemble_stiffness_boundary(&bmesh).to_dense();
        let x0 = fractional_boundary_matrix(&mass, &stiff, 0.0).unwrap();
        assert!((&x0 - &mass).abs().max() < 1e-12);
        let x1 = fractional_boundary_matrix(&mass, &stiff, 1.0).unwrap();
        assert!((&x1 - (&mass + &stiff)).abs().max() < 1e-11);
    }

    #[test]
    fn duality_identity_holds() {
        let mesh = build_square_mesh(3).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        let norms = boundary_norms(&bmesh).unwrap();
        let inv_half = norms.x_half.clone().lu().try_inverse().unwrap();
        let lhs = &norms.mass * inv_half * &norms.mass;
        assert!((lhs - &norms.x_minus_half).abs().max() < 1e-10);
    }

    #[test]
    fn half_norm_interpolates_between_l2_and_h1() {
        // |v|_{1/2}^2 <= |v|_0 |v|_1 by Cauchy-Schwarz in the spectral basis
        let mesh = build_square_mesh(2).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        let norms = boundary_norms(&bmesh).unwrap();
        for k in 0..bmesh.n_nodes() {
            let mut v = DVector::zeros(bmesh.n_nodes());
            v[k] = 1.0;
            v[(k + 3) % bmesh.n_nodes()] = -0.5;
            let n0 = v.dot(&(&norms.mass * &v));
            let nh = v.dot(&(&norms.x_half * &v));
            let n1 = v.dot(&(&norms.x_one * &v));
            assert!(nh * nh <= n0 * n1 * (1.0 + 1e-12));
            assert!(nh > 0.0);
        }
    }

    #[test]
    fn bulk_error_measures_interpolation_defect() {
        // exact field linear: P1 interpolation is exact, error ~ 0
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let lin = |x: Point| 2.0 * x[0] - 0.5;
        let u_h = DVector::from_fn(5, |i, _| lin([i as f64 * 0.25, 0.0]));
        assert!(l2_error_bulk(&mesh, &u_h, &lin) < 1e-14);
        // quadratic field: interpolation error at h = 1/4 is
        // ||x^2 - I_h x^2||, computable in closed form per element:
        // integral of (xi (1-xi) h^2)^2 over the element = h^5/30
        let quad = |x: Point| x[0] * x[0];
        let u_q = DVector::from_fn(5, |i, _| quad([i as f64 * 0.25, 0.0]));
        let expected = (4.0_f64 * 0.25_f64.powi(5) / 30.0).sqrt();
        let got = l2_error_bulk(&mesh, &u_q, &quad);
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn boundary_error_counting_measure_for_interval() {
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        let p_h = DVector::from_vec(vec![1.0, 2.0]);
        // exact = 0: error is the Euclidean norm of the endpoint values
        let err = l2_error_boundary(&bmesh, &p_h, &|_| 0.0);
        assert!((err - 5.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn boundary_error_vanishes_for_interpolated_linear_field() {
        let mesh = build_square_mesh(4).unwrap();
        let bmesh = extract_boundary_mesh(&mesh).unwrap();
        // field linear along each edge: x + y restricted to the boundary is
        // piecewise linear in arc length, so P1 interpolation is exact
        let f = |x: Point| x[0] + 2.0 * x[1];
        let p_h = DVector::from_fn(bmesh.n_nodes(), |i, _| f(bmesh.node_point(i)));
        assert!(l2_error_boundary(&bmesh, &p_h, &f) < 1e-13);
    }
}
