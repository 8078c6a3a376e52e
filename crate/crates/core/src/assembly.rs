//! Assembly of the discrete operators: bulk mass/stiffness, boundary mass and
//! Laplace-Beltrami stiffness, the reaction term on the boundary, trace and
//! coupling matrices, and load vectors.
//!
//! Everything is P1 Lagrange. On the boundary of the square the operators are
//! assembled on the closed arc-length curve, so corner kinks are admissible.
//! For d = 1 the boundary carries the counting measure on the two endpoints:
//! the boundary mass is the 2x2 identity and the Laplace-Beltrami stiffness
//! vanishes.

use crate::error::{Error, Result};
use crate::mesh::{BoundaryMesh, BoundaryTopology, BulkMesh, Elements, Point};
use crate::sparse::{CooBuilder, SparseMatrix};
use nalgebra::DVector;
use std::sync::Arc;

/// Scalar coefficient field on the domain or the boundary.
pub type SpatialFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Boundary data may depend on the outward normal (normal-flux terms).
pub type BoundaryFn = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;

pub fn constant_fn(c: f64) -> SpatialFn {
    Arc::new(move |_| c)
}

/// Problem coefficients: diffusion kappa (bounded below by `c_kappa` > 0),
/// boundary reaction alpha, surface diffusion beta >= 0.
#[derive(Clone)]
pub struct CoefficientSet {
    pub kappa: SpatialFn,
    pub c_kappa: f64,
    pub alpha: SpatialFn,
    pub beta: f64,
}

impl CoefficientSet {
    pub fn new(kappa: SpatialFn, c_kappa: f64, alpha: SpatialFn, beta: f64) -> Result<Self> {
        if c_kappa <= 0.0 {
            return Err(Error::InvalidCoefficient(format!(
                "c_kappa must be positive, got {c_kappa}"
            )));
        }
        if beta < 0.0 {
            return Err(Error::InvalidCoefficient(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        Ok(Self {
            kappa,
            c_kappa,
            alpha,
            beta,
        })
    }

    pub fn constant(kappa: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(constant_fn(kappa), kappa, constant_fn(alpha), beta)
    }
}

/// Pairing of the trace mesh (hosting the boundary unknown p and the trace of
/// u) with the multiplier mesh. Both parametrize the same curve.
pub struct CouplingSpec<'a> {
    pub trace_mesh: &'a BoundaryMesh,
    pub multiplier_mesh: &'a BoundaryMesh,
}

// 2-point Gauss-Legendre on [-1, 1]
const GAUSS2: [(f64, f64); 2] = [(-0.5773502691896257, 1.0), (0.5773502691896257, 1.0)];

// 5-point Gauss-Legendre on [-1, 1]; used where coefficient fields must be
// integrated well beyond P1 exactness
pub(crate) const GAUSS5: [(f64, f64); 5] = [
    (-0.9061798459386640, 0.2369268850561891),
    (-0.5384693101056831, 0.4786286704993665),
    (0.0, 0.5688888888888889),
    (0.5384693101056831, 0.4786286704993665),
    (0.9061798459386640, 0.2369268850561891),
];

// degree-4 triangle rule (6 points), barycentric coordinates and weights
pub(crate) const TRI6: [([f64; 3], f64); 6] = [
    (
        [0.108103018168070, 0.445948490915965, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.108103018168070, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.445948490915965, 0.108103018168070],
        0.223381589678011,
    ),
    (
        [0.816847572980459, 0.091576213509771, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.816847572980459, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.091576213509771, 0.816847572980459],
        0.109951743655322,
    ),
];

/// L^2(Omega) mass matrix, exactly integrated P1 products.
pub fn assemble_mass_bulk(mesh: &BulkMesh) -> SparseMatrix {
    let n = mesh.nodes.len();
    let mut coo = CooBuilder::new(n, n);
    match &mesh.elements {
        Elements::Segments(segs) => {
            for e in segs {
                let h = mesh.nodes[e[1]][0] - mesh.nodes[e[0]][0];
                let local = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
                for (i, &gi) in e.iter().enumerate() {
                    for (j, &gj) in e.iter().enumerate() {
                        coo.push(gi, gj, local[i][j]);
                    }
                }
            }
        }
        Elements::Triangles(tris) => {
            for t in tris {
                let area = crate::mesh::triangle_area(
                    mesh.nodes[t[0]],
                    mesh.nodes[t[1]],
                    mesh.nodes[t[2]],
                );
                for (i, &gi) in t.iter().enumerate() {
                    for (j, &gj) in t.iter().enumerate() {
                        let w = if i == j { area / 6.0 } else { area / 12.0 };
                        coo.push(gi, gj, w);
                    }
                }
            }
        }
    }
    coo.build()
}

/// Stiffness matrix int kappa grad(u).grad(v); kappa sampled at quadrature
/// points must stay positive.
pub fn assemble_stiffness_bulk(mesh: &BulkMesh, kappa: &SpatialFn) -> Result<SparseMatrix> {
    let n = mesh.nodes.len();
    let mut coo = CooBuilder::new(n, n);
    match &mesh.elements {
        Elements::Segments(segs) => {
            for e in segs {
                let x0 = mesh.nodes[e[0]][0];
                let x1 = mesh.nodes[e[1]][0];
                let h = x1 - x0;
                let mid = 0.5 * (x0 + x1);
                let mut kbar = 0.0;
                for (xi, w) in GAUSS2 {
                    let x = mid + 0.5 * h * xi;
                    let k = kappa([x, 0.0]);
                    check_kappa(k, [x, 0.0])?;
                    kbar += 0.5 * w * k;
                }
                let k = kbar / h;
                coo.push(e[0], e[0], k);
                coo.push(e[1], e[1], k);
                coo.push(e[0], e[1], -k);
                coo.push(e[1], e[0], -k);
            }
        }
        Elements::Triangles(tris) => {
            for t in tris {
                let p = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
                let area = crate::mesh::triangle_area(p[0], p[1], p[2]);
                // constant P1 gradients
                let mut grads = [[0.0f64; 2]; 3];
                for i in 0..3 {
                    let a = p[(i + 1) % 3];
                    let b = p[(i + 2) % 3];
                    grads[i] = [
                        (a[1] - b[1]) / (2.0 * area),
                        (b[0] - a[0]) / (2.0 * area),
                    ];
                }
                // kappa averaged by the edge-midpoint rule (degree 2)
                let mut kbar = 0.0;
                for i in 0..3 {
                    let a = p[i];
                    let b = p[(i + 1) % 3];
                    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                    let k = kappa(m);
                    check_kappa(k, m)?;
                    kbar += k / 3.0;
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let g = grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1];
                        coo.push(t[i], t[j], kbar * area * g);
                    }
                }
            }
        }
    }
    Ok(coo.build())
}

fn check_kappa(k: f64, x: Point) -> Result<()> {
    if k <= 0.0 {
        return Err(Error::InvalidCoefficient(format!(
            "kappa({:?}) = {k} violates kappa >= c_kappa > 0",
            x
        )));
    }
    Ok(())
}

/// L^2(Gamma) mass matrix on the boundary mesh. For d = 1 this is the
/// counting measure on the two endpoints, i.e. the identity.
pub fn assemble_mass_boundary(bmesh: &BoundaryMesh) -> SparseMatrix {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => SparseMatrix::identity(2),
        BoundaryTopology::ClosedCurve => {
            let n = bmesh.n_nodes();
            let mut coo = CooBuilder::new(n, n);
            for (k, seg) in bmesh.segments.iter().enumerate() {
                let h = bmesh.segment_length(k);
                let [i, j] = *seg;
                coo.push(i, i, h / 3.0);
                coo.push(j, j, h / 3.0);
                coo.push(i, j, h / 6.0);
                coo.push(j, i, h / 6.0);
            }
            coo.build()
        }
    }
}

/// Laplace-Beltrami stiffness on the closed boundary curve; the zero matrix
/// for d = 1 (no tangential direction on isolated points).
pub fn assemble_stiffness_boundary(bmesh: &BoundaryMesh) -> SparseMatrix {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => SparseMatrix::zeros(2, 2),
        BoundaryTopology::ClosedCurve => {
            let n = bmesh.n_nodes();
            let mut coo = CooBuilder::new(n, n);
            for (k, seg) in bmesh.segments.iter().enumerate() {
                let h = bmesh.segment_length(k);
                let [i, j] = *seg;
                coo.push(i, i, 1.0 / h);
                coo.push(j, j, 1.0 / h);
                coo.push(i, j, -1.0 / h);
                coo.push(j, i, -1.0 / h);
            }
            coo.build()
        }
    }
}

/// Weighted boundary mass int_Gamma alpha p q ds; equals alpha * M_Gamma for
/// constant alpha. Alpha may be negative.
pub fn assemble_alpha_boundary(bmesh: &BoundaryMesh, alpha: &SpatialFn) -> SparseMatrix {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => {
            let mut coo = CooBuilder::new(2, 2);
            for i in 0..2 {
                coo.push(i, i, alpha(bmesh.node_point(i)));
            }
            coo.build()
        }
        BoundaryTopology::ClosedCurve => {
            let n = bmesh.n_nodes();
            let mut coo = CooBuilder::new(n, n);
            for (k, seg) in bmesh.segments.iter().enumerate() {
                let [i, j] = *seg;
                let s0 = bmesh.arc_coords[i];
                let s1 = s0 + bmesh.segment_length(k);
                let mut local = [[0.0f64; 2]; 2];
                // split at polyline corners so alpha(x) stays smooth per piece
                for (a, b) in split_at_corners(bmesh, s0, s1) {
                    let mid = 0.5 * (a + b);
                    let half = 0.5 * (b - a);
                    for (xi, w) in GAUSS5 {
                        let s = mid + half * xi;
                        let av = alpha(bmesh.curve.embed(s));
                        let chi_j = (s - s0) / (s1 - s0);
                        let chi_i = 1.0 - chi_j;
                        let wq = w * half;
                        local[0][0] += wq * av * chi_i * chi_i;
                        local[0][1] += wq * av * chi_i * chi_j;
                        local[1][0] += wq * av * chi_j * chi_i;
                        local[1][1] += wq * av * chi_j * chi_j;
                    }
                }
                coo.push(i, i, local[0][0]);
                coo.push(i, j, local[0][1]);
                coo.push(j, i, local[1][0]);
                coo.push(j, j, local[1][1]);
            }
            coo.build()
        }
    }
}

fn split_at_corners(bmesh: &BoundaryMesh, s0: f64, s1: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![s0];
    pts.extend(bmesh.curve.corners_within(s0, s1));
    pts.push(s1);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Nodal trace: boolean selection matrix mapping bulk coefficients to the
/// coefficients on the trace mesh.
pub fn assemble_trace_matrix(mesh: &BulkMesh, bmesh: &BoundaryMesh) -> Result<SparseMatrix> {
    let ids = bmesh.bulk_node_ids.as_ref().ok_or_else(|| {
        Error::Incompatible("boundary mesh is not induced by a bulk mesh".into())
    })?;
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    if sorted != mesh.boundary_node_ids {
        return Err(Error::Incompatible(
            "boundary mesh is not the trace mesh of this bulk mesh".into(),
        ));
    }
    let mut coo = CooBuilder::new(ids.len(), mesh.nodes.len());
    for (row, &bulk_id) in ids.iter().enumerate() {
        coo.push(row, bulk_id, 1.0);
    }
    Ok(coo.build())
}

/// Value of the P1 hat function of node `i` of `bmesh` at arc coordinate `s`
/// (periodic).
pub fn hat_value(bmesh: &BoundaryMesh, i: usize, s: f64) -> f64 {
    let total = bmesh.total_len;
    let n = bmesh.n_nodes();
    let si = bmesh.arc_coords[i];
    // periodic distance from node i
    let mut d = (s - si) % total;
    if d > 0.5 * total {
        d -= total;
    }
    if d < -0.5 * total {
        d += total;
    }
    let h_right = bmesh.segment_length(i);
    let h_left = bmesh.segment_length((i + n - 1) % n);
    if d >= 0.0 && d <= h_right {
        1.0 - d / h_right
    } else if d <= 0.0 && -d <= h_left {
        1.0 + d / h_left
    } else {
        0.0
    }
}

/// Cross mass matrix C_ij = int_Gamma chi_i phi_j ds between the P1 hats of
/// `rows` (multiplier mesh) and `cols` (trace mesh), integrated exactly on the
/// merged breakpoint partition of the two arc-length meshes.
pub fn assemble_cross_mass(rows: &BoundaryMesh, cols: &BoundaryMesh) -> Result<SparseMatrix> {
    match (rows.topology, cols.topology) {
        (BoundaryTopology::TwoPoints, BoundaryTopology::TwoPoints) => {
            // counting measure: hats are Kronecker deltas on the two vertices
            Ok(SparseMatrix::identity(2))
        }
        (BoundaryTopology::ClosedCurve, BoundaryTopology::ClosedCurve) => {
            let total = rows.total_len;
            if (total - cols.total_len).abs() > 1e-12 * total {
                return Err(Error::Incompatible(format!(
                    "boundary meshes parametrize different lengths: {} vs {}",
                    total, cols.total_len
                )));
            }
            // merged breakpoints over one period
            let mut brk: Vec<f64> = rows
                .arc_coords
                .iter()
                .chain(cols.arc_coords.iter())
                .copied()
                .collect();
            brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
            brk.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
            let n_int = brk.len();
            let mut coo = CooBuilder::new(rows.n_nodes(), cols.n_nodes());
            for k in 0..n_int {
                let s0 = brk[k];
                let s1 = if k + 1 < n_int { brk[k + 1] } else { brk[0] + total };
                if s1 - s0 < 1e-14 {
                    continue;
                }
                let sm = 0.5 * (s0 + s1);
                let (ra, rb) = nodes_of_segment_containing(rows, sm);
                let (ca, cb) = nodes_of_segment_containing(cols, sm);
                for &ri in &[ra, rb] {
                    for &cj in &[ca, cb] {
                        // both factors linear on (s0, s1): Simpson is exact
                        let f = |s: f64| hat_value(rows, ri, s) * hat_value(cols, cj, s);
                        let val = (s1 - s0) / 6.0 * (f(s0 + 1e-14) + 4.0 * f(sm) + f(s1 - 1e-14));
                        if val != 0.0 {
                            coo.push(ri, cj, val);
                        }
                    }
                }
            }
            Ok(coo.build())
        }
        _ => Err(Error::Incompatible(
            "cannot couple a two-point boundary with a closed curve".into(),
        )),
    }
}

fn nodes_of_segment_containing(bmesh: &BoundaryMesh, s: f64) -> (usize, usize) {
    let total = bmesh.total_len;
    let mut sw = s % total;
    if sw < 0.0 {
        sw += total;
    }
    let n = bmesh.n_nodes();
    // arc_coords sorted in [0, L); the segment starting at the last node <= sw
    let k = match bmesh
        .arc_coords
        .binary_search_by(|a| a.partial_cmp(&sw).unwrap())
    {
        Ok(k) => k,
        Err(0) => n - 1, // before the first node: wrap-around segment
        Err(k) => k - 1,
    };
    (k, (k + 1) % n)
}

/// Coupling matrix B with rows int_Gamma chi_i (p - D u) ds, where chi_i are
/// the P1 hats on the multiplier mesh: B = [-C T | C] with C the cross mass
/// against the trace mesh. In the matching case C = M_Gamma.
pub fn assemble_coupling(spec: &CouplingSpec, trace_matrix: &SparseMatrix) -> Result<SparseMatrix> {
    let c = if meshes_match(spec.trace_mesh, spec.multiplier_mesh) {
        assemble_mass_boundary(spec.trace_mesh)
    } else {
        assemble_cross_mass(spec.multiplier_mesh, spec.trace_mesh)?
    };
    let minus_ct = c.matmul(trace_matrix)?.scale(-1.0);
    minus_ct.hstack(&c)
}

fn meshes_match(a: &BoundaryMesh, b: &BoundaryMesh) -> bool {
    a.topology == b.topology
        && a.n_nodes() == b.n_nodes()
        && a.arc_coords
            .iter()
            .zip(&b.arc_coords)
            .all(|(x, y)| (x - y).abs() < 1e-13)
}

/// Consistent P1 load vector for bulk data `f` at a fixed time.
pub fn assemble_load_bulk(mesh: &BulkMesh, f: &dyn Fn(Point) -> f64) -> DVector<f64> {
    let mut load = DVector::zeros(mesh.nodes.len());
    match &mesh.elements {
        Elements::Segments(segs) => {
            for e in segs {
                let x0 = mesh.nodes[e[0]][0];
                let x1 = mesh.nodes[e[1]][0];
                let h = x1 - x0;
                for (xi, w) in GAUSS5 {
                    let x = 0.5 * (x0 + x1) + 0.5 * h * xi;
                    let t = (x - x0) / h;
                    let fv = f([x, 0.0]);
                    let wq = 0.5 * h * w;
                    load[e[0]] += wq * fv * (1.0 - t);
                    load[e[1]] += wq * fv * t;
                }
            }
        }
        Elements::Triangles(tris) => {
            for t in tris {
                let p = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
                let area = crate::mesh::triangle_area(p[0], p[1], p[2]);
                for (bary, w) in TRI6 {
                    let x = [
                        bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
                        bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
                    ];
                    let fv = f(x);
                    for i in 0..3 {
                        load[t[i]] += area * w * fv * bary[i];
                    }
                }
            }
        }
    }
    load
}

/// Consistent load vector for boundary data `g(x, n)` on the boundary mesh.
/// For d = 1 this is point evaluation at the two endpoints.
pub fn assemble_load_boundary(bmesh: &BoundaryMesh, g: &dyn Fn(Point, Point) -> f64) -> DVector<f64> {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => {
            let mut load = DVector::zeros(2);
            for i in 0..2 {
                load[i] = g(bmesh.node_point(i), bmesh.normals[i]);
            }
            load
        }
        BoundaryTopology::ClosedCurve => {
            let mut load = DVector::zeros(bmesh.n_nodes());
            for (k, seg) in bmesh.segments.iter().enumerate() {
                let [i, j] = *seg;
                let s0 = bmesh.arc_coords[i];
                let s1 = s0 + bmesh.segment_length(k);
                for (a, b) in split_at_corners(bmesh, s0, s1) {
                    let mid = 0.5 * (a + b);
                    let half = 0.5 * (b - a);
                    for (xi, w) in GAUSS5 {
                        let s = mid + half * xi;
                        let gv = g(bmesh.curve.embed(s), bmesh.curve.normal_at(s));
                        let chi_j = (s - s0) / (s1 - s0);
                        let wq = w * half;
                        load[i] += wq * gv * (1.0 - chi_j);
                        load[j] += wq * gv * chi_j;
                    }
                }
            }
            load
        }
    }
}
