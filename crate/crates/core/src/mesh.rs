//! Simplicial meshes of the bulk domain and of its boundary.
//!
//! Supported geometries are the interval `[a, b]` and the unit square. The
//! boundary of the square is handled as a single closed curve parametrized by
//! arc length, anchored at the lexicographically smallest boundary node and
//! traversed counter-clockwise. Boundary meshes may be induced by the bulk
//! mesh (trace meshes) or generated independently on the same curve.

use crate::error::{Error, Result};
use serde::Serialize;
use std::sync::Arc;

/// A point in the plane; 1D meshes use the x component only.
pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum Elements {
    Segments(Vec<[usize; 2]>),
    Triangles(Vec<[usize; 3]>),
}

impl Elements {
    pub fn len(&self) -> usize {
        match self {
            Elements::Segments(v) => v.len(),
            Elements::Triangles(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Facets {
    /// d = 1: boundary facets are single nodes.
    Points(Vec<usize>),
    /// d = 2: boundary facets are edges.
    Edges(Vec<[usize; 2]>),
}

impl Facets {
    pub fn len(&self) -> usize {
        match self {
            Facets::Points(v) => v.len(),
            Facets::Edges(v) => v.len(),
        }
    }
}

/// Simplicial discretization of the bulk domain.
#[derive(Debug, Clone)]
pub struct BulkMesh {
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub elements: Elements,
    pub boundary_facets: Facets,
    /// Sorted node indices lying on the boundary.
    pub boundary_node_ids: Vec<usize>,
}

/// Geometry of the boundary curve: a periodic polyline in arc-length
/// parametrization (d = 2) or two isolated endpoints (d = 1). Shared between
/// the trace mesh and any independent boundary mesh on the same curve.
#[derive(Debug, Clone)]
pub struct Curve {
    pub dim: usize,
    /// Arc-length breakpoints, `breaks[0] = 0`, `breaks[last] = L` (d = 2).
    /// For d = 1 these are the two vertex "coordinates" 0 and b - a.
    pub breaks: Vec<f64>,
    /// Polyline vertices; for d = 2 the first vertex is repeated at the end.
    pub points: Vec<Point>,
    /// Outward unit normal per polyline facet (d = 2) or per vertex (d = 1).
    pub normals: Vec<Point>,
    pub total_len: f64,
}

impl Curve {
    /// Point on the curve at arc coordinate `s` (taken modulo L for d = 2).
    pub fn embed(&self, s: f64) -> Point {
        match self.dim {
            1 => {
                // nearest of the two endpoints
                if s <= 0.5 * self.total_len {
                    self.points[0]
                } else {
                    self.points[1]
                }
            }
            _ => {
                let s = wrap_arc(s, self.total_len);
                let k = self.facet_containing(s);
                let s0 = self.breaks[k];
                let s1 = self.breaks[k + 1];
                let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
                let a = self.points[k];
                let b = self.points[k + 1];
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            }
        }
    }

    /// Outward unit normal at arc coordinate `s` (facet-wise constant).
    pub fn normal_at(&self, s: f64) -> Point {
        match self.dim {
            1 => {
                if s <= 0.5 * self.total_len {
                    self.normals[0]
                } else {
                    self.normals[1]
                }
            }
            _ => {
                let s = wrap_arc(s, self.total_len);
                self.normals[self.facet_containing(s)]
            }
        }
    }

    /// Arc coordinates of polyline corners strictly inside `(s0, s1)`, used to
    /// split quadrature intervals at kinks.
    pub fn corners_within(&self, s0: f64, s1: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.dim == 1 {
            return out;
        }
        for period in [-self.total_len, 0.0, self.total_len] {
            for &b in &self.breaks[..self.breaks.len() - 1] {
                let s = b + period;
                if s > s0 + 1e-13 && s < s1 - 1e-13 {
                    out.push(s);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    fn facet_containing(&self, s: f64) -> usize {
        // breaks is sorted; find k with breaks[k] <= s < breaks[k+1]
        match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&s).unwrap())
        {
            Ok(k) => k.min(self.breaks.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.breaks.len() - 2),
        }
    }
}

fn wrap_arc(s: f64, total: f64) -> f64 {
    let mut s = s % total;
    if s < 0.0 {
        s += total;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTopology {
    /// d = 1: two isolated vertices carrying the counting measure.
    TwoPoints,
    /// d = 2: single closed periodic curve.
    ClosedCurve,
}

/// Arc-length-parametrized 1D mesh of the boundary.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub topology: BoundaryTopology,
    /// Strictly increasing node arc coordinates in `[0, L)` for a closed
    /// curve; the two vertex coordinates for d = 1.
    pub arc_coords: Vec<f64>,
    /// Consecutive node pairs, periodic for a closed curve; empty for d = 1.
    pub segments: Vec<[usize; 2]>,
    /// Outward unit normal per segment (closed curve) or per vertex (d = 1).
    pub normals: Vec<Point>,
    pub curve: Arc<Curve>,
    /// When induced by a bulk mesh: the bulk node index of each boundary node.
    pub bulk_node_ids: Option<Vec<usize>>,
    pub total_len: f64,
}

impl BoundaryMesh {
    pub fn n_nodes(&self) -> usize {
        self.arc_coords.len()
    }

    pub fn node_point(&self, i: usize) -> Point {
        self.curve.embed(self.arc_coords[i])
    }

    pub fn is_trace_of(&self, mesh: &BulkMesh) -> bool {
        match &self.bulk_node_ids {
            Some(ids) => ids.len() == mesh.boundary_node_ids.len(),
            None => false,
        }
    }

    /// Segment length, respecting periodic wrap-around on a closed curve.
    pub fn segment_length(&self, k: usize) -> f64 {
        match self.topology {
            BoundaryTopology::TwoPoints => 0.0,
            BoundaryTopology::ClosedCurve => {
                let [i, j] = self.segments[k];
                let si = self.arc_coords[i];
                let sj = self.arc_coords[j];
                if sj > si {
                    sj - si
                } else {
                    sj + self.total_len - si
                }
            }
        }
    }
}

/// Uniform mesh of the interval `[a, b]` with `n_elems` segments.
pub fn build_interval_mesh(n_elems: usize, a: f64, b: f64) -> Result<BulkMesh> {
    if n_elems == 0 {
        return Err(Error::InvalidMesh("n_elems must be at least 1".into()));
    }
    if a >= b {
        return Err(Error::InvalidMesh(format!(
            "interval requires a < b, got [{a}, {b}]"
        )));
    }
    let n = n_elems;
    let h = (b - a) / n as f64;
    let nodes: Vec<Point> = (0..=n).map(|i| [a + i as f64 * h, 0.0]).collect();
    let elements = Elements::Segments((0..n).map(|i| [i, i + 1]).collect());
    Ok(BulkMesh {
        dim: 1,
        nodes,
        elements,
        boundary_facets: Facets::Points(vec![0, n]),
        boundary_node_ids: vec![0, n],
    })
}

/// Structured triangulation of the unit square with `n_per_side` cells per
/// side, each cell split along the diagonal from its lower-left corner.
pub fn build_square_mesh(n_per_side: usize) -> Result<BulkMesh> {
    if n_per_side == 0 {
        return Err(Error::InvalidMesh("n_per_side must be at least 1".into()));
    }
    let n = n_per_side;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let h = 1.0 / n as f64;
    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            nodes.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        edges.push([idx(i, 0), idx(i + 1, 0)]); // bottom
    }
    for j in 0..n {
        edges.push([idx(n, j), idx(n, j + 1)]); // right
    }
    for i in (0..n).rev() {
        edges.push([idx(i + 1, n), idx(i, n)]); // top
    }
    for j in (0..n).rev() {
        edges.push([idx(0, j + 1), idx(0, j)]); // left
    }
    let mut bnodes: Vec<usize> = edges.iter().flat_map(|e| e.iter().copied()).collect();
    bnodes.sort_unstable();
    bnodes.dedup();
    Ok(BulkMesh {
        dim: 2,
        nodes,
        elements: Elements::Triangles(tris),
        boundary_facets: Facets::Edges(edges),
        boundary_node_ids: bnodes,
    })
}

/// Order the boundary facets into a single closed chain (d = 2) or the two
/// endpoints (d = 1) and compute the arc-length parametrization. The origin is
/// the lexicographically smallest boundary node and a closed curve is
/// traversed counter-clockwise.
pub fn extract_boundary_mesh(mesh: &BulkMesh) -> Result<BoundaryMesh> {
    match mesh.dim {
        1 => extract_boundary_1d(mesh),
        2 => extract_boundary_2d(mesh),
        d => Err(Error::InvalidMesh(format!("unsupported dimension {d}"))),
    }
}

fn extract_boundary_1d(mesh: &BulkMesh) -> Result<BoundaryMesh> {
    let ids = match &mesh.boundary_facets {
        Facets::Points(p) => p.clone(),
        _ => return Err(Error::InvalidMesh("1D mesh with edge facets".into())),
    };
    if ids.len() != 2 {
        return Err(Error::InvalidMesh(format!(
            "1D boundary must be two vertices, got {}",
            ids.len()
        )));
    }
    let (left, right) = if mesh.nodes[ids[0]][0] <= mesh.nodes[ids[1]][0] {
        (ids[0], ids[1])
    } else {
        (ids[1], ids[0])
    };
    let a = mesh.nodes[left][0];
    let b = mesh.nodes[right][0];
    let curve = Curve {
        dim: 1,
        breaks: vec![0.0, b - a],
        points: vec![[a, 0.0], [b, 0.0]],
        normals: vec![[-1.0, 0.0], [1.0, 0.0]],
        total_len: b - a,
    };
    Ok(BoundaryMesh {
        topology: BoundaryTopology::TwoPoints,
        arc_coords: vec![0.0, b - a],
        segments: Vec::new(),
        normals: vec![[-1.0, 0.0], [1.0, 0.0]],
        curve: Arc::new(curve),
        bulk_node_ids: Some(vec![left, right]),
        total_len: b - a,
    })
}

fn extract_boundary_2d(mesh: &BulkMesh) -> Result<BoundaryMesh> {
    let edges = match &mesh.boundary_facets {
        Facets::Edges(e) => e,
        _ => return Err(Error::InvalidMesh("2D mesh with point facets".into())),
    };
    if edges.is_empty() {
        return Err(Error::InvalidMesh("no boundary facets".into()));
    }
    // adjacency of boundary nodes through boundary edges
    let mut adj: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for e in edges {
        adj.entry(e[0]).or_default().push(e[1]);
        adj.entry(e[1]).or_default().push(e[0]);
    }
    for (node, nb) in &adj {
        if nb.len() != 2 {
            return Err(Error::InvalidMesh(format!(
                "boundary is not a single closed curve: node {node} has {} boundary neighbors",
                nb.len()
            )));
        }
    }
    // deterministic anchor: lexicographically smallest boundary node coordinate
    let anchor = *adj
        .keys()
        .min_by(|&&a, &&b| {
            let pa = mesh.nodes[a];
            let pb = mesh.nodes[b];
            pa.partial_cmp(&pb).unwrap()
        })
        .ok_or_else(|| Error::InvalidMesh("empty boundary".into()))?;
    // walk the chain
    let mut chain = vec![anchor];
    let mut prev = anchor;
    let mut cur = {
        let nb = &adj[&anchor];
        // deterministic start direction: smaller coordinate first; orientation
        // is fixed afterwards by the signed area
        let a = mesh.nodes[nb[0]];
        let b = mesh.nodes[nb[1]];
        if a.partial_cmp(&b).unwrap() == std::cmp::Ordering::Less {
            nb[0]
        } else {
            nb[1]
        }
    };
    while cur != anchor {
        chain.push(cur);
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
        if chain.len() > adj.len() {
            return Err(Error::InvalidMesh("boundary walk did not close".into()));
        }
    }
    if chain.len() != adj.len() {
        return Err(Error::InvalidMesh(
            "boundary is not a single closed curve (multiply-connected domain?)".into(),
        ));
    }
    // counter-clockwise orientation via the shoelace formula
    let area: f64 = chain
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let j = chain[(k + 1) % chain.len()];
            let p = mesh.nodes[i];
            let q = mesh.nodes[j];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    if area < 0.0 {
        chain[1..].reverse();
    }
    // arc-length parametrization
    let n = chain.len();
    let mut arc_coords = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n + 1);
    let mut normals = Vec::with_capacity(n);
    let mut s = 0.0;
    for k in 0..n {
        arc_coords.push(s);
        let p = mesh.nodes[chain[k]];
        let q = mesh.nodes[chain[(k + 1) % n]];
        points.push(p);
        let dx = q[0] - p[0];
        let dy = q[1] - p[1];
        let len = (dx * dx + dy * dy).sqrt();
        normals.push([dy / len, -dx / len]);
        s += len;
    }
    points.push(mesh.nodes[chain[0]]);
    let total_len = s;
    let mut breaks = arc_coords.clone();
    breaks.push(total_len);
    let curve = Curve {
        dim: 2,
        breaks,
        points,
        normals: normals.clone(),
        total_len,
    };
    let segments = (0..n).map(|k| [k, (k + 1) % n]).collect();
    Ok(BoundaryMesh {
        topology: BoundaryTopology::ClosedCurve,
        arc_coords,
        segments,
        normals,
        curve: Arc::new(curve),
        bulk_node_ids: Some(chain),
        total_len,
    })
}

/// Uniform periodic mesh of `[0, L)` with `m` segments, shifted by `offset`.
/// Deliberately non-matching to the trace mesh when `offset != 0` or `m`
/// differs from the number of trace facets.
pub fn build_independent_boundary_mesh(
    curve: &Arc<Curve>,
    m: usize,
    offset: f64,
) -> Result<BoundaryMesh> {
    if curve.dim != 2 {
        return Err(Error::InvalidMesh(
            "independent boundary meshes require a closed curve (d = 2)".into(),
        ));
    }
    if m < 2 {
        return Err(Error::InvalidMesh("m must be at least 2".into()));
    }
    let total = curve.total_len;
    let h = total / m as f64;
    if !(0.0..h).contains(&offset) {
        return Err(Error::InvalidMesh(format!(
            "offset must satisfy 0 <= offset < L/m = {h}, got {offset}"
        )));
    }
    let arc_coords: Vec<f64> = (0..m).map(|k| offset + k as f64 * h).collect();
    let segments: Vec<[usize; 2]> = (0..m).map(|k| [k, (k + 1) % m]).collect();
    let normals: Vec<Point> = (0..m)
        .map(|k| curve.normal_at(arc_coords[k] + 0.5 * h))
        .collect();
    Ok(BoundaryMesh {
        topology: BoundaryTopology::ClosedCurve,
        arc_coords,
        segments,
        normals,
        curve: curve.clone(),
        bulk_node_ids: None,
        total_len: total,
    })
}

/// Consistency checks for the mesh invariants; used by tests and by builders
/// of derived objects.
pub fn validate_bulk_mesh(mesh: &BulkMesh) -> Result<()> {
    match (&mesh.elements, &mesh.boundary_facets) {
        (Elements::Segments(segs), Facets::Points(bpts)) => {
            for (k, e) in segs.iter().enumerate() {
                let len = mesh.nodes[e[1]][0] - mesh.nodes[e[0]][0];
                if len <= 0.0 {
                    return Err(Error::InvalidMesh(format!(
                        "segment {k} has non-positive length {len}"
                    )));
                }
            }
            for &p in bpts {
                let count = segs.iter().filter(|e| e.contains(&p)).count();
                if count != 1 {
                    return Err(Error::InvalidMesh(format!(
                        "boundary vertex {p} belongs to {count} elements"
                    )));
                }
            }
            let mut ids = bpts.clone();
            ids.sort_unstable();
            if ids != mesh.boundary_node_ids {
                return Err(Error::InvalidMesh(
                    "boundary_node_ids does not match boundary facets".into(),
                ));
            }
        }
        (Elements::Triangles(tris), Facets::Edges(bedges)) => {
            for (k, t) in tris.iter().enumerate() {
                if triangle_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]) <= 0.0 {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {k} has non-positive area"
                    )));
                }
            }
            // every edge is shared by 1 (boundary) or 2 (interior) triangles
            let mut edge_count: std::collections::BTreeMap<(usize, usize), usize> =
                Default::default();
            for t in tris {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                }
            }
            for (edge, count) in &edge_count {
                if *count > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge {edge:?} shared by {count} triangles (non-conforming mesh)"
                    )));
                }
            }
            for e in bedges {
                let key = (e[0].min(e[1]), e[0].max(e[1]));
                if edge_count.get(&key) != Some(&1) {
                    return Err(Error::InvalidMesh(format!(
                        "boundary facet {e:?} is not a face of exactly one element"
                    )));
                }
            }
            let mut ids: Vec<usize> = bedges.iter().flat_map(|e| e.iter().copied()).collect();
            ids.sort_unstable();
            ids.dedup();
            if ids != mesh.boundary_node_ids {
                return Err(Error::InvalidMesh(
                    "boundary_node_ids does not match boundary facets".into(),
                ));
            }
        }
        _ => {
            return Err(Error::InvalidMesh(
                "element/facet kinds do not match".into(),
            ))
        }
    }
    Ok(())
}

pub fn validate_boundary_mesh(bmesh: &BoundaryMesh) -> Result<()> {
    match bmesh.topology {
        BoundaryTopology::TwoPoints => Ok(()),
        BoundaryTopology::ClosedCurve => {
            for w in bmesh.arc_coords.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::InvalidMesh(
                        "arc coordinates not strictly increasing".into(),
                    ));
                }
            }
            let last = *bmesh.arc_coords.last().unwrap();
            if last >= bmesh.total_len {
                return Err(Error::InvalidMesh(
                    "arc coordinates must lie in [0, L)".into(),
                ));
            }
            let sum: f64 = (0..bmesh.segments.len())
                .map(|k| bmesh.segment_length(k))
                .sum();
            if (sum - bmesh.total_len).abs() > 1e-12 * bmesh.total_len {
                return Err(Error::InvalidMesh(format!(
                    "segment lengths sum to {sum}, expected {}",
                    bmesh.total_len
                )));
            }
            for n in &bmesh.normals {
                let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
                if (len - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidMesh(format!("normal has length {len}")));
                }
            }
            Ok(())
        }
    }
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// JSON dump schema for meshes: stable key order.
#[derive(Serialize)]
pub struct MeshDump {
    pub nodes: Vec<Point>,
    pub elements: Vec<Vec<usize>>,
    pub boundary_facets: Vec<Vec<usize>>,
    pub arc_coords: Vec<f64>,
}

pub fn dump_mesh_json(mesh: &BulkMesh, bmesh: &BoundaryMesh) -> String {
    let elements = match &mesh.elements {
        Elements::Segments(v) => v.iter().map(|e| e.to_vec()).collect(),
        Elements::Triangles(v) => v.iter().map(|e| e.to_vec()).collect(),
    };
    let boundary_facets = match &mesh.boundary_facets {
        Facets::Points(v) => v.iter().map(|&p| vec![p]).collect(),
        Facets::Edges(v) => v.iter().map(|e| e.to_vec()).collect(),
    };
    let dump = MeshDump {
        nodes: mesh.nodes.clone(),
        elements,
        boundary_facets,
        arc_coords: bmesh.arc_coords.clone(),
    };
    serde_json::to_string_pretty(&dump).expect("mesh dump serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_mesh_two_elements() {
        let m = build_interval_mesh(2, 0.0, 1.0).unwrap();
        let xs: Vec<f64> = m.nodes.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        assert_eq!(m.boundary_node_ids, vec![0, 2]);
        validate_bulk_mesh(&m).unwrap();
    }

    #[test]
    fn interval_mesh_minimal() {
        let m = build_interval_mesh(1, 0.0, 1.0).unwrap();
        assert_eq!(m.nodes.len(), 2);
        assert_eq!(m.boundary_node_ids, vec![0, 1]);
        validate_bulk_mesh(&m).unwrap();
    }

    #[test]
    fn interval_mesh_shifted() {
        let m = build_interval_mesh(4, -1.0, 1.0).unwrap();
        assert_eq!(m.nodes.len(), 5);
        for w in m.nodes.windows(2) {
            assert!((w[1][0] - w[0][0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn interval_mesh_rejects_bad_input() {
        assert!(build_interval_mesh(0, 0.0, 1.0).is_err());
        assert!(build_interval_mesh(2, 1.0, 1.0).is_err());
        assert!(build_interval_mesh(2, 2.0, 1.0).is_err());
    }

    #[test]
    fn square_mesh_counts() {
        let m1 = build_square_mesh(1).unwrap();
        assert_eq!(m1.nodes.len(), 4);
        assert_eq!(m1.elements.len(), 2);
        assert_eq!(m1.boundary_facets.len(), 4);
        let m2 = build_square_mesh(2).unwrap();
        assert_eq!(m2.nodes.len(), 9);
        assert_eq!(m2.elements.len(), 8);
        assert_eq!(m2.boundary_facets.len(), 8);
        validate_bulk_mesh(&m1).unwrap();
        validate_bulk_mesh(&m2).unwrap();
        assert!(build_square_mesh(0).is_err());
    }

    #[test]
    fn square_mesh_perimeter_length() {
        let m = build_square_mesh(4).unwrap();
        assert_eq!(m.nodes.len(), 25);
        assert_eq!(m.elements.len(), 32);
        let b = extract_boundary_mesh(&m).unwrap();
        assert!((b.total_len - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_interval_normals() {
        let m = build_interval_mesh(2, 0.0, 1.0).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        assert_eq!(b.topology, BoundaryTopology::TwoPoints);
        assert_eq!(b.normals[0], [-1.0, 0.0]);
        assert_eq!(b.normals[1], [1.0, 0.0]);
    }

    #[test]
    fn boundary_square_n2_segments() {
        let m = build_square_mesh(2).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        assert_eq!(b.segments.len(), 8);
        assert!((b.total_len - 4.0).abs() < 1e-14);
        for k in 0..8 {
            assert!((b.segment_length(k) - 0.5).abs() < 1e-14);
        }
        validate_boundary_mesh(&b).unwrap();
        // anchored at (0,0), counter-clockwise: second node is (0.5, 0)
        assert_eq!(b.node_point(0), [0.0, 0.0]);
        assert_eq!(b.node_point(1), [0.5, 0.0]);
    }

    #[test]
    fn boundary_square_n4_arc_coords() {
        let m = build_square_mesh(4).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        let expect: Vec<f64> = (0..16).map(|k| 0.25 * k as f64).collect();
        for (got, want) in b.arc_coords.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn boundary_normals_point_outward() {
        let m = build_square_mesh(3).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        for (k, n) in b.normals.iter().enumerate() {
            let [i, j] = b.segments[k];
            let p = b.node_point(i);
            let q = b.node_point(j);
            let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            let centroid = [0.5, 0.5];
            let dot = (mid[0] - centroid[0]) * n[0] + (mid[1] - centroid[1]) * n[1];
            assert!(dot > 0.0, "normal {n:?} at segment {k} is not outward");
        }
    }

    #[test]
    fn independent_mesh_uniform() {
        let m = build_square_mesh(4).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        let ind = build_independent_boundary_mesh(&b.curve, 8, 0.0).unwrap();
        let expect: Vec<f64> = (0..8).map(|k| 0.5 * k as f64).collect();
        assert_eq!(ind.arc_coords, expect);
        validate_boundary_mesh(&ind).unwrap();
    }

    #[test]
    fn independent_mesh_offset() {
        let m = build_square_mesh(4).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        let ind = build_independent_boundary_mesh(&b.curve, 8, 0.1).unwrap();
        for (k, s) in ind.arc_coords.iter().enumerate() {
            assert!((s - (0.1 + 0.5 * k as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn independent_mesh_six_segments() {
        let m = build_square_mesh(2).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        let ind = build_independent_boundary_mesh(&b.curve, 6, 0.0).unwrap();
        assert_eq!(ind.segments.len(), 6);
        for k in 0..6 {
            assert!((ind.segment_length(k) - 2.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn independent_mesh_rejects_bad_input() {
        let m = build_square_mesh(2).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        assert!(build_independent_boundary_mesh(&b.curve, 1, 0.0).is_err());
        assert!(build_independent_boundary_mesh(&b.curve, 4, 1.5).is_err());
        assert!(build_independent_boundary_mesh(&b.curve, 4, -0.1).is_err());
    }

    #[test]
    fn embed_roundtrip_on_square() {
        let m = build_square_mesh(2).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        // s = 1.25 lies on the right edge: (1, 0.25)
        let p = b.curve.embed(1.25);
        assert!((p[0] - 1.0).abs() < 1e-14 && (p[1] - 0.25).abs() < 1e-14);
        let n = b.curve.normal_at(1.25);
        assert_eq!(n, [1.0, 0.0]);
        // wrap-around
        let p = b.curve.embed(4.5);
        assert!((p[0] - 0.5).abs() < 1e-14 && p[1].abs() < 1e-14);
    }

    #[test]
    fn refinement_preserves_invariants() {
        for n in [2usize, 4, 8] {
            let m = build_square_mesh(n).unwrap();
            validate_bulk_mesh(&m).unwrap();
            let b = extract_boundary_mesh(&m).unwrap();
            validate_boundary_mesh(&b).unwrap();
            assert!((b.total_len - 4.0).abs() < 1e-12);
        }
        for n in [2usize, 4, 8] {
            let m = build_interval_mesh(n, 0.0, 1.0).unwrap();
            validate_bulk_mesh(&m).unwrap();
        }
    }

    #[test]
    fn mesh_dump_has_stable_keys() {
        let m = build_interval_mesh(2, 0.0, 1.0).unwrap();
        let b = extract_boundary_mesh(&m).unwrap();
        let s = dump_mesh_json(&m, &b);
        let ni = s.find("\"nodes\"").unwrap();
        let ei = s.find("\"elements\"").unwrap();
        let fi = s.find("\"boundary_facets\"").unwrap();
        let ai = s.find("\"arc_coords\"").unwrap();
        assert!(ni < ei && ei < fi && fi < ai);
    }
}
