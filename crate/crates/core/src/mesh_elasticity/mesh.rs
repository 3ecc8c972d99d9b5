use std::collections::HashMap;
use std::fmt::Write as _;

use crate::complex_analytic::Complex;
use crate::error::{Error, Result};

/// Relative area below which a reference triangle counts as degenerate.
pub const DEGENERATE_AREA_TOL: f64 = 1e-14;

/// Precomputed per-triangle weights: for a piecewise-linear map with vertex
/// images `f_k`, `f_z = Σ alpha[k] f_k` and `f_z̄ = Σ beta[k] f_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    pub alpha: [Complex; 3],
    pub beta: [Complex; 3],
}

impl TriangleGeometry {
    fn new(p: [Complex; 3], scale2: f64) -> Option<Self> {
        let e1 = p[1] - p[0];
        let e2 = p[2] - p[0];
        let area = 0.5 * (e1.conj() * e2).im;
        if !(area > DEGENERATE_AREA_TOL * scale2) {
            return None;
        }
        let det = e1 * e2.conj() - e1.conj() * e2;
        let a1 = e2.conj() / det;
        let a2 = -e1.conj() / det;
        let b1 = -e2 / det;
        let b2 = e1 / det;
        Some(TriangleGeometry {
            area,
            alpha: [-(a1 + a2), a1, a2],
            beta: [-(b1 + b2), b1, b2],
        })
    }

    /// `(f_z, f_z̄)` of the affine map taking the reference corners to `img`.
    #[inline]
    pub fn derivatives(&self, img: [Complex; 3]) -> (Complex, Complex) {
        (
            self.alpha[0] * img[0] + self.alpha[1] * img[1] + self.alpha[2] * img[2],
            self.beta[0] * img[0] + self.beta[1] * img[1] + self.beta[2] * img[2],
        )
    }
}

/// A validated, consistently oriented, edge-manifold triangle mesh.
#[derive(Clone, Debug)]
pub struct TriangleMesh {
    vertices: Vec<Complex>,
    triangles: Vec<[usize; 3]>,
    is_boundary: Vec<bool>,
    boundary_vertices: Vec<usize>,
    geometry: Vec<TriangleGeometry>,
    /// Directed boundary edges `(i, j)` with the mesh interior on the left.
    boundary_edges: Vec<(usize, usize)>,
    edge_count: usize,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Complex>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
        }
        let scale2 = bbox_extent(&vertices).powi(2);
        let mut used = vec![false; nv];
        let mut geometry = Vec::with_capacity(triangles.len());
        // directed edge -> owning triangle
        let mut directed: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has an index out of range"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
            let g = TriangleGeometry::new(tri.map(|i| vertices[i]), scale2)
                .ok_or(Error::DegenerateTriangle { index: Some(t) })?;
            geometry.push(g);
            for k in 0..3 {
                used[tri[k]] = true;
                let e = (tri[k], tri[(k + 1) % 3]);
                if directed.insert(e, t).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "edge {}-{} is used twice with the same orientation",
                        e.0, e.1
                    )));
                }
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!(
                "vertex {i} belongs to no triangle"
            )));
        }
        let mut boundary_edges: Vec<(usize, usize)> = directed
            .keys()
            .filter(|&&(i, j)| !directed.contains_key(&(j, i)))
            .copied()
            .collect();
        boundary_edges.sort_unstable();
        let interior_half_edges = directed.len() - boundary_edges.len();
        let edge_count = boundary_edges.len() + interior_half_edges / 2;
        let mut is_boundary = vec![false; nv];
        for &(i, j) in &boundary_edges {
            is_boundary[i] = true;
            is_boundary[j] = true;
        }
        let boundary_vertices = (0..nv).filter(|&i| is_boundary[i]).collect();
        Ok(TriangleMesh {
            vertices,
            triangles,
            is_boundary,
            boundary_vertices,
            geometry,
            boundary_edges,
            edge_count,
        })
    }

    pub fn vertices(&self) -> &[Complex] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn geometry(&self) -> &[TriangleGeometry] {
        &self.geometry
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| !self.is_boundary[i])
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count as i64 + self.triangles.len() as i64
    }

    pub fn total_area(&self) -> f64 {
        super::pairwise_sum(&self.geometry.iter().map(|g| g.area).collect::<Vec<_>>())
    }

    /// Largest distance between two vertices (exact over the boundary when
    /// the boundary is small, otherwise over all vertices).
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex> = self
            .boundary_vertices
            .iter()
            .map(|&i| self.vertices[i])
            .collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Area of the barycentric dual cell of each vertex.
    pub fn lumped_vertex_areas(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.vertices.len()];
        for (tri, g) in self.triangles.iter().zip(&self.geometry) {
            for &i in tri {
                out[i] += g.area / 3.0;
            }
        }
        out
    }

    /// Closed boundary loops, each listed counterclockwise relative to the
    /// interior (outer loops CCW, holes CW).
    pub fn boundary_loops(&self) -> Result<Vec<Vec<usize>>> {
        let mut next: HashMap<usize, usize> = HashMap::with_capacity(self.boundary_edges.len());
        for &(i, j) in &self.boundary_edges {
            if next.insert(i, j).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "boundary is pinched at vertex {i}"
                )));
            }
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut loops = Vec::new();
        for &(start, _) in &self.boundary_edges {
            if seen[start] {
                continue;
            }
            let mut lp = vec![start];
            seen[start] = true;
            let mut cur = next[&start];
            while cur != start {
                if seen[cur] {
                    return Err(Error::InvalidMesh("boundary loops intersect".into()));
                }
                seen[cur] = true;
                lp.push(cur);
                cur = *next
                    .get(&cur)
                    .ok_or_else(|| Error::InvalidMesh("open boundary chain".into()))?;
            }
            loops.push(lp);
        }
        Ok(loops)
    }

    /// Number of connected components of the triangle adjacency graph.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for tri in &self.triangles {
            for k in 1..3 {
                let a = find(&mut parent, tri[0]);
                let b = find(&mut parent, tri[k]);
                parent[a] = b;
            }
        }
        (0..self.vertices.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }

    /// A connected mesh with one boundary loop and Euler characteristic 1.
    pub fn is_simply_connected(&self) -> bool {
        self.component_count() == 1
            && self.euler_characteristic() == 1
            && self.boundary_loops().map(|l| l.len() == 1).unwrap_or(false)
    }

    /// Triangles around each vertex, in counterclockwise order.
    pub fn vertex_fans(&self) -> Vec<Vec<usize>> {
        // for vertex v, map "first neighbour" -> (triangle, second neighbour)
        let mut around: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                around[tri[k]].push((tri[(k + 1) % 3], t, tri[(k + 2) % 3]));
            }
        }
        around
            .into_iter()
            .enumerate()
            .map(|(v, items)| {
                if self.is_boundary[v] {
                    let mut ts: Vec<usize> = items.iter().map(|x| x.1).collect();
                    ts.sort_unstable();
                    return ts;
                }
                let mut out = Vec::with_capacity(items.len());
                let mut a = items[0].0;
                for _ in 0..items.len() {
                    match items.iter().find(|x| x.0 == a) {
                        Some(&(_, t, b)) => {
                            out.push(t);
                            a = b;
                        }
                        None => break,
                    }
                }
                out
            })
            .collect()
    }

    /// Split every triangle into four through its edge midpoints.
    pub fn refine(&self) -> TriangleMesh {
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, vs: &mut Vec<Complex>| -> usize {
            let key = (i.min(j), i.max(j));
            *mid.entry(key).or_insert_with(|| {
                vs.push((vs[i] + vs[j]) * 0.5);
                vs.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        TriangleMesh::new(vertices, triangles).expect("midpoint refinement keeps a valid mesh")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# {} vertices, {} triangles",
            self.vertices.len(),
            self.triangles.len()
        );
        for v in &self.vertices {
            let _ = writeln!(s, "v {:?} {:?}", v.re, v.im);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "t {} {} {}", t[0], t[1], t[2]);
        }
        for b in &self.boundary_vertices {
            let _ = writeln!(s, "b {b}");
        }
        s
    }

    /// Parse the line format `v x y`, `t i j k`, `b i`, `# comment`. If any
    /// `b` lines are present they must list exactly the boundary vertices.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut marked = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap_or("");
            let fields: Vec<&str> = parts.collect();
            let bad = |what: &str| Error::InvalidMesh(format!("line {}: {what}", ln + 1));
            match (tag, fields.len()) {
                ("v", 2) => {
                    let x: f64 = fields[0].parse().map_err(|_| bad("bad x coordinate"))?;
                    let y: f64 = fields[1].parse().map_err(|_| bad("bad y coordinate"))?;
                    vertices.push(Complex::new(x, y));
                }
                ("t", 3) => {
                    let mut t = [0usize; 3];
                    for k in 0..3 {
                        t[k] = fields[k].parse().map_err(|_| bad("bad vertex index"))?;
                    }
                    triangles.push(t);
                }
                ("b", 1) => {
                    marked.push(
                        fields[0]
                            .parse::<usize>()
                            .map_err(|_| bad("bad vertex index"))?,
                    );
                }
                _ => return Err(bad("unrecognized record")),
            }
        }
        let mesh = TriangleMesh::new(vertices, triangles)?;
        if !marked.is_empty() {
            marked.sort_unstable();
            marked.dedup();
            if marked != mesh.boundary_vertices {
                return Err(Error::InvalidMesh(
                    "boundary markers do not match the topological boundary".into(),
                ));
            }
        }
        Ok(mesh)
    }
}

fn bbox_extent(pts: &[Complex]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    (x1 - x0).max(y1 - y0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn square() -> TriangleMesh {
        TriangleMesh::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn square_topology() {
        let m = square();
        assert_eq!(m.boundary_vertices(), &[0, 1, 2, 3]);
        assert_eq!(m.edge_count(), 5);
        assert_eq!(m.euler_characteristic(), 1);
        assert!(m.is_simply_connected());
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        assert!((m.diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_meshes() {
        let cw = TriangleMesh::new(vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)], vec![[0, 1, 2]]);
        assert_eq!(
            cw.unwrap_err(),
            Error::DegenerateTriangle { index: Some(0) }
        );
        let flat = TriangleMesh::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)], vec![[0, 1, 2]]);
        assert!(matches!(flat, Err(Error::DegenerateTriangle { .. })));
        let range = TriangleMesh::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)], vec![[0, 1, 3]]);
        assert!(matches!(range, Err(Error::InvalidMesh(_))));
        // three triangles on one edge
        let fan = TriangleMesh::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 1.0), c(0.5, 2.0)],
            vec![[0, 1, 2], [0, 1, 3]],
        );
        assert!(matches!(fan, Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn text_round_trip() {
        let m = square().refine();
        let back = TriangleMesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        let wrong_marks = "v 0 0\nv 1 0\nv 0 1\nt 0 1 2\nb 0\n";
        assert!(TriangleMesh::from_text(wrong_marks).is_err());
        assert!(TriangleMesh::from_text("v 0 0\nq 1\n").is_err());
    }

    #[test]
    fn refinement_preserves_area_and_topology() {
        let m = square().refine().refine();
        assert_eq!(m.triangle_count(), 32);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert!(m.is_simply_connected());
        assert_eq!(m.boundary_loops().unwrap()[0].len(), 16);
    }

    #[test]
    fn fans_are_cyclic() {
        let m = square().refine();
        let fans = m.vertex_fans();
        for v in m.interior_vertices() {
            let fan = &fans[v];
            assert!(fan.len() >= 3);
            for w in 0..fan.len() {
                let t0 = m.triangles()[fan[w]];
                let t1 = m.triangles()[fan[(w + 1) % fan.len()]];
                let shared = t0.iter().filter(|i| t1.contains(i)).count();
                assert_eq!(shared, 2);
            }
        }
    }
}
