//! Triangle meshes with per-triangle (P0) metric tensors: structured
//! generators, P1 finite-element assembly, geodesic distances and ball areas.

use super::MetricTensor;
use crate::numerics::SymBandMatrix;
use crate::{Error, Result};
use std::collections::BinaryHeap;

/// Triangle mesh in chart coordinates; `metric[t]` is the constant metric
/// tensor on triangle t.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub metric: Vec<[[f64; 2]; 2]>,
    /// labeled boundary node chains, ordered along the boundary
    pub boundary: Vec<(String, Vec<usize>)>,
    /// bandwidth of the natural numbering; used to size band factorizations
    pub bandwidth: usize,
}

impl TriMesh {
    /// Structured rectangle [x0,x1]x[y0,y1] with nx*ny vertices, metric from a
    /// field evaluated at triangle centroids. Boundary chains are labeled
    /// "bottom", "right", "top", "left".
    pub fn rectangle<F: Fn(f64, f64) -> [[f64; 2]; 2]>(
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        nx: usize,
        ny: usize,
        field: F,
    ) -> TriMesh {
        assert!(nx >= 2 && ny >= 2);
        let mut vertices = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                vertices.push([
                    x0 + (x1 - x0) * i as f64 / (nx - 1) as f64,
                    y0 + (y1 - y0) * j as f64 / (ny - 1) as f64,
                ]);
            }
        }
        let idx = |i: usize, j: usize| j * nx + i;
        let mut triangles = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                // alternate the diagonal for isotropy
                if (i + j) % 2 == 0 {
                    triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                    triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                } else {
                    triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
                    triangles.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
        }
        let metric = triangles
            .iter()
            .map(|t| {
                let c = centroid(&vertices, t);
                field(c[0], c[1])
            })
            .collect();
        let boundary = vec![
            ("bottom".into(), (0..nx).map(|i| idx(i, 0)).collect()),
            ("right".into(), (0..ny).map(|j| idx(nx - 1, j)).collect()),
            (
                "top".into(),
                (0..nx).rev().map(|i| idx(i, ny - 1)).collect(),
            ),
            ("left".into(), (0..ny).rev().map(|j| idx(0, j)).collect()),
        ];
        TriMesh {
            vertices,
            triangles,
            metric,
            boundary,
            bandwidth: nx + 1,
        }
    }

    /// Concentric-ring disc mesh of the given radius: a center vertex plus
    /// `rings` rings of `seg` vertices each. Ring r sits at radius
    /// radius * r / rings. Boundary chain "outer" is the outermost ring;
    /// intermediate rings are available through `ring_nodes`.
    pub fn disc<F: Fn(f64, f64) -> [[f64; 2]; 2]>(
        radius: f64,
        rings: usize,
        seg: usize,
        field: F,
    ) -> TriMesh {
        assert!(rings >= 2 && seg >= 3);
        let mut vertices = vec![[0.0, 0.0]];
        for r in 1..=rings {
            let rho = radius * r as f64 / rings as f64;
            for s in 0..seg {
                let th = 2.0 * std::f64::consts::PI * s as f64 / seg as f64;
                vertices.push([rho * th.cos(), rho * th.sin()]);
            }
        }
        let ring_first = |r: usize| 1 + (r - 1) * seg;
        let mut triangles = Vec::new();
        // fan around the center
        for s in 0..seg {
            triangles.push([0, ring_first(1) + s, ring_first(1) + (s + 1) % seg]);
        }
        // quads between rings
        for r in 1..rings {
            let a = ring_first(r);
            let b = ring_first(r + 1);
            for s in 0..seg {
                let s1 = (s + 1) % seg;
                triangles.push([a + s, b + s, b + s1]);
                triangles.push([a + s, b + s1, a + s1]);
            }
        }
        let metric = triangles
            .iter()
            .map(|t| {
                let c = centroid(&vertices, t);
                field(c[0], c[1])
            })
            .collect();
        let boundary = vec![(
            "outer".into(),
            (0..seg).map(|s| ring_first(rings) + s).collect(),
        )];
        TriMesh {
            vertices,
            triangles,
            metric,
            boundary,
            bandwidth: seg + 1,
        }
    }

    /// Node indices of ring r (1-based) of a disc mesh.
    pub fn ring_nodes(&self, seg: usize, r: usize) -> Vec<usize> {
        (0..seg).map(|s| 1 + (r - 1) * seg + s).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary_chain(&self, label: &str) -> Result<&[usize]> {
        self.boundary
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::InvalidArgument(format!("no boundary chain labeled '{label}'")))
    }

    /// Chart-coordinate area of triangle t.
    pub fn tri_area_chart(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])).abs()
    }

    /// Riemannian area of triangle t.
    pub fn tri_area(&self, t: usize) -> f64 {
        let g = MetricTensor {
            g: self.metric[t],
        };
        self.tri_area_chart(t) * g.volume_density()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.tri_area(t)).sum()
    }

    /// P1 stiffness matrix of the Dirichlet integral ∫ g^{ij} ∂_i u ∂_j v √g dx.
    pub fn stiffness(&self) -> SymBandMatrix {
        let n = self.num_vertices();
        let mut k = SymBandMatrix::zeros(n, self.bandwidth);
        for (t, tri) in self.triangles.iter().enumerate() {
            let g = MetricTensor {
                g: self.metric[t],
            };
            let ginv = g.inverse();
            let w = self.tri_area_chart(t) * g.volume_density();
            let grads = self.hat_gradients(t);
            for a in 0..3 {
                for b in a..3 {
                    let ga = grads[a];
                    let gb = grads[b];
                    let v = ginv.g[0][0] * ga[0] * gb[0]
                        + ginv.g[0][1] * (ga[0] * gb[1] + ga[1] * gb[0])
                        + ginv.g[1][1] * ga[1] * gb[1];
                    k.add(tri[a], tri[b], v * w);
                }
            }
        }
        k
    }

    /// Lumped mass vector: ∫ u v √g dx with row-sum lumping.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let n = self.num_vertices();
        let mut m = vec![0.0; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            let w = self.tri_area(t) / 3.0;
            for &v in tri {
                m[v] += w;
            }
        }
        m
    }

    /// Consistent mass matrix (P1): elementwise area/12 * (2 on diag, 1 off).
    pub fn consistent_mass(&self) -> SymBandMatrix {
        let n = self.num_vertices();
        let mut m = SymBandMatrix::zeros(n, self.bandwidth);
        for (t, tri) in self.triangles.iter().enumerate() {
            let w = self.tri_area(t) / 12.0;
            for a in 0..3 {
                for b in a..3 {
                    let v = if a == b { 2.0 * w } else { w };
                    m.add(tri[a], tri[b], v);
                }
            }
        }
        m
    }

    /// Chart gradients of the three hat functions on triangle t.
    pub fn hat_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        [
            [(q[1] - r[1]) / det, (r[0] - q[0]) / det],
            [(r[1] - p[1]) / det, (p[0] - r[0]) / det],
            [(p[1] - q[1]) / det, (q[0] - p[0]) / det],
        ]
    }

    /// Metric lengths of the segments of a boundary chain and per-node lumped
    /// length weights (half of each adjacent segment).
    pub fn chain_lengths(&self, chain: &[usize], closed: bool) -> (Vec<f64>, Vec<f64>) {
        let m = chain.len();
        let nseg = if closed { m } else { m - 1 };
        let mut seg = Vec::with_capacity(nseg);
        for s in 0..nseg {
            let a = chain[s];
            let b = chain[(s + 1) % m];
            let e = [
                self.vertices[b][0] - self.vertices[a][0],
                self.vertices[b][1] - self.vertices[a][1],
            ];
            let g = self.edge_metric(a, b);
            seg.push(g.length(e));
        }
        let mut w = vec![0.0; m];
        for s in 0..nseg {
            w[s] += seg[s] / 2.0;
            w[(s + 1) % m] += seg[s] / 2.0;
        }
        (seg, w)
    }

    fn edge_metric(&self, a: usize, b: usize) -> MetricTensor {
        // average the metric over triangles containing the edge
        let mut acc = [[0.0; 2]; 2];
        let mut count = 0.0;
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.contains(&a) && tri.contains(&b) {
                for i in 0..2 {
                    for j in 0..2 {
                        acc[i][j] += self.metric[t][i][j];
                    }
                }
                count += 1.0;
            }
        }
        if count == 0.0 {
            return MetricTensor::isotropic(1.0);
        }
        for row in acc.iter_mut() {
            for v in row.iter_mut() {
                *v /= count;
            }
        }
        MetricTensor { g: acc }
    }

    /// Riemannian area of the sublevel set {d <= r} of a vertex distance
    /// field: per triangle the piecewise-linear interpolant is clipped
    /// exactly, which makes the area O(h^2) accurate instead of O(h).
    pub fn geodesic_ball_area(&self, dist: &[f64], r: f64) -> f64 {
        let mut area = 0.0;
        for (t, tri) in self.triangles.iter().enumerate() {
            let d = [dist[tri[0]], dist[tri[1]], dist[tri[2]]];
            let frac = sublevel_fraction(d, r);
            if frac > 0.0 {
                area += frac * self.tri_area(t);
            }
        }
        area
    }

    /// Index of the vertex closest (in chart coordinates) to a point.
    pub fn nearest_vertex(&self, p: [f64; 2]) -> usize {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = (v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2);
            if d < bd {
                bd = d;
                best = i;
            }
        }
        best
    }
}

/// Area fraction of a triangle where the linear interpolant of the vertex
/// values d lies below the threshold r.
fn sublevel_fraction(d: [f64; 3], r: f64) -> f64 {
    let below: Vec<usize> = (0..3).filter(|&i| d[i] <= r).collect();
    match below.len() {
        3 => 1.0,
        0 => 0.0,
        1 => {
            let i = below[0];
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let tj = (r - d[i]) / (d[j] - d[i]);
            let tk = (r - d[i]) / (d[k] - d[i]);
            // small corner triangle at vertex i
            (tj * tk).clamp(0.0, 1.0)
        }
        2 => {
            // complement of the corner above the threshold
            let i = (0..3).find(|&i| d[i] > r).unwrap();
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let tj = (d[i] - r) / (d[i] - d[j]);
            let tk = (d[i] - r) / (d[i] - d[k]);
            1.0 - (tj * tk).clamp(0.0, 1.0)
        }
        _ => unreachable!(),
    }
}

fn centroid(vertices: &[[f64; 2]], tri: &[usize; 3]) -> [f64; 2] {
    let mut c = [0.0, 0.0];
    for &v in tri {
        c[0] += vertices[v][0] / 3.0;
        c[1] += vertices[v][1] / 3.0;
    }
    c
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap on distance
        other.0.partial_cmp(&self.0).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Geodesic distances from a source set: edge Dijkstra for initialization,
/// then triangle-based eikonal sweeps (the two-point planar update with each
/// triangle's metric) until convergence. The sweeps remove most of the
/// edge-graph metrication bias.
pub fn mesh_distances(mesh: &TriMesh, sources: &[usize]) -> Vec<f64> {
    let n = mesh.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    // adjacency with metric edge lengths
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let g = MetricTensor {
            g: mesh.metric[t],
        };
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let (va, vb) = (tri[a], tri[b]);
            let e = [
                mesh.vertices[vb][0] - mesh.vertices[va][0],
                mesh.vertices[vb][1] - mesh.vertices[va][1],
            ];
            let len = g.length(e);
            adj[va].push((vb, len));
            adj[vb].push((va, len));
        }
    }
    // triangles incident to each vertex, for local metric sampling
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            incident[v].push(t);
        }
    }
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(HeapItem(0.0, s));
    }
    // near-source initialization: straight-segment metric lengths remove the
    // first-order error from the distance-field singularity at the source
    if sources.len() == 1 {
        let s = sources[0];
        let h_local = adj[s]
            .iter()
            .map(|&(_, l)| l)
            .fold(f64::INFINITY, f64::min);
        let radius = 6.0 * h_local;
        let sp = mesh.vertices[s];
        for w in 0..n {
            if w == s {
                continue;
            }
            let wp = mesh.vertices[w];
            let chart_d = ((wp[0] - sp[0]).powi(2) + (wp[1] - sp[1]).powi(2)).sqrt();
            if chart_d > radius {
                continue;
            }
            // sample the P0 metric along the segment at nearest centroids
            let samples = 8;
            let mut len = 0.0;
            let dirv = [(wp[0] - sp[0]) / samples as f64, (wp[1] - sp[1]) / samples as f64];
            for m in 0..samples {
                let px = sp[0] + (m as f64 + 0.5) * dirv[0];
                let py = sp[1] + (m as f64 + 0.5) * dirv[1];
                let mut best_t = incident[s][0];
                let mut best_d = f64::INFINITY;
                for &t in incident[s].iter().chain(&incident[w]) {
                    let c = centroid(&mesh.vertices, &mesh.triangles[t]);
                    let d2 = (c[0] - px).powi(2) + (c[1] - py).powi(2);
                    if d2 < best_d {
                        best_d = d2;
                        best_t = t;
                    }
                }
                let g = MetricTensor {
                    g: mesh.metric[best_t],
                };
                len += g.length(dirv);
            }
            if len < dist[w] {
                dist[w] = len;
                heap.push(HeapItem(len, w));
            }
        }
    }
    while let Some(HeapItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len) in &adj[v] {
            let nd = d + len;
            if nd < dist[w] - 1e-15 {
                dist[w] = nd;
                heap.push(HeapItem(nd, w));
            }
        }
    }
    // eikonal relaxation sweeps
    for _ in 0..30 {
        let mut changed = false;
        for pass in 0..2 {
            let tri_iter: Box<dyn Iterator<Item = usize>> = if pass == 0 {
                Box::new(0..mesh.triangles.len())
            } else {
                Box::new((0..mesh.triangles.len()).rev())
            };
            for t in tri_iter {
                let tri = mesh.triangles[t];
                let g = MetricTensor {
                    g: mesh.metric[t],
                };
                for c in 0..3 {
                    let (ia, ib, ic) = (tri[(c + 1) % 3], tri[(c + 2) % 3], tri[c]);
                    if dist[ia].is_finite() && dist[ib].is_finite() {
                        let upd = triangle_update(
                            mesh.vertices[ia],
                            mesh.vertices[ib],
                            mesh.vertices[ic],
                            dist[ia],
                            dist[ib],
                            &g,
                        );
                        if upd < dist[ic] - 1e-13 {
                            dist[ic] = upd;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Planar two-point eikonal update: min over t of
/// (1-t) dA + t dB + |C - (A + t(B-A))|_g, solved in closed form.
fn triangle_update(a: [f64; 2], b: [f64; 2], c: [f64; 2], da: f64, db: f64, g: &MetricTensor) -> f64 {
    let v = [c[0] - a[0], c[1] - a[1]];
    let e = [b[0] - a[0], b[1] - a[1]];
    let quad = |u: [f64; 2], w: [f64; 2]| -> f64 {
        g.g[0][0] * u[0] * w[0]
            + g.g[0][1] * (u[0] * w[1] + u[1] * w[0])
            + g.g[1][1] * u[1] * w[1]
    };
    let f = |t: f64| -> f64 {
        let w = [v[0] - t * e[0], v[1] - t * e[1]];
        (1.0 - t) * da + t * db + g.length(w)
    };
    let mut best = f(0.0).min(f(1.0));
    // stationarity: delta * |v - t e|_g = b - a t with a = e.Ge, b = e.Gv
    let delta = db - da;
    let ae = quad(e, e);
    let be = quad(e, v);
    let cv = quad(v, v);
    // (a^2 - delta^2 a) t^2 + (2 delta^2 b - 2 a b) t + (b^2 - delta^2 c) = 0
    let qa = ae * ae - delta * delta * ae;
    let qb = 2.0 * delta * delta * be - 2.0 * ae * be;
    let qc = be * be - delta * delta * cv;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 && qa.abs() > 1e-300 {
        let s = disc.sqrt();
        for t in [(-qb + s) / (2.0 * qa), (-qb - s) / (2.0 * qa)] {
            if (0.0..=1.0).contains(&t) {
                best = best.min(f(t));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn flat(_x: f64, _y: f64) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, 1.0]]
    }

    #[test]
    fn rectangle_total_area() {
        let m = TriMesh::rectangle(0.0, 2.0, 0.0, 1.0, 21, 11, flat);
        assert_relative_eq!(m.total_area(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn stiffness_annihilates_constants_and_reproduces_dirichlet_energy() {
        let m = TriMesh::rectangle(0.0, 1.0, 0.0, 1.0, 17, 17, flat);
        let k = m.stiffness();
        let ones = vec![1.0; m.num_vertices()];
        let mut out = vec![0.0; m.num_vertices()];
        k.mul_vec(&ones, &mut out);
        for v in &out {
            assert!(v.abs() < 1e-12);
        }
        // u = x has Dirichlet energy 1 on the unit square
        let u: Vec<f64> = m.vertices.iter().map(|v| v[0]).collect();
        k.mul_vec(&u, &mut out);
        let energy: f64 = u.iter().zip(&out).map(|(a, b)| a * b).sum();
        assert_relative_eq!(energy, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lumped_mass_sums_to_area() {
        let m = TriMesh::disc(1.0, 12, 48, flat);
        let mass = m.lumped_mass();
        let total: f64 = mass.iter().sum();
        assert_relative_eq!(total, m.total_area(), epsilon = 1e-12);
        // disc chart area converges to pi from inscribed polygons
        assert_relative_eq!(m.total_area(), PI, max_relative = 3e-3);
    }

    #[test]
    fn distances_on_flat_rectangle() {
        let m = TriMesh::rectangle(0.0, 2.0, 0.0, 1.0, 81, 41, flat);
        let src = m.nearest_vertex([0.5, 0.5]);
        let d = mesh_distances(&m, &[src]);
        let probe = m.nearest_vertex([1.4, 0.8]);
        let exact = ((1.4f64 - 0.5).powi(2) + (0.8f64 - 0.5).powi(2)).sqrt();
        // first-order eikonal: sub-percent on this resolution
        assert_relative_eq!(d[probe], exact, max_relative = 1e-2);
    }

    #[test]
    fn geodesic_ball_area_flat() {
        let m = TriMesh::rectangle(-1.0, 1.0, -1.0, 1.0, 101, 101, flat);
        let src = m.nearest_vertex([0.0, 0.0]);
        let d = mesh_distances(&m, &[src]);
        let area = m.geodesic_ball_area(&d, 0.6);
        assert_relative_eq!(area, PI * 0.36, max_relative = 2e-2);
    }

    #[test]
    fn chain_lengths_on_boundary() {
        let m = TriMesh::rectangle(0.0, 3.0, 0.0, 1.0, 31, 11, flat);
        let chain = m.boundary_chain("bottom").unwrap();
        let (seg, w) = m.chain_lengths(chain, false);
        assert_relative_eq!(seg.iter().sum::<f64>(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.iter().sum::<f64>(), 3.0, epsilon = 1e-12);
    }
}
