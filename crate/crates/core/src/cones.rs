//! Cone family and cone spanner over polygon vertices, plus the one-point
//! extension used for query points. Between any two vertices the graph
//! contains a path of length at most (1+eps) times the geodesic distance.

use crate::geom::{Point, PolygonDomain, Region};
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("eps must lie in (0, 1], got {0}")]
    BadEps(f64),
}

/// K equal half-open cones of angle 2*pi/K <= eps/8 partitioning all
/// directions. A direction exactly on a shared bounding ray belongs to the
/// counterclockwise cone of the two.
#[derive(Debug, Clone)]
pub struct ConeFamily {
    pub eps: f64,
    pub k: usize,
    pub angle: f64,
}

pub fn build_family(eps: f64) -> Result<ConeFamily, ConeError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ConeError::BadEps(eps));
    }
    let k = (16.0 * PI / eps).ceil() as usize;
    Ok(ConeFamily {
        eps,
        k,
        angle: 2.0 * PI / k as f64,
    })
}

impl ConeFamily {
    /// Index of the cone containing direction d (non-zero vector).
    pub fn cone_of(&self, d: Point) -> usize {
        let mut theta = d.y.atan2(d.x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        let idx = (theta / self.angle).floor() as usize;
        idx.min(self.k - 1)
    }

    /// Unit axis direction of cone i.
    pub fn axis(&self, i: usize) -> Point {
        let a = (i as f64 + 0.5) * self.angle;
        Point::new(a.cos(), a.sin())
    }

    /// Unit direction of boundary ray i (shared by cones i-1 and i).
    pub fn boundary_dir(&self, i: usize) -> Point {
        let a = i as f64 * self.angle;
        Point::new(a.cos(), a.sin())
    }

    /// Cone distance of b from apex a inside cone i: projection onto the
    /// axis. Non-negative for in-cone points since the half-angle is < pi/2.
    pub fn cone_dist(&self, i: usize, a: Point, b: Point) -> f64 {
        self.axis(i).dot(b.sub(a)).abs()
    }
}

/// Clarkson's cone graph: per-vertex table of minimal cone neighbors plus
/// the symmetric edge closure.
#[derive(Debug, Clone)]
pub struct ConeGraph {
    /// neighbors[v] = (cone index, target vertex), sorted by cone index.
    pub neighbors: Vec<Vec<(usize, usize)>>,
    /// Symmetric adjacency with Euclidean weights.
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl ConeGraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &(v, _) in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Minimal cone neighbors of point p among the candidate vertices: for each
/// cone, the visible candidate minimizing cone distance, ties to the smaller
/// vertex id. Returned sorted by cone index.
pub fn minimal_cone_neighbors(
    region: &Region,
    points: &[Point],
    family: &ConeFamily,
    p: Point,
    candidates: &[usize],
) -> Vec<(usize, usize)> {
    let mut by_cone: Vec<(usize, f64, usize)> = Vec::with_capacity(candidates.len());
    for &v in candidates {
        let q = points[v];
        if q == p {
            continue;
        }
        let c = family.cone_of(q.sub(p));
        by_cone.push((c, family.cone_dist(c, p, q), v));
    }
    by_cone.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.cmp(&b.2))
    });
    let mut out = Vec::new();
    let mut i = 0;
    while i < by_cone.len() {
        let cone = by_cone[i].0;
        let mut j = i;
        while j < by_cone.len() && by_cone[j].0 == cone {
            let v = by_cone[j].2;
            if region.visible(p, points[v]) {
                out.push((cone, v));
                break;
            }
            j += 1;
        }
        while i < by_cone.len() && by_cone[i].0 == cone {
            i += 1;
        }
    }
    out
}

/// Build the cone graph over the given vertex set inside a region.
pub fn build_cone_graph(region: &Region, points: &[Point], family: &ConeFamily) -> ConeGraph {
    let n = points.len();
    let all: Vec<usize> = (0..n).collect();
    let mut neighbors = Vec::with_capacity(n);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        let nb = minimal_cone_neighbors(region, points, family, points[u], &all);
        for &(_, v) in &nb {
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
        neighbors.push(nb);
    }
    edges.sort_unstable();
    edges.dedup();
    for (u, v) in edges {
        let w = points[u].dist(points[v]);
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    ConeGraph { neighbors, adj }
}

/// Convenience wrapper over the whole domain.
pub fn domain_cone_graph(domain: &PolygonDomain, family: &ConeFamily) -> ConeGraph {
    build_cone_graph(domain.region(), &domain.vertices(), family)
}

/// Outgoing adjacency of an arbitrary point s in the extended graph G[s]:
/// the edges s -> N(s) only.
pub fn extend(
    region: &Region,
    points: &[Point],
    family: &ConeFamily,
    s: Point,
) -> Vec<(usize, usize)> {
    let all: Vec<usize> = (0..points.len()).collect();
    minimal_cone_neighbors(region, points, family, s, &all)
}

/// Deterministic Dijkstra over a sparse adjacency list; ties in distance are
/// resolved toward the smaller predecessor id.
pub fn dijkstra_adj(adj: &[Vec<(usize, f64)>], init: &[(usize, f64)]) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &(s, d0) in init {
        if d0 < dist[s] {
            dist[s] = d0;
            heap.push(std::cmp::Reverse((ordered(d0), s)));
        }
    }
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        let d = d.0;
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = Some(u);
                heap.push(std::cmp::Reverse((ordered(nd), v)));
            } else if nd == dist[v] {
                if let Some(p) = parent[v] {
                    if u < p {
                        parent[v] = Some(u);
                    }
                }
            }
        }
    }
    (dist, parent)
}

#[derive(PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).unwrap()
    }
}
fn ordered(x: f64) -> OrdF64 {
    OrdF64(x)
}
