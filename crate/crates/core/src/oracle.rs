//! Ground-truth geodesic distances: the full visibility graph over polygon
//! vertices (plus any number of extra free-space points) with Dijkstra on
//! top. Slow by design; every approximation claim in the crate is verified
//! against this module.

use crate::geom::{Containment, GeomError, Point, PolygonDomain};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub struct VisibilityGraph {
    pub points: Vec<Point>,
    /// Number of leading entries of `points` that are polygon vertices.
    pub n_base: usize,
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl VisibilityGraph {
    pub fn new(domain: &PolygonDomain) -> Self {
        Self::with_points(domain, &[])
    }

    /// Visibility graph over the polygon vertices plus `extra` points.
    /// Adding free-space points never changes geodesic distances (they can
    /// only lie on paths, not shorten them), so a single graph can serve a
    /// whole batch of query points.
    pub fn with_points(domain: &PolygonDomain, extra: &[Point]) -> Self {
        let mut points = domain.vertices();
        let n_base = points.len();
        points.extend_from_slice(extra);
        let n = points.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    adj[i].push((j, 0.0));
                    adj[j].push((i, 0.0));
                    continue;
                }
                if domain.visible(points[i], points[j]) {
                    let w = points[i].dist(points[j]);
                    adj[i].push((j, w));
                    adj[j].push((i, w));
                }
            }
        }
        VisibilityGraph { points, n_base, adj }
    }

    /// Deterministic Dijkstra: on exact distance ties the smaller
    /// predecessor id wins, making trees and paths reproducible.
    pub fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.points.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapEntry { dist: 0.0, node: src });
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = Some(u);
                    heap.push(HeapEntry { dist: nd, node: v });
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

    pub fn path(&self, parent: &[Option<usize>], src: usize, dst: usize) -> Vec<Point> {
        let mut ids = vec![dst];
        let mut cur = dst;
        while cur != src {
            cur = parent[cur].expect("destination unreachable");
            ids.push(cur);
        }
        ids.reverse();
        ids.into_iter().map(|i| self.points[i]).collect()
    }
}

struct HeapEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap by distance, then by node id for determinism.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then(other.node.cmp(&self.node))
    }
}

/// Exact geodesic distance and a realizing polyline. Interior vertices of
/// the polyline are polygon vertices.
pub fn exact_distance(
    domain: &PolygonDomain,
    s: Point,
    t: Point,
) -> Result<(f64, Vec<Point>), GeomError> {
    if domain.contains(s) == Containment::Exterior {
        return Err(GeomError::PointOutside(s));
    }
    if domain.contains(t) == Containment::Exterior {
        return Err(GeomError::PointOutside(t));
    }
    if s == t {
        return Ok((0.0, vec![s]));
    }
    let vg = VisibilityGraph::with_points(domain, &[s, t]);
    let si = vg.n_base;
    let ti = vg.n_base + 1;
    let (dist, parent) = vg.dijkstra(si);
    Ok((dist[ti], vg.path(&parent, si, ti)))
}

#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub dist: Vec<f64>,
}

impl ShortestPathTree {
    /// Tree edges as (child, parent) vertex-id pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect()
    }
}

/// Exact shortest path tree over polygon vertices from the given root vertex.
pub fn shortest_path_tree(domain: &PolygonDomain, root: usize) -> ShortestPathTree {
    let vg = VisibilityGraph::new(domain);
    let (dist, parent) = vg.dijkstra(root);
    ShortestPathTree {
        root,
        parent: parent[..vg.n_base].to_vec(),
        dist: dist[..vg.n_base].to_vec(),
    }
}

pub fn polyline_len(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist(w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{square_with_hole, unit_square, Point};

    #[test]
    fn convex_straight_line() {
        let sq = unit_square();
        let (d, path) = exact_distance(&sq, Point::new(0.2, 0.2), Point::new(0.8, 0.8)).unwrap();
        assert!((d - 0.6 * 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(path.len(), 2);
    }

    #[test]
    fn around_the_hole() {
        let dom = square_with_hole();
        let s = Point::new(2.0, 5.0);
        let t = Point::new(8.0, 5.0);
        let (d, path) = exact_distance(&dom, s, t).unwrap();
        let expected = 2.0 * 5.0f64.sqrt() + 2.0;
        assert!((d - expected).abs() < 1e-9, "got {d}, want {expected}");
        assert_eq!(path.len(), 4);
        // Deterministic tie-break picks one of the two symmetric routes and
        // its interior vertices are hole corners.
        for p in &path[1..3] {
            assert!((p.x == 4.0 || p.x == 6.0) && (p.y == 4.0 || p.y == 6.0));
        }
        assert!((polyline_len(&path) - d).abs() < 1e-9);
        for w in path.windows(2) {
            assert!(dom.visible(w[0], w[1]));
        }
    }

    #[test]
    fn identical_endpoints() {
        let sq = unit_square();
        let p = Point::new(0.3, 0.4);
        let (d, path) = exact_distance(&sq, p, p).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(path, vec![p]);
    }

    #[test]
    fn exterior_rejected() {
        let sq = unit_square();
        assert!(exact_distance(&sq, Point::new(2.0, 2.0), Point::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn spt_convex_is_star() {
        let sq = unit_square();
        let spt = shortest_path_tree(&sq, 0);
        assert_eq!(spt.dist[0], 0.0);
        assert_eq!(spt.parent[0], None);
        for v in 1..4 {
            assert_eq!(spt.parent[v], Some(0));
        }
    }

    #[test]
    fn spt_matches_exact_distances() {
        let dom = square_with_hole();
        let spt = shortest_path_tree(&dom, 0);
        let vs = dom.vertices();
        for (v, &d) in spt.dist.iter().enumerate() {
            let (ed, _) = exact_distance(&dom, vs[0], vs[v]).unwrap();
            assert!((d - ed).abs() < 1e-9);
        }
        // Tree edges are visible segments.
        for (c, p) in spt.edges() {
            assert!(dom.visible(vs[c], vs[p]));
        }
    }

    #[test]
    fn metric_properties_random() {
        let dom = square_with_hole();
        let mut state = 42u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut pts = Vec::new();
        while pts.len() < 9 {
            let p = Point::new(next() * 10.0, next() * 10.0);
            if dom.contains(p) != Containment::Exterior {
                pts.push(p);
            }
        }
        for ch in pts.chunks(3) {
            let (ab, _) = exact_distance(&dom, ch[0], ch[1]).unwrap();
            let (bc, _) = exact_distance(&dom, ch[1], ch[2]).unwrap();
            let (ac, _) = exact_distance(&dom, ch[0], ch[2]).unwrap();
            assert!(ac <= ab + bc + 1e-9);
            assert!(ac >= ch[0].dist(ch[2]) - 1e-12);
        }
    }
}
