//! Per separator path machinery: the continuous graph over a subpolygon and
//! one of its separator paths Q, anchor sets for vertices and query points,
//! and the via-Q distance.
//!
//! The approximation parameter eps is split as eps0 = eps1 = eps2 = eps/9:
//! eps1 parameterizes the cone family of the continuous graph, eps0 prunes
//! vertex anchor sets, eps2 prunes query anchor sets. The composed factor is
//! (1 + eps1) * (eps2 * (1 + eps0) + eps0 + 1) <= (1 + eps/3)^2 <= 1 + eps.

use crate::cones::{build_cone_graph, dijkstra_adj, extend, build_family, ConeFamily};
use crate::geom::{on_segment, orient_sign, Containment, Point, Region};
use crate::voronoi1d::{brute_envelope, WeightedPoint1D};
use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;

/// A geodesic polyline with cumulative arc lengths from its first vertex.
#[derive(Debug, Clone)]
pub struct ArcPath {
    pub points: Vec<Point>,
    pub prefix: Vec<f64>,
}

impl ArcPath {
    pub fn new(points: Vec<Point>) -> Self {
        let mut prefix = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in points.windows(2) {
            acc += w[0].dist(w[1]);
            prefix.push(acc);
        }
        ArcPath { points, prefix }
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn edge_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Arc coordinate of a point lying on edge `edge`.
    /// Point at a given arc position, clamped to the path.
    pub fn point_at(&self, arc: f64) -> Point {
        let e = match self.prefix.binary_search_by(|p| p.partial_cmp(&arc).unwrap()) {
            Ok(i) => i.min(self.edge_count().saturating_sub(1)),
            Err(i) => i.saturating_sub(1).min(self.edge_count().saturating_sub(1)),
        };
        let a = self.points[e];
        let b = self.points[e + 1];
        let len = a.dist(b);
        let t = if len == 0.0 { 0.0 } else { ((arc - self.prefix[e]) / len).clamp(0.0, 1.0) };
        Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    }

    pub fn arc_on_edge(&self, edge: usize, p: Point) -> f64 {
        self.prefix[edge] + self.points[edge].dist(p)
    }

    /// Exact membership: the edge containing p, if any.
    pub fn edge_containing(&self, p: Point) -> Option<usize> {
        (0..self.edge_count()).find(|&i| on_segment(p, self.points[i], self.points[i + 1]))
    }

    /// Polyline between two arc coordinates (inclusive), lo <= hi.
    pub fn subpath(&self, lo: (f64, usize), hi: (f64, usize), lo_pt: Point, hi_pt: Point) -> Vec<Point> {
        let mut out = vec![lo_pt];
        for i in lo.1 + 1..=hi.1 {
            let v = self.points[i];
            if v != *out.last().unwrap() {
                out.push(v);
            }
        }
        if hi_pt != *out.last().unwrap() {
            out.push(hi_pt);
        }
        out
    }
}

/// Where an anchor's weight comes from; enough to rebuild its realizing path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Via {
    /// Shortest path in the continuous graph from the owner vertex to this
    /// on-path graph node.
    GraphNode(usize),
    /// Straight segment from the owner point to the anchor point.
    Direct,
    /// Straight segment to a cone neighbor vertex, then that vertex's
    /// anchor path to the given graph node.
    Neighbor(usize, usize),
}

#[derive(Debug, Clone, Copy)]
pub struct Anchor {
    pub arc: f64,
    /// Index of the Q edge containing the anchor point.
    pub edge: usize,
    pub point: Point,
    /// Length of the realizing obstacle-avoiding path from the owner.
    pub weight: f64,
    pub via: Via,
}

#[derive(Debug, Clone)]
pub enum AnchorOwner {
    Vertex(usize),
    Query(Point),
}

#[derive(Debug, Clone)]
pub struct AnchorSet {
    pub owner: AnchorOwner,
    /// Sorted by arc coordinate.
    pub anchors: Vec<Anchor>,
}

impl AnchorSet {
    pub fn cardinality_bound(eps2: f64) -> usize {
        (4.0 / eps2).floor() as usize + 1
    }
}

/// The greedy anchor pruning sweep. Candidates are (arc, weight) with an
/// opaque index; returns the indices of the kept anchors, sorted by arc.
///
/// Start from the minimum-weight candidate q* (ties: smallest arc, then
/// smallest index), drop every candidate already (1+eps2)-covered by q*,
/// then sweep outward in both directions keeping a candidate b only when
/// (1+eps2)*weight(b) < weight(prev) + |arc(prev) - arc(b)|.
pub fn greedy_prune(candidates: &[(f64, f64)], eps2: f64) -> Vec<usize> {
    if candidates.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| {
        let (ai, wi) = candidates[i];
        let (aj, wj) = candidates[j];
        ai.partial_cmp(&aj).unwrap().then(wi.partial_cmp(&wj).unwrap()).then(i.cmp(&j))
    });
    let star = *order
        .iter()
        .min_by(|&&i, &&j| {
            let (ai, wi) = candidates[i];
            let (aj, wj) = candidates[j];
            wi.partial_cmp(&wj).unwrap().then(ai.partial_cmp(&aj).unwrap()).then(i.cmp(&j))
        })
        .unwrap();
    let (astar, wstar) = candidates[star];
    let spos = order.iter().position(|&i| i == star).unwrap();
    let mut kept = vec![star];
    // Sweep toward larger arcs, then toward smaller ones.
    for dir in [1i64, -1i64] {
        let mut prev = star;
        let mut pos = spos as i64 + dir;
        while pos >= 0 && (pos as usize) < order.len() {
            let idx = order[pos as usize];
            pos += dir;
            let (a, w) = candidates[idx];
            if w > wstar + (astar - a).abs() {
                continue; // already covered by q*
            }
            let (pa, pw) = candidates[prev];
            if (1.0 + eps2) * w < pw + (pa - a).abs() {
                kept.push(idx);
                prev = idx;
            }
        }
    }
    kept.sort_by(|&i, &j| {
        candidates[i].0.partial_cmp(&candidates[j].0).unwrap().then(i.cmp(&j))
    });
    #[cfg(debug_assertions)]
    if candidates.len() <= 512 {
        certify_prune(candidates, &kept, eps2);
    }
    kept
}

/// Post-condition of the pruning sweep: the kept set (1+eps2)-covers every
/// candidate.
pub fn certify_prune(candidates: &[(f64, f64)], kept: &[usize], eps2: f64) {
    for &(a, w) in candidates {
        let best_cand = w; // the candidate covers itself at its own arc
        let best_kept = kept
            .iter()
            .map(|&i| {
                let (ka, kw) = candidates[i];
                kw + (ka - a).abs()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            best_kept <= (1.0 + eps2) * best_cand + 1e-9 * best_cand.max(1.0),
            "pruning lost coverage at arc {a}: kept {best_kept} vs (1+e){}",
            (1.0 + eps2) * best_cand
        );
    }
}

/// The continuous graph over a subpolygon and its separator path Q: the
/// eps/9 cone graph over the subpolygon vertices, a Steiner node for each
/// first visible hit of a cone-boundary ray on Q, and the chain of
/// consecutive on-Q nodes.
#[derive(Debug)]
pub struct GQGraph {
    pub family: ConeFamily,
    /// Subpolygon vertices first (0..nv), then Steiner nodes on Q.
    pub points: Vec<Point>,
    pub nv: usize,
    pub adj: Vec<Vec<(usize, f64)>>,
    /// All nodes lying on Q as (node, arc, edge), sorted by arc.
    pub on_q: Vec<(usize, f64, usize)>,
}

impl GQGraph {
    pub fn arc_of(&self, node: usize) -> Option<(f64, usize)> {
        self.on_q
            .iter()
            .find(|&&(n, _, _)| n == node)
            .map(|&(_, a, e)| (a, e))
    }
}

/// First visible hits of rays from a fixed origin onto Q, with the region
/// boundary as the only occluder. Proper crossings are pre-resolved into
/// per-edge blocked parameter intervals; hits passing exactly through a
/// boundary vertex fall back to the exact visibility test.
pub struct PathHitter<'a> {
    region: &'a Region,
    q: &'a ArcPath,
    origin: Point,
    origin_on_boundary: bool,
    blocked: Vec<Vec<(f64, f64)>>,
}

impl<'a> PathHitter<'a> {
    pub fn new(region: &'a Region, q: &'a ArcPath, origin: Point) -> Self {
        let v = origin;
        let mut blocked = vec![Vec::new(); q.edge_count()];
        for (qi, iv) in blocked.iter_mut().enumerate() {
            let a = q.points[qi];
            let d = q.points[qi + 1].sub(a);
            for e in &region.edges {
                let (p1, p2) = (e.a, e.b);
                let sv = orient_sign(p1, p2, v);
                if sv == 0 {
                    continue;
                }
                let w1 = p1.sub(v);
                let w2 = p2.sub(v);
                let c = w1.cross(w2);
                if c == 0.0 {
                    continue;
                }
                let sc = if c > 0.0 { 1.0 } else { -1.0 };
                let svf = sv as f64;
                // Each constraint is linear in the edge parameter u and must
                // be strictly positive for the point to be shadowed by e.
                let cons = [
                    (sc * w1.cross(a.sub(v)), sc * w1.cross(d)),
                    (-sc * w2.cross(a.sub(v)), -sc * w2.cross(d)),
                    {
                        let n = p2.sub(p1);
                        (-svf * n.cross(a.sub(p1)), -svf * n.cross(d))
                    },
                ];
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let mut empty = false;
                for (g0, g1) in cons {
                    if g1 == 0.0 {
                        if g0 <= 0.0 {
                            empty = true;
                            break;
                        }
                        continue;
                    }
                    let u = -g0 / g1;
                    if g1 > 0.0 {
                        lo = lo.max(u);
                    } else {
                        hi = hi.min(u);
                    }
                }
                if !empty && hi > lo {
                    iv.push((lo, hi));
                }
            }
            iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        }
        let origin_on_boundary = region.classify(origin) == Containment::Boundary;
        PathHitter { region, q, origin, origin_on_boundary, blocked }
    }

    /// First hit of the ray from the origin in direction `dir` on Q, if it
    /// is visible. Returns (point, Q edge index).
    pub fn hit(&self, dir: Point) -> Option<(Point, usize)> {
        let v = self.origin;
        let mut best: Option<(f64, f64, usize)> = None;
        for qi in 0..self.q.edge_count() {
            let a = self.q.points[qi];
            let e = self.q.points[qi + 1].sub(a);
            let denom = dir.cross(e);
            if denom == 0.0 {
                if orient_sign(a, self.q.points[qi + 1], v) == 0 {
                    for (p, u) in [(a, 0.0), (self.q.points[qi + 1], 1.0)] {
                        let t = p.sub(v).dot(dir);
                        if t >= 0.0 && best.map_or(true, |(bt, _, _)| t < bt) {
                            best = Some((t, u, qi));
                        }
                    }
                }
                continue;
            }
            let ao = a.sub(v);
            let t = ao.cross(e) / denom;
            let u = ao.cross(dir) / denom;
            if t >= 0.0 && (0.0..=1.0).contains(&u) && best.map_or(true, |(bt, _, _)| t < bt) {
                best = Some((t, u, qi));
            }
        }
        let (_, u, qi) = best?;
        for &(lo, hi) in &self.blocked[qi] {
            if u > lo && u < hi {
                return None;
            }
        }
        let a = self.q.points[qi];
        let p = a.add(self.q.points[qi + 1].sub(a).scale(u));
        if p == v {
            return None;
        }
        // Passing exactly through a boundary vertex can leave the region
        // without properly crossing any edge; resolve those exactly.
        let mut touches_vertex = false;
        'outer: for e in &self.region.edges {
            for w in [e.a, e.b] {
                if w != v && w != p && on_segment(w, v, p) {
                    touches_vertex = true;
                    break 'outer;
                }
            }
        }
        if touches_vertex && !self.region.visible(v, p) {
            return None;
        }
        // A segment leaving a boundary origin can exit the region right at
        // the origin, crossing nothing properly; such a segment is exterior
        // over its whole open interior, so its midpoint gives it away.
        if self.origin_on_boundary && !touches_vertex {
            let m = Point::new((v.x + p.x) * 0.5, (v.y + p.y) * 0.5);
            if self.region.classify(m) != Containment::Interior && !self.region.visible(v, p) {
                return None;
            }
        }
        Some((p, qi))
    }
}

/// Build the continuous graph for a subpolygon (its boundary region and
/// vertex list) and a separator path inside it.
pub fn build_gq(region: &Region, sub_points: &[Point], q: &ArcPath, eps: f64) -> GQGraph {
    let eps1 = eps / 9.0;
    let family = build_family(eps1).expect("eps/9 is always in range");
    let cone = build_cone_graph(region, sub_points, &family);
    let nv = sub_points.len();
    let mut points = sub_points.to_vec();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (u, nbrs) in cone.adj.iter().enumerate() {
        for &(w, len) in nbrs {
            adj[u].push((w, len));
        }
    }
    // Node lookup by exact coordinates.
    let keyof = |p: Point| (p.x.to_bits(), p.y.to_bits());
    let mut node_of: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, &p) in sub_points.iter().enumerate() {
        node_of.insert(keyof(p), i);
    }
    let mut on_q: Vec<(usize, f64, usize)> = Vec::new();
    // Q's own vertices; separator paths run along subpolygon vertices, but a
    // free-standing path gets Steiner nodes for its bends.
    for (i, &qp) in q.points.iter().enumerate() {
        let node = *node_of.entry(keyof(qp)).or_insert_with(|| {
            points.push(qp);
            adj.push(Vec::new());
            points.len() - 1
        });
        let edge = if i < q.edge_count() { i } else { i - 1 };
        on_q.push((node, q.prefix[i], edge));
    }
    for v in 0..nv {
        let hitter = PathHitter::new(region, q, sub_points[v]);
        for ray in 0..family.k {
            let Some((p, qi)) = hitter.hit(family.boundary_dir(ray)) else {
                continue;
            };
            let node = *node_of.entry(keyof(p)).or_insert_with(|| {
                points.push(p);
                adj.push(Vec::new());
                on_q.push((points.len() - 1, q.arc_on_edge(qi, p), qi));
                points.len() - 1
            });
            if node != v {
                let w = sub_points[v].dist(p);
                adj[v].push((node, w));
                adj[node].push((v, w));
            }
        }
    }
    on_q.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap().then(x.0.cmp(&y.0)));
    on_q.dedup_by_key(|e| e.0);
    for w in on_q.windows(2) {
        let (n1, n2) = (w[0].0, w[1].0);
        let len = points[n1].dist(points[n2]);
        adj[n1].push((n2, len));
        adj[n2].push((n1, len));
    }
    GQGraph { family, points, nv, adj, on_q }
}

/// Everything the oracle keeps per (separator node, path): the path, the
/// subpolygon geometry, and lazily built graph + anchor caches.
pub struct PathStructure {
    pub q: ArcPath,
    pub region: Region,
    pub sub_points: Vec<Point>,
    pub eps: f64,
    gq: OnceCell<GQGraph>,
    vertex_anchors: RefCell<HashMap<usize, AnchorSet>>,
}

impl PathStructure {
    pub fn new(q: ArcPath, region: Region, sub_points: Vec<Point>, eps: f64) -> Self {
        PathStructure {
            q,
            region,
            sub_points,
            eps,
            gq: OnceCell::new(),
            vertex_anchors: RefCell::new(HashMap::new()),
        }
    }

    pub fn gq(&self) -> &GQGraph {
        self.gq
            .get_or_init(|| build_gq(&self.region, &self.sub_points, &self.q, self.eps))
    }

    /// Anchor set of a subpolygon vertex: shortest paths in the continuous
    /// graph to every on-Q node, then the greedy pruning sweep.
    pub fn vertex_anchor_set(&self, v: usize) -> AnchorSet {
        if let Some(a) = self.vertex_anchors.borrow().get(&v) {
            return a.clone();
        }
        let gq = self.gq();
        let (dist, _) = dijkstra_adj(&gq.adj, &[(v, 0.0)]);
        let cands: Vec<(f64, f64)> = gq
            .on_q
            .iter()
            .map(|&(n, arc, _)| (arc, dist[n]))
            .collect();
        let finite: Vec<usize> = (0..cands.len()).filter(|&i| cands[i].1.is_finite()).collect();
        let fc: Vec<(f64, f64)> = finite.iter().map(|&i| cands[i]).collect();
        let kept = greedy_prune(&fc, self.eps / 9.0);
        let anchors = kept
            .into_iter()
            .map(|i| {
                let (node, arc, edge) = gq.on_q[finite[i]];
                Anchor {
                    arc,
                    edge,
                    point: gq.points[node],
                    weight: dist[node],
                    via: Via::GraphNode(node),
                }
            })
            .collect();
        let set = AnchorSet { owner: AnchorOwner::Vertex(v), anchors };
        self.vertex_anchors.borrow_mut().insert(v, set.clone());
        set
    }

    /// Anchor set of an arbitrary query point in the subpolygon: its own
    /// cone-boundary hits on Q plus the anchors of its cone neighbors,
    /// pruned.
    pub fn query_anchor_set(&self, s: Point) -> AnchorSet {
        let gq = self.gq();
        let mut cands: Vec<(f64, f64)> = Vec::new();
        let mut meta: Vec<(f64, usize, Point, Via)> = Vec::new();
        if let Some(edge) = self.q.edge_containing(s) {
            let arc = self.q.arc_on_edge(edge, s);
            cands.push((arc, 0.0));
            meta.push((arc, edge, s, Via::Direct));
        }
        let hitter = PathHitter::new(&self.region, &self.q, s);
        for ray in 0..gq.family.k {
            if let Some((p, qi)) = hitter.hit(gq.family.boundary_dir(ray)) {
                let arc = self.q.arc_on_edge(qi, p);
                cands.push((arc, s.dist(p)));
                meta.push((arc, qi, p, Via::Direct));
            }
        }
        for (_, v) in extend(&self.region, &self.sub_points, &gq.family, s) {
            let base = s.dist(self.sub_points[v]);
            for a in self.vertex_anchor_set(v).anchors {
                let Via::GraphNode(node) = a.via else { unreachable!() };
                cands.push((a.arc, base + a.weight));
                meta.push((a.arc, a.edge, a.point, Via::Neighbor(v, node)));
            }
        }
        let kept = greedy_prune(&cands, self.eps / 9.0);
        let anchors = kept
            .into_iter()
            .map(|i| {
                let (arc, edge, point, via) = meta[i];
                Anchor { arc, edge, point, weight: cands[i].1, via }
            })
            .collect();
        AnchorSet { owner: AnchorOwner::Query(s), anchors }
    }

    /// True if the point is inside this structure's subpolygon.
    pub fn covers(&self, p: Point) -> bool {
        self.region.classify(p) != Containment::Exterior
    }

    /// Realizing polyline of an anchor, from its owner to the anchor point.
    pub fn anchor_path(&self, owner: &AnchorOwner, anchor: &Anchor) -> Vec<Point> {
        match anchor.via {
            Via::Direct => {
                let AnchorOwner::Query(s) = owner else { panic!("direct anchor needs a point owner") };
                if *s == anchor.point {
                    vec![*s]
                } else {
                    vec![*s, anchor.point]
                }
            }
            Via::GraphNode(node) => {
                let AnchorOwner::Vertex(v) = owner else { panic!("graph anchor needs a vertex owner") };
                self.gq_path(*v, node)
            }
            Via::Neighbor(v, node) => {
                let AnchorOwner::Query(s) = owner else { panic!("neighbor anchor needs a point owner") };
                let mut path = vec![*s];
                path.extend(self.gq_path(v, node));
                path
            }
        }
        .to_vec()
    }

    fn gq_path(&self, from: usize, node: usize) -> Vec<Point> {
        let gq = self.gq();
        let (_, parent) = dijkstra_adj(&gq.adj, &[(from, 0.0)]);
        let mut ids = vec![node];
        let mut cur = node;
        while cur != from {
            cur = parent[cur].expect("anchor node unreachable from owner");
            ids.push(cur);
        }
        ids.reverse();
        ids.into_iter().map(|i| gq.points[i]).collect()
    }
}

/// The via-Q distance between two anchor sets on the same path: the minimum
/// over anchor pairs (a, b) of w_a + w_b + |arc_a - arc_b|. Evaluated as
/// w_a + envelope_b(arc_a) with the same intercept arithmetic as the
/// 1D Voronoi structure, so the path-site index can reproduce it exactly.
/// Returns the value and the realizing anchor pair indices.
pub fn via_q_distance(
    anchors_s: &AnchorSet,
    anchors_t: &AnchorSet,
    q: &ArcPath,
) -> (f64, Option<(usize, usize)>) {
    if anchors_s.anchors.is_empty() || anchors_t.anchors.is_empty() {
        return (f64::INFINITY, None);
    }
    let t_total = q.total();
    let pts: Vec<WeightedPoint1D> = anchors_t
        .anchors
        .iter()
        .enumerate()
        .map(|(i, a)| WeightedPoint1D { a0: a.arc, a1: a.weight, owner: i as u64 })
        .collect();
    let mut best = f64::INFINITY;
    let mut pair = None;
    for (i, a) in anchors_s.anchors.iter().enumerate() {
        if let Some((owner, v)) = brute_envelope(&pts, t_total, a.arc) {
            let total = a.weight + v;
            if total < best {
                best = total;
                pair = Some((i, owner as usize));
            }
        }
    }
    (best, pair)
}
