//! Constrained triangulation of polygonal domains with holes.
//!
//! Holes are bridged into the outer ring, the resulting weakly simple polygon
//! is ear-clipped, and constrained edges are inserted afterwards by cavity
//! re-triangulation. Constraint segments that pass through intermediate
//! vertices are split there first, so every constraint ends up as a union of
//! triangulation edges.

use crate::geom::{
    on_segment, orient_sign, segments_properly_cross, segments_touch,
    GeomError, Point, PolygonDomain, Region, Segment,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TriangulateError {
    #[error("domain error: {0}")]
    Geom(#[from] GeomError),
    #[error("could not bridge hole {0} to the outer boundary")]
    BridgeFailed(usize),
    #[error("ear clipping got stuck with {0} vertices left")]
    NoEar(usize),
    #[error("constraint ({0}, {1}) crosses another constraint")]
    CrossingConstraint(usize, usize),
    #[error("constraint ({0}, {1}) is not a visible segment")]
    BlockedConstraint(usize, usize),
    #[error("cavity around constraint ({0}, {1}) is malformed")]
    BadCavity(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Vertex(usize),
    /// Point on a triangulation edge: endpoint ids (sorted) and the adjacent
    /// triangle ids in increasing order.
    Edge((usize, usize), [Option<usize>; 2]),
    Triangle(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triangulation {
    pub points: Vec<Point>,
    /// CCW vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Constraint sub-edges present as triangulation edges, as sorted id pairs.
    pub constrained_edges: Vec<(usize, usize)>,
    /// neighbors[t][i] = triangle across the edge opposite corner i.
    pub neighbors: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| self.tri_area(*t)).sum()
    }

    fn tri_area(&self, t: [usize; 3]) -> f64 {
        let (a, b, c) = (self.points[t[0]], self.points[t[1]], self.points[t[2]]);
        (b.sub(a)).cross(c.sub(a)) / 2.0
    }

    pub fn tri_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.points[a], self.points[b], self.points[c]]
    }

    /// Sorted-id edge -> adjacent triangle ids.
    pub fn edge_map(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                m.entry(sorted_edge(t[k], t[(k + 1) % 3])).or_default().push(ti);
            }
        }
        m
    }

    /// Classify p against the tiling. Exterior points are an error.
    pub fn locate(&self, p: Point) -> Result<Location, GeomError> {
        if let Some(v) = self.points.iter().position(|&q| q == p) {
            return Ok(Location::Vertex(v));
        }
        let mut on_edge: Option<(usize, usize)> = None;
        let mut inside: Option<usize> = None;
        for (ti, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = [self.points[t[0]], self.points[t[1]], self.points[t[2]]];
            let s1 = orient_sign(a, b, p);
            let s2 = orient_sign(b, c, p);
            let s3 = orient_sign(c, a, p);
            if s1 < 0 || s2 < 0 || s3 < 0 {
                continue;
            }
            if s1 > 0 && s2 > 0 && s3 > 0 {
                inside = Some(inside.map_or(ti, |old: usize| old.min(ti)));
            } else {
                let (u, v) = if s1 == 0 {
                    (t[0], t[1])
                } else if s2 == 0 {
                    (t[1], t[2])
                } else {
                    (t[2], t[0])
                };
                let e = sorted_edge(u, v);
                if on_edge.is_none() || e < on_edge.unwrap() {
                    on_edge = Some(e);
                }
            }
        }
        if let Some(e) = on_edge {
            let mut adj: Vec<usize> = self.edge_map().get(&e).cloned().unwrap_or_default();
            adj.sort_unstable();
            let mut pair = [None, None];
            for (i, t) in adj.into_iter().take(2).enumerate() {
                pair[i] = Some(t);
            }
            return Ok(Location::Edge(e, pair));
        }
        if let Some(ti) = inside {
            return Ok(Location::Triangle(ti));
        }
        Err(GeomError::PointOutside(p))
    }
}

pub fn sorted_edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Triangulate the domain, honoring the given constraint edges (vertex id
/// pairs into `domain.vertices()`). Constraints must be visible segments and
/// pairwise non-crossing.
pub fn triangulate(
    domain: &PolygonDomain,
    constraints: &[(usize, usize)],
) -> Result<Triangulation, TriangulateError> {
    let points = domain.vertices();

    // Validate constraints up front.
    for (i, &(u, v)) in constraints.iter().enumerate() {
        if !domain.visible(points[u], points[v]) {
            return Err(TriangulateError::BlockedConstraint(u, v));
        }
        for &(p, q) in &constraints[i + 1..] {
            if segments_properly_cross(points[u], points[v], points[p], points[q]) {
                return Err(TriangulateError::CrossingConstraint(u, v));
            }
        }
    }

    let mut ring: Vec<usize> = (0..domain.outer.len()).collect();
    let mut offset = domain.outer.len();
    let mut hole_rings: Vec<Vec<usize>> = Vec::new();
    for hole in &domain.holes {
        hole_rings.push((offset..offset + hole.len()).collect());
        offset += hole.len();
    }
    // Bridge holes right-to-left so earlier bridges cannot block later ones.
    let mut order: Vec<usize> = (0..hole_rings.len()).collect();
    let max_x = |r: &[usize]| {
        r.iter()
            .map(|&v| points[v].x)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    order.sort_by(|&a, &b| max_x(&hole_rings[b]).partial_cmp(&max_x(&hole_rings[a])).unwrap());
    for hi in order {
        ring = bridge_hole(&points, ring, &hole_rings[hi], hi)?;
    }

    let mut triangles = ear_clip(&points, ring)?;

    let mut constrained_edges = Vec::new();
    for &(u, v) in constraints {
        for (a, b) in split_constraint(&points, u, v) {
            insert_constraint(&points, &mut triangles, a, b)?;
            constrained_edges.push(sorted_edge(a, b));
        }
    }
    constrained_edges.sort_unstable();
    constrained_edges.dedup();

    let mut tri = Triangulation {
        points,
        triangles,
        constrained_edges,
        neighbors: Vec::new(),
    };
    tri.neighbors = compute_neighbors(&tri);
    Ok(tri)
}

fn compute_neighbors(tri: &Triangulation) -> Vec<[Option<usize>; 3]> {
    let em = tri.edge_map();
    tri.triangles
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let mut nb = [None, None, None];
            for k in 0..3 {
                let e = sorted_edge(t[(k + 1) % 3], t[(k + 2) % 3]);
                nb[k] = em[&e].iter().copied().find(|&o| o != ti);
            }
            nb
        })
        .collect()
}

/// Splice a hole ring into the outer ring through a mutually visible bridge.
fn bridge_hole(
    points: &[Point],
    outer: Vec<usize>,
    hole: &[usize],
    hole_idx: usize,
) -> Result<Vec<usize>, TriangulateError> {
    // Hole anchor: vertex with lexicographically largest coordinate.
    let j = (0..hole.len())
        .max_by(|&a, &b| points[hole[a]].lex_cmp(points[hole[b]]))
        .unwrap();
    let m = points[hole[j]];

    // All current edges (outer ring so far + this hole).
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..outer.len() {
        edges.push((outer[i], outer[(i + 1) % outer.len()]));
    }
    for i in 0..hole.len() {
        edges.push((hole[i], hole[(i + 1) % hole.len()]));
    }

    // Candidate bridge targets, nearest first.
    let mut cand: Vec<usize> = (0..outer.len()).collect();
    cand.sort_by(|&a, &b| {
        points[outer[a]]
            .dist(m)
            .partial_cmp(&points[outer[b]].dist(m))
            .unwrap()
            .then(outer[a].cmp(&outer[b]))
    });
    'cand: for i in cand {
        let p = points[outer[i]];
        if p == m {
            continue;
        }
        for &(ea, eb) in &edges {
            let (pa, pb) = (points[ea], points[eb]);
            if (pa == m || pb == m) && (pa == p || pb == p) {
                continue 'cand; // bridge would duplicate an existing edge
            }
            if pa == m || pb == m || pa == p || pb == p {
                // Shares an endpoint with the bridge; only that contact is ok.
                let (other, anchor) = if pa == m || pa == p { (pb, pa) } else { (pa, pb) };
                let far = if anchor == m { p } else { m };
                if on_segment(other, m, p) || on_segment(far, pa, pb) {
                    continue 'cand;
                }
                continue;
            }
            if segments_touch(m, p, pa, pb) {
                continue 'cand;
            }
        }
        // Splice: outer[..=i], hole[j], hole[j+1], ..., hole[j], outer[i..].
        let mut new_ring = Vec::with_capacity(outer.len() + hole.len() + 2);
        new_ring.extend_from_slice(&outer[..=i]);
        for k in 0..=hole.len() {
            new_ring.push(hole[(j + k) % hole.len()]);
        }
        new_ring.extend_from_slice(&outer[i..]);
        return Ok(new_ring);
    }
    Err(TriangulateError::BridgeFailed(hole_idx))
}

fn strictly_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient_sign(a, b, p) > 0 && orient_sign(b, c, p) > 0 && orient_sign(c, a, p) > 0
}

fn in_closed_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient_sign(a, b, p) >= 0 && orient_sign(b, c, p) >= 0 && orient_sign(c, a, p) >= 0
}

/// Ear-clip a weakly simple CCW ring (bridge vertices may repeat).
pub(crate) fn ear_clip(points: &[Point], mut ring: Vec<usize>) -> Result<Vec<[usize; 3]>, TriangulateError> {
    let mut triangles = Vec::with_capacity(ring.len().saturating_sub(2));
    while ring.len() > 3 {
        let n = ring.len();
        let mut clipped = false;
        'ears: for k in 0..n {
            let (ip, ic, inx) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
            let (a, b, c) = (points[ip], points[ic], points[inx]);
            if orient_sign(a, b, c) <= 0 {
                continue;
            }
            for &v in ring.iter() {
                let p = points[v];
                if p == a || p == b || p == c {
                    continue;
                }
                if in_closed_triangle(p, a, b, c) {
                    continue 'ears;
                }
            }
            // Bridge edges can slice through the candidate diagonal without
            // either endpoint lying inside the ear.
            for w in 0..n {
                let (ea, eb) = (points[ring[w]], points[ring[(w + 1) % n]]);
                if segments_properly_cross(a, c, ea, eb) {
                    continue 'ears;
                }
            }
            triangles.push([ip, ic, inx]);
            ring.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(TriangulateError::NoEar(ring.len()));
        }
    }
    let (a, b, c) = (points[ring[0]], points[ring[1]], points[ring[2]]);
    if orient_sign(a, b, c) > 0 {
        triangles.push([ring[0], ring[1], ring[2]]);
    } else if orient_sign(a, b, c) < 0 {
        triangles.push([ring[0], ring[2], ring[1]]);
    }
    Ok(triangles)
}

/// Split a constraint at every vertex lying in its interior.
fn split_constraint(points: &[Point], u: usize, v: usize) -> Vec<(usize, usize)> {
    let (a, b) = (points[u], points[v]);
    let mut mids: Vec<usize> = (0..points.len())
        .filter(|&w| w != u && w != v && points[w] != a && points[w] != b)
        .filter(|&w| on_segment(points[w], a, b))
        .collect();
    mids.sort_by(|&x, &y| {
        points[x]
            .dist(a)
            .partial_cmp(&points[y].dist(a))
            .unwrap()
    });
    let mut chain = vec![u];
    chain.extend(mids);
    chain.push(v);
    chain.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Make (u, v) an edge of the triangulation by removing the strip of
/// triangles its open segment crosses and re-triangulating both cavity sides.
fn insert_constraint(
    points: &[Point],
    triangles: &mut Vec<[usize; 3]>,
    u: usize,
    v: usize,
) -> Result<(), TriangulateError> {
    let e = sorted_edge(u, v);
    let exists = triangles.iter().any(|t| {
        (0..3).any(|k| sorted_edge(t[k], t[(k + 1) % 3]) == e)
    });
    if exists {
        return Ok(());
    }
    let (a, b) = (points[u], points[v]);
    let mut removed = Vec::new();
    let mut kept = Vec::new();
    for &t in triangles.iter() {
        if open_segment_enters_triangle(points, t, a, b) {
            removed.push(t);
        } else {
            kept.push(t);
        }
    }
    if removed.is_empty() {
        return Err(TriangulateError::BadCavity(u, v));
    }
    // Cavity boundary: edges of removed triangles not shared within the set.
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &removed {
        for k in 0..3 {
            *count.entry(sorted_edge(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    let boundary: Vec<(usize, usize)> = count
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(&e, _)| e)
        .collect();
    // Walk the boundary cycle starting from u.
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(x, y) in &boundary {
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    for nb in adj.values() {
        if nb.len() != 2 {
            return Err(TriangulateError::BadCavity(u, v));
        }
    }
    let mut cycle = vec![u];
    let mut prev = u;
    let mut cur = adj[&u][0];
    while cur != u {
        cycle.push(cur);
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    if cycle.len() != adj.len() {
        return Err(TriangulateError::BadCavity(u, v));
    }
    let vpos = cycle
        .iter()
        .position(|&w| w == v)
        .ok_or(TriangulateError::BadCavity(u, v))?;
    // Two chains u -> v along the cycle.
    let chain1: Vec<usize> = cycle[..=vpos].to_vec();
    let mut chain2: Vec<usize> = cycle[vpos..].to_vec();
    chain2.push(u);
    for chain in [chain1, chain2] {
        if chain.len() < 2 {
            return Err(TriangulateError::BadCavity(u, v));
        }
        if chain.len() == 2 {
            continue; // the chain is the segment uv itself
        }
        let mut ring = chain;
        let area: f64 = {
            let pts: Vec<Point> = ring.iter().map(|&w| points[w]).collect();
            crate::geom::signed_area(&pts)
        };
        if area < 0.0 {
            ring.reverse();
        }
        let tris = ear_clip(points, ring)?;
        kept.extend(tris);
    }
    *triangles = kept;
    Ok(())
}

/// Does the open segment ab pass through the triangle's interior?
fn open_segment_enters_triangle(points: &[Point], t: [usize; 3], a: Point, b: Point) -> bool {
    let [p, q, r] = [points[t[0]], points[t[1]], points[t[2]]];
    // Clip the parameter interval of ab against the three CCW half-planes.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = b.sub(a);
    for (ea, eb) in [(p, q), (q, r), (r, p)] {
        let n = eb.sub(ea);
        // leftness of a + t*d wrt the directed edge: c0 + t*c1, keep >= 0.
        let c0 = n.cross(a.sub(ea));
        let c1 = n.cross(d);
        if c1.abs() < 1e-30 {
            if c0 < 0.0 {
                return false;
            }
            continue;
        }
        let tcross = -c0 / c1;
        if c1 > 0.0 {
            lo = lo.max(tcross);
        } else {
            hi = hi.min(tcross);
        }
    }
    if hi - lo <= 1e-12 {
        return false;
    }
    let mid = a.add(d.scale((lo + hi) / 2.0));
    strictly_in_triangle(mid, p, q, r)
}

/// Boundary of a set of triangles: edges used by exactly one of them.
pub fn subregion(tri: &Triangulation, tris: &[usize]) -> Region {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for &ti in tris {
        let t = tri.triangles[ti];
        for k in 0..3 {
            *count.entry(sorted_edge(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    let edges = count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|((a, b), _)| Segment::new(tri.points[a], tri.points[b]))
        .collect();
    Region::new(edges)
}

/// Convenience check used by tests: tiling area matches the domain area.
pub fn tiling_matches(tri: &Triangulation, domain: &PolygonDomain) -> bool {
    let rel = (tri.area() - domain.area()).abs() / domain.area().max(1.0);
    if rel > 1e-9 {
        return false;
    }
    tri.triangles.iter().all(|&t| {
        let [a, b, c] = [tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]];
        orient_sign(a, b, c) > 0
    })
}
