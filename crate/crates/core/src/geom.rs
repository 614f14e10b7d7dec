//! Planar geometry substrate: polygonal domains with holes, containment,
//! visibility, and fixed-direction ray shooting.
//!
//! All side-of-line decisions go through the exact orientation predicate in
//! [`crate::predicates`], so classifications are consistent regardless of how
//! close an input is to degenerate. Lengths and intersection parameters are
//! ordinary f64 arithmetic.

use crate::predicates::orient2d;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Point { x, y }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Total order by (x, y); coordinates are always finite.
    pub fn lex_cmp(self, other: Point) -> Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap()
            .then(self.y.partial_cmp(&other.y).unwrap())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("ring has fewer than 3 vertices")]
    TooFewVertices,
    #[error("ring {0} is not simple: edges {1} and {2} intersect")]
    NotSimple(usize, usize, usize),
    #[error("outer boundary must be counterclockwise")]
    OuterNotCcw,
    #[error("hole {0} must be clockwise")]
    HoleNotCw(usize),
    #[error("hole {0} is not strictly inside the outer boundary")]
    HoleOutside(usize),
    #[error("holes {0} and {1} intersect")]
    HolesIntersect(usize, usize),
    #[error("repeated vertex in ring")]
    RepeatedVertex,
    #[error("point {0} lies outside the domain")]
    PointOutside(Point),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Sign of orient2d as -1 / 0 / +1.
pub fn orient_sign(a: Point, b: Point, c: Point) -> i32 {
    let d = orient2d(a.to_array(), b.to_array(), c.to_array());
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Exact test: p lies on the closed segment ab.
pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    if orient_sign(a, b, p) != 0 {
        return false;
    }
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Do two closed segments share at least one point? Exact.
pub fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orient_sign(p1, p2, q1);
    let o2 = orient_sign(p1, p2, q2);
    let o3 = orient_sign(q1, q2, p1);
    let o4 = orient_sign(q1, q2, p2);
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 {
        return true;
    }
    (o1 == 0 && on_segment(q1, p1, p2))
        || (o2 == 0 && on_segment(q2, p1, p2))
        || (o3 == 0 && on_segment(p1, q1, q2))
        || (o4 == 0 && on_segment(p2, q1, q2))
}

/// Do two closed segments cross at a point interior to both? Exact.
pub fn segments_properly_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orient_sign(p1, p2, q1);
    let o2 = orient_sign(p1, p2, q2);
    let o3 = orient_sign(q1, q2, p1);
    let o4 = orient_sign(q1, q2, p2);
    o1 * o2 < 0 && o3 * o4 < 0
}

pub fn signed_area(ring: &[Point]) -> f64 {
    let mut s = 0.0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        s += a.cross(b);
    }
    s / 2.0
}

/// A closed region bounded by an arbitrary set of boundary segments
/// (outer ring + hole rings, or the boundary of a triangle set). Interior is
/// decided by edge-crossing parity, so the edge set just has to bound the
/// region; no ring structure is required.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub edges: Vec<Segment>,
}

impl Region {
    pub fn new(edges: Vec<Segment>) -> Self {
        Region { edges }
    }

    pub fn classify(&self, p: Point) -> Containment {
        for e in &self.edges {
            if on_segment(p, e.a, e.b) {
                return Containment::Boundary;
            }
        }
        let mut crossings = 0usize;
        for e in &self.edges {
            let (a, b) = (e.a, e.b);
            // Half-open rule on y so shared vertices are counted once.
            if (a.y > p.y) != (b.y > p.y) {
                let side = orient_sign(a, b, p);
                if (b.y > a.y && side > 0) || (b.y < a.y && side < 0) {
                    crossings += 1;
                }
            }
        }
        if crossings % 2 == 1 {
            Containment::Interior
        } else {
            Containment::Exterior
        }
    }

    /// True iff the closed segment ab stays inside the closed region.
    /// Grazing along boundary edges counts as visible.
    pub fn visible(&self, a: Point, b: Point) -> bool {
        if a == b {
            return self.classify(a) != Containment::Exterior;
        }
        let ab = b.sub(a);
        let len2 = ab.dot(ab);
        // Events: parameters in [0,1] where ab meets the boundary. Between
        // consecutive events the segment is entirely inside or outside; a
        // midpoint decides which.
        let mut events: Vec<f64> = vec![0.0, 1.0];
        // Parameter ranges where ab runs along a collinear boundary edge;
        // such stretches are boundary by construction and must not be
        // midpoint-classified (the floating midpoint drops off the line).
        let mut covered: Vec<(f64, f64)> = Vec::new();
        for e in &self.edges {
            let o1 = orient_sign(a, b, e.a);
            let o2 = orient_sign(a, b, e.b);
            let o3 = orient_sign(e.a, e.b, a);
            let o4 = orient_sign(e.a, e.b, b);
            if o1 * o2 < 0 && o3 * o4 < 0 {
                return false;
            }
            if o1 == 0 && o2 == 0 {
                // Collinear edge: its overlap with ab contributes two events.
                let ta = e.a.sub(a).dot(ab) / len2;
                let tb = e.b.sub(a).dot(ab) / len2;
                for t in [ta, tb] {
                    if (0.0..=1.0).contains(&t) {
                        events.push(t);
                    }
                }
                let (lo, hi) = (ta.min(tb).max(0.0), ta.max(tb).min(1.0));
                if hi > lo {
                    covered.push((lo, hi));
                }
            } else {
                if o1 == 0 && on_segment(e.a, a, b) {
                    events.push(e.a.sub(a).dot(ab) / len2);
                }
                if o2 == 0 && on_segment(e.b, a, b) {
                    events.push(e.b.sub(a).dot(ab) / len2);
                }
                // A transversal pass through an interior point of ab that is
                // also an endpoint of ab itself (o3/o4 == 0) is a touch at a
                // or b and produces no new event.
            }
        }
        events.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in events.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 <= 1e-15 {
                continue;
            }
            if covered.iter().any(|&(lo, hi)| lo <= t0 && t1 <= hi) {
                continue;
            }
            let m = a.add(ab.scale((t0 + t1) / 2.0));
            if self.classify(m) == Containment::Exterior {
                return false;
            }
        }
        true
    }

    /// First boundary point hit by the ray origin + t*dir, t > 0, together
    /// with the index of the boundary edge hit. None when the origin sits on
    /// the boundary and the ray immediately leaves the region.
    pub fn ray_shoot(&self, origin: Point, dir: Point) -> Option<(Point, usize)> {
        let mut best: Option<(f64, Point, usize)> = None;
        let consider = |t: f64, p: Point, idx: usize, best: &mut Option<(f64, Point, usize)>| {
            if t <= 1e-12 {
                return;
            }
            match best {
                Some((bt, _, _)) if *bt <= t => {}
                _ => *best = Some((t, p, idx)),
            }
        };
        for (idx, e) in self.edges.iter().enumerate() {
            let ed = e.b.sub(e.a);
            let denom = dir.cross(ed);
            if denom == 0.0 {
                // Parallel; collinear edges contribute their endpoints.
                if orient_sign(e.a, e.b, origin) == 0 {
                    for p in [e.a, e.b] {
                        let t = p.sub(origin).dot(dir);
                        consider(t, p, idx, &mut best);
                    }
                }
                continue;
            }
            let ao = e.a.sub(origin);
            let t = ao.cross(ed) / denom;
            let u = ao.cross(dir) / denom;
            if t > 0.0 && (0.0..=1.0).contains(&u) {
                let p = e.a.add(ed.scale(u));
                consider(t, p, idx, &mut best);
            }
        }
        let (_, p, idx) = best?;
        let mid = origin.add(p.sub(origin).scale(0.5));
        if self.classify(mid) == Containment::Exterior {
            return None;
        }
        Some((p, idx))
    }

    /// Earliest intersection of the ray with the polyline such that the
    /// segment origin -> hit stays inside the region.
    pub fn first_path_hit(
        &self,
        path: &[Point],
        origin: Point,
        dir: Point,
    ) -> Option<(Point, usize)> {
        let mut hits: Vec<(f64, Point, usize)> = Vec::new();
        for i in 0..path.len().saturating_sub(1) {
            let (a, b) = (path[i], path[i + 1]);
            let ed = b.sub(a);
            let denom = dir.cross(ed);
            if denom == 0.0 {
                if orient_sign(a, b, origin) == 0 {
                    for p in [a, b] {
                        let t = p.sub(origin).dot(dir);
                        if t >= 0.0 {
                            hits.push((t, p, i));
                        }
                    }
                }
                continue;
            }
            let ao = a.sub(origin);
            let t = ao.cross(ed) / denom;
            let u = ao.cross(dir) / denom;
            if t >= 0.0 && (0.0..=1.0).contains(&u) {
                hits.push((t, a.add(ed.scale(u)), i));
            }
        }
        hits.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for (_, p, i) in hits {
            if self.visible(origin, p) {
                return Some((p, i));
            }
        }
        None
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonDomain {
    pub outer: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    region: Region,
}

impl PolygonDomain {
    /// Validates simplicity, orientation (outer CCW, holes CW), containment
    /// and disjointness of holes.
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self, GeomError> {
        check_ring(&outer, 0)?;
        if signed_area(&outer) <= 0.0 {
            return Err(GeomError::OuterNotCcw);
        }
        for (hi, hole) in holes.iter().enumerate() {
            check_ring(hole, hi + 1)?;
            if signed_area(hole) >= 0.0 {
                return Err(GeomError::HoleNotCw(hi));
            }
        }
        let outer_region = Region::new(ring_edges(&outer));
        for (hi, hole) in holes.iter().enumerate() {
            for p in hole {
                if outer_region.classify(*p) != Containment::Interior {
                    return Err(GeomError::HoleOutside(hi));
                }
            }
            for e in ring_edges(hole) {
                for oe in &outer_region.edges {
                    if segments_touch(e.a, e.b, oe.a, oe.b) {
                        return Err(GeomError::HoleOutside(hi));
                    }
                }
            }
        }
        for i in 0..holes.len() {
            for j in i + 1..holes.len() {
                let (ei, ej) = (ring_edges(&holes[i]), ring_edges(&holes[j]));
                for a in &ei {
                    for b in &ej {
                        if segments_touch(a.a, a.b, b.a, b.b) {
                            return Err(GeomError::HolesIntersect(i, j));
                        }
                    }
                }
                let ri = Region::new(ei);
                if ri.classify(holes[j][0]) == Containment::Interior {
                    return Err(GeomError::HolesIntersect(i, j));
                }
                let rj = Region::new(ej);
                if rj.classify(holes[i][0]) == Containment::Interior {
                    return Err(GeomError::HolesIntersect(i, j));
                }
            }
        }
        let mut edges = ring_edges(&outer);
        for hole in &holes {
            edges.extend(ring_edges(hole));
        }
        Ok(PolygonDomain {
            outer,
            holes,
            region: Region::new(edges),
        })
    }

    pub fn n(&self) -> usize {
        self.outer.len() + self.holes.iter().map(|h| h.len()).sum::<usize>()
    }

    pub fn h(&self) -> usize {
        self.holes.len()
    }

    /// All polygon vertices, outer first then holes, in ring order. Vertex
    /// ids used throughout the crate are indices into this list.
    pub fn vertices(&self) -> Vec<Point> {
        let mut v = self.outer.clone();
        for hole in &self.holes {
            v.extend_from_slice(hole);
        }
        v
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.outer) + self.holes.iter().map(|h| signed_area(h)).sum::<f64>()
    }

    pub fn contains(&self, p: Point) -> Containment {
        self.region.classify(p)
    }

    pub fn visible(&self, a: Point, b: Point) -> bool {
        self.region.visible(a, b)
    }

    pub fn ray_shoot(&self, origin: Point, dir: Point) -> Option<(Point, usize)> {
        self.region.ray_shoot(origin, dir)
    }

    pub fn first_path_hit(&self, path: &[Point], origin: Point, dir: Point) -> Option<(Point, usize)> {
        self.region.first_path_hit(path, origin, dir)
    }

    /// Text format: "outer <count>" followed by count "x y" lines (CCW),
    /// then per hole "hole <count>" + CW vertex lines. '#' starts a comment.
    pub fn parse(text: &str) -> Result<Self, GeomError> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace())
            .peekable();
        let kw = tokens
            .next()
            .ok_or_else(|| GeomError::Parse("empty input".into()))?;
        if kw != "outer" {
            return Err(GeomError::Parse(format!("expected 'outer', found '{kw}'")));
        }
        let read_count = |t: Option<&str>| -> Result<usize, GeomError> {
            t.ok_or_else(|| GeomError::Parse("missing vertex count".into()))?
                .parse()
                .map_err(|e| GeomError::Parse(format!("bad vertex count: {e}")))
        };
        let outer_count = read_count(tokens.next())?;
        let read_ring = |count: usize, tokens: &mut dyn Iterator<Item = &str>| {
            let mut ring = Vec::with_capacity(count);
            for _ in 0..count {
                let x: f64 = tokens
                    .next()
                    .ok_or_else(|| GeomError::Parse("missing coordinate".into()))?
                    .parse()
                    .map_err(|e| GeomError::Parse(format!("bad coordinate: {e}")))?;
                let y: f64 = tokens
                    .next()
                    .ok_or_else(|| GeomError::Parse("missing coordinate".into()))?
                    .parse()
                    .map_err(|e| GeomError::Parse(format!("bad coordinate: {e}")))?;
                if !x.is_finite() || !y.is_finite() {
                    return Err(GeomError::Parse("non-finite coordinate".into()));
                }
                ring.push(Point::new(x, y));
            }
            Ok(ring)
        };
        let outer = read_ring(outer_count, &mut tokens)?;
        let mut holes = Vec::new();
        while let Some(kw) = tokens.next() {
            if kw != "hole" {
                return Err(GeomError::Parse(format!("expected 'hole', found '{kw}'")));
            }
            let count = read_count(tokens.next())?;
            holes.push(read_ring(count, &mut tokens)?);
        }
        if signed_area(&outer) <= 0.0 {
            return Err(GeomError::Parse(
                "outer boundary is clockwise; expected counterclockwise".into(),
            ));
        }
        for (i, h) in holes.iter().enumerate() {
            if h.len() >= 3 && signed_area(h) >= 0.0 {
                return Err(GeomError::Parse(format!(
                    "hole {i} is counterclockwise; expected clockwise"
                )));
            }
        }
        PolygonDomain::new(outer, holes)
    }

    pub fn to_poly_string(&self) -> String {
        let mut s = format!("outer {}\n", self.outer.len());
        for p in &self.outer {
            s.push_str(&format!("{} {}\n", p.x, p.y));
        }
        for hole in &self.holes {
            s.push_str(&format!("hole {}\n", hole.len()));
            for p in hole {
                s.push_str(&format!("{} {}\n", p.x, p.y));
            }
        }
        s
    }
}

pub fn ring_edges(ring: &[Point]) -> Vec<Segment> {
    (0..ring.len())
        .map(|i| Segment::new(ring[i], ring[(i + 1) % ring.len()]))
        .collect()
}

fn check_ring(ring: &[Point], ring_idx: usize) -> Result<(), GeomError> {
    if ring.len() < 3 {
        return Err(GeomError::TooFewVertices);
    }
    let n = ring.len();
    for i in 0..n {
        if ring[i] == ring[(i + 1) % n] {
            return Err(GeomError::RepeatedVertex);
        }
    }
    let edges = ring_edges(ring);
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (e, f) = (&edges[i], &edges[j]);
            if adjacent {
                // Only the shared vertex may be common.
                let shared = if j == i + 1 { e.b } else { e.a };
                let (other_e, other_f) = if j == i + 1 { (e.a, f.b) } else { (e.b, f.a) };
                if on_segment(other_e, f.a, f.b) || on_segment(other_f, e.a, e.b) {
                    return Err(GeomError::NotSimple(ring_idx, i, j));
                }
                let _ = shared;
            } else if segments_touch(e.a, e.b, f.a, f.b) {
                return Err(GeomError::NotSimple(ring_idx, i, j));
            }
        }
    }
    Ok(())
}

/// [0,10] x [0,10] square with the square hole [4,6] x [4,6]; the standard
/// worked example used across the test suite.
pub fn square_with_hole() -> PolygonDomain {
    let outer = vec![
        Point::new(0.0, 0.0),
        Point::new(10.0, 0.0),
        Point::new(10.0, 10.0),
        Point::new(0.0, 10.0),
    ];
    let hole = vec![
        Point::new(4.0, 4.0),
        Point::new(4.0, 6.0),
        Point::new(6.0, 6.0),
        Point::new(6.0, 4.0),
    ];
    PolygonDomain::new(outer, vec![hole]).unwrap()
}

pub fn unit_square() -> PolygonDomain {
    PolygonDomain::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_basics() {
        let sq = unit_square();
        assert_eq!(sq.contains(Point::new(0.5, 0.5)), Containment::Interior);
        assert_eq!(sq.contains(Point::new(0.0, 0.5)), Containment::Boundary);
        assert_eq!(sq.contains(Point::new(1.5, 0.5)), Containment::Exterior);
        let dom = square_with_hole();
        assert_eq!(dom.contains(Point::new(5.0, 5.0)), Containment::Exterior);
        assert_eq!(dom.contains(Point::new(4.0, 5.0)), Containment::Boundary);
        assert_eq!(dom.contains(Point::new(2.0, 5.0)), Containment::Interior);
    }

    #[test]
    fn visibility_basics() {
        let sq = unit_square();
        assert!(sq.visible(Point::new(0.1, 0.1), Point::new(0.9, 0.9)));
        // Grazing along the bottom edge.
        assert!(sq.visible(Point::new(0.0, 0.0), Point::new(1.0, 0.0)));
        let dom = square_with_hole();
        assert!(!dom.visible(Point::new(2.0, 5.0), Point::new(8.0, 5.0)));
        assert!(dom.visible(Point::new(2.0, 5.0), Point::new(4.0, 4.0)));
        // Tangent through the hole corner.
        assert!(dom.visible(Point::new(2.0, 2.0), Point::new(6.0, 6.0)) == false);
        assert!(dom.visible(Point::new(0.0, 8.0), Point::new(8.0, 0.0)));
    }

    #[test]
    fn visibility_symmetry_random() {
        let dom = square_with_hole();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let a = Point::new(next() * 10.0, next() * 10.0);
            let b = Point::new(next() * 10.0, next() * 10.0);
            if dom.contains(a) == Containment::Exterior || dom.contains(b) == Containment::Exterior
            {
                continue;
            }
            assert_eq!(dom.visible(a, b), dom.visible(b, a));
        }
    }

    #[test]
    fn ray_shoot_basics() {
        let sq = unit_square();
        let (p, _) = sq.ray_shoot(Point::new(0.5, 0.5), Point::new(0.0, 1.0)).unwrap();
        assert_eq!(p, Point::new(0.5, 1.0));
        let dom = square_with_hole();
        let (p, _) = dom.ray_shoot(Point::new(5.0, 1.0), Point::new(0.0, 1.0)).unwrap();
        assert_eq!(p, Point::new(5.0, 4.0));
        // Origin at a vertex, shooting along the incident edge.
        let (p, _) = dom.ray_shoot(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        assert_eq!(p, Point::new(10.0, 0.0));
        // On the boundary pointing outward.
        assert!(sq.ray_shoot(Point::new(0.0, 0.5), Point::new(-1.0, 0.0)).is_none());
    }

    #[test]
    fn first_path_hit_basics() {
        let outer = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let sq = PolygonDomain::new(outer, vec![]).unwrap();
        let q = [Point::new(0.0, 5.0), Point::new(10.0, 5.0)];
        let (p, i) = sq.first_path_hit(&q, Point::new(5.0, 1.0), Point::new(0.0, 1.0)).unwrap();
        assert_eq!((p, i), (Point::new(5.0, 5.0), 0));
        assert!(sq.first_path_hit(&q, Point::new(5.0, 6.0), Point::new(0.0, 1.0)).is_none());
        let dom = square_with_hole();
        let q = [Point::new(0.0, 8.0), Point::new(10.0, 8.0)];
        assert!(dom.first_path_hit(&q, Point::new(5.0, 1.0), Point::new(0.0, 1.0)).is_none());
    }

    #[test]
    fn poly_roundtrip_and_rejects() {
        let dom = square_with_hole();
        let text = dom.to_poly_string();
        let dom2 = PolygonDomain::parse(&text).unwrap();
        assert_eq!(dom2.n(), 8);
        assert_eq!(dom2.h(), 1);
        // CW outer must be rejected.
        let bad = "outer 3\n0 0\n0 1\n1 0\n";
        assert!(matches!(PolygonDomain::parse(bad), Err(GeomError::Parse(_))));
        // CCW hole must be rejected.
        let bad = "outer 4\n0 0\n10 0\n10 10\n0 10\nhole 3\n4 4\n6 4\n6 6\n";
        assert!(matches!(PolygonDomain::parse(bad), Err(GeomError::Parse(_))));
        let with_comment = "# a square\nouter 4\n0 0\n1 0\n1 1\n0 1\n";
        assert!(PolygonDomain::parse(with_comment).is_ok());
    }

    #[test]
    fn validation_rejects_bad_domains() {
        // Self-intersecting bowtie.
        let bowtie = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(PolygonDomain::new(bowtie, vec![]).is_err());
        // Hole sticking outside.
        let outer = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let hole = vec![
            Point::new(8.0, 8.0),
            Point::new(8.0, 12.0),
            Point::new(12.0, 12.0),
            Point::new(12.0, 8.0),
        ];
        assert!(PolygonDomain::new(outer, vec![hole]).is_err());
    }
}
