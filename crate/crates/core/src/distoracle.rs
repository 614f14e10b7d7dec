//! Two-point (1+eps)-approximate geodesic distance queries: separator tree
//! plus one per-(node, path) structure, queried at every node whose
//! subpolygon contains both endpoints.

use crate::geom::{Containment, GeomError, Point, PolygonDomain};
use crate::pathstruct::{via_q_distance, AnchorSet, ArcPath, PathStructure};
use crate::septree::{build_separator_tree, SepError, SeparatorTree};
use crate::triangulate::{subregion, Location};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("eps {0} outside (0, 1]")]
    BadEps(f64),
    #[error(transparent)]
    Sep(#[from] SepError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

pub struct DistanceOracle {
    pub domain: PolygonDomain,
    pub eps: f64,
    pub tree: SeparatorTree,
    /// One structure per separator path, indexed like `tree.nodes[i].paths`.
    pub structures: Vec<Vec<PathStructure>>,
}

pub fn build_oracle(domain: &PolygonDomain, eps: f64) -> Result<DistanceOracle, OracleError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(OracleError::BadEps(eps));
    }
    let tree = build_separator_tree(domain)?;
    let mut structures = Vec::with_capacity(tree.nodes.len());
    for node in &tree.nodes {
        let mut per_node = Vec::with_capacity(node.paths.len());
        if !node.paths.is_empty() {
            let region = subregion(&tree.tri, &node.triangles);
            let mut vids: BTreeSet<usize> = BTreeSet::new();
            for &t in &node.triangles {
                vids.extend(tree.tri.triangles[t]);
            }
            let sub_points: Vec<Point> = vids.iter().map(|&v| tree.tri.points[v]).collect();
            for path in &node.paths {
                let q = ArcPath::new(tree.path_points(path));
                per_node.push(PathStructure::new(q, region.clone(), sub_points.clone(), eps));
            }
        }
        structures.push(per_node);
    }
    Ok(DistanceOracle { domain: domain.clone(), eps, tree, structures })
}

impl DistanceOracle {
    /// Every tree node whose subpolygon's closure contains p: the union of
    /// the root-to-leaf chains of all triangles p resolves to. Points on
    /// shared edges or vertices belong to several leaves.
    pub(crate) fn covering_nodes(&self, p: Point) -> Result<BTreeSet<usize>, GeomError> {
        let tris: Vec<usize> = match self.tree.tri.locate(p)? {
            Location::Triangle(t) => vec![t],
            Location::Edge(_, adj) => adj.iter().flatten().copied().collect(),
            Location::Vertex(v) => (0..self.tree.tri.triangles.len())
                .filter(|&t| self.tree.tri.triangles[t].contains(&v))
                .collect(),
        };
        let mut nodes = BTreeSet::new();
        for t in tris {
            let mut cur = self.tree.root;
            nodes.insert(cur);
            while let Some((a, b)) = self.tree.nodes[cur].children {
                cur = if self.tree.nodes[a].triangles.binary_search(&t).is_ok() { a } else { b };
                nodes.insert(cur);
            }
        }
        Ok(nodes)
    }

    pub fn query_distance(&self, s: Point, t: Point) -> Result<(f64, Vec<Point>), OracleError> {
        for p in [s, t] {
            if self.domain.contains(p) == Containment::Exterior {
                return Err(GeomError::PointOutside(p).into());
            }
        }
        // Canonical orientation makes the query exactly symmetric.
        let (s, t) = if t.lex_cmp(s) == std::cmp::Ordering::Less { (t, s) } else { (s, t) };
        if s == t {
            return Ok((0.0, vec![s]));
        }
        let ns = self.covering_nodes(s)?;
        let nt = self.covering_nodes(t)?;
        if ns.intersection(&nt).any(|&n| {
            self.tree.nodes[n].children.is_none()
        }) {
            // A shared leaf triangle is convex: the geodesic is the segment.
            return Ok((s.dist(t), vec![s, t]));
        }
        let mut best: Option<(f64, usize, usize, (usize, usize), AnchorSet, AnchorSet)> = None;
        for &n in ns.intersection(&nt) {
            for (j, ps) in self.structures[n].iter().enumerate() {
                let a_s = ps.query_anchor_set(s);
                let a_t = ps.query_anchor_set(t);
                let (d, pair) = via_q_distance(&a_s, &a_t, &ps.q);
                let Some(pair) = pair else { continue };
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, n, j, pair, a_s, a_t));
                }
            }
        }
        let (d, n, j, (ia, ib), a_s, a_t) =
            best.expect("some common-ancestor separator must yield an estimate");
        let ps = &self.structures[n][j];
        let (aa, ab) = (&a_s.anchors[ia], &a_t.anchors[ib]);
        let mut path = ps.anchor_path(&a_s.owner, aa);
        let mid = if aa.arc <= ab.arc {
            ps.q.subpath((aa.arc, aa.edge), (ab.arc, ab.edge), aa.point, ab.point)
        } else {
            let mut m = ps.q.subpath((ab.arc, ab.edge), (aa.arc, aa.edge), ab.point, aa.point);
            m.reverse();
            m
        };
        for p in mid {
            if p != *path.last().unwrap() {
                path.push(p);
            }
        }
        let mut tail = ps.anchor_path(&a_t.owner, ab);
        tail.reverse();
        for p in tail {
            if p != *path.last().unwrap() {
                path.push(p);
            }
        }
        Ok((d, path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::square_with_hole;
    use crate::oracle::{exact_distance, polyline_len};

    #[test]
    fn bad_eps_rejected() {
        let dom = square_with_hole();
        assert!(matches!(build_oracle(&dom, 0.0), Err(OracleError::BadEps(_))));
        assert!(matches!(build_oracle(&dom, 1.5), Err(OracleError::BadEps(_))));
    }

    #[test]
    fn single_triangle_domain() {
        let dom = PolygonDomain::new(
            vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 3.0)],
            vec![],
        )
        .unwrap();
        let o = build_oracle(&dom, 0.5).unwrap();
        assert!(o.structures.iter().all(|s| s.is_empty()));
        let (d, w) = o.query_distance(Point::new(0.5, 0.5), Point::new(2.0, 0.5)).unwrap();
        assert_eq!(d, 1.5);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn worked_hole_example() {
        let dom = square_with_hole();
        let o = build_oracle(&dom, 0.25).unwrap();
        let s = Point::new(2.0, 5.0);
        let t = Point::new(8.0, 5.0);
        let (est, witness) = o.query_distance(s, t).unwrap();
        let d = 2.0 * 5.0f64.sqrt() + 2.0;
        assert!(est >= d - 1e-9, "estimate {est} below exact {d}");
        assert!(est <= 1.25 * d + 1e-9, "estimate {est} above (1+eps)d {}", 1.25 * d);
        // Witness is a realizable path of matching length.
        assert!((polyline_len(&witness) - est).abs() <= 1e-9 * est.max(1.0));
        assert_eq!(witness.first(), Some(&s));
        assert_eq!(witness.last(), Some(&t));
        for w in witness.windows(2) {
            assert!(dom.visible(w[0], w[1]), "witness edge {} -> {} blocked", w[0], w[1]);
        }
    }

    #[test]
    fn identical_points_and_symmetry() {
        let dom = square_with_hole();
        let o = build_oracle(&dom, 0.5).unwrap();
        let p = Point::new(3.0, 7.0);
        assert_eq!(o.query_distance(p, p).unwrap().0, 0.0);
        let q = Point::new(8.5, 1.5);
        let (d1, w1) = o.query_distance(p, q).unwrap();
        let (d2, w2) = o.query_distance(q, p).unwrap();
        assert_eq!(d1, d2, "query must be exactly symmetric");
        assert_eq!(w1, w2);
    }

    #[test]
    fn random_sandwich() {
        let dom = square_with_hole();
        let eps = 0.5;
        let o = build_oracle(&dom, eps).unwrap();
        let mut state = 31u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tested = 0;
        while tested < 25 {
            let s = Point::new(next() * 10.0, next() * 10.0);
            let t = Point::new(next() * 10.0, next() * 10.0);
            if dom.contains(s) == Containment::Exterior || dom.contains(t) == Containment::Exterior
            {
                continue;
            }
            tested += 1;
            let (est, witness) = o.query_distance(s, t).unwrap();
            let (d, _) = exact_distance(&dom, s, t).unwrap();
            assert!(est >= d - 1e-9 * d.max(1.0), "estimate {est} < exact {d} for {s} {t}");
            assert!(
                est <= (1.0 + eps) * d + 1e-9 * d.max(1.0),
                "estimate {est} > (1+eps)·{d} for {s} {t}"
            );
            assert!((polyline_len(&witness) - est).abs() <= 1e-9 * est.max(1.0));
            for w in witness.windows(2) {
                assert!(dom.visible(w[0], w[1]));
            }
        }
    }
}
