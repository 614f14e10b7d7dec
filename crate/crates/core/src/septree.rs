//! Balanced hierarchical subdivision by fundamental-cycle separators.
//!
//! Build a shortest path tree from the smallest-id vertex, triangulate the
//! domain constrained to its edges, complete the result to a triangulated
//! sphere (triangulated holes plus an outer-face fan through an abstract
//! apex), and recursively split the triangle set with the most balanced
//! fundamental cycle. Cycle edges that are shortest-path-tree edges or real
//! triangulation edges form the node's separator paths; abstract edges carry
//! no geometry.

use crate::geom::{GeomError, Point, PolygonDomain};
use crate::oracle::shortest_path_tree;
use crate::triangulate::{
    ear_clip, sorted_edge, triangulate, Location, Triangulation, TriangulateError,
};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SepError {
    #[error(transparent)]
    Triangulate(#[from] TriangulateError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone)]
pub struct SeparatorNode {
    pub id: usize,
    /// Real triangle ids of the subpolygon, sorted.
    pub triangles: Vec<usize>,
    /// Separator paths as polylines of vertex ids; empty for leaves.
    pub paths: Vec<Vec<usize>>,
    pub children: Option<(usize, usize)>,
    pub level: usize,
}

#[derive(Debug)]
pub struct SeparatorTree {
    pub nodes: Vec<SeparatorNode>,
    pub root: usize,
    pub tri: Triangulation,
    /// For each triangulation edge on some separator: the highest (then
    /// smallest-id) node whose paths use it.
    pub edge_owner: HashMap<(usize, usize), usize>,
}

/// The completed sphere graph the recursion runs on.
struct Sphere {
    /// All triangles; the first `n_real` are the domain triangulation.
    tris: Vec<[usize; 3]>,
    n_real: usize,
    /// Sorted edge -> the (exactly two) incident triangles.
    edge_tris: HashMap<(usize, usize), [usize; 2]>,
    /// Spanning tree: parent and depth per vertex, rooted at vertex 0.
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    tree_edges: HashSet<(usize, usize)>,
}

impl Sphere {
    fn tri_edges(&self, t: usize) -> [(usize, usize); 3] {
        let [a, b, c] = self.tris[t];
        [sorted_edge(a, b), sorted_edge(b, c), sorted_edge(c, a)]
    }

    /// Unique tree path between u and v: the two legs up to their lowest
    /// common ancestor, each returned from its endpoint to the lca inclusive.
    fn tree_legs(&self, u: usize, v: usize) -> (Vec<usize>, Vec<usize>) {
        let (mut a, mut b) = (vec![u], vec![v]);
        let (mut x, mut y) = (u, v);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap();
            a.push(x);
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap();
            b.push(y);
        }
        while x != y {
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
            a.push(x);
            b.push(y);
        }
        (a, b)
    }
}

fn path_edges(leg: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    leg.windows(2).map(|w| sorted_edge(w[0], w[1]))
}

fn build_sphere(domain: &PolygonDomain, tri: &Triangulation) -> Sphere {
    let n = tri.points.len();
    let apex = n;
    let mut tris = tri.triangles.clone();
    let n_real = tris.len();
    // Fill each hole with its own triangulation; combinatorial only.
    let mut offset = domain.outer.len();
    for hole in &domain.holes {
        let ring: Vec<usize> = (offset..offset + hole.len()).rev().collect();
        let filled = ear_clip(&tri.points, ring).expect("hole ring is simple");
        tris.extend(filled);
        offset += hole.len();
    }
    // Close the outer face with a fan through an abstract apex vertex.
    let m = domain.outer.len();
    for i in 0..m {
        tris.push([i, (i + 1) % m, apex]);
    }
    let mut edge_tris: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let e = sorted_edge(t[k], t[(k + 1) % 3]);
            match seen.remove(&e) {
                None => {
                    seen.insert(e, ti);
                }
                Some(prev) => {
                    let old = edge_tris.insert(e, [prev, ti]);
                    assert!(old.is_none(), "edge {e:?} on more than two triangles");
                }
            }
        }
    }
    assert!(seen.is_empty(), "sphere completion left open edges: {seen:?}");

    // The spanning tree: shortest-path-tree edges (split at collinear
    // vertices by the triangulation) plus the apex hung off the root.
    let mut tree_edges: HashSet<(usize, usize)> = tri.constrained_edges.iter().copied().collect();
    tree_edges.insert(sorted_edge(0, apex));
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(u, v) in &tree_edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent: Vec<Option<usize>> = vec![None; n + 1];
    let mut depth = vec![usize::MAX; n + 1];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if depth[y] == usize::MAX {
                depth[y] = depth[x] + 1;
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    assert!(
        depth.iter().all(|&d| d != usize::MAX),
        "shortest path tree does not span all vertices"
    );
    assert_eq!(
        tree_edges.len(),
        n,
        "split shortest-path-tree edges must form a tree"
    );
    Sphere { tris, n_real, edge_tris, parent, depth, tree_edges }
}

/// The winning cycle for one split: closing edge, the two tree legs, and the
/// triangle sets on each side.
struct Split {
    closing: (usize, usize),
    leg_u: Vec<usize>,
    leg_v: Vec<usize>,
    sides: [Vec<usize>; 2],
}

fn best_cycle(sphere: &Sphere, tris: &[usize]) -> Split {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    {
        let mut seen = HashSet::new();
        for &t in tris {
            for e in sphere.tri_edges(t) {
                if seen.insert(e) && !sphere.tree_edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
    }
    edges.sort_unstable();
    let n_real_here = tris.iter().filter(|&&t| t < sphere.n_real).count();
    let cap = (2 * n_real_here).div_ceil(3);
    let mut best: Option<(usize, (usize, usize), Split)> = None;
    for &(u, v) in &edges {
        let (leg_u, leg_v) = sphere.tree_legs(u, v);
        let mut cycle: HashSet<(usize, usize)> = path_edges(&leg_u).collect();
        cycle.extend(path_edges(&leg_v));
        cycle.insert(sorted_edge(u, v));
        // Legs are root paths of the shortest-path tree; shortest paths from
        // a common source never cross, so they stay inside the closed
        // subpolygon without an explicit check.
        // Flood fill the full sphere dual without crossing the cycle: a
        // simple closed curve on the sphere leaves exactly two sides, even
        // when one side's subset triangles are disconnected within it.
        let mut comp: Vec<u8> = vec![u8::MAX; sphere.tris.len()];
        let mut n_comp = 0u8;
        for start in 0..sphere.tris.len() {
            if comp[start] != u8::MAX {
                continue;
            }
            let mark = n_comp;
            n_comp += 1;
            let mut stack = vec![start];
            comp[start] = mark;
            while let Some(t) = stack.pop() {
                for e in sphere.tri_edges(t) {
                    if cycle.contains(&e) {
                        continue;
                    }
                    for &o in &sphere.edge_tris[&e] {
                        if o != t && comp[o] == u8::MAX {
                            comp[o] = mark;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        assert_eq!(n_comp, 2, "fundamental cycle must leave exactly two sides");
        let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for &t in tris {
            sides[comp[t] as usize].push(t);
        }
        let w = |s: &[usize]| s.iter().filter(|&&t| t < sphere.n_real).count();
        let (w0, w1) = (w(&sides[0]), w(&sides[1]));
        if w0 == 0 || w1 == 0 || w0.max(w1) > cap {
            continue;
        }
        let score = w0.max(w1);
        let better = match &best {
            None => true,
            Some((bs, be, _)) => score < *bs || (score == *bs && (u, v) < *be),
        };
        if better {
            best = Some((score, (u, v), Split { closing: (u, v), leg_u, leg_v, sides }));
        }
    }
    best.map(|(_, _, s)| s)
        .expect("no admissible fundamental cycle; balance guarantee violated")
}

pub fn build_separator_tree(domain: &PolygonDomain) -> Result<SeparatorTree, SepError> {
    let spt = shortest_path_tree(domain, 0);
    let tri = triangulate(domain, &spt.edges())?;
    let sphere = build_sphere(domain, &tri);
    let real_edges: HashSet<(usize, usize)> = tri
        .triangles
        .iter()
        .flat_map(|t| (0..3).map(|k| sorted_edge(t[k], t[(k + 1) % 3])))
        .collect();

    let mut nodes: Vec<SeparatorNode> = Vec::new();
    // Depth-first, children pushed in deterministic (smallest triangle id
    // first) order.
    let all: Vec<usize> = (0..sphere.tris.len()).collect();
    let mut stack: Vec<(Vec<usize>, usize, Option<usize>)> = vec![(all, 0, None)];
    let mut link: Vec<(usize, usize)> = Vec::new(); // (parent, child)
    while let Some((tris, level, parent)) = stack.pop() {
        let real: Vec<usize> = tris.iter().copied().filter(|&t| t < sphere.n_real).collect();
        let id = nodes.len();
        if let Some(p) = parent {
            link.push((p, id));
        }
        if real.len() <= 1 {
            assert_eq!(real.len(), 1, "pruned subtrees must not become nodes");
            nodes.push(SeparatorNode { id, triangles: real, paths: Vec::new(), children: None, level });
            continue;
        }
        let split = best_cycle(&sphere, &tris);
        let apex = tri.points.len();
        let mut paths: Vec<Vec<usize>> = Vec::new();
        for leg in [&split.leg_u, &split.leg_v] {
            // Legs through the abstract apex start with it; the in-domain
            // portion begins at the root vertex.
            let leg: Vec<usize> = leg.iter().copied().filter(|&v| v != apex).collect();
            if leg.len() >= 2 {
                paths.push(leg);
            }
        }
        let (u, v) = split.closing;
        if real_edges.contains(&sorted_edge(u, v)) {
            paths.push(vec![u, v]);
        }
        assert!(!paths.is_empty() && paths.len() <= 3);
        nodes.push(SeparatorNode { id, triangles: real, paths, children: None, level });
        let [mut s0, mut s1] = split.sides;
        if s1.iter().min() < s0.iter().min() {
            std::mem::swap(&mut s0, &mut s1);
        }
        // Push the second child first so the first is processed (and
        // numbered) first.
        stack.push((s1, level + 1, Some(id)));
        stack.push((s0, level + 1, Some(id)));
    }
    for &(p, c) in &link {
        nodes[p].children = match nodes[p].children {
            None => Some((c, c)),
            Some((a, _)) => Some((a, c)),
        };
    }
    for n in &mut nodes {
        n.triangles.sort_unstable();
    }

    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| (nodes[i].level, i));
    for i in order {
        for path in &nodes[i].paths {
            for e in path_edges(path) {
                edge_owner.entry(e).or_insert(i);
            }
        }
    }
    Ok(SeparatorTree { nodes, root: 0, tri, edge_owner })
}

impl SeparatorTree {
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    #[cfg(test)]
    fn leaf_nodes(&self) -> impl Iterator<Item = &SeparatorNode> {
        self.nodes.iter().filter(|n| n.children.is_none())
    }

    /// The triangle a point resolves to: on edges or vertices, the smallest
    /// incident triangle id.
    pub fn triangle_of(&self, p: Point) -> Result<usize, GeomError> {
        Ok(match self.tri.locate(p)? {
            Location::Triangle(t) => t,
            Location::Edge(_, adj) => adj.iter().flatten().copied().min().unwrap(),
            Location::Vertex(v) => self
                .tri
                .triangles
                .iter()
                .position(|t| t.contains(&v))
                .expect("vertex belongs to some triangle"),
        })
    }

    /// Root-to-leaf node path for a point, the leaf triangle, and — when the
    /// point lies on a separator edge — that edge's highest-node pointer.
    pub fn root_to_leaf(&self, p: Point) -> Result<(Vec<usize>, usize, Option<usize>), GeomError> {
        let loc = self.tri.locate(p)?;
        let t = self.triangle_of(p)?;
        let mut chain = vec![self.root];
        let mut cur = self.root;
        while let Some((a, b)) = self.nodes[cur].children {
            cur = if self.nodes[a].triangles.binary_search(&t).is_ok() { a } else { b };
            debug_assert!(self.nodes[cur].triangles.binary_search(&t).is_ok());
            chain.push(cur);
        }
        let pointer = match loc {
            Location::Edge(e, _) => self.edge_owner.get(&e).copied(),
            _ => None,
        };
        Ok((chain, t, pointer))
    }

    /// Geometry of a separator path as a polyline.
    pub fn path_points(&self, path: &[usize]) -> Vec<Point> {
        path.iter().map(|&v| self.tri.points[v]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{segments_touch, square_with_hole};
    use crate::oracle::{exact_distance, polyline_len};

    fn check_invariants(tree: &SeparatorTree, domain: &PolygonDomain) {
        let n_tris = tree.tri.triangles.len();
        // Height bound.
        let bound = ((n_tris as f64).ln() / 1.5f64.ln()).ceil() as usize + 2;
        assert!(tree.height() <= bound, "height {} > {bound}", tree.height());
        for node in &tree.nodes {
            match node.children {
                None => assert_eq!(node.triangles.len(), 1),
                Some((a, b)) => {
                    assert!(node.triangles.len() >= 2);
                    let cap = (2 * node.triangles.len()).div_ceil(3);
                    let mut merged = Vec::new();
                    for c in [a, b] {
                        assert!(tree.nodes[c].triangles.len() <= cap);
                        assert_eq!(tree.nodes[c].level, node.level + 1);
                        merged.extend_from_slice(&tree.nodes[c].triangles);
                    }
                    merged.sort_unstable();
                    assert_eq!(merged, node.triangles, "children must partition the parent");
                    assert!(!node.paths.is_empty() && node.paths.len() <= 3);
                    for path in &node.paths {
                        let pts = tree.path_points(path);
                        let (d, _) = exact_distance(domain, pts[0], *pts.last().unwrap()).unwrap();
                        let len = polyline_len(&pts);
                        assert!((len - d).abs() <= 1e-9 * d.max(1.0), "separator not geodesic");
                    }
                }
            }
        }
        // Per-level triangle multisets are disjoint.
        let mut by_level: HashMap<usize, HashSet<usize>> = HashMap::new();
        for node in &tree.nodes {
            let set = by_level.entry(node.level).or_default();
            for &t in &node.triangles {
                assert!(set.insert(t), "triangle {t} twice on level {}", node.level);
            }
        }
        // Leaves cover everything exactly once.
        let mut leaves: Vec<usize> = tree.leaf_nodes().map(|n| n.triangles[0]).collect();
        leaves.sort_unstable();
        assert_eq!(leaves, (0..n_tris).collect::<Vec<_>>());
    }

    #[test]
    fn single_triangle_domain() {
        let dom = PolygonDomain::new(
            vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 3.0)],
            vec![],
        )
        .unwrap();
        let tree = build_separator_tree(&dom).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!(tree.nodes[0].paths.is_empty());
        let (chain, t, ptr) = tree.root_to_leaf(Point::new(1.0, 1.0)).unwrap();
        assert_eq!(chain, vec![0]);
        assert_eq!(t, 0);
        assert!(ptr.is_none());
    }

    #[test]
    fn convex_octagon_balance() {
        let pts: Vec<Point> = (0..8)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 8.0;
                Point::new(10.0 * a.cos(), 10.0 * a.sin())
            })
            .collect();
        let dom = PolygonDomain::new(pts, vec![]).unwrap();
        let tree = build_separator_tree(&dom).unwrap();
        check_invariants(&tree, &dom);
        let root = &tree.nodes[tree.root];
        assert_eq!(root.triangles.len(), 6);
        let (a, b) = root.children.unwrap();
        assert!(tree.nodes[a].triangles.len() <= 4);
        assert!(tree.nodes[b].triangles.len() <= 4);
    }

    #[test]
    fn hole_domain_invariants() {
        let dom = square_with_hole();
        let tree = build_separator_tree(&dom).unwrap();
        check_invariants(&tree, &dom);
        assert!(tree.height() >= 2);
    }

    #[test]
    fn root_to_leaf_nesting_and_pointer() {
        let dom = square_with_hole();
        let tree = build_separator_tree(&dom).unwrap();
        let mut state = 17u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tested = 0;
        while tested < 50 {
            let p = Point::new(next() * 10.0, next() * 10.0);
            let Ok((chain, t, _)) = tree.root_to_leaf(p) else { continue };
            tested += 1;
            for &nid in &chain {
                assert!(tree.nodes[nid].triangles.binary_search(&t).is_ok());
            }
            assert!(tree.nodes[*chain.last().unwrap()].children.is_none());
        }
        // A point in the interior of a separator edge reports the highest
        // node using that edge.
        let (&edge, &owner) = tree.edge_owner.iter().min_by_key(|&(_, &o)| o).unwrap();
        let (a, b) = (tree.tri.points[edge.0], tree.tri.points[edge.1]);
        let mid = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        let (_, _, ptr) = tree.root_to_leaf(mid).unwrap();
        assert_eq!(ptr, Some(owner));
        // Exhaustive scan agrees: no higher node uses the edge.
        for node in &tree.nodes {
            if node.level < tree.nodes[owner].level {
                for path in &node.paths {
                    assert!(!path_edges(path).any(|e| e == edge));
                }
            }
        }
    }

    #[test]
    fn geodesics_cross_separators() {
        let dom = square_with_hole();
        let tree = build_separator_tree(&dom).unwrap();
        let mut state = 23u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tested = 0;
        while tested < 30 {
            let s = Point::new(next() * 10.0, next() * 10.0);
            let t = Point::new(next() * 10.0, next() * 10.0);
            let (Ok((cs, ls, _)), Ok((ct, lt, _))) = (tree.root_to_leaf(s), tree.root_to_leaf(t))
            else {
                continue;
            };
            if ls == lt {
                continue;
            }
            tested += 1;
            let (_, path) = exact_distance(&dom, s, t).unwrap();
            let common: Vec<usize> =
                cs.iter().zip(&ct).take_while(|(a, b)| a == b).map(|(&a, _)| a).collect();
            let crossed = common.iter().any(|&nid| {
                tree.nodes[nid].paths.iter().any(|sep| {
                    let sp = tree.path_points(sep);
                    path.windows(2).any(|g| {
                        sp.windows(2).any(|e| segments_touch(g[0], g[1], e[0], e[1]))
                    })
                })
            });
            assert!(crossed, "geodesic {s}->{t} misses all common-ancestor separators");
        }
    }
}
