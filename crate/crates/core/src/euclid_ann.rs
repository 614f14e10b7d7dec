//! Dynamic Euclidean close-neighbor search by cones: per cone, sites are
//! projected onto the two cone-boundary normals and the axis, and a 2D
//! dominance-minimum structure answers "minimum axis coordinate among sites
//! whose boundary projections dominate the query's". The best per-cone
//! candidates are then compared by true Euclidean distance, which is within
//! (1+eps) of the distance to the true nearest site.

use crate::cones::{build_family, ConeError, ConeFamily};
use crate::geom::Point;
use crate::treap::{Key, Treap};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EannError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("site id {0} already registered")]
    DuplicateId(u64),
    #[error("site id {0} not registered")]
    UnknownId(u64),
}

/// Dominance-minimum structure over planar points with an attached value:
/// given (qx, qy), the minimum (value, id) among points with x >= qx and
/// y >= qy, both inclusive.
///
/// Primary tree on x with a y-keyed value-min treap per node covering the
/// node's whole subtree. Balance is kept by partial rebuilding against a
/// depth bound; deleted nodes linger as skeleton until they dominate, but
/// their points leave every treap immediately, so queries are always exact.
#[derive(Debug, Clone, Default)]
pub struct Dominance2D {
    nodes: Vec<DomNode>,
    root: Option<usize>,
    live: usize,
    dead: usize,
}

#[derive(Debug, Clone)]
struct DomNode {
    x: f64,
    y: f64,
    val: f64,
    id: u64,
    alive: bool,
    left: Option<usize>,
    right: Option<usize>,
    /// All live subtree points, keyed by y, minimizing (val, id).
    ys: Treap,
    /// Live points in the subtree, for scapegoat selection.
    weight: usize,
}

const ALPHA: f64 = 0.7;

fn key_less(ax: f64, aid: u64, bx: f64, bid: u64) -> bool {
    ax < bx || (ax == bx && aid < bid)
}

impl Dominance2D {
    pub fn new() -> Self {
        Dominance2D::default()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn insert(&mut self, x: f64, y: f64, val: f64, id: u64) {
        let mut node = DomNode {
            x,
            y,
            val,
            id,
            alive: true,
            left: None,
            right: None,
            ys: Treap::new(),
            weight: 1,
        };
        node.ys.insert(Key { coord: y, seq: id }, (val, id));
        self.nodes.push(node);
        let idx = self.nodes.len() - 1;
        self.live += 1;

        let mut depth = 0usize;
        let mut path = Vec::new();
        let mut cur = self.root;
        let mut parent: Option<(usize, bool)> = None;
        while let Some(i) = cur {
            path.push(i);
            self.nodes[i].ys.insert(Key { coord: y, seq: id }, (val, id));
            self.nodes[i].weight += 1;
            let go_left = key_less(x, id, self.nodes[i].x, self.nodes[i].id);
            parent = Some((i, go_left));
            cur = if go_left { self.nodes[i].left } else { self.nodes[i].right };
            depth += 1;
        }
        match parent {
            None => self.root = Some(idx),
            Some((p, true)) => self.nodes[p].left = Some(idx),
            Some((p, false)) => self.nodes[p].right = Some(idx),
        }

        // Partial rebuilding: past the depth bound, rebuild the highest
        // weight-unbalanced ancestor.
        let bound = ((self.live + self.dead).max(2) as f64).log(1.0 / ALPHA).floor() as usize + 1;
        if depth > bound {
            for k in 0..path.len() {
                let i = path[k];
                let w = self.total_weight(i);
                let wl = self.nodes[i].left.map_or(0, |l| self.total_weight(l));
                let wr = self.nodes[i].right.map_or(0, |r| self.total_weight(r));
                if (wl as f64) > ALPHA * w as f64 || (wr as f64) > ALPHA * w as f64 {
                    let rebuilt = self.rebuild_subtree(i);
                    if k == 0 {
                        self.root = rebuilt;
                    } else {
                        let p = path[k - 1];
                        if self.nodes[p].left == Some(i) {
                            self.nodes[p].left = rebuilt;
                        } else {
                            self.nodes[p].right = rebuilt;
                        }
                    }
                    break;
                }
            }
        }
    }

    /// Remove the point previously inserted with these exact coordinates.
    /// Returns false if absent.
    pub fn remove(&mut self, x: f64, y: f64, id: u64) -> bool {
        let mut cur = self.root;
        let mut path = Vec::new();
        let target = loop {
            let Some(i) = cur else { return false };
            path.push(i);
            if self.nodes[i].x == x && self.nodes[i].id == id {
                break i;
            }
            cur = if key_less(x, id, self.nodes[i].x, self.nodes[i].id) {
                self.nodes[i].left
            } else {
                self.nodes[i].right
            };
        };
        if !self.nodes[target].alive {
            return false;
        }
        for &i in &path {
            self.nodes[i].ys.remove(Key { coord: y, seq: id });
            self.nodes[i].weight -= 1;
        }
        self.nodes[target].alive = false;
        self.live -= 1;
        self.dead += 1;
        if self.dead > self.live {
            let root = self.root;
            self.root = root.and_then(|r| self.rebuild_subtree(r));
            self.dead = 0;
        }
        true
    }

    /// Minimum (value, id) among live points dominating (qx, qy).
    pub fn query(&self, qx: f64, qy: f64) -> Option<(f64, u64)> {
        let mut best: Option<(f64, u64)> = None;
        let mut offer = |cand: Option<(f64, u64)>| {
            if let Some(c) = cand {
                best = Some(match best {
                    None => c,
                    Some(b) if c.0 < b.0 || (c.0 == b.0 && c.1 < b.1) => c,
                    Some(b) => b,
                });
            }
        };
        let mut cur = self.root;
        while let Some(i) = cur {
            let n = &self.nodes[i];
            if n.x >= qx {
                if n.alive && n.y >= qy {
                    offer(Some((n.val, n.id)));
                }
                if let Some(r) = n.right {
                    offer(self.nodes[r].ys.suffix_min(qy, true));
                }
                cur = n.left;
            } else {
                cur = n.right;
            }
        }
        best
    }

    fn total_weight(&self, i: usize) -> usize {
        self.nodes[i].weight + if self.nodes[i].alive { 0 } else { 1 }
    }

    /// Flatten a subtree to its live points (x-sorted by construction) and
    /// rebuild it perfectly balanced, dropping dead skeleton nodes.
    fn rebuild_subtree(&mut self, i: usize) -> Option<usize> {
        let mut flat = Vec::with_capacity(self.nodes[i].weight);
        self.flatten(Some(i), &mut flat);
        self.build_balanced(&flat)
    }

    fn flatten(&mut self, t: Option<usize>, out: &mut Vec<usize>) {
        let Some(i) = t else { return };
        self.flatten(self.nodes[i].left, out);
        if self.nodes[i].alive {
            out.push(i);
        }
        self.flatten(self.nodes[i].right, out);
    }

    fn build_balanced(&mut self, flat: &[usize]) -> Option<usize> {
        if flat.is_empty() {
            return None;
        }
        let mid = flat.len() / 2;
        let i = flat[mid];
        let left = self.build_balanced(&flat[..mid]);
        let right = self.build_balanced(&flat[mid..][1..]);
        self.nodes[i].left = left;
        self.nodes[i].right = right;
        let mut ys = Treap::new();
        let mut weight = 0;
        for &j in flat {
            let n = &self.nodes[j];
            ys.insert(Key { coord: n.y, seq: n.id }, (n.val, n.id));
            weight += 1;
        }
        self.nodes[i].ys = ys;
        self.nodes[i].weight = weight;
        Some(i)
    }
}

/// The cone-local frame: normals to the two bounding rays (pointing into the
/// cone) and the axis. A site s lies in the cone translated to apex q exactly
/// when both normal projections of s dominate those of q; its cone distance
/// from q is the difference of axis projections.
fn cone_frame(family: &ConeFamily, i: usize) -> (Point, Point, Point) {
    let b1 = family.boundary_dir(i);
    let b2 = family.boundary_dir(i + 1);
    let n1 = Point::new(-b1.y, b1.x);
    let n2 = Point::new(b2.y, -b2.x);
    (n1, n2, family.axis(i))
}

/// Dynamic (1+eps)-close Euclidean neighbor index: one dominance structure
/// per cone plus the site registry.
pub struct EuclidAnnIndex {
    pub family: ConeFamily,
    cones: Vec<Dominance2D>,
    sites: HashMap<u64, Point>,
}

impl EuclidAnnIndex {
    pub fn new(eps: f64) -> Result<Self, EannError> {
        let family = build_family(eps)?;
        let cones = vec![Dominance2D::new(); family.k];
        Ok(EuclidAnnIndex { family, cones, sites: HashMap::new() })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.sites.contains_key(&id)
    }

    pub fn insert(&mut self, site: Point, id: u64) -> Result<(), EannError> {
        if self.sites.contains_key(&id) {
            return Err(EannError::DuplicateId(id));
        }
        for i in 0..self.family.k {
            let (n1, n2, axis) = cone_frame(&self.family, i);
            self.cones[i].insert(site.dot(n1), site.dot(n2), site.dot(axis), id);
        }
        self.sites.insert(id, site);
        Ok(())
    }

    pub fn delete(&mut self, id: u64) -> Result<(), EannError> {
        let site = self.sites.remove(&id).ok_or(EannError::UnknownId(id))?;
        for i in 0..self.family.k {
            let (n1, n2, _) = cone_frame(&self.family, i);
            let removed = self.cones[i].remove(site.dot(n1), site.dot(n2), id);
            debug_assert!(removed, "registry and cone structures out of sync");
        }
        Ok(())
    }

    /// Best per-cone candidate for apex q: the site with minimal axis
    /// projection among sites dominating q in the cone's normal frame.
    pub fn cone_candidate(&self, i: usize, q: Point) -> Option<u64> {
        let (n1, n2, _) = cone_frame(&self.family, i);
        self.cones[i].query(q.dot(n1), q.dot(n2)).map(|(_, id)| id)
    }

    /// The (1+eps)-close neighbor: per-cone minimal-cone-distance candidates
    /// compared by true Euclidean distance, ties to the smallest id.
    pub fn query(&self, q: Point) -> Option<(u64, f64)> {
        let mut best: Option<(f64, u64)> = None;
        for i in 0..self.family.k {
            if let Some(id) = self.cone_candidate(i, q) {
                let d = q.dist(self.sites[&id]);
                let better = match best {
                    None => true,
                    Some((bd, bid)) => d < bd || (d == bd && id < bid),
                };
                if better {
                    best = Some((d, id));
                }
            }
        }
        best.map(|(d, id)| (id, d))
    }
}
