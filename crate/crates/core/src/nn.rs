//! Dynamic (1+eps)-close geodesic nearest-neighbor index over movable point
//! sites: the separator-tree backbone of the distance oracle, one additively
//! weighted 1D site index per (node, separator path), and one Euclidean
//! close-neighbor index per leaf triangle.

use crate::distoracle::{build_oracle, DistanceOracle, OracleError};
use crate::euclid_ann::{EannError, EuclidAnnIndex};
use crate::geom::{Containment, GeomError, Point, PolygonDomain};
use crate::triangulate::Location;
use crate::voronoi1d::{PathSiteIndex, V1dError};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Eann(#[from] EannError),
    #[error(transparent)]
    V1d(#[from] V1dError),
    #[error("site id {0} already registered")]
    DuplicateId(u64),
    #[error("site id {0} not registered")]
    UnknownId(u64),
}

/// Where a site went: its leaf close-neighbor index (absent for sites lying
/// on a separator path) and every (node, path) site index that holds it.
#[derive(Debug, Clone)]
pub struct SiteRecord {
    pub pos: Point,
    pub leaf: Option<usize>,
    pub psi_refs: Vec<(usize, usize)>,
}

pub struct NNIndex {
    pub oracle: DistanceOracle,
    /// Indexed like `oracle.structures`.
    psi: Vec<Vec<PathSiteIndex>>,
    leaf_ann: HashMap<usize, EuclidAnnIndex>,
    leaf_of_triangle: Vec<usize>,
    parent: Vec<Option<usize>>,
    sites: HashMap<u64, SiteRecord>,
}

impl NNIndex {
    pub fn new(domain: &PolygonDomain, eps: f64) -> Result<Self, NnError> {
        let oracle = build_oracle(domain, eps)?;
        let psi = oracle
            .structures
            .iter()
            .map(|per| per.iter().map(|ps| PathSiteIndex::new(ps.q.total())).collect())
            .collect();
        let tree = &oracle.tree;
        let mut leaf_of_triangle = vec![usize::MAX; tree.tri.triangles.len()];
        let mut parent = vec![None; tree.nodes.len()];
        for node in &tree.nodes {
            match node.children {
                None => leaf_of_triangle[node.triangles[0]] = node.id,
                Some((a, b)) => {
                    parent[a] = Some(node.id);
                    parent[b] = Some(node.id);
                }
            }
        }
        Ok(NNIndex {
            oracle,
            psi,
            leaf_ann: HashMap::new(),
            leaf_of_triangle,
            parent,
            sites: HashMap::new(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.oracle.eps
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, id: u64) -> Option<&SiteRecord> {
        self.sites.get(&id)
    }

    pub fn site_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.sites.keys().copied()
    }

    fn chain_to(&self, node: usize) -> Vec<usize> {
        let mut chain = vec![node];
        let mut cur = node;
        while let Some(p) = self.parent[cur] {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Placement rule: a point on a separator-path edge goes to that edge's
    /// pointer node and its ancestors, with no leaf entry; anything else
    /// resolves to a leaf triangle (plain shared edges and vertices to the
    /// smallest incident triangle id) and the full root-to-leaf chain.
    fn placement(&self, p: Point) -> Result<(Vec<usize>, Option<usize>), GeomError> {
        let tree = &self.oracle.tree;
        let pointer = match tree.tri.locate(p)? {
            Location::Edge(e, _) => tree.edge_owner.get(&e).copied(),
            Location::Vertex(v) => tree
                .edge_owner
                .iter()
                .filter(|(&(a, b), _)| a == v || b == v)
                .map(|(_, &n)| n)
                .min_by_key(|&n| (tree.nodes[n].level, n)),
            Location::Triangle(_) => None,
        };
        if let Some(n) = pointer {
            return Ok((self.chain_to(n), None));
        }
        let leaf = self.leaf_of_triangle[tree.triangle_of(p)?];
        Ok((self.chain_to(leaf), Some(leaf)))
    }

    pub fn insert(&mut self, pos: Point, id: u64) -> Result<(), NnError> {
        if self.oracle.domain.contains(pos) == Containment::Exterior {
            return Err(GeomError::PointOutside(pos).into());
        }
        if self.sites.contains_key(&id) {
            return Err(NnError::DuplicateId(id));
        }
        let (chain, leaf) = self.placement(pos)?;
        let mut psi_refs = Vec::new();
        for &n in &chain {
            for (j, ps) in self.oracle.structures[n].iter().enumerate() {
                let aset = ps.query_anchor_set(pos);
                if aset.anchors.is_empty() {
                    continue;
                }
                let anchors: Vec<(f64, f64)> =
                    aset.anchors.iter().map(|a| (a.arc, a.weight)).collect();
                self.psi[n][j].insert_site(id, &anchors)?;
                psi_refs.push((n, j));
            }
        }
        if let Some(l) = leaf {
            self.leaf_ann
                .entry(l)
                .or_insert_with(|| EuclidAnnIndex::new(self.oracle.eps).expect("eps validated at build"))
                .insert(pos, id)?;
        }
        self.sites.insert(id, SiteRecord { pos, leaf, psi_refs });
        Ok(())
    }

    pub fn delete(&mut self, id: u64) -> Result<(), NnError> {
        let rec = self.sites.remove(&id).ok_or(NnError::UnknownId(id))?;
        for (n, j) in rec.psi_refs {
            self.psi[n][j].delete_site(id)?;
        }
        if let Some(l) = rec.leaf {
            self.leaf_ann.get_mut(&l).expect("leaf index exists for stored site").delete(id)?;
        }
        Ok(())
    }

    /// The eps-close site to q: the best of the per-path estimates at every
    /// covering node and the Euclidean answers of q's leaf triangles. The
    /// estimate is a realizable obstacle-avoiding path length.
    pub fn query(&self, q: Point) -> Result<Option<(u64, f64)>, NnError> {
        if self.oracle.domain.contains(q) == Containment::Exterior {
            return Err(GeomError::PointOutside(q).into());
        }
        let mut best: Option<(f64, u64)> = None;
        let mut offer = |cand: Option<(u64, f64)>| {
            if let Some((id, d)) = cand {
                let better = match best {
                    None => true,
                    Some((bd, bid)) => d < bd || (d == bd && id < bid),
                };
                if better {
                    best = Some((d, id));
                }
            }
        };
        for &n in &self.oracle.covering_nodes(q)? {
            for (j, ps) in self.oracle.structures[n].iter().enumerate() {
                if self.psi[n][j].site_count() == 0 {
                    continue;
                }
                let aset = ps.query_anchor_set(q);
                if aset.anchors.is_empty() {
                    continue;
                }
                let anchors: Vec<(f64, f64)> =
                    aset.anchors.iter().map(|a| (a.arc, a.weight)).collect();
                offer(self.psi[n][j].query(&anchors));
            }
            if let Some(ann) = self.leaf_ann.get(&n) {
                offer(ann.query(q));
            }
        }
        Ok(best.map(|(d, id)| (id, d)))
    }
}
