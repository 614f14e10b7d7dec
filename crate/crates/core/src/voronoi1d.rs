//! Dynamic additively weighted closest-point search on an interval.
//!
//! Each weighted point contributes the V-shaped function x -> a1 + |a0 - x|.
//! A V splits into a right half-line (slope +1, tracked by its intercept
//! a2 = a1 + (t_total - a0) at the right end of the interval) and a left
//! half-line (slope -1, intercept a1 + a0 at 0). Prefix/suffix minima over
//! the two intercept sets give the exact lower envelope at any query.
//!
//! All envelope values are computed from the stored intercepts with one
//! fixed expression per side, so results are bit-for-bit reproducible and
//! the brute-force comparison in tests is an exact equality.

use crate::treap::{Key, Treap};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum V1dError {
    #[error("coordinate {0} outside [0, {1}]")]
    OutOfRange(f64, f64),
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("handle already deleted")]
    DeadHandle,
    #[error("site {0} already present")]
    DuplicateSite(u64),
    #[error("site {0} not present")]
    UnknownSite(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedPoint1D {
    /// Arc coordinate in [0, t_total].
    pub a0: f64,
    /// Additive weight, >= 0.
    pub a1: f64,
    pub owner: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct V1dHandle(u64);

#[derive(Debug, Clone)]
pub struct Voronoi1D {
    t_total: f64,
    right: Treap,
    left: Treap,
    next_seq: u64,
    live: HashMap<u64, f64>,
}

impl Voronoi1D {
    pub fn new(t_total: f64) -> Self {
        Voronoi1D {
            t_total,
            right: Treap::new(),
            left: Treap::new(),
            next_seq: 0,
            live: HashMap::new(),
        }
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn insert(&mut self, p: WeightedPoint1D) -> Result<V1dHandle, V1dError> {
        if !(0.0..=self.t_total).contains(&p.a0) {
            return Err(V1dError::OutOfRange(p.a0, self.t_total));
        }
        if p.a1 < 0.0 {
            return Err(V1dError::NegativeWeight(p.a1));
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        let key = Key { coord: p.a0, seq };
        let a2 = p.a1 + (self.t_total - p.a0);
        self.right.insert(key, (a2, p.owner));
        self.left.insert(key, (p.a1 + p.a0, p.owner));
        self.live.insert(seq, p.a0);
        Ok(V1dHandle(seq))
    }

    pub fn delete(&mut self, h: V1dHandle) -> Result<(), V1dError> {
        let a0 = self.live.remove(&h.0).ok_or(V1dError::DeadHandle)?;
        let key = Key { coord: a0, seq: h.0 };
        let r1 = self.right.remove(key);
        let r2 = self.left.remove(key);
        debug_assert!(r1 && r2);
        Ok(())
    }

    /// Exact envelope minimum at q: min over points of a1 + |a0 - q|, ties
    /// to the smallest owner id.
    pub fn query(&self, q: f64) -> Option<(u64, f64)> {
        debug_assert!((0.0..=self.t_total).contains(&q));
        let r = self
            .right
            .prefix_min(q, true)
            .map(|(a2, o)| ((a2 - self.t_total) + q, o));
        let l = self.left.suffix_min(q, true).map(|(w, o)| (w - q, o));
        match (r, l) {
            (None, None) => None,
            (Some((v, o)), None) | (None, Some((v, o))) => Some((o, v)),
            (Some((vr, or)), Some((vl, ol))) => {
                if vl < vr || (vl == vr && ol < or) {
                    Some((ol, vl))
                } else {
                    Some((or, vr))
                }
            }
        }
    }
}

/// The reference envelope: a linear scan over the same intercept arithmetic.
/// Structure answers must match this exactly, not approximately.
pub fn brute_envelope(points: &[WeightedPoint1D], t_total: f64, q: f64) -> Option<(u64, f64)> {
    let mut best: Option<(u64, f64)> = None;
    let offer = |owner: u64, v: f64, best: &mut Option<(u64, f64)>| match *best {
        None => *best = Some((owner, v)),
        Some((bo, bv)) => {
            if v < bv || (v == bv && owner < bo) {
                *best = Some((owner, v));
            }
        }
    };
    for p in points {
        if p.a0 <= q {
            let a2 = p.a1 + (t_total - p.a0);
            offer(p.owner, (a2 - t_total) + q, &mut best);
        }
        if p.a0 >= q {
            offer(p.owner, (p.a1 + p.a0) - q, &mut best);
        }
    }
    best
}

/// Dynamic minimum over sites of the via-Q distance to a query anchor set.
///
/// Every site contributes its anchors as weighted points with the site id as
/// the owner; a query folds its own anchors over the shared envelope. The
/// result is bit-for-bit the lexicographic (value, site) minimum over sites
/// of `via_q_distance`, because both routes evaluate the same intercept
/// expressions and min is monotone under the outer addition.
#[derive(Debug)]
pub struct PathSiteIndex {
    v1d: Voronoi1D,
    sites: HashMap<u64, Vec<V1dHandle>>,
}

impl PathSiteIndex {
    pub fn new(t_total: f64) -> Self {
        PathSiteIndex { v1d: Voronoi1D::new(t_total), sites: HashMap::new() }
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn has_site(&self, site: u64) -> bool {
        self.sites.contains_key(&site)
    }

    /// Register a site's anchors as (arc, weight) pairs.
    pub fn insert_site(&mut self, site: u64, anchors: &[(f64, f64)]) -> Result<(), V1dError> {
        if self.sites.contains_key(&site) {
            return Err(V1dError::DuplicateSite(site));
        }
        let mut handles = Vec::with_capacity(anchors.len());
        for &(a0, a1) in anchors {
            match self.v1d.insert(WeightedPoint1D { a0, a1, owner: site }) {
                Ok(h) => handles.push(h),
                Err(e) => {
                    for h in handles {
                        let _ = self.v1d.delete(h);
                    }
                    return Err(e);
                }
            }
        }
        self.sites.insert(site, handles);
        Ok(())
    }

    pub fn delete_site(&mut self, site: u64) -> Result<(), V1dError> {
        let handles = self.sites.remove(&site).ok_or(V1dError::UnknownSite(site))?;
        for h in handles {
            self.v1d.delete(h).expect("registered handle must be live");
        }
        Ok(())
    }

    /// Minimum over sites and anchor pairs of w_q + w_site + |arc_q - arc_s|,
    /// as (site, value). Ties prefer the smaller site id.
    pub fn query(&self, query_anchors: &[(f64, f64)]) -> Option<(u64, f64)> {
        let mut best: Option<(u64, f64)> = None;
        for &(arc, w) in query_anchors {
            if let Some((owner, v)) = self.v1d.query(arc) {
                let total = w + v;
                let better = match best {
                    None => true,
                    Some((bo, bv)) => total < bv || (total == bv && owner < bo),
                };
                if better {
                    best = Some((owner, total));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let mut v = Voronoi1D::new(10.0);
        v.insert(WeightedPoint1D { a0: 2.0, a1: 1.0, owner: 1 }).unwrap();
        v.insert(WeightedPoint1D { a0: 8.0, a1: 0.5, owner: 2 }).unwrap();
        assert_eq!(v.query(5.0), Some((2, 3.5)));
        assert_eq!(v.query(0.0), Some((1, 3.0)));
    }

    #[test]
    fn insert_query_delete() {
        let mut v = Voronoi1D::new(10.0);
        let h = v.insert(WeightedPoint1D { a0: 4.0, a1: 2.0, owner: 9 }).unwrap();
        assert_eq!(v.query(4.0), Some((9, 2.0)));
        // Duplicate coordinates, different weights: min wins.
        let _h2 = v.insert(WeightedPoint1D { a0: 4.0, a1: 1.0, owner: 3 }).unwrap();
        assert_eq!(v.query(4.0), Some((3, 1.0)));
        v.delete(h).unwrap();
        assert!(matches!(v.delete(h), Err(V1dError::DeadHandle)));
        assert_eq!(v.query(4.0), Some((3, 1.0)));
    }

    #[test]
    fn empty_and_bounds() {
        let mut v = Voronoi1D::new(5.0);
        assert_eq!(v.query(2.0), None);
        assert!(v.insert(WeightedPoint1D { a0: 6.0, a1: 0.0, owner: 0 }).is_err());
        assert!(v.insert(WeightedPoint1D { a0: -0.1, a1: 0.0, owner: 0 }).is_err());
        assert!(v.insert(WeightedPoint1D { a0: 1.0, a1: -1.0, owner: 0 }).is_err());
    }

    #[test]
    fn random_interleaving_matches_brute() {
        let mut state = 99u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 11
        };
        let t_total = 100.0;
        let mut v = Voronoi1D::new(t_total);
        let mut points: Vec<(V1dHandle, WeightedPoint1D)> = Vec::new();
        for step in 0..1500 {
            if next() % 3 != 0 || points.is_empty() {
                let p = WeightedPoint1D {
                    a0: (next() % 10_000) as f64 / 100.0,
                    a1: (next() % 5_000) as f64 / 250.0,
                    owner: next() % 40,
                };
                let h = v.insert(p).unwrap();
                points.push((h, p));
            } else {
                let i = (next() as usize) % points.len();
                let (h, _) = points.swap_remove(i);
                v.delete(h).unwrap();
            }
            if step % 10 == 0 {
                let q = (next() % 10_000) as f64 / 100.0;
                let pts: Vec<WeightedPoint1D> = points.iter().map(|&(_, p)| p).collect();
                assert_eq!(v.query(q), brute_envelope(&pts, t_total, q));
            }
        }
    }

    #[test]
    fn site_index_lifecycle() {
        let mut psi = PathSiteIndex::new(10.0);
        psi.insert_site(7, &[(2.0, 1.0), (8.0, 0.5)]).unwrap();
        assert!(matches!(psi.insert_site(7, &[]), Err(V1dError::DuplicateSite(7))));
        assert!(matches!(psi.delete_site(3), Err(V1dError::UnknownSite(3))));
        // Query anchors (5.0, 0.0): pure envelope lookup.
        assert_eq!(psi.query(&[(5.0, 0.0)]), Some((7, 3.5)));
        psi.delete_site(7).unwrap();
        assert_eq!(psi.query(&[(5.0, 0.0)]), None);
        assert_eq!(psi.site_count(), 0);
    }

    #[test]
    fn site_index_matches_per_site_minimum_exactly() {
        let mut state = 7u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 11
        };
        let t_total = 50.0;
        let mut psi = PathSiteIndex::new(t_total);
        let mut sites: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
        for step in 0..400 {
            if next() % 4 != 0 || sites.is_empty() {
                let id = next() % 1000;
                if psi.has_site(id) {
                    continue;
                }
                let n = 1 + (next() % 6) as usize;
                let anchors: Vec<(f64, f64)> = (0..n)
                    .map(|_| ((next() % 5_000) as f64 / 100.0, (next() % 2_000) as f64 / 100.0))
                    .collect();
                psi.insert_site(id, &anchors).unwrap();
                sites.push((id, anchors));
            } else {
                let i = (next() as usize) % sites.len();
                let (id, _) = sites.swap_remove(i);
                psi.delete_site(id).unwrap();
            }
            if step % 5 != 0 {
                continue;
            }
            let qn = 1 + (next() % 5) as usize;
            let qa: Vec<(f64, f64)> = (0..qn)
                .map(|_| ((next() % 5_000) as f64 / 100.0, (next() % 2_000) as f64 / 100.0))
                .collect();
            // Reference: per-site via-Q minimum with the same decomposed
            // arithmetic, then the lexicographic (value, site) minimum.
            let mut best: Option<(u64, f64)> = None;
            for (id, anchors) in &sites {
                let pts: Vec<WeightedPoint1D> = anchors
                    .iter()
                    .map(|&(a0, a1)| WeightedPoint1D { a0, a1, owner: *id })
                    .collect();
                for &(arc, w) in &qa {
                    if let Some((_, v)) = brute_envelope(&pts, t_total, arc) {
                        let total = w + v;
                        let better = match best {
                            None => true,
                            Some((bo, bv)) => total < bv || (total == bv && *id < bo),
                        };
                        if better {
                            best = Some((*id, total));
                        }
                    }
                }
            }
            assert_eq!(psi.query(&qa), best, "exact identity must hold");
        }
    }
}
