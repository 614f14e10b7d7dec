//! Seeded random polygonal domains for tests and verification runs:
//! a perturbed star-shaped outer boundary with axis-aligned rectangular
//! holes placed by rejection sampling. Always yields a valid domain or a
//! placement error, deterministically per seed.

use crate::geom::{Containment, GeomError, Point, PolygonDomain};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("vertex budget {budget} below minimum {min} for {holes} holes")]
    Budget { budget: usize, holes: usize, min: usize },
    #[error("no valid placement for hole {0} after {1} attempts")]
    Placement(usize, usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

const CENTER: Point = Point { x: 50.0, y: 50.0 };
const RADIUS: f64 = 45.0;
const ATTEMPTS: usize = 400;

/// Deterministic random domain: `n_budget` total vertices split between the
/// outer boundary and `holes` rectangles (each 4 vertices; 3 only when the
/// budget is too tight, as a triangle).
pub fn random_domain(seed: u64, n_budget: usize, holes: usize) -> Result<PolygonDomain, GenError> {
    let min = 3 + 3 * holes;
    if n_budget < min {
        return Err(GenError::Budget { budget: n_budget, holes, min });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hole_verts = if n_budget >= 3 + 4 * holes { 4 } else { 3 };
    let m = n_budget - hole_verts * holes;

    // Star-shaped outer ring: jittered angles around the center with radii
    // bounded well away from zero, so the ring is always simple and CCW.
    let outer: Vec<Point> = (0..m)
        .map(|i| {
            let jitter: f64 = rng.gen_range(0.0..0.7);
            let theta = 2.0 * PI * (i as f64 + jitter) / m as f64;
            let r = RADIUS * rng.gen_range(0.55..1.0);
            Point::new(CENTER.x + r * theta.cos(), CENTER.y + r * theta.sin())
        })
        .collect();

    let mut hole_rings: Vec<Vec<Point>> = Vec::new();
    for hi in 0..holes {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let w = rng.gen_range(3.0..10.0);
            let h = rng.gen_range(3.0..10.0);
            let x = rng.gen_range(5.0..95.0 - w);
            let y = rng.gen_range(5.0..95.0 - h);
            let ring = if hole_verts == 4 {
                // CW orientation as required for holes.
                vec![
                    Point::new(x, y),
                    Point::new(x, y + h),
                    Point::new(x + w, y + h),
                    Point::new(x + w, y),
                ]
            } else {
                vec![Point::new(x, y), Point::new(x + w / 2.0, y + h), Point::new(x + w, y)]
            };
            if !clearance_ok(&outer, &hole_rings, &ring, 1.0) {
                continue;
            }
            let mut attempt = hole_rings.clone();
            attempt.push(ring.clone());
            if PolygonDomain::new(outer.clone(), attempt).is_ok() {
                hole_rings.push(ring);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GenError::Placement(hi, ATTEMPTS));
        }
    }
    Ok(PolygonDomain::new(outer, hole_rings)?)
}

/// Margin test: the candidate ring, inflated by `margin`, must stay strictly
/// interior to the outer ring and clear of every placed hole's inflated box.
fn clearance_ok(outer: &[Point], placed: &[Vec<Point>], ring: &[Point], margin: f64) -> bool {
    let (lo, hi) = bbox(ring);
    let (lo, hi) = (
        Point::new(lo.x - margin, lo.y - margin),
        Point::new(hi.x + margin, hi.y + margin),
    );
    let outer_region = crate::geom::Region::new(crate::geom::ring_edges(outer));
    let corners = [
        lo,
        Point::new(lo.x, hi.y),
        hi,
        Point::new(hi.x, lo.y),
    ];
    if corners.iter().any(|&c| outer_region.classify(c) != Containment::Interior) {
        return false;
    }
    // Inflated box corners inside a star-shaped ring do not guarantee the
    // box edges are; sample along the box edges too.
    for w in corners.windows(2).chain(std::iter::once(&[corners[3], corners[0]][..])) {
        for k in 1..8 {
            let t = k as f64 / 8.0;
            let p = Point::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
            if outer_region.classify(p) != Containment::Interior {
                return false;
            }
        }
    }
    for other in placed {
        let (olo, ohi) = bbox(other);
        if lo.x <= ohi.x + margin && olo.x - margin <= hi.x && lo.y <= ohi.y + margin && olo.y - margin <= hi.y {
            return false;
        }
    }
    true
}

fn bbox(ring: &[Point]) -> (Point, Point) {
    let mut lo = ring[0];
    let mut hi = ring[0];
    for p in ring {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}
