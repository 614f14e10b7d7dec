//! Geodesic distance machinery for polygonal domains with holes.
//!
//! The library provides a (1+eps)-approximate two-point distance oracle and a
//! dynamic (1+eps)-approximate nearest-neighbor index over movable point
//! sites, both verified against an exact visibility-graph oracle.

pub mod cones;
pub mod distoracle;
pub mod domain_gen;
pub mod euclid_ann;
pub mod geom;
pub mod nn;
pub mod oracle;
pub mod pathstruct;
pub mod predicates;
pub mod septree;
pub mod svg;
pub mod treap;
pub mod triangulate;
pub mod voronoi1d;

pub use geom::{Containment, Point, PolygonDomain, Segment};
