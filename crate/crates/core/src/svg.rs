//! SVG renders of domains, separator trees, anchor sets, and witness paths.
//! Purely presentational: every drawn element comes from a queryable library
//! object, with no render-only geometry.

use crate::distoracle::DistanceOracle;
use crate::geom::{Point, PolygonDomain};
use crate::nn::NNIndex;
use crate::pathstruct::AnchorSet;
use crate::septree::SeparatorTree;
use std::fmt::Write;

const LEVEL_COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct SvgDoc {
    body: String,
    min: Point,
    max: Point,
}

impl SvgDoc {
    pub fn new(domain: &PolygonDomain) -> Self {
        let vs = domain.vertices();
        let mut min = vs[0];
        let mut max = vs[0];
        for p in &vs {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        SvgDoc { body: String::new(), min, max }
    }

    pub fn polyline(&mut self, pts: &[Point], color: &str, width: f64) {
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            coords.join(" ")
        )
        .unwrap();
    }

    pub fn segment(&mut self, a: Point, b: Point, color: &str, width: f64) {
        writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="{width}"/>"#,
            a.x, a.y, b.x, b.y
        )
        .unwrap();
    }

    pub fn dot(&mut self, p: Point, r: f64, color: &str) {
        writeln!(self.body, r#"<circle cx="{}" cy="{}" r="{r}" fill="{color}"/>"#, p.x, p.y).unwrap();
    }

    pub fn label(&mut self, p: Point, text: &str) {
        writeln!(
            self.body,
            r##"<text x="{}" y="{}" font-size="1.6" fill="#333">{text}</text>"##,
            p.x + 0.6,
            p.y - 0.6
        )
        .unwrap();
    }

    pub fn finish(self) -> String {
        let pad = (self.max.x - self.min.x).max(self.max.y - self.min.y).max(1.0) * 0.05;
        let (x0, y0) = (self.min.x - pad, self.min.y - pad);
        let (w, h) = (
            self.max.x - self.min.x + 2.0 * pad,
            self.max.y - self.min.y + 2.0 * pad,
        );
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
                "\n<g transform=\"translate(0,{}) scale(1,-1)\">\n{}</g>\n</svg>\n"
            ),
            x0,
            y0,
            w,
            h,
            2.0 * y0 + h,
            self.body
        )
    }
}

/// Outer boundary and holes only: exactly n segments.
pub fn render_domain(domain: &PolygonDomain) -> String {
    let mut doc = SvgDoc::new(domain);
    domain_edges(&mut doc, domain);
    doc.finish()
}

fn domain_edges(doc: &mut SvgDoc, domain: &PolygonDomain) {
    for e in &domain.region().edges {
        doc.segment(e.a, e.b, "#000", 0.3);
    }
}

/// Domain plus every separator path, color-coded by tree level.
pub fn render_tree(domain: &PolygonDomain, tree: &SeparatorTree) -> String {
    let mut doc = SvgDoc::new(domain);
    domain_edges(&mut doc, domain);
    for node in &tree.nodes {
        let color = LEVEL_COLORS[node.level % LEVEL_COLORS.len()];
        for path in &node.paths {
            doc.polyline(&tree.path_points(path), color, 0.25);
        }
    }
    doc.finish()
}

/// Domain, one separator path, and an anchor set on it: anchors as marks
/// with weight labels, plus the owner point.
pub fn render_anchors(
    domain: &PolygonDomain,
    q: &[Point],
    owner: Point,
    set: &AnchorSet,
) -> String {
    let mut doc = SvgDoc::new(domain);
    domain_edges(&mut doc, domain);
    doc.polyline(q, "#1f77b4", 0.3);
    doc.dot(owner, 0.6, "#d62728");
    for a in &set.anchors {
        doc.dot(a.point, 0.45, "#2ca02c");
        doc.label(a.point, &format!("{:.3}", a.weight));
    }
    doc.finish()
}

/// Domain and the witness polyline of a two-point query, endpoints marked.
pub fn render_path(oracle: &DistanceOracle, witness: &[Point]) -> String {
    let mut doc = SvgDoc::new(&oracle.domain);
    domain_edges(&mut doc, &oracle.domain);
    doc.polyline(witness, "#d62728", 0.35);
    if let (Some(&s), Some(&t)) = (witness.first(), witness.last()) {
        doc.dot(s, 0.6, "#d62728");
        doc.dot(t, 0.6, "#d62728");
    }
    doc.finish()
}

/// Domain, separators, and the current sites of a nearest-neighbor index.
pub fn render_nn(nn: &NNIndex) -> String {
    let mut doc = SvgDoc::new(&nn.oracle.domain);
    domain_edges(&mut doc, &nn.oracle.domain);
    for node in &nn.oracle.tree.nodes {
        let color = LEVEL_COLORS[node.level % LEVEL_COLORS.len()];
        for path in &node.paths {
            doc.polyline(&nn.oracle.tree.path_points(path), color, 0.15);
        }
    }
    let mut ids: Vec<u64> = nn.site_ids().collect();
    ids.sort_unstable();
    for id in ids {
        let rec = nn.site(id).unwrap();
        doc.dot(rec.pos, 0.5, "#9467bd");
        doc.label(rec.pos, &format!("{id}"));
    }
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distoracle::build_oracle;
    use crate::geom::square_with_hole;
    use crate::septree::build_separator_tree;

    #[test]
    fn triangle_has_three_segments() {
        let dom = PolygonDomain::new(
            vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(0.0, 4.0)],
            vec![],
        )
        .unwrap();
        let svg = render_domain(&dom);
        assert_eq!(svg.matches("<line").count(), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn hole_domain_has_n_segments() {
        let dom = square_with_hole();
        let svg = render_domain(&dom);
        assert_eq!(svg.matches("<line").count(), dom.n());
    }

    #[test]
    fn witness_coordinates_rendered_verbatim() {
        let dom = square_with_hole();
        let oracle = build_oracle(&dom, 0.5).unwrap();
        let (_, witness) = oracle
            .query_distance(Point::new(2.0, 5.0), Point::new(8.0, 5.0))
            .unwrap();
        let svg = render_path(&oracle, &witness);
        let coords: Vec<String> = witness.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        assert!(svg.contains(&coords.join(" ")));
    }

    #[test]
    fn tree_render_covers_all_paths() {
        let dom = square_with_hole();
        let tree = build_separator_tree(&dom).unwrap();
        let svg = render_tree(&dom, &tree);
        let expect: usize = tree.nodes.iter().map(|n| n.paths.len()).sum();
        assert_eq!(svg.matches("<polyline").count(), expect);
    }
}
