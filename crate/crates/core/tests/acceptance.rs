//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Tolerances are part of the contract; do not loosen.

use geopath::cones::{build_family, dijkstra_adj, domain_cone_graph};
use geopath::distoracle::build_oracle;
use geopath::domain_gen::{random_domain, GenError};
use geopath::euclid_ann::EuclidAnnIndex;
use geopath::geom::{Containment, Point, PolygonDomain};
use geopath::nn::NNIndex;
use geopath::oracle::{exact_distance, polyline_len};
use geopath::septree::build_separator_tree;
use geopath::voronoi1d::{brute_envelope, PathSiteIndex, WeightedPoint1D};

fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

/// The shared domain suite: >= 20 random domains, n <= 60, <= 2 holes.
fn domain_suite() -> Vec<PolygonDomain> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 20 {
        let holes = (seed % 3) as usize;
        let budget = 10 + (seed % 6) as usize * 8;
        match random_domain(seed, budget.min(60), holes) {
            Ok(d) => out.push(d),
            Err(GenError::Placement(..)) => {}
            Err(e) => panic!("generator failed for seed {seed}: {e}"),
        }
        seed += 1;
    }
    out
}

fn interior_points(dom: &PolygonDomain, state: &mut u64, count: usize) -> Vec<Point> {
    let mut out = Vec::new();
    while out.len() < count {
        let p = Point::new(lcg(state) * 100.0, lcg(state) * 100.0);
        if dom.contains(p) == Containment::Interior {
            out.push(p);
        }
    }
    out
}

fn report(criterion: &str, ok: bool) {
    println!("criterion {criterion}: {}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed");
}

#[test]
fn criterion_1_two_point_oracle_sandwich() {
    let mut state = 11u64;
    let mut ok = true;
    for dom in &domain_suite() {
        for &eps in &[0.5, 0.25, 0.1] {
            let oracle = build_oracle(dom, eps).expect("oracle build");
            let pts = interior_points(dom, &mut state, 100);
            for pair in pts.chunks(2) {
                let (s, t) = (pair[0], pair[1]);
                let (exact, _) = exact_distance(dom, s, t).unwrap();
                let (est, witness) = oracle.query_distance(s, t).unwrap();
                let slack = 1e-9 * exact.max(1.0);
                if est < exact - slack || est > (1.0 + eps) * exact + slack {
                    eprintln!("sandwich violated: eps={eps} exact={exact} est={est}");
                    ok = false;
                }
                let wl = polyline_len(&witness);
                if (wl - est).abs() > 1e-9 * est.max(1.0) {
                    eprintln!("witness length {wl} != estimate {est}");
                    ok = false;
                }
            }
        }
    }
    report("1 (two-point oracle sandwich)", ok);
}

#[test]
fn criterion_2_dynamic_nn_eps_close() {
    let mut state = 22u64;
    let mut ok = true;
    let eps = 0.25;
    for dom in &domain_suite() {
        let mut nn = NNIndex::new(dom, eps).expect("nn build");
        let mut live: Vec<(u64, Point)> = Vec::new();
        let mut next_id = 0u64;
        for op in 0..200usize {
            let r = lcg(&mut state);
            if r < 0.45 && live.len() < 50 {
                let p = interior_points(dom, &mut state, 1)[0];
                nn.insert(p, next_id).unwrap();
                live.push((next_id, p));
                next_id += 1;
            } else if r < 0.6 && !live.is_empty() {
                let k = (lcg(&mut state) * live.len() as f64) as usize % live.len();
                let (id, _) = live.swap_remove(k);
                nn.delete(id).unwrap();
            } else {
                let q = interior_points(dom, &mut state, 1)[0];
                let got = nn.query(q).unwrap();
                let exact = live
                    .iter()
                    .map(|&(_, s)| exact_distance(dom, q, s).unwrap().0)
                    .fold(f64::INFINITY, f64::min);
                match got {
                    None => {
                        if !live.is_empty() {
                            eprintln!("query missed all {} sites", live.len());
                            ok = false;
                        }
                    }
                    Some((id, _)) => {
                        let pos = nn.site(id).unwrap().pos;
                        let d = exact_distance(dom, q, pos).unwrap().0;
                        if d > (1.0 + eps) * exact + 1e-9 * exact.max(1.0) {
                            eprintln!("nn answer not eps-close: {d} vs exact {exact}");
                            ok = false;
                        }
                    }
                }
            }
            if (op + 1) % 50 == 0 {
                let mut fresh = NNIndex::new(dom, eps).unwrap();
                for &(id, p) in &live {
                    fresh.insert(p, id).unwrap();
                }
                for q in interior_points(dom, &mut state, 5) {
                    if nn.query(q).unwrap() != fresh.query(q).unwrap() {
                        eprintln!("rebuild mismatch at op {op}");
                        ok = false;
                    }
                }
            }
        }
    }
    report("2 (dynamic NN eps-closeness + rebuild equivalence)", ok);
}

#[test]
fn criterion_3_cone_graph_spanner() {
    let mut ok = true;
    for dom in &domain_suite() {
        let vs = dom.vertices();
        for &eps in &[0.5, 0.1] {
            let family = build_family(eps).unwrap();
            let g = domain_cone_graph(dom, &family);
            for u in 0..vs.len() {
                let (dist, _) = dijkstra_adj(&g.adj, &[(u, 0.0)]);
                for v in 0..vs.len() {
                    let (d, _) = exact_distance(dom, vs[u], vs[v]).unwrap();
                    let slack = 1e-9 * d.max(1.0);
                    if dist[v] < d - slack || dist[v] > (1.0 + eps) * d + slack {
                        eprintln!("spanner stretch violated: eps={eps} d={d} got={}", dist[v]);
                        ok = false;
                    }
                }
            }
        }
    }
    report("3 (cone-graph spanner sandwich)", ok);
}

#[test]
fn criterion_4_and_5_anchor_correctness_and_cardinality() {
    let mut state = 44u64;
    let mut ok4 = true;
    let mut ok5 = true;
    let eps = 0.25f64;
    let eps2 = eps / 9.0;
    let bound = (4.0 / eps2).floor() as usize + 1;
    for dom in &domain_suite() {
        let oracle = build_oracle(dom, eps).expect("oracle build");
        let root = oracle.tree.root;
        for ps in &oracle.structures[root] {
            let qs: Vec<(f64, Point)> = (0..100)
                .map(|_| {
                    let arc = lcg(&mut state) * ps.q.total();
                    (arc, ps.q.point_at(arc))
                })
                .collect();
            let mut owners: Vec<(Point, Vec<(f64, f64)>)> = Vec::new();
            for v in (0..ps.sub_points.len()).step_by((ps.sub_points.len() / 10).max(1)).take(10) {
                let set = ps.vertex_anchor_set(v);
                if set.anchors.len() > bound {
                    ok5 = false;
                }
                owners.push((
                    ps.sub_points[v],
                    set.anchors.iter().map(|a| (a.arc, a.weight)).collect(),
                ));
            }
            for p in interior_points(dom, &mut state, 10) {
                let set = ps.query_anchor_set(p);
                if set.anchors.len() > bound {
                    ok5 = false;
                }
                owners.push((p, set.anchors.iter().map(|a| (a.arc, a.weight)).collect()));
            }
            for (owner, anchors) in &owners {
                if anchors.is_empty() {
                    continue;
                }
                for &(arc, qp) in &qs {
                    let est = anchors
                        .iter()
                        .map(|&(a, w)| w + (a - arc).abs())
                        .fold(f64::INFINITY, f64::min);
                    let (d, _) = exact_distance(dom, *owner, qp).unwrap();
                    let slack = 1e-9 * d.max(1.0);
                    if est < d - slack || est > (1.0 + eps) * d + slack {
                        eprintln!("anchor estimate off: d={d} est={est}");
                        ok4 = false;
                    }
                }
            }
        }
    }
    report("4 (anchor distance sandwich)", ok4);
    report("5 (anchor cardinality bound)", ok5);
}

#[test]
fn criterion_6_separator_balance_height_paths() {
    let mut ok = true;
    for dom in &domain_suite() {
        let tree = build_separator_tree(dom).expect("separator tree");
        let n_tris = tree.tri.triangles.len();
        let bound = ((n_tris as f64).ln() / 1.5f64.ln()).ceil() as usize + 2;
        if tree.height() > bound {
            eprintln!("height {} > {bound}", tree.height());
            ok = false;
        }
        for node in &tree.nodes {
            if let Some((a, b)) = node.children {
                let cap = (2 * node.triangles.len()).div_ceil(3);
                for c in [a, b] {
                    if tree.nodes[c].triangles.len() > cap {
                        eprintln!("split {} > cap {cap}", tree.nodes[c].triangles.len());
                        ok = false;
                    }
                }
            }
            for path in &node.paths {
                let pts = tree.path_points(path);
                let len = polyline_len(&pts);
                let (d, _) = exact_distance(dom, pts[0], *pts.last().unwrap()).unwrap();
                if (len - d).abs() > 1e-9 * d.max(1.0) {
                    eprintln!("separator path not geodesic: {len} vs {d}");
                    ok = false;
                }
            }
        }
    }
    report("6 (separator balance, height, geodesic paths)", ok);
}

#[test]
fn criterion_7_voronoi1d_exact() {
    let mut state = 77u64;
    let mut ok = true;
    for _ in 0..1000 {
        let t_total = 1.0 + lcg(&mut state) * 99.0;
        let n_sites = 1 + (lcg(&mut state) * 8.0) as usize;
        let mut psi = PathSiteIndex::new(t_total);
        let mut flat: Vec<WeightedPoint1D> = Vec::new();
        for site in 0..n_sites as u64 {
            let n_anchors = 1 + (lcg(&mut state) * 4.0) as usize;
            let anchors: Vec<(f64, f64)> = (0..n_anchors)
                .map(|_| (lcg(&mut state) * t_total, lcg(&mut state) * 50.0))
                .collect();
            psi.insert_site(site, &anchors).unwrap();
            for &(a0, a1) in &anchors {
                flat.push(WeightedPoint1D { a0, a1, owner: site });
            }
        }
        // Occasional deletions keep the treap paths exercised.
        if n_sites > 2 && lcg(&mut state) < 0.5 {
            let victim = (lcg(&mut state) * n_sites as f64) as u64 % n_sites as u64;
            psi.delete_site(victim).unwrap();
            flat.retain(|p| p.owner != victim);
        }
        for _ in 0..1000 {
            let q = lcg(&mut state) * t_total;
            let via = psi
                .query(&[(q, 0.0)])
                .map(|(site, d)| (site, d));
            if via != brute_envelope(&flat, t_total, q) {
                eprintln!("voronoi1d mismatch at q={q}");
                ok = false;
            }
        }
    }
    report("7 (Voronoi1D exact envelope, 10^3 states x 10^3 queries)", ok);
}

#[test]
fn criterion_8_euclid_ann() {
    let mut state = 88u64;
    let mut ok = true;
    for &eps in &[0.5, 0.25] {
        let mut idx = EuclidAnnIndex::new(eps).unwrap();
        let mut sites = Vec::new();
        for id in 0..500u64 {
            let s = Point::new(lcg(&mut state) * 100.0, lcg(&mut state) * 100.0);
            idx.insert(s, id).unwrap();
            sites.push(s);
        }
        for _ in 0..500 {
            let q = Point::new(lcg(&mut state) * 100.0, lcg(&mut state) * 100.0);
            let exact = sites.iter().map(|s| q.dist(*s)).fold(f64::INFINITY, f64::min);
            let (_, d) = idx.query(q).unwrap();
            if d < exact || d > (1.0 + eps) * exact + 1e-12 {
                eprintln!("euclid ann off: eps={eps} exact={exact} got={d}");
                ok = false;
            }
        }
    }
    report("8 (Euclidean close-neighbor sandwich)", ok);
}
