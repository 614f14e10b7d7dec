mod verify;

use clap::{Args, Parser, Subcommand};
use geopath::distoracle::{build_oracle, DistanceOracle};
use geopath::geom::{Containment, Point, PolygonDomain};
use geopath::nn::NNIndex;
use geopath::oracle::exact_distance;
use geopath::svg;
use serde::{Deserialize, Serialize};
use std::fs;
use std::process::ExitCode;

/// Geodesic distance oracles and dynamic nearest-neighbor search in
/// polygonal domains with holes.
#[derive(Parser)]
#[command(name = "geopath", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a two-point distance index from a .poly domain file.
    Build {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: String,
    },
    /// Query geodesic distance between two points.
    Dist {
        #[arg(long)]
        index: String,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        /// Also print the exact visibility-graph distance.
        #[arg(long)]
        exact: bool,
        /// Render the witness path to an SVG file.
        #[arg(long)]
        svg: Option<String>,
    },
    /// Dynamic nearest-neighbor index commands.
    #[command(subcommand)]
    Nn(NnCmd),
    /// Dump the separator hierarchy as JSON lines.
    Tree {
        #[arg(long)]
        domain: String,
    },
    /// Dump a query anchor set as CSV (arc, weight).
    Anchors {
        #[arg(long)]
        index: String,
        #[arg(long, value_parser = parse_point)]
        point: Point,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        path: usize,
    },
    /// Render a domain, tree, path, anchor set, or NN snapshot as SVG.
    Render(RenderArgs),
    /// Randomized verification against exact oracles.
    Verify(verify::VerifyArgs),
}

#[derive(Subcommand)]
enum NnCmd {
    Build {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: String,
    },
    Insert {
        #[arg(long)]
        index: String,
        #[arg(long, value_parser = parse_point)]
        site: Point,
        #[arg(long)]
        id: u64,
    },
    Delete {
        #[arg(long)]
        index: String,
        #[arg(long)]
        id: u64,
    },
    Query {
        #[arg(long)]
        index: String,
        #[arg(long, value_parser = parse_point)]
        at: Point,
        /// Also print the exact linear-scan geodesic nearest neighbor.
        #[arg(long)]
        exact: bool,
    },
    /// Replay an op log (`I id x y`, `D id`, `Q x y`), one line per Q.
    Script {
        #[arg(long)]
        index: String,
        ops: String,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, value_parser = ["domain", "tree", "path", "anchors", "nn"])]
    what: String,
    #[arg(long)]
    out: String,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    index: Option<String>,
    #[arg(long, value_parser = parse_point)]
    from: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    to: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    point: Option<Point>,
    #[arg(long)]
    node: Option<usize>,
    #[arg(long)]
    path: Option<usize>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    Ok(Point::new(
        x.trim().parse::<f64>().map_err(|e| e.to_string())?,
        y.trim().parse::<f64>().map_err(|e| e.to_string())?,
    ))
}

/// On-disk index: a versioned recipe (domain text + eps + sites), rebuilt
/// deterministically on load rather than serializing internal structures.
#[derive(Serialize, Deserialize)]
struct IndexFile {
    version: u32,
    kind: String,
    eps: f64,
    domain: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sites: Vec<(u64, f64, f64)>,
}

impl IndexFile {
    fn load(path: &str, kind: &str) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let f: IndexFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        if f.version != 1 {
            return Err(format!("{path}: unsupported index version {}", f.version));
        }
        if f.kind != kind {
            return Err(format!("{path}: index kind {:?}, expected {kind:?}", f.kind));
        }
        if !(f.eps > 0.0 && f.eps <= 1.0) {
            return Err(format!("{path}: eps must be in (0,1]"));
        }
        Ok(f)
    }

    fn save(&self, path: &str) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        fs::write(path, text).map_err(|e| format!("{path}: {e}"))
    }

    fn domain(&self) -> Result<PolygonDomain, String> {
        PolygonDomain::parse(&self.domain).map_err(|e| e.to_string())
    }

    fn oracle(&self) -> Result<DistanceOracle, String> {
        build_oracle(&self.domain()?, self.eps).map_err(|e| e.to_string())
    }

    fn nn_index(&self) -> Result<NNIndex, String> {
        let mut nn = NNIndex::new(&self.domain()?, self.eps).map_err(|e| e.to_string())?;
        for &(id, x, y) in &self.sites {
            nn.insert(Point::new(x, y), id).map_err(|e| e.to_string())?;
        }
        Ok(nn)
    }
}

fn load_domain(path: &str) -> Result<PolygonDomain, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    PolygonDomain::parse(&text).map_err(|e| e.to_string())
}

fn check_eps(eps: f64) -> Result<(), String> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err("eps must be in (0,1]".into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, String> {
    match cmd {
        Cmd::Build { domain, eps, out } => {
            check_eps(eps)?;
            let dom = load_domain(&domain)?;
            build_oracle(&dom, eps).map_err(|e| e.to_string())?;
            let f = IndexFile {
                version: 1,
                kind: "distance".into(),
                eps,
                domain: dom.to_poly_string(),
                sites: vec![],
            };
            f.save(&out)?;
            eprintln!("indexed {} vertices, {} holes, eps {eps}", dom.n(), dom.h());
        }
        Cmd::Dist { index, from, to, exact, svg: svg_out } => {
            let f = IndexFile::load(&index, "distance")?;
            let oracle = f.oracle()?;
            let (d, witness) = oracle.query_distance(from, to).map_err(|e| e.to_string())?;
            println!("distance {d}");
            if exact {
                let (ed, _) = exact_distance(&oracle.domain, from, to).map_err(|e| e.to_string())?;
                println!("exact {ed}");
            }
            if let Some(out) = svg_out {
                fs::write(&out, svg::render_path(&oracle, &witness))
                    .map_err(|e| format!("{out}: {e}"))?;
            }
        }
        Cmd::Nn(sub) => return run_nn(sub),
        Cmd::Tree { domain } => {
            let dom = load_domain(&domain)?;
            let tree = geopath::septree::build_separator_tree(&dom).map_err(|e| e.to_string())?;
            for node in &tree.nodes {
                let seps: Vec<[usize; 2]> = node
                    .paths
                    .iter()
                    .filter(|p| !p.is_empty())
                    .map(|p| [p[0], *p.last().unwrap()])
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "id": node.id,
                        "level": node.level,
                        "triangles": node.triangles.len(),
                        "children": node.children.map(|(a, b)| [a, b]),
                        "separator_endpoints": seps,
                    })
                );
            }
        }
        Cmd::Anchors { index, point, node, path } => {
            let f = IndexFile::load(&index, "distance")?;
            let oracle = f.oracle()?;
            let ps = oracle
                .structures
                .get(node)
                .and_then(|v| v.get(path))
                .ok_or_else(|| format!("no path structure (node {node}, path {path})"))?;
            if oracle.domain.contains(point) == Containment::Exterior {
                return Err(format!("point ({}, {}) lies outside the domain", point.x, point.y));
            }
            println!("arc,weight");
            for a in &ps.query_anchor_set(point).anchors {
                println!("{},{}", a.arc, a.weight);
            }
        }
        Cmd::Render(args) => render(args)?,
        Cmd::Verify(args) => return verify::run(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_nn(cmd: NnCmd) -> Result<ExitCode, String> {
    match cmd {
        NnCmd::Build { domain, eps, out } => {
            check_eps(eps)?;
            let dom = load_domain(&domain)?;
            NNIndex::new(&dom, eps).map_err(|e| e.to_string())?;
            let f = IndexFile {
                version: 1,
                kind: "nn".into(),
                eps,
                domain: dom.to_poly_string(),
                sites: vec![],
            };
            f.save(&out)?;
        }
        NnCmd::Insert { index, site, id } => {
            let mut f = IndexFile::load(&index, "nn")?;
            let mut nn = f.nn_index()?;
            nn.insert(site, id).map_err(|e| e.to_string())?;
            f.sites.push((id, site.x, site.y));
            f.save(&index)?;
        }
        NnCmd::Delete { index, id } => {
            let mut f = IndexFile::load(&index, "nn")?;
            let mut nn = f.nn_index()?;
            nn.delete(id).map_err(|e| e.to_string())?;
            f.sites.retain(|&(i, _, _)| i != id);
            f.save(&index)?;
        }
        NnCmd::Query { index, at, exact } => {
            let f = IndexFile::load(&index, "nn")?;
            let nn = f.nn_index()?;
            match nn.query(at).map_err(|e| e.to_string())? {
                Some((id, est)) => println!("site {id} estimate {est}"),
                None => println!("empty"),
            }
            if exact {
                match exact_nn(&nn, at)? {
                    Some((id, d)) => println!("exact site {id} distance {d}"),
                    None => println!("exact empty"),
                }
            }
        }
        NnCmd::Script { index, ops } => {
            let f = IndexFile::load(&index, "nn")?;
            let mut nn = f.nn_index()?;
            let text = fs::read_to_string(&ops).map_err(|e| format!("{ops}: {e}"))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let bad = || format!("{ops}:{}: bad op {line:?}", lineno + 1);
                let tok: Vec<&str> = line.split_whitespace().collect();
                match tok.as_slice() {
                    ["I", id, x, y] => {
                        let id = id.parse().map_err(|_| bad())?;
                        let p = Point::new(
                            x.parse().map_err(|_| bad())?,
                            y.parse().map_err(|_| bad())?,
                        );
                        nn.insert(p, id).map_err(|e| e.to_string())?;
                    }
                    ["D", id] => {
                        let id = id.parse().map_err(|_| bad())?;
                        nn.delete(id).map_err(|e| e.to_string())?;
                    }
                    ["Q", x, y] => {
                        let p = Point::new(
                            x.parse().map_err(|_| bad())?,
                            y.parse().map_err(|_| bad())?,
                        );
                        match nn.query(p).map_err(|e| e.to_string())? {
                            Some((id, est)) => println!("site {id} estimate {est}"),
                            None => println!("empty"),
                        }
                    }
                    _ => return Err(bad()),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exact_nn(nn: &NNIndex, q: Point) -> Result<Option<(u64, f64)>, String> {
    let mut best: Option<(u64, f64)> = None;
    let mut ids: Vec<u64> = nn.site_ids().collect();
    ids.sort_unstable();
    for id in ids {
        let pos = nn.site(id).unwrap().pos;
        let (d, _) = exact_distance(&nn.oracle.domain, q, pos).map_err(|e| e.to_string())?;
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((id, d));
        }
    }
    Ok(best)
}

fn render(args: RenderArgs) -> Result<(), String> {
    let out = args.out.clone();
    let content = match args.what.as_str() {
        "domain" => {
            let dom = render_domain_input(&args)?;
            svg::render_domain(&dom)
        }
        "tree" => {
            let dom = render_domain_input(&args)?;
            let tree = geopath::septree::build_separator_tree(&dom).map_err(|e| e.to_string())?;
            svg::render_tree(&dom, &tree)
        }
        "path" => {
            let f = index_arg(&args)?;
            let oracle = IndexFile::load(f, "distance")?.oracle()?;
            let (from, to) = match (args.from, args.to) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err("path render needs --from and --to".into()),
            };
            let (_, witness) = oracle.query_distance(from, to).map_err(|e| e.to_string())?;
            svg::render_path(&oracle, &witness)
        }
        "anchors" => {
            let f = index_arg(&args)?;
            let oracle = IndexFile::load(f, "distance")?.oracle()?;
            let (node, path, point) = match (args.node, args.path, args.point) {
                (Some(n), Some(j), Some(p)) => (n, j, p),
                _ => return Err("anchors render needs --node, --path, --point".into()),
            };
            let ps = oracle
                .structures
                .get(node)
                .and_then(|v| v.get(path))
                .ok_or_else(|| format!("no path structure (node {node}, path {path})"))?;
            let set = ps.query_anchor_set(point);
            svg::render_anchors(&oracle.domain, &ps.q.points, point, &set)
        }
        "nn" => {
            let f = index_arg(&args)?;
            let nn = IndexFile::load(f, "nn")?.nn_index()?;
            svg::render_nn(&nn)
        }
        _ => unreachable!(),
    };
    fs::write(&out, content).map_err(|e| format!("{out}: {e}"))
}

fn render_domain_input(args: &RenderArgs) -> Result<PolygonDomain, String> {
    if let Some(path) = &args.domain {
        load_domain(path)
    } else if let Some(path) = &args.index {
        let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let f: IndexFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        f.domain()
    } else {
        Err("render needs --domain or --index".into())
    }
}

fn index_arg(args: &RenderArgs) -> Result<&str, String> {
    args.index
        .as_deref()
        .ok_or_else(|| format!("{} render needs --index", args.what))
}
