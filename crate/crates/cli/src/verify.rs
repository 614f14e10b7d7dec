//! Randomized verification: generated domains, random workloads, every
//! approximate answer checked against an exact oracle. The JSON report is
//! byte-identical for a fixed config; timings go to stderr only.

use clap::Args;
use geopath::domain_gen::{random_domain, GenError};
use geopath::geom::{Containment, Point, PolygonDomain};
use geopath::nn::NNIndex;
use geopath::oracle::exact_distance;
use serde::Serialize;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Args, Serialize, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random domains.
    #[arg(long, default_value_t = 5)]
    domains: usize,
    /// Vertex budget per domain.
    #[arg(long, default_value_t = 24)]
    budget: usize,
    /// Holes per domain.
    #[arg(long, default_value_t = 1)]
    holes: usize,
    /// Sites per domain (nn / dynamic modes).
    #[arg(long, default_value_t = 20)]
    sites: usize,
    /// Queries (distance mode: pairs) per domain per eps.
    #[arg(long, default_value_t = 30)]
    queries: usize,
    #[arg(long = "eps", default_values_t = [0.5, 0.25])]
    eps: Vec<f64>,
    #[arg(long, value_parser = ["distance", "nn", "dynamic"], default_value = "distance")]
    mode: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<String>,
}

#[derive(Serialize)]
struct Report {
    version: u32,
    config: VerifyArgs,
    domains_generated: usize,
    domains_skipped: usize,
    cells: Vec<Cell>,
    pass: bool,
}

#[derive(Serialize)]
struct Cell {
    eps: f64,
    checks: usize,
    violations: usize,
    max_stretch: f64,
}

struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn interior_point(dom: &PolygonDomain, rng: &mut Lcg) -> Point {
    let vs = dom.vertices();
    let (mut lo, mut hi) = (vs[0], vs[0]);
    for p in &vs {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    loop {
        let p = Point::new(
            lo.x + rng.next_f64() * (hi.x - lo.x),
            lo.y + rng.next_f64() * (hi.y - lo.y),
        );
        if dom.contains(p) == Containment::Interior {
            return p;
        }
    }
}

const SLACK: f64 = 1e-9;

pub fn run(args: VerifyArgs) -> Result<ExitCode, String> {
    if args.domains == 0 || args.queries == 0 {
        return Err("domains and queries must be positive".into());
    }
    for &e in &args.eps {
        if !(e > 0.0 && e <= 1.0) {
            return Err(format!("eps {e} outside (0,1]"));
        }
    }

    let mut doms = Vec::new();
    let mut skipped = 0;
    let mut seed = args.seed;
    while doms.len() < args.domains && skipped < args.domains * 20 {
        match random_domain(seed, args.budget, args.holes) {
            Ok(d) => doms.push((seed, d)),
            Err(GenError::Placement(..)) => {
                eprintln!("seed {seed}: hole placement infeasible, skipped");
                skipped += 1;
            }
            Err(e) => return Err(e.to_string()),
        }
        seed = seed.wrapping_add(1);
    }

    let mut cells = Vec::new();
    for &e in &args.eps {
        let mut cell = Cell { eps: e, checks: 0, violations: 0, max_stretch: 1.0 };
        let mut times = Vec::new();
        for &(dseed, ref dom) in &doms {
            let mut rng = Lcg(args.seed ^ dseed.wrapping_mul(0x9e3779b97f4a7c15) ^ e.to_bits());
            match args.mode.as_str() {
                "distance" => verify_distance(dom, e, &args, &mut rng, &mut cell, &mut times)?,
                "nn" => verify_nn(dom, e, &args, &mut rng, &mut cell, &mut times)?,
                "dynamic" => verify_dynamic(dom, e, &args, &mut rng, &mut cell, &mut times)?,
                _ => unreachable!(),
            }
        }
        times.sort_unstable();
        if !times.is_empty() {
            let pct = |p: f64| times[((times.len() - 1) as f64 * p) as usize];
            eprintln!(
                "eps {e}: {} checks, {} violations, max stretch {:.6}; query us p50={} p90={} p99={}",
                cell.checks,
                cell.violations,
                cell.max_stretch,
                pct(0.5),
                pct(0.9),
                pct(0.99)
            );
        }
        cells.push(cell);
    }

    let pass = cells.iter().all(|c| c.violations == 0) && !doms.is_empty();
    let report = Report {
        version: 1,
        config: args.clone(),
        domains_generated: doms.len(),
        domains_skipped: skipped,
        cells,
        pass,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    match &args.report {
        Some(path) => std::fs::write(path, json).map_err(|e| format!("{path}: {e}"))?,
        None => println!("{json}"),
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify_distance(
    dom: &PolygonDomain,
    eps: f64,
    args: &VerifyArgs,
    rng: &mut Lcg,
    cell: &mut Cell,
    times: &mut Vec<u128>,
) -> Result<(), String> {
    let oracle = geopath::distoracle::build_oracle(dom, eps).map_err(|e| e.to_string())?;
    for _ in 0..args.queries {
        let s = interior_point(dom, rng);
        let t = interior_point(dom, rng);
        let t0 = Instant::now();
        let (est, _) = oracle.query_distance(s, t).map_err(|e| e.to_string())?;
        times.push(t0.elapsed().as_micros());
        let (exact, _) = exact_distance(dom, s, t).map_err(|e| e.to_string())?;
        record(cell, est, exact, eps);
    }
    Ok(())
}

fn verify_nn(
    dom: &PolygonDomain,
    eps: f64,
    args: &VerifyArgs,
    rng: &mut Lcg,
    cell: &mut Cell,
    times: &mut Vec<u128>,
) -> Result<(), String> {
    let mut nn = NNIndex::new(dom, eps).map_err(|e| e.to_string())?;
    let mut sites = Vec::new();
    for id in 0..args.sites as u64 {
        let p = interior_point(dom, rng);
        nn.insert(p, id).map_err(|e| e.to_string())?;
        sites.push(p);
    }
    for _ in 0..args.queries {
        let q = interior_point(dom, rng);
        check_nn_query(&nn, dom, &sites, q, eps, cell, times)?;
    }
    Ok(())
}

fn verify_dynamic(
    dom: &PolygonDomain,
    eps: f64,
    args: &VerifyArgs,
    rng: &mut Lcg,
    cell: &mut Cell,
    times: &mut Vec<u128>,
) -> Result<(), String> {
    let mut nn = NNIndex::new(dom, eps).map_err(|e| e.to_string())?;
    let mut live: Vec<(u64, Point)> = Vec::new();
    let mut next_id = 0u64;
    let ops = args.queries * 4;
    for step in 0..ops {
        let r = rng.next_f64();
        if r < 0.45 && live.len() < args.sites {
            let p = interior_point(dom, rng);
            nn.insert(p, next_id).map_err(|e| e.to_string())?;
            live.push((next_id, p));
            next_id += 1;
        } else if r < 0.6 && !live.is_empty() {
            let k = (rng.next_f64() * live.len() as f64) as usize % live.len();
            let (id, _) = live.swap_remove(k);
            nn.delete(id).map_err(|e| e.to_string())?;
        } else {
            let q = interior_point(dom, rng);
            let pts: Vec<Point> = live.iter().map(|&(_, p)| p).collect();
            check_nn_query(&nn, dom, &pts, q, eps, cell, times)?;
        }
        // Rebuild cross-check: a fresh index over the live sites must answer
        // every probe identically (all tie-breaks are deterministic).
        if step % 50 == 49 {
            let mut fresh = NNIndex::new(dom, eps).map_err(|e| e.to_string())?;
            for &(id, p) in &live {
                fresh.insert(p, id).map_err(|e| e.to_string())?;
            }
            for _ in 0..3 {
                let q = interior_point(dom, rng);
                let a = nn.query(q).map_err(|e| e.to_string())?;
                let b = fresh.query(q).map_err(|e| e.to_string())?;
                cell.checks += 1;
                if a != b {
                    cell.violations += 1;
                    eprintln!("rebuild mismatch at ({}, {}): {a:?} vs {b:?}", q.x, q.y);
                }
            }
        }
    }
    Ok(())
}

fn check_nn_query(
    nn: &NNIndex,
    dom: &PolygonDomain,
    sites: &[Point],
    q: Point,
    eps: f64,
    cell: &mut Cell,
    times: &mut Vec<u128>,
) -> Result<(), String> {
    let t0 = Instant::now();
    let ans = nn.query(q).map_err(|e| e.to_string())?;
    times.push(t0.elapsed().as_micros());
    let mut best = f64::INFINITY;
    for &p in sites {
        let (d, _) = exact_distance(dom, q, p).map_err(|e| e.to_string())?;
        best = best.min(d);
    }
    match ans {
        Some((_, est)) if best.is_finite() => record(cell, est, best, eps),
        None if sites.is_empty() => cell.checks += 1,
        _ => {
            cell.checks += 1;
            cell.violations += 1;
            eprintln!("nn answer/site-set mismatch at ({}, {})", q.x, q.y);
        }
    }
    Ok(())
}

fn record(cell: &mut Cell, est: f64, exact: f64, eps: f64) {
    cell.checks += 1;
    let slack = SLACK * exact.max(1.0);
    if est < exact - slack || est > (1.0 + eps) * exact + slack {
        cell.violations += 1;
        eprintln!("sandwich violation: est {est}, exact {exact}, eps {eps}");
    }
    if exact > slack {
        let s = est / exact;
        if s > cell.max_stretch {
            cell.max_stretch = s;
        }
    }
}
