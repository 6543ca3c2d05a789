//! Grounding-size and solver benchmarks over generated graph families.

use std::fmt::Write as _;

use groundfix_core::program::Program;
use groundfix_core::semiring::Semiring;

use crate::generate::{graph_instance, rng, Family};
use crate::pipeline::{run, RunConfig, StatsReport};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub semiring: Semiring,
    pub seed: u64,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok(StatsReport),
    CapExceeded,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub status: RowStatus,
}

impl BenchRow {
    pub fn stats(&self) -> Option<&StatsReport> {
        match &self.status {
            RowStatus::Ok(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Slopes {
    pub vs_m: Option<f64>,
    pub vs_n: Option<f64>,
    pub vs_mn: Option<f64>,
}

/// Runs one row per schedule size, in schedule order. Each size gets its
/// own generator seeded from `seed` and the schedule index.
pub fn bench(program: &Program, cfg: &BenchConfig) -> Vec<BenchRow> {
    cfg.sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let mut r = rng(cfg.seed.wrapping_add(i as u64));
            let (nodes, edges) = cfg.family.graph(size, &mut r);
            let inst = graph_instance(program, &cfg.semiring, nodes, &edges, &mut r);
            let status = match run(program, &inst, &cfg.run) {
                Ok(out) => RowStatus::Ok(out.stats),
                Err(e) if e.is_cap_exceeded() => RowStatus::CapExceeded,
                Err(e) => RowStatus::Failed(e.to_string()),
            };
            BenchRow {
                size,
                m: inst.num_facts(),
                n: inst.domain_size(),
                status,
            }
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct positive points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slopes of the grounding size against `m`, `n` and `m·n` over the rows
/// that completed.
pub fn slopes(rows: &[BenchRow]) -> Slopes {
    let ok: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| r.stats().map(|s| (r.m as f64, r.n as f64, s.grounding_size as f64)))
        .collect();
    let pick = |f: fn(&(f64, f64, f64)) -> f64| loglog_slope(&ok.iter().map(|p| (f(p), p.2)).collect::<Vec<_>>());
    Slopes {
        vs_m: pick(|p| p.0),
        vs_n: pick(|p| p.1),
        vs_mn: pick(|p| p.0 * p.1),
    }
}

pub const CSV_HEADER: &str = "program,family,size,m,n,status,grounding_size,canonical_size,equations,solver,popped,equation_visits,semiring_ops,iterations,wall_ms";

pub fn csv(program: &str, family: Family, rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{program},{family},{},{},{},", r.size, r.m, r.n);
        match &r.status {
            RowStatus::Ok(s) => {
                let wall = s.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "ok,{},{},{},{},{},{},{},{},{wall}",
                    s.grounding_size,
                    s.canonical_size,
                    s.equations,
                    s.solver,
                    s.popped,
                    s.equation_visits,
                    s.semiring_ops,
                    s.iterations
                );
            }
            RowStatus::CapExceeded => out.push_str("cap-exceeded,,,,,,,,,\n"),
            RowStatus::Failed(_) => out.push_str("error,,,,,,,,,\n"),
        }
    }
    out
}

/// `# slope ...` trailer lines; absent slopes print as `nan`.
pub fn slope_lines(s: &Slopes) -> String {
    let f = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x:.4}"));
    format!(
        "# slope |G| vs m: {}\n# slope |G| vs n: {}\n# slope |G| vs m*n: {}\n",
        f(s.vs_m),
        f(s.vs_n),
        f(s.vs_mn)
    )
}
