//! Seeded instance generators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use groundfix_core::instance::{Instance, InstanceBuilder};
use groundfix_core::program::Program;
use groundfix_core::semiring::{Level, Semiring, SemiringKind, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node(i: usize) -> String {
    format!("v{i}")
}

/// A random non-`𝟘` annotation. Tropical weights are integers in `1..=10`.
pub fn random_value(sr: &Semiring, rng: &mut Rng8) -> Value {
    match sr.kind() {
        SemiringKind::Boolean => Value::Bool(true),
        SemiringKind::Tropical => Value::trop(rng.gen_range(1..=10) as f64),
        SemiringKind::Naturals => Value::Nat(rng.gen_range(1..=3)),
        SemiringKind::Access => Value::Access(Level::ALL[rng.gen_range(0..4)]),
        SemiringKind::Set { universe } => {
            let k = universe.len().min(64);
            let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
            Value::Set(loop {
                let bits = rng.gen::<u64>() & full;
                if bits != 0 || full == 0 {
                    break bits;
                }
            })
        }
    }
}

/// Every EDB symbol of `program` gets each tuple over `n` constants
/// independently; the probability is scaled so a relation of any arity
/// holds about `density · n²` facts.
pub fn random_instance(program: &Program, sr: &Semiring, n: usize, density: f64, rng: &mut Rng8) -> Instance {
    let mut b = InstanceBuilder::new(sr.clone());
    for sym in program.edb_order() {
        let arity = program.edb_schema[sym];
        let total = n.pow(arity as u32);
        let p = match arity {
            0 => 0.5,
            1 => 0.5,
            a => (density * (n * n) as f64 / n.pow(a as u32) as f64).min(1.0),
        };
        for idx in 0..total {
            if rng.gen_bool(p) {
                let args = digits(idx, n, arity).into_iter().map(node).collect();
                let v = random_value(sr, rng);
                b.add_fact(sym, args, v).expect("schema-consistent");
            }
        }
    }
    b.build().0
}

fn digits(mut idx: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for d in out.iter_mut().rev() {
        *d = idx % n;
        idx /= n;
    }
    out
}

/// Directed edges of a random graph on `n` nodes, each present with
/// probability `p`, no self-loops.
pub fn random_digraph(n: usize, p: f64, rng: &mut Rng8) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                out.push((u, v));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `size` nodes on a directed path.
    Path,
    /// `size` distinct random edges over `max(size / 4, 2)` nodes.
    RandomGraph,
    /// A `k × k` grid with `k = ⌊√size⌋`, edges pointing right and down.
    Grid,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Path, Family::RandomGraph, Family::Grid];

    pub fn token(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::RandomGraph => "random-graph",
            Family::Grid => "grid",
        }
    }

    /// Node count and edge list for a schedule size.
    pub fn graph(self, size: usize, rng: &mut Rng8) -> (usize, Vec<(usize, usize)>) {
        match self {
            Family::Path => (size, (1..size).map(|i| (i - 1, i)).collect()),
            Family::RandomGraph => {
                let n = (size / 4).max(2);
                let m = size.min(n * (n - 1));
                let mut seen = BTreeSet::new();
                let mut edges = Vec::with_capacity(m);
                while edges.len() < m {
                    let u = rng.gen_range(0..n);
                    let v = rng.gen_range(0..n);
                    if u != v && seen.insert((u, v)) {
                        edges.push((u, v));
                    }
                }
                (n, edges)
            }
            Family::Grid => {
                let k = (size as f64).sqrt().floor() as usize;
                let mut edges = Vec::new();
                for r in 0..k {
                    for c in 0..k {
                        let id = r * k + c;
                        if c + 1 < k {
                            edges.push((id, id + 1));
                        }
                        if r + 1 < k {
                            edges.push((id, id + k));
                        }
                    }
                }
                (k * k, edges)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown generator family `{0}` (expected path, random-graph or grid)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.token() == s)
            .ok_or_else(|| UnknownFamily(s.to_string()))
    }
}

/// Populates the EDB symbols of `program` from a graph: binary symbols get
/// the edges, unary symbols get node `v0` only, and wider symbols get one
/// tuple per edge, padded by walking the edge list. The first
/// unary symbol's fact carries `𝟙`, so it acts as a source.
pub fn graph_instance(
    program: &Program,
    sr: &Semiring,
    nodes: usize,
    edges: &[(usize, usize)],
    rng: &mut Rng8,
) -> Instance {
    let mut b = InstanceBuilder::new(sr.clone());
    for sym in program.edb_order() {
        match program.edb_schema[sym] {
            0 => {
                b.add_fact(sym, Vec::new(), sr.one()).expect("schema-consistent");
            }
            1 => {
                if nodes > 0 {
                    b.add_fact(sym, vec![node(0)], sr.one()).expect("schema-consistent");
                }
            }
            2 => {
                for &(u, v) in edges {
                    let w = random_value(sr, rng);
                    b.add_fact(sym, vec![node(u), node(v)], w).expect("schema-consistent");
                }
            }
            a => {
                for (i, &(u, v)) in edges.iter().enumerate() {
                    let mut args = vec![node(u), node(v)];
                    let mut j = i;
                    while args.len() < a {
                        j = (j + 1) % edges.len();
                        args.push(node(edges[j].1));
                    }
                    let w = random_value(sr, rng);
                    b.add_fact(sym, args, w).expect("schema-consistent");
                }
            }
        }
    }
    b.build().0
}
