#![allow(dead_code, clippy::needless_range_loop)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use groundfix::generate::node;
use groundfix_core::eval::RelationMap;
use groundfix_core::instance::Instance;
use groundfix_core::semiring::{Semiring, Value};

pub type Weighted = Vec<(usize, usize, u32)>;

/// All-pairs distances over paths of at least one edge.
pub fn floyd_warshall(n: usize, edges: &Weighted) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for &(u, v, w) in edges {
        let w = u64::from(w);
        d[u][v] = Some(d[u][v].map_or(w, |x: u64| x.min(w)));
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    let via = ik + kj;
                    if d[i][j].is_none_or(|x| via < x) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d
}

/// Distances from `sources` (each with an initial offset) by Dijkstra.
pub fn dijkstra(n: usize, edges: &Weighted, sources: &[(usize, u32)]) -> Vec<Option<u64>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        adj[u].push((v, u64::from(w)));
    }
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &(s, d) in sources {
        let d = u64::from(d);
        if dist[s].is_none_or(|x| d < x) {
            dist[s] = Some(d);
            heap.push(Reverse((d, s)));
        }
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|x| nd < x) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Non-empty-path reachability by Warshall's algorithm.
pub fn warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(u, v) in edges {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Instance with `R` from weighted edges and `U` from weighted nodes.
pub fn graph(sr: &Semiring, edges: &Weighted, unary: &[(usize, u32)]) -> Instance {
    let mut b = Instance::builder(sr.clone());
    for &(u, v, w) in edges {
        b.add_fact("R", vec![node(u), node(v)], Value::trop(f64::from(w))).unwrap();
    }
    for &(u, w) in unary {
        b.add_fact("U", vec![node(u)], Value::trop(f64::from(w))).unwrap();
    }
    b.build().0
}

/// Reads a binary relation back into a matrix of weights over `v0..`.
pub fn as_matrix(inst: &Instance, rel: &RelationMap, n: usize) -> Vec<Vec<Option<u64>>> {
    let mut out = vec![vec![None; n]; n];
    for (t, v) in rel {
        let idx = |c: u32| inst.domain()[c as usize][1..].parse::<usize>().unwrap();
        out[idx(t[0])][idx(t[1])] = Some(weight(v));
    }
    out
}

pub fn as_vector(inst: &Instance, rel: &RelationMap, n: usize) -> Vec<Option<u64>> {
    let mut out = vec![None; n];
    for (t, v) in rel {
        let i = inst.domain()[t[0] as usize][1..].parse::<usize>().unwrap();
        out[i] = Some(weight(v));
    }
    out
}

pub fn weight(v: &Value) -> u64 {
    match v {
        Value::Trop(t) => {
            let w = t.weight();
            assert!(w.fract() == 0.0, "non-integer distance {w}");
            w as u64
        }
        other => panic!("not tropical: {other}"),
    }
}

/// Tropical matrix restricted to nodes that occur in the instance.
pub fn restrict(d: Vec<Vec<Option<u64>>>, present: &[bool]) -> Vec<Vec<Option<u64>>> {
    d.into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, x)| if present[i] && present[j] { x } else { None })
                .collect()
        })
        .collect()
}

pub fn named(rel: &RelationMap, inst: &Instance, sr: &Semiring) -> BTreeMap<Vec<String>, String> {
    rel.iter()
        .map(|(t, v)| (inst.names(t).into_iter().map(String::from).collect(), sr.format_value(v)))
        .collect()
}
