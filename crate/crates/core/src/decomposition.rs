//! Hypergraphs of sum-product queries, GYO join trees and rootings.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::program::{SumProdQuery, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub num_vertices: usize,
    /// Edge `i` is the sorted, deduplicated variable set of atom `i`.
    pub edges: Vec<Vec<Var>>,
}

impl Hypergraph {
    pub fn of_query(q: &SumProdQuery) -> Self {
        Hypergraph {
            num_vertices: q.num_vars(),
            edges: q.atoms.iter().map(|a| a.vars()).collect(),
        }
    }
}

/// Edges left over when GYO reduction gets stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicVerdict {
    pub residue: Vec<usize>,
}

/// An undirected tree whose node `i` is hyperedge `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTree {
    pub bags: Vec<Vec<Var>>,
    pub adj: Vec<Vec<usize>>,
}

fn subset(a: &[Var], b: &[Var]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

/// GYO reduction. Contained edges are removed first; then ears are removed
/// lowest id first. Each removed edge is linked to its highest-id witness.
pub fn gyo(h: &Hypergraph) -> Result<JoinTree, CyclicVerdict> {
    let n = h.edges.len();
    let mut alive = vec![true; n];
    let mut adj = vec![Vec::new(); n];
    let mut remaining = n;
    while remaining > 1 {
        let step = contained_step(h, &alive).or_else(|| ear_step(h, &alive));
        match step {
            Some((e, w)) => {
                adj[e].push(w);
                adj[w].push(e);
                alive[e] = false;
                remaining -= 1;
            }
            None => {
                return Err(CyclicVerdict {
                    residue: (0..n).filter(|&i| alive[i]).collect(),
                })
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    Ok(JoinTree {
        bags: h.edges.clone(),
        adj,
    })
}

fn contained_step(h: &Hypergraph, alive: &[bool]) -> Option<(usize, usize)> {
    let live = || (0..h.edges.len()).filter(|&i| alive[i]);
    live().find_map(|e| {
        live()
            .filter(|&f| f != e && subset(&h.edges[e], &h.edges[f]))
            .max()
            .map(|w| (e, w))
    })
}

fn ear_step(h: &Hypergraph, alive: &[bool]) -> Option<(usize, usize)> {
    let live = || (0..h.edges.len()).filter(|&i| alive[i]);
    live().find_map(|e| {
        let shared: Vec<Var> = h.edges[e]
            .iter()
            .copied()
            .filter(|v| live().any(|f| f != e && h.edges[f].binary_search(v).is_ok()))
            .collect();
        live()
            .filter(|&w| w != e && subset(&shared, &h.edges[w]))
            .max()
            .map(|w| (e, w))
    })
}

impl JoinTree {
    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn root_at(&self, root: usize) -> Rooted {
        Rooted::new(&self.adj, root)
    }

    /// Every variable induces a connected subtree.
    pub fn has_running_intersection(&self) -> bool {
        let vars: BTreeSet<Var> = self.bags.iter().flatten().copied().collect();
        vars.into_iter().all(|v| {
            let holders: Vec<usize> = (0..self.len()).filter(|&i| self.bags[i].contains(&v)).collect();
            let mut seen = vec![false; self.len()];
            let mut stack = vec![holders[0]];
            seen[holders[0]] = true;
            let mut count = 0;
            while let Some(u) = stack.pop() {
                count += 1;
                for &w in &self.adj[u] {
                    if !seen[w] && self.bags[w].contains(&v) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            count == holders.len()
        })
    }

    /// Connected, acyclic and with one node per hyperedge.
    pub fn is_tree_over(&self, h: &Hypergraph) -> bool {
        if self.bags != h.edges || self.is_empty() {
            return false;
        }
        let edges: usize = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        edges + 1 == self.len() && self.root_at(0).order.len() == self.len()
    }

    /// Root with the most head variables; ties go to the lowest id.
    pub fn choose_root(&self, head: &[Var]) -> usize {
        let mut best = 0;
        let mut best_overlap = 0;
        for (i, bag) in self.bags.iter().enumerate() {
            let overlap = bag.iter().filter(|v| head.contains(v)).count();
            if overlap > best_overlap {
                best = i;
                best_overlap = overlap;
            }
        }
        best
    }

    /// Whether the head variables form a connected top part of the tree
    /// rooted at `root`: no non-head variable is introduced strictly above
    /// a node introducing a head variable.
    pub fn is_free_connex_at(&self, root: usize, head: &[Var]) -> bool {
        let rooted = self.root_at(root);
        let vars: BTreeSet<Var> = self.bags.iter().flatten().copied().collect();
        let tops: Vec<(Var, usize)> = vars.iter().map(|&v| (v, rooted.top(&self.bags, v))).collect();
        tops.iter().filter(|(v, _)| !head.contains(v)).all(|&(_, bound_top)| {
            tops.iter()
                .filter(|(v, _)| head.contains(v))
                .all(|&(_, free_top)| free_top == bound_top || !rooted.is_ancestor(bound_top, free_top))
        })
    }

    /// The lowest-id root at which the tree is free-connex, if any.
    pub fn free_connex_root(&self, head: &[Var]) -> Option<usize> {
        (0..self.len()).find(|&r| self.is_free_connex_at(r, head))
    }
}

/// Parent/children view of a tree rooted at a chosen node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rooted {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// Pre-order; parents precede children.
    pub order: Vec<usize>,
}

impl Rooted {
    pub fn new(adj: &[Vec<usize>], root: usize) -> Self {
        let n = adj.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &w in adj[u].iter().rev() {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    depth[w] = depth[u] + 1;
                    children[u].push(w);
                    stack.push(w);
                }
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Rooted {
            root,
            parent,
            children,
            depth,
            order,
        }
    }

    /// Whether `a` is a proper ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.parent[b];
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent[p];
        }
        false
    }

    /// Shallowest node whose bag holds `v`.
    pub fn top(&self, bags: &[Vec<Var>], v: Var) -> usize {
        self.order
            .iter()
            .copied()
            .filter(|&u| bags[u].contains(&v))
            .min_by_key(|&u| self.depth[u])
            .expect("variable occurs in some bag")
    }

    /// Nodes of the subtree under `t`, in pre-order.
    pub fn subtree(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    /// Path `from = p0, p1, .., pk = to` where `to` lies under `from`.
    pub fn path_down(&self, from: usize, to: usize) -> Vec<usize> {
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = self.parent[cur].expect("target lies under source");
            path.push(cur);
        }
        path.reverse();
        path
    }
}
