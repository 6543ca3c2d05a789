//! 2-canonical systems: every equation is `y = a ⊕ b` or `y = a ⊗ b`.

use alloc::vec;
use alloc::vec::Vec;

use crate::grounding::{AtomKind, Grounding};
use crate::semiring::{Semiring, SemiringError, Value};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Plus,
    Times,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonEq {
    pub lhs: NodeId,
    pub op: Op,
    pub a: NodeId,
    pub b: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// EDB coefficient with its annotation.
    Coefficient(Value),
    /// The reserved constants.
    Zero,
    One,
    /// A variable of the source grounding.
    Variable,
    /// An auxiliary introduced by the transform.
    Aux,
}

impl Node {
    pub fn is_constant(&self) -> bool {
        matches!(self, Node::Coefficient(_) | Node::Zero | Node::One)
    }
}

/// Node ids `0..num_atoms` coincide with the atom ids of the source
/// grounding; then come the `𝟘` and `𝟙` nodes and the auxiliaries.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCanonical {
    nodes: Vec<Node>,
    eqs: Vec<CanonEq>,
    eq_of: Vec<Option<u32>>,
    dep_start: Vec<u32>,
    deps: Vec<u32>,
    num_atoms: usize,
    source_size: usize,
}

impl TwoCanonical {
    pub fn from_grounding(g: &Grounding) -> Self {
        let num_atoms = g.num_atoms();
        let mut nodes: Vec<Node> = g
            .atoms()
            .iter()
            .map(|a| match a.kind {
                AtomKind::Coefficient(v) => Node::Coefficient(v),
                AtomKind::Variable => Node::Variable,
            })
            .collect();
        let zero = nodes.len() as NodeId;
        nodes.push(Node::Zero);
        let one = nodes.len() as NodeId;
        nodes.push(Node::One);
        let mut b = Builder { nodes, eqs: Vec::new() };

        for (x, monomials) in g.equations() {
            match monomials {
                [] => b.eq(x, Op::Plus, zero, zero),
                [m] if m.len() == 1 => b.eq(x, Op::Times, m[0], one),
                [m] => b.product(x, m, one),
                _ => {
                    // x = n1 ⊕ (n2 ⊕ (... ⊕ nk)); product chains follow
                    let mut pending = Vec::new();
                    let terms: Vec<NodeId> = monomials
                        .iter()
                        .map(|m| match &m[..] {
                            [] => one,
                            [a] => *a,
                            _ => {
                                let y = b.aux();
                                pending.push((y, m));
                                y
                            }
                        })
                        .collect();
                    let mut lhs = x;
                    for i in 0..terms.len() - 1 {
                        if i + 2 == terms.len() {
                            b.eq(lhs, Op::Plus, terms[i], terms[i + 1]);
                        } else {
                            let rest = b.aux();
                            b.eq(lhs, Op::Plus, terms[i], rest);
                            lhs = rest;
                        }
                    }
                    for (y, m) in pending {
                        b.product(y, m, one);
                    }
                }
            }
        }

        let Builder { nodes, eqs } = b;
        let mut eq_of = vec![None; nodes.len()];
        let mut count = vec![0u32; nodes.len() + 1];
        for (i, e) in eqs.iter().enumerate() {
            eq_of[e.lhs as usize] = Some(i as u32);
            count[e.a as usize + 1] += 1;
            count[e.b as usize + 1] += 1;
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        let dep_start = count.clone();
        let mut fill = count;
        let mut deps = vec![0u32; 2 * eqs.len()];
        for (i, e) in eqs.iter().enumerate() {
            for operand in [e.a, e.b] {
                deps[fill[operand as usize] as usize] = i as u32;
                fill[operand as usize] += 1;
            }
        }
        TwoCanonical {
            nodes,
            eqs,
            eq_of,
            dep_start,
            deps,
            num_atoms,
            source_size: g.size(),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn zero_node(&self) -> NodeId {
        self.num_atoms as NodeId
    }

    pub fn one_node(&self) -> NodeId {
        self.num_atoms as NodeId + 1
    }

    pub fn equations(&self) -> &[CanonEq] {
        &self.eqs
    }

    pub fn equation_of(&self, node: NodeId) -> Option<&CanonEq> {
        self.eq_of[node as usize].map(|i| &self.eqs[i as usize])
    }

    /// Indices of the equations whose right-hand side mentions `node`.
    pub fn dependents(&self, node: NodeId) -> &[u32] {
        let s = self.dep_start[node as usize] as usize;
        let e = self.dep_start[node as usize + 1] as usize;
        &self.deps[s..e]
    }

    /// Three symbols per equation.
    pub fn size(&self) -> usize {
        3 * self.eqs.len()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    /// Constant value of a node, `None` for variables and auxiliaries.
    pub fn constant(&self, sr: &Semiring, node: NodeId) -> Option<Value> {
        match self.nodes[node as usize] {
            Node::Coefficient(v) => Some(v),
            Node::Zero => Some(sr.zero()),
            Node::One => Some(sr.one()),
            Node::Variable | Node::Aux => None,
        }
    }

    /// Initial assignment: constants at their values, everything else `𝟘`.
    pub fn initial(&self, sr: &Semiring) -> Vec<Value> {
        (0..self.nodes.len() as NodeId)
            .map(|n| self.constant(sr, n).unwrap_or_else(|| sr.zero()))
            .collect()
    }

    pub fn eval(&self, sr: &Semiring, eq: &CanonEq, h: &[Value]) -> Result<Value, SemiringError> {
        let (a, b) = (&h[eq.a as usize], &h[eq.b as usize]);
        match eq.op {
            Op::Plus => sr.plus(a, b),
            Op::Times => sr.times(a, b),
        }
    }
}

struct Builder {
    nodes: Vec<Node>,
    eqs: Vec<CanonEq>,
}

impl Builder {
    fn aux(&mut self) -> NodeId {
        self.nodes.push(Node::Aux);
        (self.nodes.len() - 1) as NodeId
    }

    fn eq(&mut self, lhs: NodeId, op: Op, a: NodeId, b: NodeId) {
        self.eqs.push(CanonEq { lhs, op, a, b });
    }

    /// `lhs = m1 ⊗ (m2 ⊗ (... ⊗ mk))` for `k ≥ 2`.
    fn product(&mut self, lhs: NodeId, m: &[u32], one: NodeId) {
        if m.is_empty() {
            self.eq(lhs, Op::Times, one, one);
            return;
        }
        let mut lhs = lhs;
        for i in 0..m.len() - 1 {
            if i + 2 == m.len() {
                self.eq(lhs, Op::Times, m[i], m[i + 1]);
            } else {
                let rest = self.aux();
                self.eq(lhs, Op::Times, m[i], rest);
                lhs = rest;
            }
        }
    }
}
