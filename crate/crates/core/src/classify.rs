//! Syntactic program classes that select grounding strategies.

use crate::decomposition::{gyo, Hypergraph};
use crate::program::{Program, SumProdQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    /// All IDB predicates are unary.
    pub monadic: bool,
    /// Every body has at most one IDB atom.
    pub linear: bool,
    /// Every body is a chain `R1(x0,x1), R2(x1,x2), ..` over binary atoms
    /// from the first head variable to the second.
    pub chain: bool,
    pub rulewise_acyclic: bool,
    pub rulewise_free_connex: bool,
}

pub fn classify(p: &Program) -> Classification {
    let bodies = || p.rules.iter().flat_map(|r| r.bodies.iter());
    Classification {
        monadic: p.arity_bound == 1,
        linear: bodies().all(|b| b.idb_atoms().count() <= 1),
        chain: bodies().all(is_chain),
        rulewise_acyclic: bodies().all(|b| gyo(&Hypergraph::of_query(b)).is_ok()),
        rulewise_free_connex: bodies().all(|b| {
            gyo(&Hypergraph::of_query(b))
                .map(|t| t.free_connex_root(&b.head_vars()).is_some())
                .unwrap_or(false)
        }),
    }
}

fn is_chain(b: &SumProdQuery) -> bool {
    if b.head_vars().len() != 2 {
        return false;
    }
    let mut cur = 0;
    for (i, atom) in b.atoms.iter().enumerate() {
        if atom.args.len() != 2 || atom.args[0] != cur {
            return false;
        }
        let last = i + 1 == b.atoms.len();
        cur = atom.args[1];
        let fresh = cur as usize == 2 + i;
        if last && cur != 1 || !last && (!fresh || atom.args[0] == cur) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::tests::{clause, tc};
    use crate::program::Program;

    #[test]
    fn transitive_closure_is_linear_chain_acyclic() {
        let c = classify(&tc());
        assert!(c.linear && c.chain && c.rulewise_acyclic);
        assert!(!c.monadic && !c.rulewise_free_connex);
    }

    #[test]
    fn nonlinear_and_cyclic_are_detected() {
        let p = Program::from_clauses(
            &[
                clause(("T", &["x", "y"]), &[("E", &["x", "y"])]),
                clause(("T", &["x", "y"]), &[("T", &["x", "z"]), ("T", &["z", "y"]), ("E", &["y", "x"])]),
            ],
            Some("T"),
        )
        .unwrap();
        let c = classify(&p);
        assert!(!c.linear && !c.chain && !c.rulewise_acyclic);
    }

    #[test]
    fn monadic_program() {
        let p = Program::from_clauses(&[clause(("U", &["x"]), &[("E", &["x", "y"]), ("U", &["y"])])], Some("U"))
            .unwrap();
        let c = classify(&p);
        assert!(c.monadic && c.linear && c.rulewise_free_connex && !c.chain);
    }
}
