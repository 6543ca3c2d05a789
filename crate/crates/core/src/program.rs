//! Validated Datalog programs in sum-of-sum-product form.
//!
//! Every rule has a distinct IDB head; clauses sharing a head are merged
//! into one [`Rule`] whose bodies are ⊕-ed together. Inside each body the
//! variables are renumbered so that the head variables are `0..arity` in
//! head order and the remaining (summed-out) variables follow in order of
//! first occurrence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A variable index inside one sum-product query.
pub type Var = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredKind {
    Edb,
    Idb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Var>,
    pub kind: PredKind,
}

impl Atom {
    /// Distinct variables of the atom, sorted.
    pub fn vars(&self) -> Vec<Var> {
        let set: BTreeSet<Var> = self.args.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn is_idb(&self) -> bool {
        self.kind == PredKind::Idb
    }
}

/// One body `⊕_{x_{[ℓ]∖H}} ⊗_J T_J(x_J)` of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumProdQuery {
    pub atoms: Vec<Atom>,
    /// Source names of the variables, indexed by [`Var`].
    pub var_names: Vec<String>,
    head_arity: usize,
}

impl SumProdQuery {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    /// Head variables; always `0..arity` in head-argument order.
    pub fn head_vars(&self) -> Vec<Var> {
        (0..self.head_arity as Var).collect()
    }

    pub fn is_head_var(&self, v: Var) -> bool {
        (v as usize) < self.head_arity
    }

    pub fn idb_atoms(&self) -> impl Iterator<Item = (usize, &Atom)> {
        self.atoms.iter().enumerate().filter(|(_, a)| a.is_idb())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub arity: usize,
    pub bodies: Vec<SumProdQuery>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub target: String,
    pub edb_schema: BTreeMap<String, usize>,
    pub idb_schema: BTreeMap<String, usize>,
    pub arity_bound: usize,
}

/// An unvalidated `head :- body.` clause as written in source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub head: RawAtom,
    pub body: Vec<RawAtom>,
    /// 1-based source line, or 0 when unknown.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl RawAtom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Self {
        RawAtom {
            pred: pred.into(),
            args: args.iter().map(|s| String::from(*s)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("line {line}: `{symbol}` used with arity {found}, previously {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
        line: usize,
    },
    #[error("line {line}: unsafe rule: head variable `{var}` of `{head}` does not occur in the body")]
    UnsafeRule { head: String, var: String, line: usize },
    #[error("line {line}: head variable `{var}` of `{head}` is repeated")]
    RepeatedHeadVar { head: String, var: String, line: usize },
    #[error("line {line}: rule for `{head}` has an empty body")]
    EmptyBody { head: String, line: usize },
    #[error("missing @target declaration")]
    MissingTarget,
    #[error("target `{0}` is not an IDB predicate of the program")]
    TargetNotIdb(String),
    #[error("program has no rules")]
    NoRules,
}

impl Program {
    /// Validates clauses and merges those sharing a head symbol.
    pub fn from_clauses(clauses: &[Clause], target: Option<&str>) -> Result<Program, ProgramError> {
        if clauses.is_empty() {
            return Err(ProgramError::NoRules);
        }
        let idb: BTreeSet<&str> = clauses.iter().map(|c| c.head.pred.as_str()).collect();
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        let mut check_arity = |atom: &RawAtom, line: usize| -> Result<(), ProgramError> {
            match arities.get(&atom.pred) {
                Some(&a) if a != atom.args.len() => Err(ProgramError::ArityMismatch {
                    symbol: atom.pred.clone(),
                    expected: a,
                    found: atom.args.len(),
                    line,
                }),
                Some(_) => Ok(()),
                None => {
                    arities.insert(atom.pred.clone(), atom.args.len());
                    Ok(())
                }
            }
        };

        let mut rules: Vec<Rule> = Vec::new();
        for clause in clauses {
            let line = clause.line;
            check_arity(&clause.head, line)?;
            if clause.body.is_empty() {
                return Err(ProgramError::EmptyBody {
                    head: clause.head.pred.clone(),
                    line,
                });
            }
            for a in &clause.body {
                check_arity(a, line)?;
            }
            let query = canonicalize(clause, &idb)?;
            match rules.iter_mut().find(|r| r.head == clause.head.pred) {
                Some(rule) => rule.bodies.push(query),
                None => rules.push(Rule {
                    head: clause.head.pred.clone(),
                    arity: clause.head.args.len(),
                    bodies: alloc::vec![query],
                }),
            }
        }

        let target = String::from(target.ok_or(ProgramError::MissingTarget)?);
        if !idb.contains(target.as_str()) {
            return Err(ProgramError::TargetNotIdb(target));
        }
        let (idb_schema, edb_schema): (BTreeMap<_, _>, BTreeMap<_, _>) = arities
            .into_iter()
            .partition(|(sym, _)| idb.contains(sym.as_str()));
        let arity_bound = idb_schema.values().copied().max().unwrap_or(0);
        Ok(Program {
            rules,
            target,
            edb_schema,
            idb_schema,
            arity_bound,
        })
    }

    pub fn rule(&self, head: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.head == head)
    }

    pub fn is_idb(&self, sym: &str) -> bool {
        self.idb_schema.contains_key(sym)
    }

    /// EDB symbols in order of first occurrence in the rule bodies.
    pub fn edb_order(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for rule in &self.rules {
            for body in &rule.bodies {
                for atom in &body.atoms {
                    if atom.kind == PredKind::Edb && !out.contains(&atom.pred.as_str()) {
                        out.push(&atom.pred);
                    }
                }
            }
        }
        out
    }

    pub fn num_bodies(&self) -> usize {
        self.rules.iter().map(|r| r.bodies.len()).sum()
    }
}

fn canonicalize(clause: &Clause, idb: &BTreeSet<&str>) -> Result<SumProdQuery, ProgramError> {
    let line = clause.line;
    let mut names: Vec<String> = Vec::new();
    let index = |name: &String, names: &mut Vec<String>| -> Var {
        match names.iter().position(|n| n == name) {
            Some(i) => i as Var,
            None => {
                names.push(name.clone());
                (names.len() - 1) as Var
            }
        }
    };
    for v in &clause.head.args {
        if names.contains(v) {
            return Err(ProgramError::RepeatedHeadVar {
                head: clause.head.pred.clone(),
                var: v.clone(),
                line,
            });
        }
        index(v, &mut names);
    }
    let head_arity = names.len();
    let atoms: Vec<Atom> = clause
        .body
        .iter()
        .map(|a| Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|v| index(v, &mut names)).collect(),
            kind: if idb.contains(a.pred.as_str()) {
                PredKind::Idb
            } else {
                PredKind::Edb
            },
        })
        .collect();
    let used: BTreeSet<Var> = atoms.iter().flat_map(|a| a.args.iter().copied()).collect();
    if let Some(v) = (0..head_arity as Var).find(|v| !used.contains(v)) {
        return Err(ProgramError::UnsafeRule {
            head: clause.head.pred.clone(),
            var: names[v as usize].clone(),
            line,
        });
    }
    Ok(SumProdQuery {
        atoms,
        var_names: names,
        head_arity,
    })
}

struct AtomDisplay<'a>(&'a Atom, &'a [String]);

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.0.pred)?;
        for (i, v) in self.0.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&self.1[*v as usize])?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Program {
    /// Renders the program back into the surface syntax, one clause per
    /// body, in rule order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            for body in &rule.bodies {
                write!(f, "{}(", rule.head)?;
                for i in 0..rule.arity {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&body.var_names[i])?;
                }
                f.write_str(") :- ")?;
                for (i, atom) in body.atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", AtomDisplay(atom, &body.var_names))?;
                }
                f.write_str(".\n")?;
            }
        }
        writeln!(f, "@target {}.", self.target)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn clause(head: (&str, &[&str]), body: &[(&str, &[&str])]) -> Clause {
        Clause {
            head: RawAtom::new(head.0, head.1),
            body: body.iter().map(|(p, a)| RawAtom::new(*p, a)).collect(),
            line: 0,
        }
    }

    pub(crate) fn tc() -> Program {
        Program::from_clauses(
            &[
                clause(("T", &["x1", "x2"]), &[("R", &["x1", "x2"])]),
                clause(("T", &["x1", "x2"]), &[("T", &["x1", "x3"]), ("R", &["x3", "x2"])]),
            ],
            Some("T"),
        )
        .unwrap()
    }

    #[test]
    fn merges_bodies_with_same_head() {
        let p = tc();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].bodies.len(), 2);
        assert_eq!(p.arity_bound, 2);
        assert_eq!(p.edb_schema.get("R"), Some(&2));
        let body = &p.rules[0].bodies[1];
        assert_eq!(body.atoms[0].args, vec![0, 2]);
        assert_eq!(body.atoms[1].args, vec![2, 1]);
        assert!(body.atoms[0].is_idb());
    }

    #[test]
    fn head_variables_are_renumbered_per_body() {
        let p = Program::from_clauses(
            &[
                clause(("T", &["a", "b"]), &[("R", &["b", "a"])]),
                clause(("T", &["u", "v"]), &[("R", &["u", "v"])]),
            ],
            Some("T"),
        )
        .unwrap();
        assert_eq!(p.rules[0].bodies[0].atoms[0].args, vec![1, 0]);
        assert_eq!(p.rules[0].bodies[1].atoms[0].args, vec![0, 1]);
    }

    #[test]
    fn unsafe_rule_is_rejected() {
        let err = Program::from_clauses(&[clause(("T", &["x"]), &[("R", &["y", "z"])])], Some("T"));
        assert!(matches!(err, Err(ProgramError::UnsafeRule { ref var, .. }) if var == "x"));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let err = Program::from_clauses(
            &[
                clause(("T", &["x"]), &[("R", &["x", "y"])]),
                clause(("T", &["x"]), &[("R", &["x"])]),
            ],
            Some("T"),
        );
        assert!(matches!(err, Err(ProgramError::ArityMismatch { expected: 2, found: 1, .. })));
    }

    #[test]
    fn target_must_be_declared_idb() {
        let c = [clause(("T", &["x"]), &[("R", &["x"])])];
        assert_eq!(Program::from_clauses(&c, None), Err(ProgramError::MissingTarget));
        assert_eq!(
            Program::from_clauses(&c, Some("R")),
            Err(ProgramError::TargetNotIdb("R".into()))
        );
    }

    #[test]
    fn repeated_head_variable_is_rejected() {
        let err = Program::from_clauses(&[clause(("T", &["x", "x"]), &[("R", &["x", "x"])])], Some("T"));
        assert!(matches!(err, Err(ProgramError::RepeatedHeadVar { .. })));
    }

    #[test]
    fn repeated_body_variables_are_allowed() {
        let p = Program::from_clauses(&[clause(("T", &["x"]), &[("R", &["x", "x"])])], Some("T")).unwrap();
        assert_eq!(p.rules[0].bodies[0].atoms[0].args, vec![0, 0]);
        assert_eq!(p.rules[0].bodies[0].atoms[0].vars(), vec![0]);
    }

    #[test]
    fn display_uses_source_names() {
        let text = tc().to_string();
        assert_eq!(
            text,
            "T(x1,x2) :- R(x1,x2).\nT(x1,x2) :- T(x1,x3), R(x3,x2).\n@target T.\n"
        );
    }
}
