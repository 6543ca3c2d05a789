//! Grounding-free evaluation: iterates the immediate consequence operator
//! on whole IDB relations by join enumeration.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Const, Instance};
use crate::program::{Atom, PredKind, Program, SumProdQuery};
use crate::semiring::{Semiring, SemiringError, Value};
use crate::solver::default_max_iters;

/// Non-`𝟘` tuples of a relation with their annotations.
pub type RelationMap = BTreeMap<Vec<Const>, Value>;

#[derive(Debug, Clone, PartialEq)]
pub enum ProgramOutcome {
    Converged {
        relations: BTreeMap<String, RelationMap>,
        iterations: usize,
    },
    NonConvergence {
        max_iters: usize,
    },
}

/// Least fixpoint of `program` on `instance`. Without an explicit budget
/// the limit is `10 · n^a + 10` where `n^a` bounds the number of IDB
/// ground atoms.
pub fn kleene_program(
    program: &Program,
    instance: &Instance,
    max_iters: Option<usize>,
) -> Result<ProgramOutcome, SemiringError> {
    let sr = instance.semiring();
    let max_iters = max_iters.unwrap_or_else(|| {
        let n = instance.domain_size();
        let atoms: usize = program.idb_schema.values().map(|&a| n.saturating_pow(a as u32)).sum();
        default_max_iters(atoms)
    });
    let mut current: BTreeMap<String, RelationMap> =
        program.rules.iter().map(|r| (r.head.clone(), RelationMap::new())).collect();
    for it in 1..=max_iters {
        let mut next: BTreeMap<String, RelationMap> = BTreeMap::new();
        for rule in &program.rules {
            let mut out = RelationMap::new();
            for body in &rule.bodies {
                apply(sr, instance, &current, body, &mut out)?;
            }
            out.retain(|_, v| !sr.is_zero(v));
            next.insert(rule.head.clone(), out);
        }
        if next == current {
            return Ok(ProgramOutcome::Converged {
                relations: current,
                iterations: it,
            });
        }
        current = next;
    }
    Ok(ProgramOutcome::NonConvergence { max_iters })
}

fn apply(
    sr: &Semiring,
    inst: &Instance,
    idb: &BTreeMap<String, RelationMap>,
    body: &SumProdQuery,
    out: &mut RelationMap,
) -> Result<(), SemiringError> {
    let mut asg: Vec<Option<Const>> = vec![None; body.num_vars()];
    let arity = body.head_vars().len();
    join(sr, inst, idb, &body.atoms, &mut asg, sr.one(), &mut |asg, v| {
        let key: Vec<Const> = asg[..arity].iter().map(|c| c.expect("head bound")).collect();
        let slot = out.entry(key).or_insert_with(|| sr.zero());
        *slot = sr.plus(slot, &v)?;
        Ok(())
    })
}

type Sink<'a> = dyn FnMut(&[Option<Const>], Value) -> Result<(), SemiringError> + 'a;

fn join(
    sr: &Semiring,
    inst: &Instance,
    idb: &BTreeMap<String, RelationMap>,
    atoms: &[Atom],
    asg: &mut Vec<Option<Const>>,
    acc: Value,
    sink: &mut Sink<'_>,
) -> Result<(), SemiringError> {
    let Some((atom, rest)) = atoms.split_first() else {
        return sink(asg, acc);
    };
    let facts: Vec<(&Vec<Const>, &Value)> = match atom.kind {
        PredKind::Edb => match inst.relation(&atom.pred) {
            Some(r) => r.facts.iter().collect(),
            None => Vec::new(),
        },
        PredKind::Idb => idb.get(&atom.pred).map(|r| r.iter().collect()).unwrap_or_default(),
    };
    for (tuple, v) in facts {
        let saved = asg.clone();
        let fits = atom.args.iter().zip(tuple).all(|(&var, &c)| match asg[var as usize] {
            Some(b) => b == c,
            None => {
                asg[var as usize] = Some(c);
                true
            }
        });
        if fits {
            let prod = sr.times(&acc, v)?;
            join(sr, inst, idb, rest, asg, prod, sink)?;
        }
        *asg = saved;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::tests::tc;

    #[test]
    fn boolean_transitive_closure() {
        let mut b = Instance::builder(Semiring::boolean());
        b.add("R", &["a", "b"]).unwrap().add("R", &["b", "c"]).unwrap();
        let (inst, _) = b.build();
        let ProgramOutcome::Converged { relations, .. } = kleene_program(&tc(), &inst, None).unwrap() else {
            panic!("diverged")
        };
        let t: Vec<&Vec<Const>> = relations["T"].keys().collect();
        assert_eq!(t, vec![&vec![0, 1], &vec![0, 2], &vec![1, 2]]);
    }

    #[test]
    fn empty_instance_gives_empty_relations() {
        let (inst, _) = Instance::builder(Semiring::tropical()).build();
        let ProgramOutcome::Converged { relations, iterations } = kleene_program(&tc(), &inst, None).unwrap() else {
            panic!("diverged")
        };
        assert!(relations["T"].is_empty());
        assert_eq!(iterations, 1);
    }

    #[test]
    fn naturals_cycle_diverges() {
        let mut b = Instance::builder(Semiring::naturals());
        b.add("R", &["a", "a"]).unwrap();
        let (inst, _) = b.build();
        assert_eq!(
            kleene_program(&tc(), &inst, Some(50)).unwrap(),
            ProgramOutcome::NonConvergence { max_iters: 50 }
        );
    }
}
