//! Annotated EDB instances over a shared active domain.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::program::Program;
use crate::semiring::{Semiring, SemiringError, Value};

/// Constants are interned as indices into [`Instance::domain`].
pub type Const = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub arity: usize,
    pub facts: BTreeMap<Vec<Const>, Value>,
}

impl Relation {
    pub fn get(&self, tuple: &[Const]) -> Option<&Value> {
        self.facts.get(tuple)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    semiring: Semiring,
    domain: Vec<String>,
    relations: BTreeMap<String, Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("fact `{pred}` has {found} arguments, previously {expected}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is defined by rules and cannot also be given facts")]
    IdbFacts(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// Non-fatal issues seen while building an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A fact was given more than once; the annotations were ⊕-combined.
    DuplicateFact { pred: String, args: Vec<String> },
    /// Facts for a symbol that the program never mentions.
    UnusedRelation(String),
}

/// Symbol, arity and facts over constant names.
type NamedRelation = (String, usize, Vec<(Vec<String>, Value)>);

#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    semiring: Semiring,
    facts: BTreeMap<String, (usize, BTreeMap<Vec<String>, Value>)>,
    warnings: Vec<Warning>,
}

impl InstanceBuilder {
    pub fn new(semiring: Semiring) -> Self {
        InstanceBuilder {
            semiring,
            facts: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn semiring(&self) -> &Semiring {
        &self.semiring
    }

    /// Adds a fact annotated with `𝟙`.
    pub fn add(&mut self, pred: &str, args: &[&str]) -> Result<&mut Self, InstanceError> {
        let one = self.semiring.one();
        self.add_value(pred, args, one)
    }

    pub fn add_value(&mut self, pred: &str, args: &[&str], value: Value) -> Result<&mut Self, InstanceError> {
        let owned: Vec<String> = args.iter().map(|a| String::from(*a)).collect();
        self.add_fact(pred, owned, value)?;
        Ok(self)
    }

    pub fn add_fact(&mut self, pred: &str, args: Vec<String>, value: Value) -> Result<(), InstanceError> {
        self.semiring.check(&value)?;
        let entry = self
            .facts
            .entry(String::from(pred))
            .or_insert_with(|| (args.len(), BTreeMap::new()));
        if entry.0 != args.len() {
            return Err(InstanceError::ArityMismatch {
                pred: String::from(pred),
                expected: entry.0,
                found: args.len(),
            });
        }
        match entry.1.get_mut(&args) {
            Some(old) => {
                *old = self.semiring.plus(old, &value)?;
                self.warnings.push(Warning::DuplicateFact {
                    pred: String::from(pred),
                    args,
                });
            }
            None => {
                entry.1.insert(args, value);
            }
        }
        Ok(())
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Interns constants and drops facts annotated with `𝟘`. The active
    /// domain is the sorted set of constants of the remaining facts.
    pub fn build(self) -> (Instance, Vec<Warning>) {
        let sr = self.semiring;
        let kept: Vec<NamedRelation> = self
            .facts
            .into_iter()
            .map(|(pred, (arity, facts))| {
                let nonzero = facts.into_iter().filter(|(_, v)| !sr.is_zero(v)).collect();
                (pred, arity, nonzero)
            })
            .collect();
        let domain: BTreeSet<&String> = kept
            .iter()
            .flat_map(|(_, _, fs)| fs.iter().flat_map(|(args, _)| args.iter()))
            .collect();
        let domain: Vec<String> = domain.into_iter().cloned().collect();
        let id = |c: &String| domain.binary_search(c).expect("constant in domain") as Const;
        let relations = kept
            .iter()
            .map(|(pred, arity, fs)| {
                let facts = fs
                    .iter()
                    .map(|(args, v)| (args.iter().map(id).collect(), *v))
                    .collect();
                (pred.clone(), Relation { arity: *arity, facts })
            })
            .collect();
        let inst = Instance {
            semiring: sr,
            domain,
            relations,
        };
        (inst, self.warnings)
    }
}

impl Instance {
    pub fn builder(semiring: Semiring) -> InstanceBuilder {
        InstanceBuilder::new(semiring)
    }

    pub fn semiring(&self) -> &Semiring {
        &self.semiring
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    /// Size `n` of the active domain.
    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn constant(&self, name: &str) -> Option<Const> {
        self.domain.binary_search_by(|c| c.as_str().cmp(name)).ok().map(|i| i as Const)
    }

    pub fn relation(&self, pred: &str) -> Option<&Relation> {
        self.relations.get(pred)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Total number `m` of stored (non-`𝟘`) facts.
    pub fn num_facts(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }

    /// Annotation of an EDB fact; `None` means `𝟘`.
    pub fn value(&self, pred: &str, tuple: &[Const]) -> Option<&Value> {
        self.relations.get(pred).and_then(|r| r.get(tuple))
    }

    /// Checks the instance against a program's schema.
    pub fn check_against(&self, program: &Program) -> Result<Vec<Warning>, InstanceError> {
        let mut warnings = Vec::new();
        for (pred, rel) in &self.relations {
            if program.is_idb(pred) {
                return Err(InstanceError::IdbFacts(pred.clone()));
            }
            match program.edb_schema.get(pred) {
                Some(&a) if a != rel.arity => {
                    return Err(InstanceError::ArityMismatch {
                        pred: pred.clone(),
                        expected: a,
                        found: rel.arity,
                    })
                }
                Some(_) => {}
                None => warnings.push(Warning::UnusedRelation(pred.clone())),
            }
        }
        Ok(warnings)
    }

    /// Renders a tuple of constant ids with the domain's names.
    pub fn names(&self, tuple: &[Const]) -> Vec<&str> {
        tuple.iter().map(|&c| self.domain[c as usize].as_str()).collect()
    }
}
