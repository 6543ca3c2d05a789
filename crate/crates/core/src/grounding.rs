//! Ground polynomial systems `x = f(x)` over interned ground atoms.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::hash::{Hash, Hasher};

use hashbrown::{Equivalent, HashMap};
use thiserror::Error;

use crate::instance::Const;
use crate::semiring::Value;

pub type AtomId = u32;
pub type PredId = u32;

/// A product of ground atoms.
pub type Monomial = Box<[AtomId]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredRole {
    Edb,
    Idb,
    /// Auxiliary relation introduced by a grounding strategy.
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredInfo {
    pub name: String,
    pub arity: usize,
    pub role: PredRole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomKind {
    /// An EDB fact with its (non-`𝟘`) annotation.
    Coefficient(Value),
    Variable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundAtom {
    pub pred: PredId,
    pub tuple: Box<[Const]>,
    pub kind: AtomKind,
}

/// Borrowed form of an interner key; hashes exactly like the owned tuple.
struct KeyRef<'a>(PredId, &'a [Const]);

impl Hash for KeyRef<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
        self.1.hash(state);
    }
}

impl Equivalent<(PredId, Box<[Const]>)> for KeyRef<'_> {
    fn equivalent(&self, key: &(PredId, Box<[Const]>)) -> bool {
        self.0 == key.0 && *self.1 == *key.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("grounding size exceeded the cap of {cap}")]
    SizeCapExceeded { cap: usize },
}

/// A ground system: one equation `x = ⊕ monomials` per variable atom.
///
/// The size is `Σ_eq (1 + Σ_monomials |monomial|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grounding {
    domain: Vec<String>,
    preds: Vec<PredInfo>,
    pred_index: HashMap<String, PredId>,
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<(PredId, Box<[Const]>), AtomId>,
    pred_atoms: Vec<Vec<AtomId>>,
    rhs: Vec<Option<Vec<Monomial>>>,
    size: usize,
    cap: Option<usize>,
}

impl Grounding {
    pub fn new(domain: Vec<String>) -> Self {
        Grounding {
            domain,
            preds: Vec::new(),
            pred_index: HashMap::new(),
            atoms: Vec::new(),
            atom_index: HashMap::new(),
            pred_atoms: Vec::new(),
            rhs: Vec::new(),
            size: 0,
            cap: None,
        }
    }

    /// Fails further growth once the size passes `cap`.
    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.cap = cap;
        self
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn pred(&mut self, name: &str, arity: usize, role: PredRole) -> PredId {
        if let Some(&id) = self.pred_index.get(name) {
            return id;
        }
        let id = self.preds.len() as PredId;
        self.preds.push(PredInfo {
            name: String::from(name),
            arity,
            role,
        });
        self.pred_index.insert(String::from(name), id);
        self.pred_atoms.push(Vec::new());
        id
    }

    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.pred_index.get(name).copied()
    }

    pub fn pred_info(&self, id: PredId) -> &PredInfo {
        &self.preds[id as usize]
    }

    pub fn preds(&self) -> &[PredInfo] {
        &self.preds
    }

    pub fn lookup(&self, pred: PredId, tuple: &[Const]) -> Option<AtomId> {
        self.atom_index.get(&KeyRef(pred, tuple)).copied()
    }

    fn intern(&mut self, pred: PredId, tuple: &[Const], kind: AtomKind) -> AtomId {
        if let Some(&id) = self.atom_index.get(&KeyRef(pred, tuple)) {
            return id;
        }
        let key = (pred, Box::<[Const]>::from(tuple));
        let id = self.atoms.len() as AtomId;
        self.atoms.push(GroundAtom {
            pred,
            tuple: key.1.clone(),
            kind,
        });
        self.atom_index.insert(key, id);
        self.pred_atoms[pred as usize].push(id);
        self.rhs.push(None);
        id
    }

    pub fn coefficient(&mut self, pred: PredId, tuple: &[Const], value: Value) -> AtomId {
        self.intern(pred, tuple, AtomKind::Coefficient(value))
    }

    pub fn variable(&mut self, pred: PredId, tuple: &[Const]) -> AtomId {
        self.intern(pred, tuple, AtomKind::Variable)
    }

    /// Gives `var` an (initially empty) equation.
    pub fn ensure_equation(&mut self, var: AtomId) -> Result<(), GroundingError> {
        if self.rhs[var as usize].is_none() {
            self.rhs[var as usize] = Some(Vec::new());
            self.grow(1)?;
        }
        Ok(())
    }

    pub fn push_monomial(&mut self, head: AtomId, monomial: Vec<AtomId>) -> Result<(), GroundingError> {
        self.ensure_equation(head)?;
        let len = monomial.len();
        self.rhs[head as usize]
            .as_mut()
            .expect("equation exists")
            .push(monomial.into_boxed_slice());
        self.grow(len)
    }

    /// Removes and returns monomial `index` of `var`'s equation.
    pub fn remove_monomial(&mut self, var: AtomId, index: usize) -> Option<Monomial> {
        let ms = self.rhs.get_mut(var as usize)?.as_mut()?;
        if index >= ms.len() {
            return None;
        }
        let m = ms.remove(index);
        self.size -= m.len();
        Some(m)
    }

    fn grow(&mut self, by: usize) -> Result<(), GroundingError> {
        self.size += by;
        match self.cap {
            Some(cap) if self.size > cap => Err(GroundingError::SizeCapExceeded { cap }),
            _ => Ok(()),
        }
    }

    /// Gives every variable that lacks one an empty equation.
    pub fn finalize(&mut self) {
        for i in 0..self.atoms.len() {
            if self.atoms[i].kind == AtomKind::Variable && self.rhs[i].is_none() {
                self.rhs[i] = Some(Vec::new());
                self.size += 1;
            }
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn recompute_size(&self) -> usize {
        self.rhs
            .iter()
            .flatten()
            .map(|ms| 1 + ms.iter().map(|m| m.len()).sum::<usize>())
            .sum()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    /// Atoms of `pred` in interning order.
    pub fn atoms_of(&self, pred: PredId) -> &[AtomId] {
        &self.pred_atoms[pred as usize]
    }

    pub fn rhs(&self, var: AtomId) -> Option<&[Monomial]> {
        self.rhs[var as usize].as_deref()
    }

    pub fn has_equation(&self, var: AtomId) -> bool {
        self.rhs[var as usize].is_some()
    }

    /// Equations in atom-id order.
    pub fn equations(&self) -> impl Iterator<Item = (AtomId, &[Monomial])> {
        self.rhs
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_deref().map(|ms| (i as AtomId, ms)))
    }

    pub fn num_equations(&self) -> usize {
        self.rhs.iter().filter(|r| r.is_some()).count()
    }

    pub fn num_monomials(&self) -> usize {
        self.rhs.iter().flatten().map(Vec::len).sum()
    }

    /// Drops variables that are `𝟘` in every fixpoint because no
    /// derivation bottoms out in coefficients, together with every
    /// monomial mentioning them. Atom ids are renumbered.
    pub fn prune_unsupported(&self) -> Grounding {
        let n = self.atoms.len();
        let mut supported: Vec<bool> = self
            .atoms
            .iter()
            .map(|a| matches!(a.kind, AtomKind::Coefficient(_)))
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            for (x, ms) in self.equations() {
                if !supported[x as usize] && ms.iter().any(|m| m.iter().all(|&a| supported[a as usize])) {
                    supported[x as usize] = true;
                    changed = true;
                }
            }
        }
        let mut out = Grounding::new(self.domain.clone());
        out.cap = self.cap;
        let mut map = vec![AtomId::MAX; n];
        for (i, atom) in self.atoms.iter().enumerate() {
            if supported[i] {
                let info = &self.preds[atom.pred as usize];
                let p = out.pred(&info.name, info.arity, info.role);
                map[i] = out.intern(p, &atom.tuple, atom.kind);
            }
        }
        for (x, ms) in self.equations() {
            if !supported[x as usize] {
                continue;
            }
            let nx = map[x as usize];
            out.rhs[nx as usize] = Some(Vec::new());
            out.size += 1;
            for m in ms {
                if m.iter().all(|&a| supported[a as usize]) {
                    let nm: Box<[AtomId]> = m.iter().map(|&a| map[a as usize]).collect();
                    out.size += nm.len();
                    out.rhs[nx as usize].as_mut().expect("equation").push(nm);
                }
            }
        }
        out
    }

    /// `x_T_a_b`-style name of a variable, or `e_..`-style name of a
    /// coefficient using the given per-predicate prefix letters.
    pub fn atom_name(&self, id: AtomId, prefix: impl Fn(&str) -> String) -> String {
        let atom = &self.atoms[id as usize];
        let info = &self.preds[atom.pred as usize];
        let mut s = match atom.kind {
            AtomKind::Variable => alloc::format!("x_{}", info.name),
            AtomKind::Coefficient(_) => alloc::format!("{}_{}", prefix(&info.name), info.name),
        };
        for &c in atom.tuple.iter() {
            s.push('_');
            s.push_str(&self.domain[c as usize]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Grounding {
        let mut g = Grounding::new(vec!["a".into(), "b".into()]);
        let r = g.pred("R", 2, PredRole::Edb);
        let t = g.pred("T", 2, PredRole::Idb);
        let e = g.coefficient(r, &[0, 1], Value::trop(1.0));
        let x = g.variable(t, &[0, 1]);
        let y = g.variable(t, &[0, 0]);
        g.push_monomial(x, vec![e]).unwrap();
        g.push_monomial(x, vec![y, e]).unwrap();
        g.finalize();
        g
    }

    #[test]
    fn size_tracks_equations_and_monomials() {
        let g = tiny();
        assert_eq!(g.size(), 1 + 1 + 2 + 1);
        assert_eq!(g.size(), g.recompute_size());
        assert_eq!(g.num_equations(), 2);
        assert_eq!(g.atoms_of(1), &[1, 2]);
    }

    #[test]
    fn interning_is_idempotent() {
        let mut g = tiny();
        let t = g.pred_id("T").unwrap();
        assert_eq!(g.variable(t, &[0, 1]), 1);
        assert_eq!(g.lookup(t, &[1, 1]), None);
    }

    #[test]
    fn cap_is_enforced() {
        let mut g = Grounding::new(vec!["a".into()]).with_cap(Some(2));
        let t = g.pred("T", 1, PredRole::Idb);
        let x = g.variable(t, &[0]);
        assert!(g.push_monomial(x, vec![x]).is_ok());
        assert_eq!(
            g.push_monomial(x, vec![x]),
            Err(GroundingError::SizeCapExceeded { cap: 2 })
        );
    }

    #[test]
    fn pruning_drops_unsupported_variables() {
        let g = tiny().prune_unsupported();
        assert_eq!(g.num_equations(), 1);
        assert_eq!(g.num_monomials(), 1);
        assert_eq!(g.size(), g.recompute_size());
        assert_eq!(g.atom_name(1, |_| "e".into()), "x_T_a_b");
        assert_eq!(g.atom_name(0, |_| "e".into()), "e_R_a_b");
    }
}
