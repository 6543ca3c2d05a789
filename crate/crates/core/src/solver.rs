//! Least-fixpoint solvers: the rank-bounded worklist, the absorptive
//! best-first loop and Kleene iteration.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use thiserror::Error;

use crate::canonical::{NodeId, TwoCanonical};
use crate::grounding::{AtomKind, Grounding};
use crate::semiring::{OrderKey, Semiring, SemiringError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    Rank,
    Absorptive,
    Kleene,
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverPath::Rank => "rank",
            SolverPath::Absorptive => "absorptive",
            SolverPath::Kleene => "kleene",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub popped: usize,
    pub equation_visits: usize,
    pub semiring_ops: usize,
    /// Kleene only: applications of the consequence operator.
    pub iterations: usize,
    /// Absorptive only: priority-queue insertions.
    pub queue_pushes: usize,
    /// Largest visit count of any single equation.
    pub max_equation_visits: usize,
}

/// Values per node (or per atom for Kleene on a grounding).
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<Value>,
    pub stats: SolveStats,
    pub path: SolverPath,
    pub trace: Option<Trace>,
}

impl Solution {
    /// Value of a grounding atom; atom ids are node ids.
    pub fn value(&self, atom: u32) -> &Value {
        &self.values[atom as usize]
    }
}

/// Instrumentation recorded on request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    /// Every change `h(y) ← v`, in order.
    pub updates: Vec<(NodeId, Value)>,
    /// Absorptive only: frozen nodes with their value when popped.
    pub pops: Vec<(NodeId, Value)>,
    /// Per-equation visit counters.
    pub visits: Vec<u32>,
    /// Kleene only: the full assignment after each iteration.
    pub chain: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the {solver} solver needs a semiring with {needs}; `{semiring}` does not declare it")]
    Capability {
        solver: SolverPath,
        needs: &'static str,
        semiring: &'static str,
    },
    #[error("Kleene iteration did not converge within {max_iters} iterations")]
    NonConvergence { max_iters: usize },
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub record: bool,
}

/// Worklist solver for semirings of finite rank `r`; each equation is
/// visited at most `2r` times.
pub fn solve_rank(sys: &TwoCanonical, sr: &Semiring, opts: SolveOptions) -> Result<Solution, SolveError> {
    if sr.capabilities().finite_rank.is_none() {
        return Err(SolveError::Capability {
            solver: SolverPath::Rank,
            needs: "finite rank",
            semiring: sr.name(),
        });
    }
    let mut h = sys.initial(sr);
    let mut stats = SolveStats::default();
    let mut visits = vec![0u32; sys.equations().len()];
    let mut updates = Vec::new();
    let mut queued = vec![false; sys.num_nodes()];
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    for (i, node) in sys.nodes().iter().enumerate() {
        if node.is_constant() {
            queue.push_back(i as NodeId);
            queued[i] = true;
        }
    }
    while let Some(x) = queue.pop_front() {
        queued[x as usize] = false;
        stats.popped += 1;
        for &ei in sys.dependents(x) {
            let eq = &sys.equations()[ei as usize];
            visits[ei as usize] += 1;
            stats.equation_visits += 1;
            stats.semiring_ops += 1;
            let v = sys.eval(sr, eq, &h)?;
            if v != h[eq.lhs as usize] {
                h[eq.lhs as usize] = v;
                if opts.record {
                    updates.push((eq.lhs, v));
                }
                if !queued[eq.lhs as usize] {
                    queued[eq.lhs as usize] = true;
                    queue.push_back(eq.lhs);
                }
            }
        }
    }
    stats.max_equation_visits = visits.iter().copied().max().unwrap_or(0) as usize;
    Ok(Solution {
        values: h,
        stats,
        path: SolverPath::Rank,
        trace: opts.record.then(|| Trace {
            updates,
            visits,
            ..Trace::default()
        }),
    })
}

/// Best-first solver for absorptive semirings whose natural order is
/// total: pops the ⊑-largest unfrozen node, freezes it and propagates to
/// unfrozen dependents. Ties go to the smallest node id.
pub fn solve_absorptive(sys: &TwoCanonical, sr: &Semiring, opts: SolveOptions) -> Result<Solution, SolveError> {
    let caps = sr.capabilities();
    if !caps.is_absorptive || !caps.is_total_order {
        return Err(SolveError::Capability {
            solver: SolverPath::Absorptive,
            needs: "an absorptive, totally ordered natural order",
            semiring: sr.name(),
        });
    }
    let key = |v: &Value| sr.order_key(v).expect("total order has keys");
    let mut h = sys.initial(sr);
    let mut stats = SolveStats::default();
    let mut visits = vec![0u32; sys.equations().len()];
    let mut trace = Trace::default();
    let mut frozen: Vec<bool> = sys.nodes().iter().map(|n| n.is_constant()).collect();
    let mut heap: BinaryHeap<(OrderKey, Reverse<NodeId>)> = BinaryHeap::new();

    for (ei, eq) in sys.equations().iter().enumerate() {
        visits[ei] += 1;
        stats.equation_visits += 1;
        stats.semiring_ops += 1;
        let v = sys.eval(sr, eq, &h)?;
        if v != h[eq.lhs as usize] && opts.record {
            trace.updates.push((eq.lhs, v));
        }
        h[eq.lhs as usize] = v;
    }
    for eq in sys.equations() {
        heap.push((key(&h[eq.lhs as usize]), Reverse(eq.lhs)));
        stats.queue_pushes += 1;
    }

    while let Some((k, Reverse(x))) = heap.pop() {
        if frozen[x as usize] || k != key(&h[x as usize]) {
            continue;
        }
        frozen[x as usize] = true;
        stats.popped += 1;
        if opts.record {
            trace.pops.push((x, h[x as usize]));
        }
        for &ei in sys.dependents(x) {
            let eq = &sys.equations()[ei as usize];
            if frozen[eq.lhs as usize] {
                continue;
            }
            visits[ei as usize] += 1;
            stats.equation_visits += 1;
            stats.semiring_ops += 1;
            let v = sys.eval(sr, eq, &h)?;
            if v != h[eq.lhs as usize] {
                h[eq.lhs as usize] = v;
                if opts.record {
                    trace.updates.push((eq.lhs, v));
                }
                heap.push((key(&v), Reverse(eq.lhs)));
                stats.queue_pushes += 1;
            }
        }
    }
    stats.max_equation_visits = visits.iter().copied().max().unwrap_or(0) as usize;
    trace.visits = visits;
    Ok(Solution {
        values: h,
        stats,
        path: SolverPath::Absorptive,
        trace: opts.record.then_some(trace),
    })
}

/// A system `x = f(x)` that Kleene iteration can run on.
pub trait FixpointSystem {
    fn num_nodes(&self) -> usize;
    /// Constants at their values, variables at `𝟘`.
    fn initial(&self, sr: &Semiring) -> Vec<Value>;
    /// Nodes that have an equation.
    fn variables(&self) -> Vec<u32>;
    /// Right-hand side of `x` under `h`, and the number of operations used.
    fn eval(&self, sr: &Semiring, x: u32, h: &[Value]) -> Result<(Value, usize), SemiringError>;
}

impl FixpointSystem for Grounding {
    fn num_nodes(&self) -> usize {
        self.num_atoms()
    }

    fn initial(&self, sr: &Semiring) -> Vec<Value> {
        self.atoms()
            .iter()
            .map(|a| match a.kind {
                AtomKind::Coefficient(v) => v,
                AtomKind::Variable => sr.zero(),
            })
            .collect()
    }

    fn variables(&self) -> Vec<u32> {
        self.equations().map(|(x, _)| x).collect()
    }

    fn eval(&self, sr: &Semiring, x: u32, h: &[Value]) -> Result<(Value, usize), SemiringError> {
        let mut sum = sr.zero();
        let mut ops = 0;
        for m in self.rhs(x).unwrap_or(&[]) {
            let mut prod = sr.one();
            for &a in m.iter() {
                prod = sr.times(&prod, &h[a as usize])?;
            }
            sum = sr.plus(&sum, &prod)?;
            ops += m.len() + 1;
        }
        Ok((sum, ops))
    }
}

impl FixpointSystem for TwoCanonical {
    fn num_nodes(&self) -> usize {
        TwoCanonical::num_nodes(self)
    }

    fn initial(&self, sr: &Semiring) -> Vec<Value> {
        TwoCanonical::initial(self, sr)
    }

    fn variables(&self) -> Vec<u32> {
        self.equations().iter().map(|e| e.lhs).collect()
    }

    fn eval(&self, sr: &Semiring, x: u32, h: &[Value]) -> Result<(Value, usize), SemiringError> {
        let eq = self.equation_of(x).expect("variable has an equation");
        Ok((TwoCanonical::eval(self, sr, eq, h)?, 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KleeneOptions {
    /// Defaults to `10 · #variables + 10`.
    pub max_iters: Option<usize>,
    pub record_chain: bool,
}

pub fn default_max_iters(num_vars: usize) -> usize {
    10 * num_vars + 10
}

#[derive(Debug, Clone, PartialEq)]
pub enum KleeneOutcome {
    Converged(Solution),
    NonConvergence { max_iters: usize, last: Vec<Value> },
}

/// Simultaneous iteration `h ← f(h)` from `⊥` until nothing changes.
/// `iterations` counts applications of `f`, including the final one
/// that confirms the fixpoint.
pub fn kleene<S: FixpointSystem + ?Sized>(
    sys: &S,
    sr: &Semiring,
    opts: KleeneOptions,
) -> Result<KleeneOutcome, SemiringError> {
    let vars = sys.variables();
    let max_iters = opts.max_iters.unwrap_or_else(|| default_max_iters(vars.len())).max(1);
    let mut h = sys.initial(sr);
    let mut next = h.clone();
    let mut stats = SolveStats::default();
    let mut chain = Vec::new();
    for _ in 0..max_iters {
        stats.iterations += 1;
        let mut changed = false;
        for &x in &vars {
            let (v, ops) = sys.eval(sr, x, &h)?;
            stats.semiring_ops += ops;
            stats.equation_visits += 1;
            if v != h[x as usize] {
                changed = true;
            }
            next[x as usize] = v;
        }
        core::mem::swap(&mut h, &mut next);
        if opts.record_chain {
            chain.push(h.clone());
        }
        if !changed {
            return Ok(KleeneOutcome::Converged(Solution {
                values: h,
                stats,
                path: SolverPath::Kleene,
                trace: opts.record_chain.then(|| Trace {
                    chain,
                    ..Trace::default()
                }),
            }));
        }
        next.clone_from(&h);
    }
    Ok(KleeneOutcome::NonConvergence { max_iters, last: h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutoConfig {
    /// Largest rank for which the rank solver is preferred.
    pub rank_threshold: u32,
    pub max_iters: Option<usize>,
    pub record: bool,
}

impl Default for AutoConfig {
    fn default() -> Self {
        AutoConfig {
            rank_threshold: 8,
            max_iters: None,
            record: false,
        }
    }
}

/// Solver that [`solve_auto`] dispatches to: the rank solver for small
/// finite rank, else the absorptive solver when it applies, else Kleene
/// iteration on the grounding.
pub fn auto_path(sr: &Semiring, rank_threshold: u32) -> SolverPath {
    let caps = sr.capabilities();
    match caps.finite_rank {
        Some(r) if r <= rank_threshold => SolverPath::Rank,
        _ if caps.is_absorptive && caps.is_total_order => SolverPath::Absorptive,
        _ => SolverPath::Kleene,
    }
}

pub fn solve_auto(g: &Grounding, sr: &Semiring, cfg: AutoConfig) -> Result<Solution, SolveError> {
    let opts = SolveOptions { record: cfg.record };
    match auto_path(sr, cfg.rank_threshold) {
        SolverPath::Rank => solve_rank(&TwoCanonical::from_grounding(g), sr, opts),
        SolverPath::Absorptive => solve_absorptive(&TwoCanonical::from_grounding(g), sr, opts),
        SolverPath::Kleene => solve_kleene(g, sr, cfg.max_iters),
    }
}

/// Kleene iteration with non-convergence reported as an error.
pub fn solve_kleene<S: FixpointSystem + ?Sized>(
    sys: &S,
    sr: &Semiring,
    max_iters: Option<usize>,
) -> Result<Solution, SolveError> {
    let opts = KleeneOptions {
        max_iters,
        record_chain: false,
    };
    match kleene(sys, sr, opts)? {
        KleeneOutcome::Converged(s) => Ok(s),
        KleeneOutcome::NonConvergence { max_iters, .. } => Err(SolveError::NonConvergence { max_iters }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::PredRole;

    /// Ground system of the two-hop example:
    /// x_ab = e_ab ⊕ x_aa f_a e_ab, x_aa = 𝟘, x_ac = x_ab f_b e_bc, x_bc = e_bc.
    fn two_hop(sr: &Semiring, e_ab: Value, f: Value, e_bc: Value) -> (Grounding, [u32; 4]) {
        let _ = sr;
        let mut g = Grounding::new(vec!["a".into(), "b".into(), "c".into()]);
        let r = g.pred("R", 2, PredRole::Edb);
        let u = g.pred("U", 1, PredRole::Edb);
        let t = g.pred("T", 2, PredRole::Idb);
        let eab = g.coefficient(r, &[0, 1], e_ab);
        let ebc = g.coefficient(r, &[1, 2], e_bc);
        let fa = g.coefficient(u, &[0], f);
        let fb = g.coefficient(u, &[1], f);
        let xab = g.variable(t, &[0, 1]);
        let xaa = g.variable(t, &[0, 0]);
        let xac = g.variable(t, &[0, 2]);
        let xbc = g.variable(t, &[1, 2]);
        g.push_monomial(xab, vec![eab]).unwrap();
        g.push_monomial(xab, vec![xaa, fa, eab]).unwrap();
        g.push_monomial(xac, vec![xab, fb, ebc]).unwrap();
        g.push_monomial(xbc, vec![ebc]).unwrap();
        g.finalize();
        (g, [xab, xaa, xac, xbc])
    }

    #[test]
    fn kleene_on_two_hop_system() {
        let sr = Semiring::tropical();
        let (g, [xab, xaa, xac, xbc]) = two_hop(&sr, Value::trop(1.0), Value::trop(1.0), Value::trop(2.0));
        let KleeneOutcome::Converged(s) = kleene(&g, &sr, KleeneOptions::default()).unwrap() else {
            panic!("diverged")
        };
        assert_eq!(*s.value(xab), Value::trop(1.0));
        assert_eq!(*s.value(xac), Value::trop(4.0));
        assert_eq!(*s.value(xbc), Value::trop(2.0));
        assert_eq!(*s.value(xaa), sr.zero());
        assert!(s.stats.iterations <= 4);
    }

    #[test]
    fn all_solvers_agree_on_two_hop_system() {
        let sr = Semiring::tropical();
        let (g, _) = two_hop(&sr, Value::trop(1.0), Value::trop(1.0), Value::trop(2.0));
        let c = TwoCanonical::from_grounding(&g);
        let a = solve_absorptive(&c, &sr, SolveOptions::default()).unwrap();
        let k = solve_kleene(&g, &sr, None).unwrap();
        assert_eq!(a.values[..g.num_atoms()], k.values[..]);
        let kc = solve_kleene(&c, &sr, None).unwrap();
        assert_eq!(kc.values[..g.num_atoms()], k.values[..]);
    }

    #[test]
    fn rank_solver_rejects_infinite_rank() {
        let (g, _) = two_hop(&Semiring::tropical(), Value::trop(1.0), Value::trop(1.0), Value::trop(2.0));
        let c = TwoCanonical::from_grounding(&g);
        assert!(matches!(
            solve_rank(&c, &Semiring::tropical(), SolveOptions::default()),
            Err(SolveError::Capability { solver: SolverPath::Rank, .. })
        ));
        assert!(matches!(
            solve_absorptive(&c, &Semiring::naturals(), SolveOptions::default()),
            Err(SolveError::Capability { .. })
        ));
    }

    #[test]
    fn boolean_rank_solver_respects_visit_bound() {
        let sr = Semiring::boolean();
        let t = Value::Bool(true);
        let (g, [xab, xaa, xac, _]) = two_hop(&sr, t, t, t);
        let c = TwoCanonical::from_grounding(&g);
        let s = solve_rank(&c, &sr, SolveOptions { record: true }).unwrap();
        assert_eq!(*s.value(xab), t);
        assert_eq!(*s.value(xac), t);
        assert_eq!(*s.value(xaa), Value::Bool(false));
        assert!(s.stats.max_equation_visits <= 2);
    }

    #[test]
    fn empty_system_costs_nothing() {
        let g = Grounding::new(Vec::new());
        let c = TwoCanonical::from_grounding(&g);
        let s = solve_rank(&c, &Semiring::boolean(), SolveOptions::default()).unwrap();
        assert_eq!(s.stats.semiring_ops, 0);
    }

    #[test]
    fn naturals_self_loop_diverges() {
        let sr = Semiring::naturals();
        let mut g = Grounding::new(vec!["a".into()]);
        let r = g.pred("R", 1, PredRole::Edb);
        let t = g.pred("T", 1, PredRole::Idb);
        let e = g.coefficient(r, &[0], Value::Nat(1));
        let x = g.variable(t, &[0]);
        g.push_monomial(x, vec![x]).unwrap();
        g.push_monomial(x, vec![e]).unwrap();
        assert!(matches!(
            solve_auto(&g, &sr, AutoConfig::default()),
            Err(SolveError::NonConvergence { max_iters: 20 })
        ));
    }

    #[test]
    fn auto_dispatch() {
        let (g, _) = two_hop(&Semiring::boolean(), Value::Bool(true), Value::Bool(true), Value::Bool(true));
        assert_eq!(solve_auto(&g, &Semiring::boolean(), AutoConfig::default()).unwrap().path, SolverPath::Rank);
        let (g, _) = two_hop(&Semiring::tropical(), Value::trop(1.0), Value::trop(1.0), Value::trop(2.0));
        assert_eq!(
            solve_auto(&g, &Semiring::tropical(), AutoConfig::default()).unwrap().path,
            SolverPath::Absorptive
        );
    }
}
