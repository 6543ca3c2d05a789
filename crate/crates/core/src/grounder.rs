//! Grounding strategies: naive instantiation, join-tree grounding for
//! acyclic bodies and the linear construction for IDB arity at most two.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::decomposition::{gyo, Hypergraph, JoinTree, Rooted};
use crate::grounding::{AtomId, Grounding, GroundingError, PredId, PredRole};
use crate::instance::{Const, Instance, InstanceError};
use crate::program::{PredKind, Program, SumProdQuery, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Every assignment of the body variables over the active domain.
    Naive,
    /// Join-tree grounding rooted at the node sharing most head variables.
    Acyclic,
    /// Join-tree grounding rooted where the head variables are connex.
    FreeConnex,
    /// The arity-≤2 construction for linear bodies.
    Linear,
    /// Per body: free-connex, then linear, then acyclic, then naive.
    #[default]
    Auto,
}

impl Strategy {
    pub fn token(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Acyclic => "acyclic",
            Strategy::FreeConnex => "free-connex",
            Strategy::Linear => "linear",
            Strategy::Auto => "auto",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}` (expected naive | acyclic | free-connex | linear | auto)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "naive" => Strategy::Naive,
            "acyclic" => Strategy::Acyclic,
            "free-connex" => Strategy::FreeConnex,
            "linear" => Strategy::Linear,
            "auto" => Strategy::Auto,
            _ => return Err(UnknownStrategy(String::from(s))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroundOptions {
    pub strategy: Strategy,
    pub cap: Option<usize>,
    pub prune_unreachable: bool,
}

impl GroundOptions {
    pub fn new(strategy: Strategy) -> Self {
        GroundOptions {
            strategy,
            ..Default::default()
        }
    }
}

/// Which sub-case of the linear construction was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearCase {
    /// The IDB atom was a leaf or the root: plain join-tree grounding.
    Direct,
    /// The IDB subtree was replaced by one materialized relation.
    Substituted,
    /// The IDB node's children were moved to its parent.
    Reparented,
    /// Join-project chain along a path of the given length.
    Chain { path_len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyStrategy {
    Naive,
    Acyclic { root: usize },
    FreeConnex { root: usize },
    Linear { root: usize, case: LinearCase },
}

impl fmt::Display for BodyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyStrategy::Naive => f.write_str("naive"),
            BodyStrategy::Acyclic { root } => write!(f, "acyclic (root atom {root})"),
            BodyStrategy::FreeConnex { root } => write!(f, "free-connex (root atom {root})"),
            BodyStrategy::Linear { root, case } => write!(f, "linear (root atom {root}, {case:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyReport {
    pub rule: String,
    pub body: usize,
    pub strategy: BodyStrategy,
    /// The GYO join tree, or the cyclic residue.
    pub tree: Result<JoinTree, Vec<usize>>,
    /// Grounding size added by this body.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundReport {
    pub bodies: Vec<BodyReport>,
    /// Size before unreachable equations were pruned.
    pub unpruned_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("body {body} of `{rule}` is cyclic (residual atoms {residue:?})")]
    Cyclic {
        rule: String,
        body: usize,
        residue: Vec<usize>,
    },
    #[error("strategy `{strategy}` does not apply to body {body} of `{rule}`: {reason}")]
    NotApplicable {
        strategy: Strategy,
        rule: String,
        body: usize,
        reason: &'static str,
    },
}

/// Grounds `program` on `instance`. Each IDB variable reachable from a
/// monomial has an equation; annotations live in coefficient atoms.
pub fn ground_program(
    program: &Program,
    instance: &Instance,
    opts: GroundOptions,
) -> Result<(Grounding, GroundReport), GroundError> {
    instance.check_against(program)?;
    let strategy = opts.strategy;
    let mut ctx = Ctx {
        inst: instance,
        g: Grounding::new(instance.domain().to_vec()).with_cap(opts.cap),
    };
    for sym in program.edb_order() {
        ctx.g.pred(sym, program.edb_schema[sym], PredRole::Edb);
    }
    for rule in &program.rules {
        ctx.g.pred(&rule.head, rule.arity, PredRole::Idb);
    }
    if strategy == Strategy::Naive {
        for rule in &program.rules {
            let p = ctx.g.pred_id(&rule.head).expect("registered");
            let vars: Vec<Var> = (0..rule.arity as Var).collect();
            let mut failed = Ok(());
            for_each_assignment(instance.domain_size(), &vars, &mut vec![UNBOUND; rule.arity], &mut |asg| {
                if failed.is_ok() {
                    let x = ctx.g.variable(p, asg);
                    failed = ctx.g.ensure_equation(x);
                }
            });
            failed?;
        }
    }

    let mut report = GroundReport::default();
    for (ri, rule) in program.rules.iter().enumerate() {
        let head = ctx.g.pred_id(&rule.head).expect("registered");
        for (bi, body) in rule.bodies.iter().enumerate() {
            let before = ctx.g.size();
            let tree = gyo(&Hypergraph::of_query(body)).map_err(|c| c.residue);
            let strat = ground_body(&mut ctx, program, strategy, (ri, bi), body, head, &tree)?;
            report.bodies.push(BodyReport {
                rule: rule.head.clone(),
                body: bi,
                strategy: strat,
                tree,
                size: ctx.g.size() - before,
            });
        }
    }
    let mut g = ctx.g;
    g.finalize();
    report.unpruned_size = g.size();
    if opts.prune_unreachable {
        g = g.prune_unsupported();
    }
    Ok((g, report))
}

fn ground_body(
    ctx: &mut Ctx<'_>,
    program: &Program,
    strategy: Strategy,
    (ri, bi): (usize, usize),
    body: &SumProdQuery,
    head: PredId,
    tree: &Result<JoinTree, Vec<usize>>,
) -> Result<BodyStrategy, GroundError> {
    let rule = || program.rules[ri].head.clone();
    let prefix = format!("__u_r{ri}_b{bi}");
    let head_vars = body.head_vars();
    let nodes = ctx.factors(body);
    let linear_ok = program.arity_bound <= 2 && body.idb_atoms().count() <= 1;
    let tree = match (strategy, tree) {
        (Strategy::Naive, _) | (Strategy::Auto, Err(_)) => {
            ctx.naive(body, head)?;
            return Ok(BodyStrategy::Naive);
        }
        (_, Err(residue)) => {
            return Err(GroundError::Cyclic {
                rule: rule(),
                body: bi,
                residue: residue.clone(),
            })
        }
        (_, Ok(tree)) => tree,
    };
    let not_applicable = |reason| GroundError::NotApplicable {
        strategy,
        rule: rule(),
        body: bi,
        reason,
    };
    let fc_root = tree.free_connex_root(&head_vars);
    let chosen = match strategy {
        Strategy::FreeConnex => Some(fc_root.ok_or_else(|| not_applicable("no free-connex root"))?),
        Strategy::Linear if !linear_ok => {
            return Err(not_applicable("needs a linear body and IDB arity at most 2"))
        }
        Strategy::Linear => None,
        Strategy::Auto if fc_root.is_some() => fc_root,
        Strategy::Auto if linear_ok => None,
        _ => Some(tree.choose_root(&head_vars)),
    };
    match chosen {
        Some(root) => {
            ctx.alg3(&nodes, &tree.adj, root, head, &head_vars, &prefix, body.num_vars())?;
            Ok(if fc_root == Some(root) && strategy != Strategy::Acyclic {
                BodyStrategy::FreeConnex { root }
            } else {
                BodyStrategy::Acyclic { root }
            })
        }
        None => {
            let (root, case) = ctx.linear(body, tree, nodes, head, (ri, bi))?;
            Ok(BodyStrategy::Linear { root, case })
        }
    }
}

const UNBOUND: Const = Const::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Edb(PredId),
    /// An IDB atom of the program; enumerated over the active domain.
    Idb(PredId),
    /// A fresh relation whose equations are produced later.
    Pending(PredId),
    /// A fresh relation whose equations are complete; only tuples with an
    /// equation can be non-`𝟘`.
    Done(PredId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Factor {
    source: Source,
    args: Vec<Var>,
}

impl Factor {
    fn bag(&self) -> Vec<Var> {
        sorted(self.args.iter().copied())
    }
}

fn sorted(it: impl IntoIterator<Item = Var>) -> Vec<Var> {
    let s: BTreeSet<Var> = it.into_iter().collect();
    s.into_iter().collect()
}

fn tuple_of(args: &[Var], asg: &[Const]) -> Vec<Const> {
    args.iter().map(|&v| asg[v as usize]).collect()
}

/// Calls `f` for every assignment of `vars` over `0..n`, in
/// lexicographic order; other entries of `asg` are left untouched.
fn for_each_assignment(n: usize, vars: &[Var], asg: &mut [Const], f: &mut dyn FnMut(&[Const])) {
    if vars.is_empty() {
        f(asg);
        return;
    }
    if n == 0 {
        return;
    }
    for &v in vars {
        asg[v as usize] = 0;
    }
    loop {
        f(asg);
        let mut i = vars.len();
        loop {
            if i == 0 {
                for &v in vars {
                    asg[v as usize] = UNBOUND;
                }
                return;
            }
            i -= 1;
            let slot = &mut asg[vars[i] as usize];
            *slot += 1;
            if (*slot as usize) < n {
                break;
            }
            *slot = 0;
        }
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    g: Grounding,
}

impl Ctx<'_> {
    fn factors(&mut self, body: &SumProdQuery) -> Vec<Factor> {
        body.atoms
            .iter()
            .map(|a| {
                let p = self.g.pred_id(&a.pred).expect("registered");
                Factor {
                    source: match a.kind {
                        PredKind::Edb => Source::Edb(p),
                        PredKind::Idb => Source::Idb(p),
                    },
                    args: a.args.clone(),
                }
            })
            .collect()
    }

    fn fresh(&mut self, name: &str, arity: usize) -> PredId {
        self.g.pred(name, arity, PredRole::Fresh)
    }

    /// Rows of a driving factor: consistent tuples over its argument list.
    fn rows(&self, f: &Factor) -> Vec<Vec<Const>> {
        match f.source {
            Source::Edb(p) => {
                let name = &self.g.pred_info(p).name;
                let Some(rel) = self.inst.relation(name) else {
                    return Vec::new();
                };
                rel.facts
                    .keys()
                    .filter(|t| consistent(&f.args, t))
                    .cloned()
                    .collect()
            }
            Source::Idb(_) | Source::Pending(_) => {
                let bag = f.bag();
                let width = bag.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
                let mut asg = vec![UNBOUND; width];
                let mut out = Vec::new();
                for_each_assignment(self.inst.domain_size(), &bag, &mut asg, &mut |a| {
                    out.push(tuple_of(&f.args, a));
                });
                out
            }
            Source::Done(p) => self
                .g
                .atoms_of(p)
                .iter()
                .filter(|&&a| self.g.has_equation(a))
                .map(|&a| self.g.atom(a).tuple.to_vec())
                .filter(|t| consistent(&f.args, t))
                .collect(),
        }
    }

    /// The ground atom of `f` under `tuple`; `None` when it is `𝟘`.
    fn atom_for(&mut self, f: &Factor, tuple: &[Const]) -> Option<AtomId> {
        match f.source {
            Source::Edb(p) => {
                let v = *self.inst.value(&self.g.pred_info(p).name, tuple)?;
                Some(self.g.coefficient(p, tuple, v))
            }
            Source::Idb(p) | Source::Pending(p) => Some(self.g.variable(p, tuple)),
            Source::Done(p) => self.g.lookup(p, tuple).filter(|&a| self.g.has_equation(a)),
        }
    }

    /// One join-project step: for each row of `driver` and each domain
    /// assignment of `extra`, emits `head(head_vars) += driver ⊗ others`.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        driver: &Factor,
        others: &[Factor],
        extra: &[Var],
        head: PredId,
        head_vars: &[Var],
        num_vars: usize,
    ) -> Result<(), GroundError> {
        let n = self.inst.domain_size();
        let mut asg = vec![UNBOUND; num_vars];
        for row in self.rows(driver) {
            for (&v, &c) in driver.args.iter().zip(&row) {
                asg[v as usize] = c;
            }
            let Some(d) = self.atom_for(driver, &row) else {
                continue;
            };
            let mut result = Ok(());
            for_each_assignment(n, extra, &mut asg, &mut |a| {
                if result.is_ok() {
                    result = self.emit(d, others, head, head_vars, a);
                }
            });
            result?;
        }
        Ok(())
    }

    fn emit(
        &mut self,
        driver: AtomId,
        others: &[Factor],
        head: PredId,
        head_vars: &[Var],
        asg: &[Const],
    ) -> Result<(), GroundError> {
        let mut mono = Vec::with_capacity(others.len() + 1);
        mono.push(driver);
        for f in others {
            match self.atom_for(f, &tuple_of(&f.args, asg)) {
                Some(a) => mono.push(a),
                None => return Ok(()),
            }
        }
        let x = self.g.variable(head, &tuple_of(head_vars, asg));
        self.g.push_monomial(x, mono)?;
        Ok(())
    }

    /// Join-tree grounding: every node emits into a fresh relation over
    /// the variables it shares with its parent plus the head variables
    /// below it.
    #[allow(clippy::too_many_arguments)]
    fn alg3(
        &mut self,
        nodes: &[Factor],
        adj: &[Vec<usize>],
        root: usize,
        head: PredId,
        head_vars: &[Var],
        prefix: &str,
        num_vars: usize,
    ) -> Result<(), GroundError> {
        let rooted = Rooted::new(adj, root);
        let bags: Vec<Vec<Var>> = nodes.iter().map(Factor::bag).collect();
        let mut below: Vec<BTreeSet<Var>> = vec![BTreeSet::new(); nodes.len()];
        for &u in rooted.order.iter().rev() {
            let mut h: BTreeSet<Var> = bags[u].iter().copied().filter(|v| head_vars.contains(v)).collect();
            for &c in &rooted.children[u] {
                h.extend(below[c].iter().copied());
            }
            below[u] = h;
        }
        let mut work = vec![(root, head, head_vars.to_vec())];
        while let Some((s, hp, hv)) = work.pop() {
            let mut others = Vec::new();
            let mut scope: BTreeSet<Var> = bags[s].iter().copied().collect();
            for &t in &rooted.children[s] {
                let e = sorted(
                    bags[s]
                        .iter()
                        .copied()
                        .filter(|v| bags[t].contains(v))
                        .chain(below[t].iter().copied()),
                );
                let p = self.fresh(&format!("{prefix}_e{s}_{t}"), e.len());
                scope.extend(e.iter().copied());
                others.push(Factor {
                    source: Source::Pending(p),
                    args: e.clone(),
                });
                work.push((t, p, e));
            }
            let extra: Vec<Var> = scope.into_iter().filter(|v| !bags[s].contains(v)).collect();
            self.step(&nodes[s], &others, &extra, hp, &hv, num_vars)?;
        }
        Ok(())
    }

    /// Backtracking over all assignments, pruning on absent EDB facts.
    fn naive(&mut self, body: &SumProdQuery, head: PredId) -> Result<(), GroundError> {
        let nv = body.num_vars();
        let nodes = self.factors(body);
        // checks[i]: EDB atoms fully bound once variable i - 1 is assigned
        let mut checks: Vec<Vec<usize>> = vec![Vec::new(); nv + 1];
        for (i, f) in nodes.iter().enumerate() {
            if matches!(f.source, Source::Edb(_)) {
                let last = f.args.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
                checks[last].push(i);
            }
        }
        let mut asg = vec![UNBOUND; nv];
        self.naive_rec(&nodes, &checks, head, &body.head_vars(), &mut asg, 0)
    }

    fn naive_rec(
        &mut self,
        nodes: &[Factor],
        checks: &[Vec<usize>],
        head: PredId,
        head_vars: &[Var],
        asg: &mut [Const],
        depth: usize,
    ) -> Result<(), GroundError> {
        for &i in &checks[depth] {
            let f = &nodes[i];
            let Source::Edb(p) = f.source else { unreachable!() };
            if self.inst.value(&self.g.pred_info(p).name, &tuple_of(&f.args, asg)).is_none() {
                return Ok(());
            }
        }
        if depth == asg.len() {
            let mut mono = Vec::with_capacity(nodes.len());
            for f in nodes {
                let a = self.atom_for(f, &tuple_of(&f.args, asg)).expect("checked");
                mono.push(a);
            }
            let x = self.g.variable(head, &tuple_of(head_vars, asg));
            self.g.push_monomial(x, mono)?;
            return Ok(());
        }
        for c in 0..self.inst.domain_size() as Const {
            asg[depth] = c;
            self.naive_rec(nodes, checks, head, head_vars, asg, depth + 1)?;
        }
        asg[depth] = UNBOUND;
        Ok(())
    }

    /// The construction for linear bodies over IDB arity at most two. The
    /// subtree below the IDB atom is collapsed into a relation over at most
    /// two variables before join-tree grounding of the rest.
    fn linear(
        &mut self,
        body: &SumProdQuery,
        tree: &JoinTree,
        nodes: Vec<Factor>,
        head: PredId,
        (ri, bi): (usize, usize),
    ) -> Result<(usize, LinearCase), GroundError> {
        let nv = body.num_vars();
        let hv = body.head_vars();
        let prefix = format!("__u_r{ri}_b{bi}");
        let lprefix = format!("__l_r{ri}_b{bi}");
        let bags: Vec<Vec<Var>> = nodes.iter().map(Factor::bag).collect();
        let overlap = |i: usize| bags[i].iter().filter(|v| hv.contains(v)).count();
        let idb = nodes.iter().position(|f| matches!(f.source, Source::Idb(_)));
        let edb_root = (0..nodes.len())
            .filter(|&i| Some(i) != idb && overlap(i) > 0)
            .max_by_key(|&i| (overlap(i), core::cmp::Reverse(i)));
        let r = edb_root.or(idb).unwrap_or(0);
        let rooted = tree.root_at(r);
        let Some(t) = idb.filter(|&t| t != r && !rooted.children[t].is_empty()) else {
            self.alg3(&nodes, &tree.adj, r, head, &hv, &prefix, nv)?;
            return Ok((r, LinearCase::Direct));
        };

        let x = hv.iter().copied().find(|v| bags[r].contains(v));
        let y = x.and_then(|x| hv.iter().copied().find(|&v| v != x));
        let in_subtree: BTreeSet<Var> = rooted.subtree(t).iter().flat_map(|&u| bags[u].iter().copied()).collect();
        let y = match y {
            Some(y) if !bags[t].contains(&y) && in_subtree.contains(&y) => y,
            _ => {
                let (sub, sub_adj) = extract(&nodes, &rooted, t, None);
                let p = self.fresh(&format!("{lprefix}_sub{t}"), bags[t].len());
                self.alg3(&sub, &sub_adj, 0, p, &bags[t], &format!("{prefix}_sub{t}"), nv)?;
                let leaf = Factor {
                    source: Source::Done(p),
                    args: bags[t].clone(),
                };
                let (main, main_adj, root) = replace(&nodes, &rooted, t, leaf);
                self.alg3(&main, &main_adj, root, head, &hv, &prefix, nv)?;
                return Ok((r, LinearCase::Substituted));
            }
        };

        let p = rooted.parent[t].expect("t is not the root");
        if bags[t].iter().all(|v| bags[p].contains(v)) {
            let mut adj = vec![Vec::new(); nodes.len()];
            for u in 0..nodes.len() {
                if let Some(mut q) = rooted.parent[u] {
                    if q == t {
                        q = p;
                    }
                    adj[u].push(q);
                    adj[q].push(u);
                }
            }
            self.alg3(&nodes, &adj, r, head, &hv, &prefix, nv)?;
            return Ok((r, LinearCase::Reparented));
        }

        let z: Option<Var> = bags[t].iter().copied().find(|v| bags[p].contains(v));
        let path = rooted.path_down(t, rooted.top(&bags, y));
        let k = path.len() - 1;

        // factors hanging off t outside the path
        let mut t_sides = Vec::new();
        for &c in rooted.children[t].iter().filter(|&&c| c != path[1]) {
            let e = sorted(bags[t].iter().copied().filter(|v| bags[c].contains(v)));
            let pc = self.fresh(&format!("{lprefix}_side{c}"), e.len());
            let (sub, sub_adj) = extract(&nodes, &rooted, c, None);
            self.alg3(&sub, &sub_adj, 0, pc, &e, &format!("{prefix}_side{c}"), nv)?;
            t_sides.push(Factor {
                source: Source::Done(pc),
                args: e,
            });
        }

        // path nodes with their side subtrees folded in
        let mut drivers = Vec::with_capacity(k);
        for i in 1..=k {
            let u = path[i];
            let next = path.get(i + 1).copied();
            if rooted.children[u].iter().all(|&c| Some(c) == next) {
                drivers.push(nodes[u].clone());
                continue;
            }
            let pu = self.fresh(&format!("{lprefix}_mat{u}"), bags[u].len());
            let (sub, sub_adj) = extract(&nodes, &rooted, u, next);
            self.alg3(&sub, &sub_adj, 0, pu, &bags[u], &format!("{prefix}_mat{u}"), nv)?;
            drivers.push(Factor {
                source: Source::Done(pu),
                args: bags[u].clone(),
            });
        }

        let with_z = |vs: &mut Vec<Var>| {
            if let Some(z) = z {
                vs.push(z);
            }
            sorted(vs.iter().copied())
        };
        let k0 = with_z(&mut bags[t].iter().copied().filter(|v| bags[path[1]].contains(v)).collect());
        let mut prev = if t_sides.is_empty() && k0 == bags[t] {
            nodes[t].clone()
        } else {
            let p0 = self.fresh(&format!("{lprefix}_j0"), k0.len());
            self.step(&nodes[t], &t_sides, &[], p0, &k0, nv)?;
            Factor {
                source: Source::Done(p0),
                args: k0,
            }
        };
        for i in 1..=k {
            let u = path[i];
            let mut f: Vec<Var> = if i < k {
                bags[u].iter().copied().filter(|v| bags[path[i + 1]].contains(v)).collect()
            } else {
                vec![y]
            };
            let ki = with_z(&mut f);
            let extra: Vec<Var> = z.filter(|z| !bags[u].contains(z)).into_iter().collect();
            let pi = self.fresh(&format!("{lprefix}_j{i}"), ki.len());
            self.step(&drivers[i - 1], &[prev], &extra, pi, &ki, nv)?;
            prev = Factor {
                source: Source::Done(pi),
                args: ki,
            };
        }
        let (main, main_adj, root) = replace(&nodes, &rooted, t, prev);
        self.alg3(&main, &main_adj, root, head, &hv, &prefix, nv)?;
        Ok((r, LinearCase::Chain { path_len: k }))
    }
}

fn consistent(args: &[Var], tuple: &[Const]) -> bool {
    args.iter().enumerate().all(|(i, &v)| {
        args[..i]
            .iter()
            .position(|&w| w == v)
            .is_none_or(|j| tuple[j] == tuple[i])
    })
}

/// The subtree under `top` (minus the branch at `skip`), re-indexed so
/// that `top` becomes node 0.
fn extract(nodes: &[Factor], rooted: &Rooted, top: usize, skip: Option<usize>) -> (Vec<Factor>, Vec<Vec<usize>>) {
    let keep: Vec<usize> = match skip {
        Some(s) => {
            let dropped: BTreeSet<usize> = rooted.subtree(s).into_iter().collect();
            rooted.subtree(top).into_iter().filter(|u| !dropped.contains(u)).collect()
        }
        None => rooted.subtree(top),
    };
    let index = |u: usize| keep.iter().position(|&k| k == u).expect("kept");
    let mut adj = vec![Vec::new(); keep.len()];
    for (i, &u) in keep.iter().enumerate().skip(1) {
        let q = index(rooted.parent[u].expect("below top"));
        adj[i].push(q);
        adj[q].push(i);
    }
    (keep.iter().map(|&u| nodes[u].clone()).collect(), adj)
}

/// Replaces the subtree under `t` by `leaf`, attached to `t`'s parent.
/// Returns the new nodes, adjacency and the index of the old root.
fn replace(nodes: &[Factor], rooted: &Rooted, t: usize, leaf: Factor) -> (Vec<Factor>, Vec<Vec<usize>>, usize) {
    let gone: BTreeSet<usize> = rooted.subtree(t).into_iter().collect();
    let mut keep: Vec<usize> = (0..nodes.len()).filter(|u| !gone.contains(u)).collect();
    keep.push(t);
    let index = |u: usize| keep.iter().position(|&k| k == u).expect("kept");
    let mut adj = vec![Vec::new(); keep.len()];
    for (i, &u) in keep.iter().enumerate() {
        if let Some(q) = rooted.parent[u] {
            let q = index(q);
            adj[i].push(q);
            adj[q].push(i);
        }
    }
    let mut out: Vec<Factor> = keep[..keep.len() - 1].iter().map(|&u| nodes[u].clone()).collect();
    out.push(leaf);
    (out, adj, index(rooted.root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_are_lexicographic() {
        let mut asg = vec![UNBOUND; 3];
        let mut seen = Vec::new();
        for_each_assignment(2, &[0, 2], &mut asg, &mut |a| seen.push((a[0], a[2])));
        assert_eq!(seen, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(asg, vec![UNBOUND; 3]);
    }

    #[test]
    fn repeated_arguments_filter_rows() {
        assert!(consistent(&[0, 0, 1], &[3, 3, 4]));
        assert!(!consistent(&[0, 0, 1], &[3, 2, 4]));
    }

    #[test]
    fn strategy_tokens_round_trip() {
        for s in [
            Strategy::Naive,
            Strategy::Acyclic,
            Strategy::FreeConnex,
            Strategy::Linear,
            Strategy::Auto,
        ] {
            assert_eq!(s.token().parse::<Strategy>(), Ok(s));
        }
        assert!("fast".parse::<Strategy>().is_err());
    }
}
