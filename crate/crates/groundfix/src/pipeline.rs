//! Parse-free end-to-end evaluation: ground, canonicalize, solve.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use groundfix_core::canonical::TwoCanonical;
use groundfix_core::eval::RelationMap;
use groundfix_core::grounder::{ground_program, GroundError, GroundOptions, GroundReport, Strategy};
use groundfix_core::grounding::{AtomKind, Grounding, GroundingError};
use groundfix_core::instance::Instance;
use groundfix_core::program::Program;
use groundfix_core::semiring::Semiring;
use groundfix_core::solver::{
    auto_path, solve_absorptive, solve_kleene, solve_rank, Solution, SolveError, SolveOptions, SolverPath,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Rank,
    Absorptive,
    Kleene,
}

impl SolverChoice {
    pub const ALL: [SolverChoice; 4] = [
        SolverChoice::Auto,
        SolverChoice::Rank,
        SolverChoice::Absorptive,
        SolverChoice::Kleene,
    ];

    pub fn token(self) -> &'static str {
        match self {
            SolverChoice::Auto => "auto",
            SolverChoice::Rank => "rank",
            SolverChoice::Absorptive => "absorptive",
            SolverChoice::Kleene => "kleene",
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown solver `{0}` (expected auto, rank, absorptive or kleene)")]
pub struct UnknownSolver(pub String);

impl FromStr for SolverChoice {
    type Err = UnknownSolver;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverChoice::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| UnknownSolver(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub solver: SolverChoice,
    pub max_iters: Option<usize>,
    pub cap: Option<usize>,
    pub prune_unreachable: bool,
    /// Largest finite rank for which `auto` picks the rank solver.
    pub rank_threshold: u32,
    /// Record solver traces.
    pub record: bool,
    /// Measure wall time. Off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: Strategy::Auto,
            solver: SolverChoice::Auto,
            max_iters: None,
            cap: None,
            prune_unreachable: false,
            rank_threshold: 8,
            record: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub m: usize,
    pub n: usize,
    pub grounding_size: usize,
    pub canonical_size: usize,
    pub equations: usize,
    pub canonical_equations: usize,
    /// One entry per rule body, `Head/<body>: <strategy>`.
    pub strategies: Vec<String>,
    pub solver: String,
    pub popped: usize,
    pub equation_visits: usize,
    pub semiring_ops: usize,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl RunError {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, RunError::Ground(GroundError::Grounding(GroundingError::SizeCapExceeded { .. })))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub target: String,
    /// Non-`𝟘` target tuples.
    pub relation: RelationMap,
    pub grounding: Grounding,
    pub report: GroundReport,
    pub canonical: Option<TwoCanonical>,
    pub solution: Solution,
    pub stats: StatsReport,
}

/// Grounds `program` on `instance` with the configured strategy.
pub fn ground(program: &Program, instance: &Instance, cfg: &RunConfig) -> Result<(Grounding, GroundReport), GroundError> {
    let opts = GroundOptions {
        strategy: cfg.strategy,
        cap: cfg.cap,
        prune_unreachable: cfg.prune_unreachable,
    };
    ground_program(program, instance, opts)
}

pub fn run(program: &Program, instance: &Instance, cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let start = cfg.timing.then(Instant::now);
    let (grounding, report) = ground(program, instance, cfg)?;
    let (canonical, solution) = solve(&grounding, instance, cfg)?;
    let relation = target_relation(&grounding, instance.semiring(), &program.target, &solution);
    let canon = canonical.clone().unwrap_or_else(|| TwoCanonical::from_grounding(&grounding));
    let stats = StatsReport {
        m: instance.num_facts(),
        n: instance.domain_size(),
        grounding_size: grounding.size(),
        canonical_size: canon.size(),
        equations: grounding.num_equations(),
        canonical_equations: canon.equations().len(),
        strategies: report
            .bodies
            .iter()
            .map(|b| format!("{}/{}: {}", b.rule, b.body, b.strategy))
            .collect(),
        solver: solution.path.to_string(),
        popped: solution.stats.popped,
        equation_visits: solution.stats.equation_visits,
        semiring_ops: solution.stats.semiring_ops,
        iterations: solution.stats.iterations,
        wall_ms: start.map(|s| s.elapsed().as_secs_f64() * 1e3),
    };
    Ok(RunOutput {
        target: program.target.clone(),
        relation,
        grounding,
        report,
        canonical,
        solution,
        stats,
    })
}

/// Solves a grounding with the configured solver. The canonical system is
/// returned when the chosen solver built one.
pub fn solve(
    grounding: &Grounding,
    instance: &Instance,
    cfg: &RunConfig,
) -> Result<(Option<TwoCanonical>, Solution), SolveError> {
    let sr = instance.semiring();
    let path = match cfg.solver {
        SolverChoice::Auto => auto_path(sr, cfg.rank_threshold),
        SolverChoice::Rank => SolverPath::Rank,
        SolverChoice::Absorptive => SolverPath::Absorptive,
        SolverChoice::Kleene => SolverPath::Kleene,
    };
    let opts = SolveOptions { record: cfg.record };
    match path {
        SolverPath::Kleene => Ok((None, solve_kleene(grounding, sr, cfg.max_iters)?)),
        SolverPath::Rank => {
            let c = TwoCanonical::from_grounding(grounding);
            let s = solve_rank(&c, sr, opts)?;
            Ok((Some(c), s))
        }
        SolverPath::Absorptive => {
            let c = TwoCanonical::from_grounding(grounding);
            let s = solve_absorptive(&c, sr, opts)?;
            Ok((Some(c), s))
        }
    }
}

/// Non-`𝟘` values of the variables of `pred`.
pub fn target_relation(grounding: &Grounding, sr: &Semiring, pred: &str, solution: &Solution) -> RelationMap {
    let mut out = BTreeMap::new();
    let Some(p) = grounding.pred_id(pred) else {
        return out;
    };
    for &id in grounding.atoms_of(p) {
        let atom = grounding.atom(id);
        let v = solution.value(id);
        if atom.kind == AtomKind::Variable && !sr.is_zero(v) {
            out.insert(atom.tuple.to_vec(), *v);
        }
    }
    out
}
