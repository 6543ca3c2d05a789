//! Cross-checks every applicable strategy and solver against
//! grounding-free evaluation.

use std::fmt::Write as _;

use groundfix_core::eval::{kleene_program, ProgramOutcome, RelationMap};
use groundfix_core::grounder::{GroundError, Strategy};
use groundfix_core::instance::Instance;
use groundfix_core::program::Program;
use groundfix_core::semiring::{SemiringError, Value};
use groundfix_core::solver::SolveError;
use thiserror::Error;

use crate::pipeline::{ground, solve, target_relation, RunConfig, SolverChoice};

pub const STRATEGIES: [Strategy; 5] = [
    Strategy::Naive,
    Strategy::Acyclic,
    Strategy::FreeConnex,
    Strategy::Linear,
    Strategy::Auto,
];

pub const SOLVERS: [SolverChoice; 3] = [SolverChoice::Rank, SolverChoice::Absorptive, SolverChoice::Kleene];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckConfig {
    pub max_iters: Option<usize>,
    pub cap: Option<usize>,
    /// Largest domain size accepted.
    pub max_domain: usize,
    /// Test hook: empty one target equation before solving.
    pub inject_fault: bool,
}

impl CheckConfig {
    pub fn new() -> Self {
        CheckConfig {
            max_domain: 12,
            ..CheckConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Agree,
    Disagree,
    /// The strategy or solver does not apply.
    NotApplicable(String),
    /// Both sides failed to converge within budget.
    Diverged,
    CapExceeded,
}

impl Cell {
    fn symbol(&self) -> &'static str {
        match self {
            Cell::Agree => "ok",
            Cell::Disagree => "DIFF",
            Cell::NotApplicable(_) => "-",
            Cell::Diverged => "div",
            Cell::CapExceeded => "cap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disagreement {
    pub strategy: Strategy,
    pub solver: SolverChoice,
    /// `T(a,b)` style ground atom.
    pub atom: String,
    pub expected: Option<String>,
    pub found: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub cells: Vec<(Strategy, SolverChoice, Cell)>,
    pub oracle_iterations: Option<usize>,
    pub first_disagreement: Option<Disagreement>,
}

impl CheckReport {
    pub fn all_agree(&self) -> bool {
        self.first_disagreement.is_none()
    }

    pub fn agreeing_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.2 == Cell::Agree).count()
    }

    /// Strategies as rows, solvers as columns.
    pub fn matrix(&self) -> String {
        let mut out = format!("{:<12}", "strategy");
        for s in SOLVERS {
            let _ = write!(out, " {:>10}", s.token());
        }
        out.push('\n');
        for st in STRATEGIES {
            let _ = write!(out, "{:<12}", st.token());
            for so in SOLVERS {
                let cell = self
                    .cells
                    .iter()
                    .find(|c| c.0 == st && c.1 == so)
                    .map_or("?", |c| c.2.symbol());
                let _ = write!(out, " {cell:>10}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("domain has {n} constants; check accepts at most {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Ground(GroundError),
    #[error(transparent)]
    Solve(SolveError),
}

pub fn check(program: &Program, instance: &Instance, cfg: &CheckConfig) -> Result<CheckReport, CheckError> {
    let n = instance.domain_size();
    if n > cfg.max_domain {
        return Err(CheckError::TooLarge { n, max: cfg.max_domain });
    }
    let sr = instance.semiring();
    let (oracle, oracle_iterations) = match kleene_program(program, instance, cfg.max_iters)? {
        ProgramOutcome::Converged { mut relations, iterations } => {
            (relations.remove(&program.target), Some(iterations))
        }
        ProgramOutcome::NonConvergence { .. } => (None, None),
    };

    let mut report = CheckReport {
        cells: Vec::new(),
        oracle_iterations,
        first_disagreement: None,
    };
    for strategy in STRATEGIES {
        let run_cfg = RunConfig {
            strategy,
            max_iters: cfg.max_iters,
            cap: cfg.cap,
            ..RunConfig::default()
        };
        let grounded = ground(program, instance, &run_cfg);
        for solver in SOLVERS {
            let (mut g, _) = match &grounded {
                Ok(x) => x.clone(),
                Err(GroundError::Cyclic { .. }) | Err(GroundError::NotApplicable { .. }) => {
                    let why = grounded.as_ref().unwrap_err().to_string();
                    report.cells.push((strategy, solver, Cell::NotApplicable(why)));
                    continue;
                }
                Err(GroundError::Grounding(_)) => {
                    report.cells.push((strategy, solver, Cell::CapExceeded));
                    continue;
                }
                Err(e) => return Err(CheckError::Ground(e.clone())),
            };
            if cfg.inject_fault {
                inject_fault(&mut g, program, oracle.as_ref());
            }
            let cfg = RunConfig { solver, ..run_cfg.clone() };
            let cell = match solve(&g, instance, &cfg) {
                Ok((_, sol)) => {
                    let got = target_relation(&g, sr, &program.target, &sol);
                    match &oracle {
                        Some(want) => match first_difference(want, &got) {
                            None => Cell::Agree,
                            Some((tuple, a, b)) => {
                                if report.first_disagreement.is_none() {
                                    report.first_disagreement = Some(Disagreement {
                                        strategy,
                                        solver,
                                        atom: format!("{}({})", program.target, instance.names(&tuple).join(",")),
                                        expected: a.map(|v| sr.format_value(&v)),
                                        found: b.map(|v| sr.format_value(&v)),
                                    });
                                }
                                Cell::Disagree
                            }
                        },
                        None => {
                            note_divergence_mismatch(&mut report, strategy, solver, &program.target);
                            Cell::Disagree
                        }
                    }
                }
                Err(SolveError::Capability { .. }) => Cell::NotApplicable(format!("{solver} needs more structure")),
                Err(SolveError::NonConvergence { .. }) if oracle.is_none() => Cell::Diverged,
                Err(SolveError::NonConvergence { .. }) => {
                    note_divergence_mismatch(&mut report, strategy, solver, &program.target);
                    Cell::Disagree
                }
                Err(e) => return Err(CheckError::Solve(e)),
            };
            report.cells.push((strategy, solver, cell));
        }
    }
    Ok(report)
}

fn note_divergence_mismatch(report: &mut CheckReport, strategy: Strategy, solver: SolverChoice, target: &str) {
    if report.first_disagreement.is_none() {
        report.first_disagreement = Some(Disagreement {
            strategy,
            solver,
            atom: format!("{target}(..)"),
            expected: None,
            found: Some("non-convergence on one side only".into()),
        });
    }
}

type Diff = (Vec<u32>, Option<Value>, Option<Value>);

fn first_difference(want: &RelationMap, got: &RelationMap) -> Option<Diff> {
    let keys: std::collections::BTreeSet<&Vec<u32>> = want.keys().chain(got.keys()).collect();
    keys.into_iter().find_map(|k| {
        let (a, b) = (want.get(k), got.get(k));
        (a != b).then(|| (k.clone(), a.copied(), b.copied()))
    })
}

/// Empties the equation of the first target variable that the oracle
/// holds non-`𝟘`, so its solved value must differ.
fn inject_fault(g: &mut groundfix_core::grounding::Grounding, program: &Program, oracle: Option<&RelationMap>) {
    let Some(p) = g.pred_id(&program.target) else { return };
    let victim = g.atoms_of(p).iter().copied().find(|&id| {
        g.has_equation(id) && oracle.is_some_and(|o| o.contains_key(&g.atom(id).tuple.to_vec()))
    });
    if let Some(x) = victim {
        while g.remove_monomial(x, 0).is_some() {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_facts, parse_program};
    use groundfix_core::semiring::Semiring;

    #[test]
    fn tc_agrees_everywhere_and_fault_is_caught() {
        let p = parse_program(include_str!("../corpus/tc.dl")).unwrap();
        let (inst, _) = parse_facts("R(a,b) = 1. R(b,c) = 2. R(c,a) = 4.", &Semiring::tropical()).unwrap();
        let r = check(&p, &inst, &CheckConfig::new()).unwrap();
        assert!(r.all_agree(), "{}", r.matrix());
        assert!(r.agreeing_cells() >= 8);
        let faulty = CheckConfig {
            inject_fault: true,
            ..CheckConfig::new()
        };
        let r = check(&p, &inst, &faulty).unwrap();
        let d = r.first_disagreement.clone().expect("fault detected");
        assert_eq!(d.found, None);
        assert!(r.matrix().contains("DIFF"));
    }

    #[test]
    fn empty_instance_agrees_trivially() {
        let p = parse_program(include_str!("../corpus/andersen.dl")).unwrap();
        let (inst, _) = parse_facts("", &Semiring::boolean()).unwrap();
        assert!(check(&p, &inst, &CheckConfig::new()).unwrap().all_agree());
    }

    #[test]
    fn large_domains_are_refused() {
        let p = parse_program(include_str!("../corpus/tc.dl")).unwrap();
        let facts: String = (0..20).map(|i| format!("R(a{i},a{}).\n", i + 1)).collect();
        let (inst, _) = parse_facts(&facts, &Semiring::boolean()).unwrap();
        assert!(matches!(check(&p, &inst, &CheckConfig::new()), Err(CheckError::TooLarge { n: 21, .. })));
    }
}
