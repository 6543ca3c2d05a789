use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groundfix::bench::{bench, csv, slope_lines, slopes, BenchConfig};
use groundfix::check::{check, CheckConfig, CheckError};
use groundfix::corpus;
use groundfix::format;
use groundfix::generate::{random_instance, rng, Family};
use groundfix::parse::{parse_facts, parse_program, ParseError};
use groundfix::pipeline::{ground, run, RunConfig, RunError, SolverChoice};
use groundfix_core::classify::classify;
use groundfix_core::grounder::{GroundError, GroundReport, Strategy};
use groundfix_core::grounding::GroundingError;
use groundfix_core::instance::{Instance, Warning};
use groundfix_core::program::Program;
use groundfix_core::semiring::Semiring;
use groundfix_core::solver::SolveError;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  I/O error
  2  parse or input error (including bad flags)
  3  strategy or solver not applicable (missing capability, cyclic body)
  4  grounding size cap exceeded
  5  Kleene iteration did not converge
  6  check found a disagreement";

#[derive(Parser)]
#[command(name = "groundfix", version, about = "Datalog over semirings via grounding and fixpoint solving", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program on a fact file and print the target relation.
    Run(RunArgs),
    /// Print the ground program.
    Ground(GroundArgs),
    /// Compare every strategy and solver against grounding-free evaluation.
    Check(CheckArgs),
    /// Measure grounding sizes on generated graphs; prints CSV.
    Bench(BenchArgs),
    /// Print the syntactic classes of a program.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct Common {
    /// Program file, or `corpus:<name>` for a bundled program.
    #[arg(long)]
    program: String,
    /// Semiring: boolean, tropical, naturals, access or set:<k1,k2,..>.
    #[arg(long, default_value = "boolean", value_parser = parse_semiring)]
    semiring: Semiring,
    /// Grounding strategy: naive, acyclic, free-connex, linear or auto.
    #[arg(long, default_value = "auto")]
    strategy: Strategy,
    /// Stop with exit code 4 once the grounding grows past this size.
    #[arg(long)]
    cap_size: Option<usize>,
    /// Drop equations that cannot become non-zero.
    #[arg(long)]
    prune_unreachable: bool,
    /// Describe the per-body strategies and statistics on stderr.
    #[arg(long)]
    explain: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RunOutputFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroundOutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Fact file.
    #[arg(long)]
    facts: PathBuf,
    /// Solver: auto, rank, absorptive or kleene.
    #[arg(long, default_value = "auto")]
    solver: SolverChoice,
    /// Iteration budget for Kleene iteration.
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum, default_value = "tsv")]
    output: RunOutputFormat,
    /// Include wall time in the statistics.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GroundArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    facts: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    output: GroundOutputFormat,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Fact file; a random instance is generated when absent.
    #[arg(long)]
    facts: Option<PathBuf>,
    /// Seed for the random instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Domain size of the random instance.
    #[arg(long, default_value_t = 5)]
    domain: usize,
    /// Expected facts per relation, as a fraction of domain².
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Iteration budget for the reference evaluation and Kleene solving.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Refuse instances with more constants than this.
    #[arg(long, default_value_t = 12)]
    max_domain: usize,
    /// Corrupt one target equation before solving (self-test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Graph family: path, random-graph or grid.
    #[arg(long, default_value = "random-graph")]
    family: Family,
    /// Comma-separated schedule of sizes.
    #[arg(long, default_value = "1024,2048,4096,8192,16384", value_parser = parse_sizes)]
    sizes: Sizes,
    /// Base seed; row i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver run on each grounding.
    #[arg(long, default_value = "auto")]
    solver: SolverChoice,
    /// Add a wall-time column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    program: String,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

/// Comma-separated sizes; the empty string is the empty schedule.
fn parse_sizes(s: &str) -> Result<Sizes, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e| format!("bad size `{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

fn parse_semiring(s: &str) -> Result<Semiring, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(1, e.to_string())
    }
}

fn parse_failure(file: &str, e: ParseError) -> Failure {
    match e.line() {
        Some(_) => Failure::new(2, format!("{file}:{e}")),
        None => Failure::new(2, format!("{file}: {e}")),
    }
}

fn ground_failure(e: &GroundError) -> Failure {
    let code = match e {
        GroundError::Grounding(GroundingError::SizeCapExceeded { .. }) => 4,
        GroundError::Instance(_) => 2,
        GroundError::Cyclic { .. } | GroundError::NotApplicable { .. } => 3,
    };
    Failure::new(code, e.to_string())
}

fn run_failure(e: &RunError) -> Failure {
    match e {
        RunError::Ground(g) => ground_failure(g),
        RunError::Solve(s) => {
            let code = match s {
                SolveError::Capability { .. } => 3,
                SolveError::NonConvergence { .. } => 5,
                SolveError::Semiring(_) => 2,
            };
            Failure::new(code, s.to_string())
        }
    }
}

fn load_program(arg: &str) -> Result<Program, Failure> {
    let text = match arg.strip_prefix("corpus:") {
        Some(name) => corpus::get(name)
            .ok_or_else(|| Failure::new(2, format!("no corpus program named `{name}`")))?
            .source
            .to_string(),
        None => fs::read_to_string(arg).map_err(|e| Failure::new(1, format!("{arg}: {e}")))?,
    };
    parse_program(&text).map_err(|e| parse_failure(arg, e))
}

fn load_facts(path: &Path, sr: &Semiring, program: &Program) -> Result<Instance, Failure> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{shown}: {e}")))?;
    let (inst, mut warnings) = parse_facts(&text, sr).map_err(|e| parse_failure(&shown, e))?;
    warnings.extend(inst.check_against(program).map_err(|e| Failure::new(2, format!("{shown}: {e}")))?);
    for w in warnings {
        match w {
            Warning::DuplicateFact { pred, args } => {
                eprintln!("warning: {shown}: duplicate fact {pred}({}) combined with ⊕", args.join(","))
            }
            Warning::UnusedRelation(p) => eprintln!("warning: {shown}: relation `{p}` is not used by the program"),
        }
    }
    Ok(inst)
}

fn explain_bodies(report: &GroundReport) -> String {
    let mut out = String::new();
    for b in &report.bodies {
        let tree = match &b.tree {
            Ok(t) => {
                let mut edges: Vec<String> = Vec::new();
                for (u, ns) in t.adj.iter().enumerate() {
                    edges.extend(ns.iter().filter(|&&v| u < v).map(|v| format!("{u}-{v}")));
                }
                format!("join tree [{}]", edges.join(" "))
            }
            Err(residue) => format!("cyclic, residue {residue:?}"),
        };
        out.push_str(&format!("{}/{}: {}; {}; size {}\n", b.rule, b.body, b.strategy, tree, b.size));
    }
    out
}

fn run_config(c: &Common) -> RunConfig {
    RunConfig {
        strategy: c.strategy,
        cap: c.cap_size,
        prune_unreachable: c.prune_unreachable,
        ..RunConfig::default()
    }
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let program = load_program(&a.common.program)?;
    let inst = load_facts(&a.facts, &a.common.semiring, &program)?;
    let cfg = RunConfig {
        solver: a.solver,
        max_iters: a.max_iters,
        timing: a.timing,
        ..run_config(&a.common)
    };
    let out = run(&program, &inst, &cfg).map_err(|e| run_failure(&e))?;
    let text = match a.output {
        RunOutputFormat::Tsv => format::relation_tsv(&out.target, &out.relation, &inst),
        RunOutputFormat::Json => format::relation_json(&out.target, &out.relation, &inst, Some(&out.stats)),
    };
    io::stdout().write_all(text.as_bytes())?;
    if a.common.explain {
        eprint!("{}{}", explain_bodies(&out.report), format::stats_text(&out.stats));
    }
    Ok(())
}

fn cmd_ground(a: GroundArgs) -> Result<(), Failure> {
    let program = load_program(&a.common.program)?;
    let sr = a.common.semiring.clone();
    let inst = load_facts(&a.facts, &sr, &program)?;
    let (g, report) = ground(&program, &inst, &run_config(&a.common)).map_err(|e| ground_failure(&e))?;
    let text = match a.output {
        GroundOutputFormat::Text => format::grounding_text(&g, &sr),
        GroundOutputFormat::Json => format::grounding_json(&g, &sr, Some(&report)),
    };
    io::stdout().write_all(text.as_bytes())?;
    if a.common.explain {
        eprintln!("{}size: {}", explain_bodies(&report), g.size());
    }
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let program = load_program(&a.common.program)?;
    let sr = a.common.semiring.clone();
    let inst = match &a.facts {
        Some(p) => load_facts(p, &sr, &program)?,
        None => random_instance(&program, &sr, a.domain, a.density, &mut rng(a.seed)),
    };
    let cfg = CheckConfig {
        max_iters: a.max_iters,
        cap: a.common.cap_size,
        max_domain: a.max_domain,
        inject_fault: a.inject_fault,
    };
    let report = check(&program, &inst, &cfg).map_err(|e| match e {
        CheckError::TooLarge { .. } | CheckError::Semiring(_) => Failure::new(2, e.to_string()),
        CheckError::Ground(g) => ground_failure(&g),
        CheckError::Solve(s) => run_failure(&RunError::Solve(s)),
    })?;
    let mut out = format!("m = {}, n = {}\n", inst.num_facts(), inst.domain_size());
    out.push_str(&report.matrix());
    io::stdout().write_all(out.as_bytes())?;
    if a.common.explain {
        for (st, so, cell) in &report.cells {
            if let groundfix::check::Cell::NotApplicable(why) = cell {
                eprintln!("{st} × {so}: {why}");
            }
        }
    }
    match report.first_disagreement {
        None => Ok(()),
        Some(d) => Err(Failure::new(
            6,
            format!(
                "{} × {}: {} expected {}, found {}",
                d.strategy,
                d.solver,
                d.atom,
                d.expected.as_deref().unwrap_or("0"),
                d.found.as_deref().unwrap_or("0")
            ),
        )),
    }
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let program = load_program(&a.common.program)?;
    let cfg = BenchConfig {
        family: a.family,
        sizes: a.sizes.0,
        semiring: a.common.semiring.clone(),
        seed: a.seed,
        run: RunConfig {
            solver: a.solver,
            timing: a.timing,
            ..run_config(&a.common)
        },
    };
    let rows = bench(&program, &cfg);
    let name = a.common.program.strip_prefix("corpus:").unwrap_or(&a.common.program);
    let mut out = csv(name, cfg.family, &rows);
    if !rows.is_empty() {
        out.push_str(&slope_lines(&slopes(&rows)));
    }
    io::stdout().write_all(out.as_bytes())?;
    if a.common.explain {
        for r in &rows {
            if let groundfix::bench::RowStatus::Failed(e) = &r.status {
                eprintln!("size {}: {e}", r.size);
            }
        }
    }
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<(), Failure> {
    let program = load_program(&a.program)?;
    let c = classify(&program);
    let out = format!(
        "monadic={} linear={} chain={} acyclic={} free-connex={}\n",
        c.monadic, c.linear, c.chain, c.rulewise_acyclic, c.rulewise_free_connex
    );
    io::stdout().write_all(out.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(a) => cmd_run(a),
        Command::Ground(a) => cmd_ground(a),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Classify(a) => cmd_classify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
