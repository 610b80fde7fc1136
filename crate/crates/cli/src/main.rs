mod ceei_cmd;
mod gc_cmd;
mod reduce_cmd;
mod report;
mod roundtrip_cmd;
mod solve_cmd;
mod verify_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ppadforge::solvers::SolverBudget;

use report::{render, CliResult, Ctx, Outcome};

/// Generalized circuits, polymatrix and bimatrix reductions, equilibrium
/// verification and course-allocation checks. Every run emits a JSON report.
#[derive(Parser)]
#[command(name = "ppadforge", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Worker threads for parallel sections (does not change results).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized steps; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap; overrides PPADFORGE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true)]
    max_support: Option<usize>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized circuit checks and brute-force solving.
    #[command(subcommand)]
    Gc(gc_cmd::GcCmd),
    /// Reductions between circuits and games.
    #[command(subcommand)]
    Reduce(reduce_cmd::ReduceCmd),
    /// Equilibrium and partition verifiers.
    #[command(subcommand)]
    Verify(verify_cmd::VerifyCmd),
    /// Greedy partition of a bipartite graph.
    Partition(reduce_cmd::PartitionArgs),
    /// Bimatrix and polymatrix solvers.
    #[command(subcommand)]
    Solve(solve_cmd::SolveCmd),
    /// Course allocation analytics.
    #[command(subcommand)]
    Ceei(ceei_cmd::CeeiCmd),
    /// End-to-end pipelines.
    #[command(subcommand)]
    Roundtrip(roundtrip_cmd::RoundtripCmd),
}

/// Flags first, then PPADFORGE_BUDGET, then built-in defaults.
fn resolve_budget(g: &Global, ctx: &mut Ctx) -> CliResult<SolverBudget> {
    let mut b = SolverBudget::default();
    let mut source = "default";
    if let Ok(v) = std::env::var("PPADFORGE_BUDGET") {
        b.action_cap = v
            .trim()
            .parse()
            .map_err(|_| ppadforge::Error::Input(format!("PPADFORGE_BUDGET={v:?} is not a positive integer")))?;
        source = "env";
    }
    if let Some(cap) = g.budget {
        b.action_cap = cap;
        source = "flag";
    }
    if let Some(k) = g.max_support {
        b.max_support = k;
    }
    if let Some(t) = g.iterations {
        b.iterations = t;
    }
    b.validate()?;
    ctx.param("budget", b);
    ctx.param("budget_source", source);
    Ok(b)
}

fn dispatch(cmd: Command, ctx: &mut Ctx, budget: &SolverBudget) -> CliResult<Outcome> {
    match cmd {
        Command::Gc(c) => gc_cmd::run(c, ctx, budget),
        Command::Reduce(c) => reduce_cmd::run(c, ctx),
        Command::Verify(c) => verify_cmd::run(c, ctx),
        Command::Partition(a) => reduce_cmd::partition(a, ctx),
        Command::Solve(c) => solve_cmd::run(c, ctx, budget),
        Command::Ceei(c) => ceei_cmd::run(c, ctx),
        Command::Roundtrip(c) => roundtrip_cmd::run(c, ctx, budget),
    }
}

fn main() -> ExitCode {
    // argv[0] is normalized so reports do not depend on the install path
    let argv: Vec<String> = std::iter::once("ppadforge".to_string()).chain(std::env::args().skip(1)).collect();
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("cannot configure {t} threads: {e}");
            return ExitCode::from(report::EXIT_INPUT as u8);
        }
    }
    let mut ctx = Ctx::new(argv, cli.global.seed);
    let outcome = match resolve_budget(&cli.global, &mut ctx).and_then(|b| dispatch(cli.cmd, &mut ctx, &b)) {
        Ok(o) => o,
        Err(e) => {
            ctx.note(e.to_string());
            Outcome::new(e.verdict(), e.exit_code(), serde_json::Value::Null)
        }
    };
    let code = outcome.exit_code;
    eprintln!("{} (exit {code})", outcome.verdict);
    let text = render(&ctx.finish(outcome));
    match &cli.global.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cannot write report {}: {e}", path.display());
                return ExitCode::from(report::EXIT_INPUT as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
