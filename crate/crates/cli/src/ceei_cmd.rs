use std::path::{Path, PathBuf};

use clap::Subcommand;
use ppadforge::ceei::{
    build_not_gadget, clearing_error, gini, gini_closed_form, gini_lowerbound_witness, gini_trapezoid,
    normalize_budgets, verify_not_gadget, AllocationSolution, CourseAllocationProblem, IncomeDistribution, NotGadget,
    NotVerdict,
};
use serde_json::json;

use crate::report::{CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum CeeiCmd {
    /// Gini coefficient of an income list, or the lower-bound witness.
    Gini {
        /// `{"incomes":[...]}`.
        #[arg(long = "in", required_unless_present = "witness")]
        input: Option<PathBuf>,
        /// Build the two-level witness distribution instead of reading one.
        #[arg(long)]
        witness: bool,
        #[arg(long, default_value_t = 0.2)]
        epsp: f64,
        #[arg(long, default_value_t = 0.1)]
        deltap: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Emit the NOT gadget problem for `n_x` students.
    Gadget {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a solution on the NOT gadget embedded in a problem.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        epsp: f64,
        #[arg(long)]
        alpha: usize,
        #[arg(long, default_value_t = 0)]
        input_course: usize,
        #[arg(long, default_value_t = 1)]
        output_course: usize,
        /// Gadget student count; defaults to the leading run of pair-only students.
        #[arg(long)]
        nx: Option<usize>,
    },
    /// Rescale prices and budgets so the lower median budget is 1 + ε'/2.
    Normalize {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        epsp: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(ctx: &mut Ctx, problem: &Path, solution: &Path) -> CliResult<(CourseAllocationProblem, AllocationSolution)> {
    let p: CourseAllocationProblem = ctx.read_json("problem", problem)?;
    p.validate()?;
    let s: AllocationSolution = ctx.read_json("solution", solution)?;
    s.validate(&p)?;
    Ok((p, s))
}

pub fn run(cmd: CeeiCmd, ctx: &mut Ctx) -> CliResult<Outcome> {
    match cmd {
        CeeiCmd::Gini { input, witness, epsp, deltap, n } => {
            if witness {
                ctx.param("eps_prime", epsp);
                ctx.param("delta_prime", deltap);
                ctx.param("n", n);
                let w = gini_lowerbound_witness(epsp, deltap, n)?;
                return Ok(Outcome::check(w.pass, "pass", "fail", &w));
            }
            let d: IncomeDistribution = ctx.read_json("incomes", input.as_ref().expect("clap enforces --in"))?;
            d.validate()?;
            let result = json!({
                "gini": gini(&d)?,
                "trapezoid": gini_trapezoid(&d)?,
                "closed_form": gini_closed_form(&d)?,
                "lorenz_points": d.lorenz_points()?,
            });
            Ok(Outcome::new("ok", 0, result))
        }
        CeeiCmd::Gadget { nx, out } => {
            ctx.param("nx", nx);
            let g = build_not_gadget(nx)?;
            if let Some(p) = out {
                ctx.write_json("problem", &p, &g.problem)?;
            }
            let result = json!({
                "problem": g.problem,
                "input_course": g.input_course,
                "output_course": g.output_course,
                "allowance": g.allowance,
            });
            Ok(Outcome::new("ok", 0, result))
        }
        CeeiCmd::Verify { problem, solution, epsp, alpha, input_course, output_course, nx } => {
            let (p, s) = load(ctx, &problem, &solution)?;
            ctx.param("eps_prime", epsp);
            ctx.param("alpha_star", alpha);
            let g = NotGadget::from_problem(p, input_course, output_course, nx)?;
            ctx.param("nx", g.n_x);
            let r = verify_not_gadget(&g, &s, epsp, alpha)?;
            let clearing = clearing_error(&g.problem, &s)?;
            let verdict = r.verdict;
            let result = json!({"gadget": r, "clearing": clearing});
            let name = match verdict {
                NotVerdict::GateSatisfied => "GATE_SATISFIED",
                NotVerdict::InequalityWitness => "INEQUALITY_WITNESS",
                NotVerdict::Violation => "VIOLATION",
            };
            Ok(Outcome::new(name, if verdict == NotVerdict::Violation { 1 } else { 0 }, result))
        }
        CeeiCmd::Normalize { problem, solution, epsp, out } => {
            let (p, s) = load(ctx, &problem, &solution)?;
            ctx.param("eps_prime", epsp);
            let n = normalize_budgets(&p, &s, epsp)?;
            ctx.write_json("solution", &out, &n)?;
            Ok(Outcome::new("ok", 0, &n))
        }
    }
}
