use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use ppadforge::gcircuit::{
    brute_force_search, is_satisfied, validate_circuit, violated_fraction, violated_gates, Assignment,
    GeneralizedCircuit, Tolerance,
};
use ppadforge::solvers::SolverBudget;
use serde_json::json;

use crate::report::{CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum GcCmd {
    /// Structural validation (arity, ζ range, unique outputs, known nodes).
    Validate {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// (ε,δ)-satisfaction of an assignment.
    Check {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        assign: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// First satisfying assignment on the 1/m grid.
    Solve {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = 4)]
        grid: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct TolArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

pub fn load_circuit(ctx: &mut Ctx, path: &Path) -> CliResult<GeneralizedCircuit> {
    let c: GeneralizedCircuit = ctx.read_json("circuit", path)?;
    if let Some(v) = validate_circuit(&c).first() {
        return Err(ppadforge::Error::Input(format!("invalid circuit: {}", v.detail)).into());
    }
    Ok(c)
}

pub fn run(cmd: GcCmd, ctx: &mut Ctx, budget: &SolverBudget) -> CliResult<Outcome> {
    match cmd {
        GcCmd::Validate { circuit } => {
            let c: GeneralizedCircuit = ctx.read_json("circuit", &circuit)?;
            let violations = validate_circuit(&c);
            let result = json!({"nodes": c.nodes.len(), "gates": c.gates.len(), "violations": violations});
            Ok(Outcome::check(violations.is_empty(), "valid", "invalid", result))
        }
        GcCmd::Check { circuit, assign, tol } => {
            let c = load_circuit(ctx, &circuit)?;
            let a: Assignment = ctx.read_json("assignment", &assign)?;
            let t = Tolerance::new(tol.eps, tol.delta)?;
            ctx.param("tolerance", t);
            let result = json!({
                "violated_fraction": violated_fraction(&c, &a, t.eps)?,
                "violated_gates": violated_gates(&c, &a, t.eps)?,
            });
            Ok(Outcome::check(is_satisfied(&c, &a, t)?, "satisfied", "not_satisfied", result))
        }
        GcCmd::Solve { circuit, grid, tol, out } => {
            let c = load_circuit(ctx, &circuit)?;
            let t = Tolerance::new(tol.eps, tol.delta)?;
            ctx.param("tolerance", t);
            ctx.param("grid", grid);
            match brute_force_search(&c, grid, t, budget.action_cap)? {
                Some(a) => {
                    if let Some(p) = out {
                        ctx.write_json("assignment", &p, &a)?;
                    }
                    let vf = violated_fraction(&c, &a, t.eps)?;
                    Ok(Outcome::new("found", 0, json!({"assignment": a, "violated_fraction": vf})))
                }
                None => Ok(Outcome::new("not_found", 1, json!({"assignment": null}))),
            }
        }
    }
}
