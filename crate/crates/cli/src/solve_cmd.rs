use std::path::{Path, PathBuf};

use clap::Subcommand;
use ppadforge::games::{regrets, BimatrixGame, MixedPair, MixedProfile, PolymatrixGame};
use ppadforge::instances::rng;
use ppadforge::solvers::{
    fictitious_play_value, grid_eps_ne, polymatrix_brd, small_support_search, support_enumeration, SolverBudget,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::report::{CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum SolveCmd {
    /// All equilibria by support enumeration (supports up to --max-support).
    Support {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All ε-equilibria on the 1/m grid.
    Grid {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First ε-equilibrium among k-uniform strategies of increasing k.
    Lmm {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value bracket of a constant-sum game by fictitious play.
    Fp {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smoothed best-response dynamics on a polymatrix game.
    Brd {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        iters: Option<usize>,
        /// Starting profile; drawn uniformly from the seed when absent.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_game(ctx: &mut Ctx, path: &Path) -> CliResult<BimatrixGame> {
    let g: BimatrixGame = ctx.read_json("game", path)?;
    g.validate()?;
    Ok(g)
}

fn certified(g: &BimatrixGame, p: &MixedPair, extra: Value) -> CliResult<Value> {
    let (rr, rc) = regrets(g, &p.x, &p.y)?;
    let mut cert = json!({"row_regret": rr, "col_regret": rc});
    if let (Value::Object(c), Value::Object(e)) = (&mut cert, extra) {
        c.extend(e);
    }
    Ok(json!({"x": p.x, "y": p.y, "certificate": cert}))
}

fn emit(ctx: &mut Ctx, out: Option<PathBuf>, v: &Value) -> CliResult<()> {
    if let Some(p) = out {
        ctx.write_json("solution", &p, v)?;
    }
    Ok(())
}

fn listing(ctx: &mut Ctx, g: &BimatrixGame, pairs: &[MixedPair], extra: Value, out: Option<PathBuf>) -> CliResult<Outcome> {
    let items = pairs.iter().map(|p| certified(g, p, extra.clone())).collect::<CliResult<Vec<_>>>()?;
    let v = Value::Array(items);
    emit(ctx, out, &v)?;
    let result = json!({"count": pairs.len(), "equilibria": v});
    Ok(Outcome::check(!pairs.is_empty(), "found", "not_found", result))
}

pub fn run(cmd: SolveCmd, ctx: &mut Ctx, budget: &SolverBudget) -> CliResult<Outcome> {
    match cmd {
        SolveCmd::Support { game, out } => {
            let g = load_game(ctx, &game)?;
            let found = support_enumeration(&g, budget)?;
            listing(ctx, &g, &found, json!({"eps": 0.0}), out)
        }
        SolveCmd::Grid { game, m, eps, out } => {
            let g = load_game(ctx, &game)?;
            ctx.param("m", m);
            ctx.param("eps", eps);
            let found = grid_eps_ne(&g, m, eps, budget)?;
            listing(ctx, &g, &found, json!({"eps": eps, "m": m}), out)
        }
        SolveCmd::Lmm { game, eps, out } => {
            let g = load_game(ctx, &game)?;
            ctx.param("eps", eps);
            let r = small_support_search(&g, eps, budget)?;
            match &r.pair {
                Some(p) => {
                    let v = certified(&g, p, json!({"eps": eps, "k": r.k, "k_target": r.k_target}))?;
                    emit(ctx, out, &v)?;
                    Ok(Outcome::new("found", 0, v))
                }
                None if r.cap_hit => {
                    ctx.note(format!("enumeration cap reached at k = {}", r.k));
                    Ok(Outcome::new("budget_refusal", 3, &r))
                }
                None => Ok(Outcome::new("not_found", 1, &r)),
            }
        }
        SolveCmd::Fp { game, iters, out } => {
            let g = load_game(ctx, &game)?;
            let iters = iters.unwrap_or(budget.iterations);
            ctx.param("iters", iters);
            if g.is_constant_sum(1e-12).is_none() {
                ctx.note("game is not constant-sum; the bracket bounds the row player's maxmin only");
            }
            let b = fictitious_play_value(&g, iters)?;
            let v = json!({"certificate": b});
            emit(ctx, out, &v)?;
            Ok(Outcome::new("ok", 0, v))
        }
        SolveCmd::Brd { game, iters, init, out } => {
            let g: PolymatrixGame = ctx.read_json("game", &game)?;
            g.validate(usize::MAX)?;
            let iters = iters.unwrap_or(budget.iterations);
            ctx.param("iters", iters);
            let start = match init {
                Some(p) => MixedProfile::new(ctx.read_json::<MixedProfile>("init", &p)?.p)?,
                None => {
                    let mut r = rng(ctx.seed());
                    MixedProfile { p: (0..g.players).map(|_| r.gen_range(0.0..=1.0)).collect() }
                }
            };
            let o = polymatrix_brd(&g, &start, iters)?;
            let v = json!({"p": o.profile.p, "certificate": {"regrets": o.regrets, "max_regret": o.max_regret}});
            emit(ctx, out, &v)?;
            Ok(Outcome::new("ok", 0, v))
        }
    }
}
