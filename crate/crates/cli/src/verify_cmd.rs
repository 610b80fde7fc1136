use std::path::{Path, PathBuf};

use clap::Subcommand;
use ppadforge::games::{
    all_regrets, is_eps_ne, is_relative_eps_ne, is_weak_eps_delta_ne, is_weak_eps_delta_wsne, regrets, utilities,
    BimatrixGame, MixedPair, MixedProfile, PolymatrixGame,
};
use ppadforge::partition::{verify_partition, BipartiteGraph, Partition};
use serde_json::json;

use crate::report::{CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum VerifyCmd {
    /// Additive ε-Nash equilibrium of a bimatrix game.
    Ne {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Relative ε-Nash equilibrium of a bimatrix game.
    Relative {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Weak (ε,δ)-Nash equilibrium of a polymatrix game.
    Weak {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Weak (ε,δ)-well-supported equilibrium of a polymatrix game.
    Wsne {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Size and pairwise edge bounds of a partition.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
}

fn load_pair(ctx: &mut Ctx, game: &Path, pair: &Path) -> CliResult<(BimatrixGame, MixedPair)> {
    let g: BimatrixGame = ctx.read_json("game", game)?;
    g.validate()?;
    let p: MixedPair = ctx.read_json("pair", pair)?;
    p.x.validate()?;
    p.y.validate()?;
    Ok((g, p))
}

fn load_profile(ctx: &mut Ctx, game: &Path, profile: &Path) -> CliResult<(PolymatrixGame, MixedProfile)> {
    let g: PolymatrixGame = ctx.read_json("game", game)?;
    g.validate(usize::MAX)?;
    let p: MixedProfile = ctx.read_json("profile", profile)?;
    let p = MixedProfile::new(p.p)?;
    Ok((g, p))
}

pub fn run(cmd: VerifyCmd, ctx: &mut Ctx) -> CliResult<Outcome> {
    match cmd {
        VerifyCmd::Ne { game, pair, eps } => {
            let (g, p) = load_pair(ctx, &game, &pair)?;
            ctx.param("eps", eps);
            let (rr, rc) = regrets(&g, &p.x, &p.y)?;
            let ok = is_eps_ne(&g, &p.x, &p.y, eps)?;
            Ok(Outcome::check(ok, "equilibrium", "not_equilibrium", json!({"row_regret": rr, "col_regret": rc})))
        }
        VerifyCmd::Relative { game, pair, eps } => {
            let (g, p) = load_pair(ctx, &game, &pair)?;
            ctx.param("eps", eps);
            let u = utilities(&g, &p.x, &p.y)?;
            let ok = is_relative_eps_ne(&g, &p.x, &p.y, eps)?;
            Ok(Outcome::check(ok, "equilibrium", "not_equilibrium", u))
        }
        VerifyCmd::Weak { game, profile, eps, delta } => weak(ctx, &game, &profile, eps, delta, false),
        VerifyCmd::Wsne { game, profile, eps, delta } => weak(ctx, &game, &profile, eps, delta, true),
        VerifyCmd::Partition { graph, partition } => {
            let g: BipartiteGraph = ctx.read_json("graph", &graph)?;
            g.validate(false)?;
            let p: Partition = ctx.read_json("partition", &partition)?;
            let r = verify_partition(&g, &p);
            Ok(Outcome::check(r.valid, "valid", "invalid", &r))
        }
    }
}

fn weak(ctx: &mut Ctx, game: &Path, profile: &Path, eps: f64, delta: f64, well_supported: bool) -> CliResult<Outcome> {
    let (g, p) = load_profile(ctx, game, profile)?;
    ctx.param("eps", eps);
    ctx.param("delta", delta);
    let ok = if well_supported {
        is_weak_eps_delta_wsne(&g, &p, eps, delta)?
    } else {
        is_weak_eps_delta_ne(&g, &p, eps, delta)?
    };
    let r = all_regrets(&g, &p)?;
    let bad = r.iter().filter(|x| **x > eps).count();
    let frac = if g.players == 0 { 0.0 } else { bad as f64 / g.players as f64 };
    let result = json!({"regrets": r, "players_above_eps": bad, "fraction_above_eps": frac});
    Ok(Outcome::check(ok, "equilibrium", "not_equilibrium", result))
}
