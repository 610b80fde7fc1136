use std::path::PathBuf;

use clap::Subcommand;
use ppadforge::birthday::{build_birthday, decode_mixed, uniformity_check, BirthdayParams};
use ppadforge::fanout::{normalize_fanout, restrict_assignment};
use ppadforge::gadgets::{compile, decode_profile};
use ppadforge::games::{all_regrets, regrets, MixedProfile};
use ppadforge::gcircuit::{is_satisfied, max_fanout, violated_fraction, violated_gates, Tolerance};
use ppadforge::solvers::{small_support_search, SolverBudget};
use serde_json::json;

use crate::gc_cmd::load_circuit;
use crate::report::{CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum RoundtripCmd {
    /// Circuit → fanout 2 → polymatrix → bimatrix → solve → decode → check.
    Circuit2bimatrix {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Write every intermediate artifact into this directory.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
}

pub fn run(cmd: RoundtripCmd, ctx: &mut Ctx, budget: &SolverBudget) -> CliResult<Outcome> {
    let RoundtripCmd::Circuit2bimatrix { circuit, eps, delta, artifacts } = cmd;
    let c = load_circuit(ctx, &circuit)?;
    let tol = Tolerance::new(eps, delta)?;
    ctx.param("tolerance", tol);

    let norm = normalize_fanout(&c, eps)?;
    let comp = compile(&norm.circuit)?;
    let padded = comp.game.pad_to_equal_sides()?;
    let n = padded.bipartition.as_ref().map_or(0, |b| b[0].len());
    let params = BirthdayParams::new(eps, delta, n)?;
    ctx.param("birthday", params);
    let bg = build_birthday(&padded, params)?;

    if let Some(dir) = &artifacts {
        std::fs::create_dir_all(dir)
            .map_err(|source| crate::report::CliError::Io { path: dir.display().to_string(), source })?;
        ctx.write_json("normalized_circuit", &dir.join("normalized.json"), &norm.circuit)?;
        ctx.write_json("polymatrix", &dir.join("polymatrix.json"), &padded)?;
        ctx.write_json("bimatrix", &dir.join("bimatrix.json"), &bg.game)?;
        ctx.write_json("birthday_meta", &dir.join("bimatrix.meta.json"), bg.metadata())?;
    }

    let stages = json!({
        "fanout": {
            "max_fanout": max_fanout(&norm.circuit),
            "nodes": norm.circuit.nodes.len(),
            "gates": norm.circuit.gates.len(),
            "added_gates": norm.metadata.added_gates,
        },
        "gadgets": {"players": comp.game.players, "padded_players": padded.players, "edges": comp.game.edges.len()},
        "birthday": {"n": n, "actions": bg.codec.len(), "blocks": bg.codec.blocks},
    });

    let search = small_support_search(&bg.game, params.eps_prime, budget)?;
    let Some(pair) = search.pair.clone() else {
        let result = json!({"stages": stages, "solve": search});
        return Ok(if search.cap_hit {
            ctx.note(format!("enumeration cap reached at k = {}", search.k));
            Outcome::new("budget_refusal", 3, result)
        } else {
            Outcome::new("not_found", 1, result)
        });
    };
    if let Some(dir) = &artifacts {
        ctx.write_json("pair", &dir.join("pair.json"), &pair)?;
    }
    let (rr, rc) = regrets(&bg.game, &pair.x, &pair.y)?;
    let ux = uniformity_check(&bg, &pair.x)?;
    let uy = uniformity_check(&bg, &pair.y)?;

    let decoded = decode_mixed(&bg, &pair.x, &pair.y)?;
    let poly_regret = all_regrets(&padded, &decoded)?.into_iter().fold(0.0, f64::max);
    let prof = MixedProfile { p: decoded.p[..comp.game.players].to_vec() };
    let lifted = decode_profile(&comp, &prof)?;
    let a = restrict_assignment(&norm, &lifted)?;
    let satisfied = is_satisfied(&c, &a, tol)?;

    let result = json!({
        "stages": stages,
        "solve": {
            "k": search.k,
            "k_target": search.k_target,
            "row_regret": rr,
            "col_regret": rc,
            "eps_prime": params.eps_prime,
        },
        "uniformity_check": {"row": ux, "col": uy, "pass": ux.pass && uy.pass},
        "decoded": {"max_polymatrix_regret": poly_regret, "profile": prof.p},
        "assignment": a,
        "check": {
            "satisfied": satisfied,
            "violated_fraction": violated_fraction(&c, &a, eps)?,
            "violated_gates": violated_gates(&c, &a, eps)?,
        },
    });
    Ok(Outcome::check(satisfied, "satisfied", "not_satisfied", result))
}
