use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use ppadforge::birthday::{action_count, build_birthday, BirthdayParams};
use ppadforge::fanout::normalize_fanout;
use ppadforge::gadgets::{best_response_circuit, certify_gadget, compile, vertex_map_sorted};
use ppadforge::games::{PolymatrixGame, DEFAULT_MAX_DEGREE};
use ppadforge::gcircuit::max_fanout;
use ppadforge::partition::{default_block_size, greedy_partition, verify_partition, BipartiteGraph};
use ppadforge::relative::{build_relative, RelativeParams};
use serde_json::json;

use crate::gc_cmd::load_circuit;
use crate::report::{sidecar, CliResult, Ctx, Outcome};

#[derive(Subcommand)]
pub enum ReduceCmd {
    /// Rewrite a circuit so every node feeds at most two gates.
    Fanout {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
        /// Node map and gate accounting; defaults to `<out>.meta.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Compile a fanout-2 circuit into a bipartite polymatrix game.
    Gadgets {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out>.vertex_map.json`.
        #[arg(long)]
        vertex_map: Option<PathBuf>,
        /// Re-certify every gadget kind used by the circuit.
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 0.02)]
        certify_eps: f64,
        #[arg(long, default_value_t = 50)]
        certify_grid: usize,
        /// Defaults to `<out>.certify.json`.
        #[arg(long)]
        certify_out: Option<PathBuf>,
    },
    /// Polymatrix game to the block-guessing bimatrix game.
    Birthday {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Block size; defaults to ⌈√n⌉.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out>.meta.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Polymatrix game to the relative-approximation bimatrix game.
    Relative {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out>.meta.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Polymatrix game to the circuit computing smoothed best responses.
    Brcircuit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
        /// Player-to-node map; defaults to `<out>.meta.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct PartitionArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Block size; defaults to ⌈√n⌉.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_poly(ctx: &mut Ctx, path: &Path) -> CliResult<PolymatrixGame> {
    let g: PolymatrixGame = ctx.read_json("game", path)?;
    g.validate(usize::MAX)?;
    Ok(g)
}

pub fn run(cmd: ReduceCmd, ctx: &mut Ctx) -> CliResult<Outcome> {
    match cmd {
        ReduceCmd::Fanout { circuit, eps, out, meta } => {
            let c = load_circuit(ctx, &circuit)?;
            ctx.param("eps", eps);
            let res = normalize_fanout(&c, eps)?;
            ctx.param("eps_hat", res.eps_hat);
            ctx.param("c0", res.metadata.c0);
            ctx.write_json("circuit", &out, &res.circuit)?;
            let meta = meta.unwrap_or_else(|| sidecar(&out, "meta"));
            ctx.write_json("meta", &meta, json!({"node_map": res.node_map, "metadata": res.metadata}))?;
            let result = json!({
                "max_fanout": max_fanout(&res.circuit),
                "nodes": res.circuit.nodes.len(),
                "gates": res.circuit.gates.len(),
                "added_gates": res.metadata.added_gates,
                "gate_bound": res.gate_bound(),
            });
            Ok(Outcome::check(max_fanout(&res.circuit) <= 2, "ok", "fanout_exceeded", result))
        }
        ReduceCmd::Gadgets { circuit, out, vertex_map, certify, certify_eps, certify_grid, certify_out } => {
            let c = load_circuit(ctx, &circuit)?;
            let res = compile(&c)?;
            ctx.param("c1", ppadforge::gadgets::C1);
            ctx.write_json("game", &out, &res.game)?;
            let vm = vertex_map.unwrap_or_else(|| sidecar(&out, "vertex_map"));
            ctx.write_json("vertex_map", &vm, vertex_map_sorted(&res))?;
            let mut result = json!({
                "players": res.game.players,
                "edges": res.game.edges.len(),
                "players_per_gate": res.players_per_gate(),
                "inserted_copies": res.inserted_copies,
                "rescaled_gates": res.rescaled_gates,
            });
            let mut ok = true;
            if certify {
                ctx.param("certify_eps", certify_eps);
                ctx.param("certify_grid", certify_grid);
                let mut kinds: Vec<_> = res.circuit.gates.iter().map(|g| (g.kind, g.zeta.map(f64::to_bits))).collect();
                kinds.sort_by_key(|(k, z)| (k.name(), *z));
                kinds.dedup();
                let mut reports = Vec::new();
                for (k, z) in kinds {
                    reports.push(certify_gadget(k, z.map(f64::from_bits), certify_eps, certify_grid)?);
                }
                ok = reports.iter().all(|r| r.ok());
                let path = certify_out.unwrap_or_else(|| sidecar(&out, "certify"));
                ctx.write_json("certification", &path, &reports)?;
                result["certified"] = json!(ok);
            }
            Ok(Outcome::check(ok, "ok", "certification_failed", result))
        }
        ReduceCmd::Birthday { input, eps, delta, k, out, meta } => {
            let p = load_poly(ctx, &input)?.pad_to_equal_sides()?;
            let n = p.bipartition.as_ref().map_or(0, |b| b[0].len());
            let mut params = BirthdayParams::new(eps, delta, n)?;
            if let Some(k) = k {
                params.k = k;
            }
            ctx.param("birthday", params);
            let bg = build_birthday(&p, params)?;
            ctx.write_json("game", &out, &bg.game)?;
            let meta = meta.unwrap_or_else(|| sidecar(&out, "meta"));
            ctx.write_json("meta", &meta, bg.metadata())?;
            let result = json!({
                "n": n,
                "actions": bg.codec.len(),
                "formula_actions": action_count(n, params.k).to_string(),
                "blocks": bg.codec.blocks,
            });
            Ok(Outcome::new("ok", 0, result))
        }
        ReduceCmd::Relative { input, eps, delta, out, meta } => {
            let p = load_poly(ctx, &input)?.pad_to_equal_sides()?;
            let params = RelativeParams::new(eps, delta)?;
            ctx.param("relative", params);
            let rg = build_relative(&p, params)?;
            ctx.write_json("game", &out, &rg.game)?;
            let meta = meta.unwrap_or_else(|| sidecar(&out, "meta"));
            ctx.write_json("meta", &meta, json!({"n": rg.n, "params": rg.params, "sides": rg.sides}))?;
            Ok(Outcome::new("ok", 0, json!({"n": rg.n, "actions": rg.actions()})))
        }
        ReduceCmd::Brcircuit { input, degree, out, meta } => {
            let p = load_poly(ctx, &input)?;
            ctx.param("degree", degree);
            let br = best_response_circuit(&p, degree)?;
            ctx.write_json("circuit", &out, &br.circuit)?;
            let meta = meta.unwrap_or_else(|| sidecar(&out, "meta"));
            let side = json!({"player_nodes": br.player_nodes, "block_sizes": br.block_sizes, "scale": br.scale});
            ctx.write_json("meta", &meta, side)?;
            let bound = 4 * degree + 3;
            let result = json!({"gates": br.circuit.gates.len(), "max_block": br.max_block(), "block_bound": bound});
            Ok(Outcome::check(br.max_block() <= bound, "ok", "block_bound_exceeded", result))
        }
    }
}

pub fn partition(a: PartitionArgs, ctx: &mut Ctx) -> CliResult<Outcome> {
    let g: BipartiteGraph = ctx.read_json("graph", &a.graph)?;
    g.validate(false)?;
    let k = a.k.unwrap_or_else(|| default_block_size(g.n));
    ctx.param("k", k);
    let p = greedy_partition(&g, k)?;
    if let Some(out) = &a.out {
        ctx.write_json("partition", out, &p)?;
    }
    let report = verify_partition(&g, &p);
    let ok = report.valid;
    Ok(Outcome::check(ok, "valid", "invalid", json!({"partition": p, "check": report})))
}
