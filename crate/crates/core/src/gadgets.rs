//! Gate gadgets, circuit → polymatrix compilation, and the reverse
//! best-response circuit.
//!
//! Every gadget has the same shape: input players, one auxiliary player `w`
//! whose two actions compare a function of the inputs against the output,
//! and an output player `v` that copies or inverts `w`. Node players only
//! ever earn payoff from the gadget that produces them.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::games::{action_payoffs_adj, PolyEdge, PolymatrixGame, MixedProfile, Table};
use crate::gcircuit::{
    constraint_holds, ensure_valid, ideal_gate_value, max_fanout, Assignment, Gate, GateType,
    GeneralizedCircuit, DEFAULT_MULZ_CAP,
};

/// Bound on players per gate for circuits whose nodes all touch a gate.
pub const C1: f64 = 9.0;

const ZERO: Table = [[0.0, 0.0], [0.0, 0.0]];
const MATCH: Table = [[1.0, 0.0], [0.0, 1.0]];
const MISMATCH: Table = [[0.0, 1.0], [1.0, 0.0]];

/// Whether the output player copies `w` (logical gates) or opposes it.
fn output_table(kind: GateType) -> Table {
    if kind.is_logical() {
        MATCH
    } else {
        MISMATCH
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetInstance {
    pub gate: usize,
    pub kind: GateType,
    pub zeta: Option<f64>,
    /// Input players; for CONST, a single anchor player that is not a circuit node.
    pub inputs: Vec<usize>,
    pub aux: usize,
    pub output: usize,
    pub edges: Vec<PolyEdge>,
}

impl GadgetInstance {
    pub fn players(&self) -> Vec<usize> {
        let mut p = self.inputs.clone();
        p.push(self.aux);
        p.push(self.output);
        p
    }
}

fn check_zeta(kind: GateType, zeta: Option<f64>) -> Result<f64> {
    if !kind.takes_zeta() {
        return Ok(0.0);
    }
    let z = zeta.ok_or_else(|| Error::Input(format!("{kind} needs a zeta parameter")))?;
    let ok = match kind {
        GateType::Const => (0.0..=1.0).contains(&z),
        _ => z.is_finite() && z >= 0.0,
    };
    if !ok {
        return input(format!("invalid zeta {z} for {kind}"));
    }
    Ok(z)
}

/// Template gadget with local ids: inputs `0..k`, then `w = k`, then `v = k + 1`.
/// MULZ follows the three-table layout exactly, so `w`'s entries reach `ζ`.
pub fn gadget_for(kind: GateType, zeta: Option<f64>) -> Result<GadgetInstance> {
    let z = check_zeta(kind, zeta)?;
    let k = if kind == GateType::Const { 1 } else { kind.arity() };
    let (w, v) = (k, k + 1);
    // w's table against each input, then against v; rows are w's action
    let (ins, wv): (Vec<Table>, Table) = match kind {
        GateType::Mulz => (vec![[[0.0, z], [0.0, 0.0]]], [[0.0, 0.0], [0.0, 1.0]]),
        GateType::Copy => (vec![[[0.0, 1.0], [0.0, 0.0]]], [[0.0, 0.0], [0.0, 1.0]]),
        GateType::Const => (vec![[[z, z], [0.0, 0.0]]], [[0.0, 0.0], [0.0, 1.0]]),
        GateType::Add => (vec![[[0.0, 1.0], [0.0, 0.0]]; 2], [[0.0, 0.0], [0.0, 1.0]]),
        GateType::Sub => (
            vec![[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
            [[0.0, 0.0], [0.0, 1.0]],
        ),
        GateType::Less => (
            vec![[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
            ZERO,
        ),
        GateType::Not => (vec![[[0.0, 1.0], [0.0, 0.0]]], [[0.0, 0.0], [0.5, 0.5]]),
        GateType::Or => (vec![[[0.0, 0.0], [0.0, 1.0]]; 2], [[0.5, 0.5], [0.0, 0.0]]),
        GateType::And => (vec![[[0.0, 0.0], [0.0, 0.5]]; 2], [[0.75, 0.75], [0.0, 0.0]]),
    };
    let mut edges = Vec::with_capacity(k + 1);
    for (i, t) in ins.into_iter().enumerate() {
        // the CONST anchor is pushed to action 1; real inputs earn nothing here
        let back = if kind == GateType::Const { [[0.0, 0.0], [1.0, 1.0]] } else { ZERO };
        edges.push(PolyEdge { u: w, v: i, au: t, av: back });
    }
    edges.push(PolyEdge { u: w, v, au: wv, av: output_table(kind) });
    Ok(GadgetInstance {
        gate: 0,
        kind,
        zeta: kind.takes_zeta().then_some(z),
        inputs: (0..k).collect(),
        aux: w,
        output: v,
        edges,
    })
}

impl GadgetInstance {
    /// The isolated gadget as a standalone game.
    pub fn game(&self) -> PolymatrixGame {
        let n = self.players().into_iter().max().map_or(0, |m| m + 1);
        let mut g = PolymatrixGame::new(n);
        g.edges = self.edges.clone();
        g
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationFailure {
    pub pins: Vec<f64>,
    pub profile: Vec<f64>,
    pub output: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub kind: GateType,
    pub zeta: Option<f64>,
    pub eps: f64,
    pub grid: usize,
    pub tolerance: f64,
    pub profiles: u64,
    pub passing: u64,
    /// Input pinnings for which no grid profile was an ε-NE.
    pub empty_pins: Vec<Vec<f64>>,
    pub failures: Vec<CertificationFailure>,
}

impl CertificationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.empty_pins.is_empty()
    }
}

pub const CERTIFY_PINS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Enumerates every grid profile of the free players with the inputs pinned;
/// each ε-NE must put the output within `eps + 2/grid` of the gate's rows.
pub fn certify_gadget(kind: GateType, zeta: Option<f64>, eps: f64, grid: usize) -> Result<CertificationReport> {
    if grid == 0 {
        return input("certification grid must be positive");
    }
    let gadget = gadget_for(kind, zeta)?;
    let game = gadget.game();
    let adj = game.adjacency();
    let pinned: Vec<usize> = if kind == GateType::Const { vec![] } else { gadget.inputs.clone() };
    let free: Vec<usize> = (0..game.players).filter(|p| !pinned.contains(p)).collect();
    let tolerance = eps + 2.0 / grid as f64;
    let z = zeta.unwrap_or(0.0);

    let mut pin_sets: Vec<Vec<f64>> = vec![vec![]];
    for _ in &pinned {
        pin_sets = pin_sets
            .into_iter()
            .flat_map(|p| CERTIFY_PINS.iter().map(move |v| [p.clone(), vec![*v]].concat()))
            .collect();
    }
    let per_pin: Vec<(Vec<f64>, u64, u64, Vec<CertificationFailure>)> = pin_sets
        .par_iter()
        .map(|pins| {
            let mut p = vec![0.0; game.players];
            for (i, &pl) in pinned.iter().enumerate() {
                p[pl] = pins[i];
            }
            let (mut count, mut passing, mut failures) = (0u64, 0u64, Vec::new());
            let mut digits = vec![0usize; free.len()];
            loop {
                for (d, &pl) in digits.iter().zip(&free) {
                    p[pl] = *d as f64 / grid as f64;
                }
                count += 1;
                let stable = free.iter().all(|&pl| {
                    let pay = action_payoffs_adj(&game, &adj[pl], &p, pl);
                    let cur = pay[0] * (1.0 - p[pl]) + pay[1] * p[pl];
                    pay[0].max(pay[1]) - cur <= eps
                });
                if stable {
                    passing += 1;
                    let x = pins.first().copied().unwrap_or(0.0);
                    let y = pins.get(1).copied().unwrap_or(0.0);
                    let out = p[gadget.output];
                    if !constraint_holds(kind, z, x, y, out, tolerance) {
                        failures.push(CertificationFailure { pins: pins.clone(), profile: p.clone(), output: out });
                    }
                }
                let mut pos = digits.len();
                loop {
                    if pos == 0 {
                        return (pins.clone(), count, passing, failures);
                    }
                    pos -= 1;
                    if digits[pos] < grid {
                        digits[pos] += 1;
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        })
        .collect();

    let mut report = CertificationReport {
        kind,
        zeta,
        eps,
        grid,
        tolerance,
        profiles: 0,
        passing: 0,
        empty_pins: Vec::new(),
        failures: Vec::new(),
    };
    for (pins, count, passing, failures) in per_pin {
        report.profiles += count;
        report.passing += passing;
        if passing == 0 {
            report.empty_pins.push(pins);
        }
        report.failures.extend(failures);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexBinding {
    pub node: String,
    pub player: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompilationResult {
    pub game: PolymatrixGame,
    /// Circuit actually realized: the input plus any inserted COPY gates.
    pub circuit: GeneralizedCircuit,
    pub vertex_map: Vec<VertexBinding>,
    pub gadgets: Vec<GadgetInstance>,
    /// Nodes created by COPY insertion (a gate reading one node twice, or its own output).
    pub inserted_copies: Vec<String>,
    /// MULZ gadgets with ζ > 1 have `w`'s tables divided by ζ; their guarantee weakens by that factor.
    pub rescaled_gates: Vec<usize>,
}

impl CompilationResult {
    pub fn player_of(&self, node: &str) -> Option<usize> {
        self.vertex_map.iter().find(|b| b.node == node).map(|b| b.player)
    }

    pub fn players_per_gate(&self) -> f64 {
        if self.circuit.gates.is_empty() {
            0.0
        } else {
            self.game.players as f64 / self.circuit.gates.len() as f64
        }
    }
}

/// Rewires gates that read a node twice or read their own output through a fresh COPY.
fn separate_inputs(c: &GeneralizedCircuit) -> Result<(GeneralizedCircuit, Vec<String>)> {
    let mut names: HashSet<String> = c.nodes.iter().cloned().collect();
    let mut out = GeneralizedCircuit { nodes: c.nodes.clone(), gates: Vec::with_capacity(c.gates.len()) };
    let mut added = Vec::new();
    for g in &c.gates {
        let mut g = g.clone();
        for i in 0..g.inputs.len() {
            let clash = g.inputs[i] == g.output || g.inputs[..i].contains(&g.inputs[i]);
            if !clash {
                continue;
            }
            let id = format!("{}#copy{}", g.inputs[i], added.len());
            if !names.insert(id.clone()) {
                return input(format!("generated node id {id} collides with an existing node"));
            }
            out.gates.push(Gate::unary(GateType::Copy, &g.inputs[i], &id));
            out.nodes.push(id.clone());
            added.push(id.clone());
            g.inputs[i] = id;
        }
        out.gates.push(g);
    }
    Ok((out, added))
}

/// Compiles a fan-out-≤2 circuit into a bipartite polymatrix game of degree ≤ 3.
pub fn compile(c: &GeneralizedCircuit) -> Result<CompilationResult> {
    ensure_valid(c)?;
    for g in &c.gates {
        check_zeta(g.kind, g.zeta)?;
        if g.kind == GateType::Mulz && g.zeta.unwrap_or(0.0) > DEFAULT_MULZ_CAP {
            return input(format!("MULZ zeta {} exceeds cap {DEFAULT_MULZ_CAP}", g.zeta.unwrap_or(0.0)));
        }
    }
    let f = max_fanout(c);
    if f > 2 {
        return input(format!("circuit has fan-out {f}; normalize to fan-out 2 first"));
    }
    let (circuit, inserted_copies) = separate_inputs(c)?;
    let index = circuit.node_index();
    let mut game = PolymatrixGame::new(circuit.nodes.len());
    let mut gadgets = Vec::with_capacity(circuit.gates.len());
    let mut rescaled_gates = Vec::new();
    let mut side_nodes: Vec<usize> = (0..circuit.nodes.len()).collect();
    let mut side_aux = Vec::new();
    for (gi, g) in circuit.gates.iter().enumerate() {
        let tpl = gadget_for(g.kind, g.zeta)?;
        let mut local = Vec::with_capacity(tpl.inputs.len() + 2);
        if g.kind == GateType::Const {
            local.push(game.players);
            side_nodes.push(game.players);
            game.players += 1;
        } else {
            local.extend(g.inputs.iter().map(|n| index[n.as_str()]));
        }
        let w = game.players;
        game.players += 1;
        side_aux.push(w);
        local.push(w);
        local.push(index[g.output.as_str()]);
        let scale = match (g.kind, g.zeta) {
            (GateType::Mulz, Some(z)) if z > 1.0 => {
                rescaled_gates.push(gi);
                1.0 / z
            }
            _ => 1.0,
        };
        let edges: Vec<PolyEdge> = tpl
            .edges
            .iter()
            .map(|e| PolyEdge {
                u: local[e.u],
                v: local[e.v],
                au: e.au.map(|row| row.map(|x| x * scale)),
                av: e.av,
            })
            .collect();
        game.edges.extend(edges.iter().cloned());
        gadgets.push(GadgetInstance {
            gate: gi,
            kind: g.kind,
            zeta: tpl.zeta,
            inputs: local[..tpl.inputs.len()].to_vec(),
            aux: w,
            output: local[local.len() - 1],
            edges,
        });
    }
    game.bipartition = Some([side_nodes, side_aux]);
    game.validate(3).map_err(|e| Error::Internal(format!("compiled game is malformed: {e}")))?;
    let vertex_map = circuit
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| VertexBinding { node: n.clone(), player: i })
        .collect();
    Ok(CompilationResult { game, circuit, vertex_map, gadgets, inserted_copies, rescaled_gates })
}

/// Reads each node's value off its player's probability of action 1.
pub fn decode_profile(res: &CompilationResult, prof: &MixedProfile) -> Result<Assignment> {
    if prof.p.len() != res.game.players {
        return input(format!("profile has {} entries for {} players", prof.p.len(), res.game.players));
    }
    let mut a = Assignment::new();
    for b in &res.vertex_map {
        a.set(&b.node, prof.p[b.player]);
    }
    Ok(a)
}

/// Honest profile for an assignment: node players play their values,
/// anchors play 1, and each `w` best-responds (mixing evenly when indifferent).
/// For exact fixed points with Boolean inputs to OR/AND gates this is an exact NE.
pub fn encode_assignment(res: &CompilationResult, a: &Assignment) -> Result<MixedProfile> {
    let mut p = vec![0.0; res.game.players];
    for b in &res.vertex_map {
        p[b.player] = a.get(&b.node)?;
    }
    for g in res.gadgets.iter().filter(|g| g.kind == GateType::Const) {
        p[g.inputs[0]] = 1.0;
    }
    let adj = res.game.adjacency();
    for g in &res.gadgets {
        let pay = action_payoffs_adj(&res.game, &adj[g.aux], &p, g.aux);
        p[g.aux] = if pay[1] > pay[0] {
            1.0
        } else if pay[0] > pay[1] {
            0.0
        } else {
            0.5
        };
    }
    Ok(MixedProfile { p })
}

/// Moves every player whose action gap exceeds `√eps'` onto its best response.
pub fn strengthen_to_wsne(g: &PolymatrixGame, prof: &MixedProfile, eps_prime: f64) -> Result<MixedProfile> {
    if prof.p.len() != g.players {
        return input(format!("profile has {} entries for {} players", prof.p.len(), g.players));
    }
    let cut = eps_prime.max(0.0).sqrt();
    let adj = g.adjacency();
    let p = (0..g.players)
        .map(|v| {
            let pay = action_payoffs_adj(g, &adj[v], &prof.p, v);
            if pay[1] - pay[0] > cut {
                1.0
            } else if pay[0] - pay[1] > cut {
                0.0
            } else {
                prof.p[v]
            }
        })
        .collect();
    Ok(MixedProfile { p })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestResponseCircuit {
    pub circuit: GeneralizedCircuit,
    /// Node holding each player's mixed strategy, indexed by player.
    pub player_nodes: Vec<String>,
    pub block_sizes: Vec<usize>,
    pub max_degree: usize,
    /// Common scale 1/(3d) applied to payoff differences so all sums stay in [0,1].
    pub scale: f64,
}

impl BestResponseCircuit {
    pub fn max_block(&self) -> usize {
        self.block_sizes.iter().copied().max().unwrap_or(0)
    }

    /// Circuit assignment induced by a profile: player nodes from the profile,
    /// block internals evaluated forward.
    pub fn encode(&self, prof: &MixedProfile) -> Result<Assignment> {
        if prof.p.len() != self.player_nodes.len() {
            return input("profile does not cover every player");
        }
        let mut a = Assignment::new();
        for (n, p) in self.player_nodes.iter().zip(&prof.p) {
            a.set(n, *p);
        }
        for g in self.circuit.gates.iter().filter(|g| g.kind != GateType::Less) {
            let v = ideal_gate_value(g, &a)?;
            a.set(&g.output, v);
        }
        Ok(a)
    }

    pub fn decode(&self, a: &Assignment) -> Result<MixedProfile> {
        let p = self.player_nodes.iter().map(|n| a.get(n)).collect::<Result<Vec<_>>>()?;
        Ok(MixedProfile { p })
    }
}

/// Circuit whose fixed points are the polymatrix equilibria: each player's
/// node is `LESS(negative part, positive part)` of its payoff difference.
pub fn best_response_circuit(g: &PolymatrixGame, max_degree: usize) -> Result<BestResponseCircuit> {
    g.validate(max_degree)?;
    let d = max_degree.max(1);
    let scale = 1.0 / (3.0 * d as f64);
    let player_nodes: Vec<String> = (0..g.players).map(|v| format!("p{v}")).collect();
    let mut nodes = player_nodes.clone();
    let mut gates = Vec::new();
    let mut block_sizes = Vec::with_capacity(g.players);
    let adj = g.adjacency();
    for v in 0..g.players {
        let before = gates.len();
        // pay1 − pay0 = Σ α_e + Σ β_e·q_e
        let mut constant = [0.0f64; 2];
        let mut terms: [Vec<(f64, usize)>; 2] = [Vec::new(), Vec::new()];
        for &ei in &adj[v] {
            let e = &g.edges[ei];
            let t = e.table_for(v).expect("incident edge");
            let alpha = t[1][0] - t[0][0];
            let beta = (t[1][1] - t[0][1]) - alpha;
            constant[usize::from(alpha > 0.0)] += alpha.abs();
            if beta != 0.0 {
                terms[usize::from(beta > 0.0)].push((beta.abs(), e.other(v)));
            }
        }
        let mut side_out = Vec::with_capacity(2);
        for (s, label) in ["neg", "pos"].iter().enumerate() {
            let mut fresh = {
                let mut k = 0;
                move |nodes: &mut Vec<String>| {
                    let id = format!("p{v}.{label}{k}");
                    k += 1;
                    nodes.push(id.clone());
                    id
                }
            };
            let mut acc = fresh(&mut nodes);
            gates.push(Gate::constant(constant[s] * scale, &acc));
            for &(coef, u) in &terms[s] {
                let term = fresh(&mut nodes);
                gates.push(Gate::mulz(coef * scale, &player_nodes[u], &term));
                let sum = fresh(&mut nodes);
                gates.push(Gate::binary(GateType::Add, &acc, &term, &sum));
                acc = sum;
            }
            side_out.push(acc);
        }
        gates.push(Gate::binary(GateType::Less, &side_out[0], &side_out[1], &player_nodes[v]));
        block_sizes.push(gates.len() - before);
    }
    let circuit = GeneralizedCircuit { nodes, gates };
    debug_assert!(crate::gcircuit::validate_circuit(&circuit).is_empty());
    Ok(BestResponseCircuit { circuit, player_nodes, block_sizes, max_degree: d, scale })
}

/// Per-gate certification sweep used by tests and the CLI.
pub fn certify_catalog(eps: f64, grid: usize) -> Result<Vec<CertificationReport>> {
    let mut cases: Vec<(GateType, Option<f64>)> = Vec::new();
    for z in [0.25, 0.5, 1.0, 2.0] {
        cases.push((GateType::Mulz, Some(z)));
    }
    for z in [0.0, 0.3, 0.5, 1.0] {
        cases.push((GateType::Const, Some(z)));
    }
    for k in [GateType::Copy, GateType::Add, GateType::Sub, GateType::Less, GateType::Or, GateType::And, GateType::Not] {
        cases.push((k, None));
    }
    cases.into_iter().map(|(k, z)| certify_gadget(k, z, eps, grid)).collect()
}

/// Node → player map as `{"node": ..., "player": ...}` records, sorted by node.
pub fn vertex_map_sorted(res: &CompilationResult) -> Vec<VertexBinding> {
    let m: BTreeMap<&str, usize> = res.vertex_map.iter().map(|b| (b.node.as_str(), b.player)).collect();
    m.into_iter().map(|(n, p)| VertexBinding { node: n.to_string(), player: p }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{all_regrets, is_weak_eps_delta_wsne, vertex_regret};
    use crate::gcircuit::{is_satisfied, violated_fraction, Tolerance};

    #[test]
    fn mulz_tables_match_layout() {
        let g = gadget_for(GateType::Mulz, Some(0.5)).unwrap();
        assert_eq!(g.inputs, vec![0]);
        assert_eq!((g.aux, g.output), (1, 2));
        assert_eq!(g.edges[0].au, [[0.0, 0.5], [0.0, 0.0]]);
        assert_eq!(g.edges[1].au, [[0.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.edges[1].av, [[0.0, 1.0], [1.0, 0.0]]);
        let copy = gadget_for(GateType::Copy, None).unwrap();
        let unit = gadget_for(GateType::Mulz, Some(1.0)).unwrap();
        assert_eq!(copy.edges, unit.edges);
        assert!(gadget_for(GateType::Const, Some(1.5)).is_err());
        assert!(gadget_for(GateType::Mulz, None).is_err());
    }

    #[test]
    fn mulz_exact_equilibrium() {
        let g = gadget_for(GateType::Mulz, Some(0.5)).unwrap().game();
        let prof = MixedProfile { p: vec![1.0, 0.5, 0.5] };
        for v in 1..3 {
            assert_eq!(vertex_regret(&g, &prof, v).unwrap(), 0.0);
        }
        // off the line the output player or w can gain
        let prof = MixedProfile { p: vec![1.0, 0.5, 0.7] };
        assert!(vertex_regret(&g, &prof, 1).unwrap() > 0.0);
        let prof = MixedProfile { p: vec![0.0, 0.5, 0.0] };
        assert_eq!(all_regrets(&g, &prof).unwrap()[1..], [0.0, 0.0]);
    }

    #[test]
    fn every_gadget_certifies() {
        for r in certify_catalog(0.02, 50).unwrap() {
            assert!(r.ok(), "{:?} {:?}: {} failures, empty pins {:?}", r.kind, r.zeta, r.failures.len(), r.empty_pins);
            assert!(r.passing > 0);
        }
    }

    #[test]
    fn compile_shapes() {
        let c = GeneralizedCircuit::new(&["a", "b"], vec![Gate::mulz(0.5, "a", "b")]);
        let res = compile(&c).unwrap();
        assert_eq!(res.game.players, 3);
        assert_eq!(res.game.edges, gadget_for(GateType::Mulz, Some(0.5)).unwrap().edges.iter().map(|e| PolyEdge {
            u: 2,
            v: if e.v == 0 { 0 } else { 1 },
            ..e.clone()
        }).collect::<Vec<_>>());

        let empty = compile(&GeneralizedCircuit::default()).unwrap();
        assert_eq!(empty.game.players, 0);
        assert!(empty.game.edges.is_empty());

        let chain = GeneralizedCircuit::new(&["a", "b"], vec![Gate::constant(0.5, "a"), Gate::mulz(0.5, "a", "b")]);
        let res = compile(&chain).unwrap();
        assert_eq!(res.game.players, 5);
        assert_eq!(res.player_of("a"), Some(0));
        assert_eq!(res.gadgets[0].output, res.gadgets[1].inputs[0]);
        res.game.validate(3).unwrap();
    }

    #[test]
    fn compile_rejects_high_fanout_and_inserts_copies() {
        let c = GeneralizedCircuit::new(
            &["a", "b", "c", "d"],
            vec![
                Gate::unary(GateType::Not, "a", "b"),
                Gate::unary(GateType::Not, "b", "c"),
                Gate::unary(GateType::Not, "b", "d"),
                Gate::unary(GateType::Copy, "b", "a"),
            ],
        );
        assert!(matches!(compile(&c), Err(Error::Input(_))));

        let c = GeneralizedCircuit::new(
            &["a", "b", "c"],
            vec![
                Gate::constant(1.0, "a"),
                Gate::unary(GateType::Not, "a", "b"),
                Gate::binary(GateType::Or, "b", "b", "c"),
            ],
        );
        let res = compile(&c).unwrap();
        assert_eq!(res.inserted_copies, vec!["b#copy0".to_string()]);
        assert_eq!(max_fanout(&res.circuit), 2);
        res.game.validate(3).unwrap();
    }

    #[test]
    fn decode_and_encode() {
        let c = GeneralizedCircuit::new(&["a", "b"], vec![Gate::constant(1.0, "a"), Gate::mulz(0.5, "a", "b")]);
        let res = compile(&c).unwrap();
        let a = Assignment::from_pairs(&[("a", 1.0), ("b", 0.5)]);
        let prof = encode_assignment(&res, &a).unwrap();
        assert!(all_regrets(&res.game, &prof).unwrap().iter().all(|r| *r == 0.0));
        assert_eq!(decode_profile(&res, &prof).unwrap(), a);
        let zero = MixedProfile::constant(res.game.players, 0.0);
        assert_eq!(decode_profile(&res, &zero).unwrap(), Assignment::from_pairs(&[("a", 0.0), ("b", 0.0)]));
        assert!(decode_profile(&res, &MixedProfile::constant(2, 0.0)).is_err());
        assert!(is_satisfied(&res.circuit, &decode_profile(&res, &prof).unwrap(), Tolerance::new(0.01, 0.0).unwrap()).unwrap());
    }

    #[test]
    fn strengthen_cases() {
        let mut g = PolymatrixGame::new(2);
        // player 0 strictly prefers action 1 by 1 regardless of player 1
        g.add_edge(0, 1, [[0.0, 0.0], [1.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]]);
        let prof = MixedProfile { p: vec![0.1, 0.5] };
        let out = strengthen_to_wsne(&g, &prof, 0.01).unwrap();
        assert_eq!(out.p, vec![1.0, 0.5]);

        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 1, [[0.0, 0.0], [0.05, 0.05]], [[0.0, 0.0], [0.0, 0.0]]);
        let out = strengthen_to_wsne(&g, &prof, 0.01).unwrap();
        assert_eq!(out, prof);

        let mut pennies = PolymatrixGame::new(2);
        pennies.add_edge(0, 1, MATCH, MISMATCH);
        let ne = MixedProfile { p: vec![0.5, 0.5] };
        assert_eq!(strengthen_to_wsne(&pennies, &ne, 0.01).unwrap(), ne);
        assert!(is_weak_eps_delta_wsne(&pennies, &ne, 0.0, 0.0).unwrap());
    }

    #[test]
    fn best_response_circuit_pennies() {
        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 1, MATCH, MISMATCH);
        let br = best_response_circuit(&g, 3).unwrap();
        assert!(br.max_block() <= 4 * 3 + 3);
        let ne = MixedProfile { p: vec![0.5, 0.5] };
        let a = br.encode(&ne).unwrap();
        assert_eq!(violated_fraction(&br.circuit, &a, 1e-12).unwrap(), 0.0);
        assert_eq!(br.decode(&a).unwrap(), ne);
        for p in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            let a = br.encode(&MixedProfile { p: p.to_vec() }).unwrap();
            assert!(violated_fraction(&br.circuit, &a, 0.01).unwrap() > 0.0, "{p:?}");
        }
    }

    #[test]
    fn best_response_circuit_isolated_player() {
        let g = PolymatrixGame::new(1);
        let br = best_response_circuit(&g, 3).unwrap();
        for v in [0.0, 1.0] {
            let a = br.encode(&MixedProfile { p: vec![v] }).unwrap();
            assert_eq!(violated_fraction(&br.circuit, &a, 1e-12).unwrap(), 0.0);
        }
    }
}
