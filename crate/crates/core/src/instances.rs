//! Seeded instance generators and the fixed desk instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::{MixedProfile, PolymatrixGame, Table};
use crate::gcircuit::{iterate_fixed_point, Assignment, Gate, GateType, GeneralizedCircuit};
use crate::partition::BipartiteGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Union of `d` random perfect matchings, resampled until simple.
pub fn random_regular_bipartite(n: usize, d: usize, seed: u64) -> Result<BipartiteGraph> {
    if d > n {
        return Err(Error::Input(format!("no simple {d}-regular bipartite graph on {n}+{n} vertices")));
    }
    let mut r = rng(seed);
    for _ in 0..10_000 {
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(n * d);
        let mut ok = true;
        'layers: for _ in 0..d {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut r);
            for (u, &v) in perm.iter().enumerate() {
                if !seen.insert((u, v)) {
                    ok = false;
                    break 'layers;
                }
                edges.push((u, v));
            }
        }
        if ok {
            return BipartiteGraph::new(n, d, edges);
        }
    }
    Err(Error::Internal("regular graph sampling did not converge".into()))
}

fn random_gate(r: &mut ChaCha8Rng, kind: GateType, inputs: &[&str], out: &str) -> Gate {
    let zeta = match kind {
        GateType::Const => Some(r.gen_range(0.0..=1.0)),
        GateType::Mulz => Some(r.gen_range(0.0..=2.0)),
        _ => None,
    };
    Gate::new(kind, zeta, inputs, out)
}

/// Circuit on at most `max_nodes` nodes; each node produced by at most one gate,
/// inputs drawn freely (cycles allowed).
pub fn random_small_circuit(seed: u64, max_nodes: usize) -> GeneralizedCircuit {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_nodes.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut gates = Vec::new();
    for out in &names {
        if gates.is_empty() || r.gen_bool(0.8) {
            let kind = GateType::ALL[r.gen_range(0..GateType::ALL.len())];
            let ins: Vec<&str> = (0..kind.arity()).map(|_| names[r.gen_range(0..n)].as_str()).collect();
            gates.push(random_gate(&mut r, kind, &ins, out));
        }
    }
    GeneralizedCircuit { nodes: names, gates }
}

/// Pick a node with spare read capacity, or `None` when all are saturated.
fn pick_input(r: &mut ChaCha8Rng, reads: &mut [usize], upto: usize, cap: usize) -> Option<usize> {
    let open: Vec<usize> = (0..upto).filter(|&i| reads[i] < cap).collect();
    let i = *open.choose(r)?;
    reads[i] += 1;
    Some(i)
}

/// Random circuit (cycles allowed) with at most `max_gates` gates and node fanout ≤ `max_fanout`.
pub fn random_fanout_circuit(seed: u64, max_gates: usize, max_fanout: usize) -> GeneralizedCircuit {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_gates.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut reads = vec![0; n];
    let mut gates = Vec::with_capacity(n);
    for out in &names {
        let mut kind = GateType::ALL[r.gen_range(0..GateType::ALL.len())];
        let mut ins = Vec::new();
        for _ in 0..kind.arity() {
            match pick_input(&mut r, &mut reads, n, max_fanout) {
                Some(i) => ins.push(names[i].as_str()),
                None => break,
            }
        }
        if ins.len() != kind.arity() {
            kind = GateType::Const;
            ins.clear();
        }
        let zeta = match kind {
            GateType::Const => Some(r.gen_range(0.0..=1.0)),
            GateType::Mulz => Some(r.gen_range(0.0..=4.0)),
            _ => None,
        };
        gates.push(Gate::new(kind, zeta, &ins, out));
    }
    GeneralizedCircuit { nodes: names, gates }
}

/// Acyclic circuit in topological gate order whose values all stay on the
/// lattice `step·ℤ ∩ [0,1]`: CONST on the lattice, MULZ with integer ζ.
pub fn random_lattice_dag(seed: u64, max_gates: usize, max_fanout: usize, step: f64) -> GeneralizedCircuit {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_gates.max(1));
    let levels = (1.0 / step).round() as usize;
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut reads = vec![0; n];
    let mut gates = Vec::with_capacity(n);
    for (idx, out) in names.iter().enumerate() {
        let mut kind = if idx == 0 { GateType::Const } else { GateType::ALL[r.gen_range(0..GateType::ALL.len())] };
        let mut ins = Vec::new();
        for _ in 0..kind.arity() {
            match pick_input(&mut r, &mut reads, idx, max_fanout) {
                Some(i) => ins.push(names[i].as_str()),
                None => break,
            }
        }
        if ins.len() != kind.arity() {
            kind = GateType::Const;
            ins.clear();
        }
        let zeta = match kind {
            GateType::Const => Some(r.gen_range(0..=levels) as f64 * step),
            GateType::Mulz => Some(r.gen_range(0..=4) as f64),
            _ => None,
        };
        gates.push(Gate::new(kind, zeta, &ins, out));
    }
    GeneralizedCircuit { nodes: names, gates }
}

/// Exact fixed point of a circuit whose gates are in topological order.
pub fn forward_fixed_point(c: &GeneralizedCircuit) -> Result<Assignment> {
    let init = Assignment(c.nodes.iter().map(|n| (n.clone(), 0.0)).collect());
    iterate_fixed_point(c, &init, 1)
}

/// Bipartite polymatrix game on `g` (left players `0..n`, right `n..2n`)
/// with the given tables for the left and right endpoint.
pub fn polymatrix_on(g: &BipartiteGraph, left: Table, right: Table) -> PolymatrixGame {
    let mut p = PolymatrixGame::new(2 * g.n);
    for &(u, v) in &g.edges {
        p.add_edge(u, g.n + v, left, right);
    }
    p.bipartition = Some([(0..g.n).collect(), (g.n..2 * g.n).collect()]);
    p
}

/// Random bipartite polymatrix game with uniform payoffs in [0,1].
pub fn random_bipartite_polymatrix(n: usize, d: usize, seed: u64) -> Result<PolymatrixGame> {
    let g = random_regular_bipartite(n, d, seed)?;
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut p = polymatrix_on(&g, [[0.0; 2]; 2], [[0.0; 2]; 2]);
    for e in p.edges.iter_mut() {
        for t in [&mut e.au, &mut e.av] {
            for row in t.iter_mut() {
                for x in row.iter_mut() {
                    *x = r.gen_range(0.0..=1.0);
                }
            }
        }
    }
    Ok(p)
}

pub const MATCH: Table = [[1.0, 0.0], [0.0, 1.0]];
pub const MISMATCH: Table = [[0.0, 1.0], [1.0, 0.0]];
pub const ZERO: Table = [[0.0, 0.0], [0.0, 0.0]];

/// A desk instance with a known pure equilibrium.
#[derive(Clone, Debug)]
pub struct DeskInstance {
    pub name: &'static str,
    pub game: PolymatrixGame,
    pub equilibrium: MixedProfile,
}

/// Three n=4 bipartite instances where only the left side has stakes and
/// every left vertex attains the same payoff at the listed pure equilibrium.
pub fn desk_instances() -> Vec<DeskInstance> {
    let cycle = BipartiteGraph::new(4, 2, vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (0, 3)])
        .expect("8-cycle");
    let crown_edges = (0..4).flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let crown = BipartiteGraph::new(4, 3, crown_edges).expect("crown graph");
    let matching = BipartiteGraph::new(4, 1, (0..4).map(|i| (i, i)).collect()).expect("matching");
    let ones = MixedProfile::constant(8, 1.0);
    let mut alternating = vec![1.0; 4];
    alternating.extend([0.0; 4]);
    vec![
        DeskInstance { name: "cycle-coordination", game: polymatrix_on(&cycle, MATCH, ZERO), equilibrium: ones.clone() },
        DeskInstance { name: "crown-coordination", game: polymatrix_on(&crown, MATCH, ZERO), equilibrium: ones },
        DeskInstance {
            name: "matching-anticoordination",
            game: polymatrix_on(&matching, MISMATCH, ZERO),
            equilibrium: MixedProfile { p: alternating },
        },
    ]
}

/// Three n=3 instances on K₃,₃ (3-regular) with a pure equilibrium.
pub fn relative_desk_instances() -> Vec<DeskInstance> {
    let edges = (0..3).flat_map(|u| (0..3).map(move |v| (u, v))).collect();
    let k33 = BipartiteGraph::new(3, 3, edges).expect("K33");
    let ones = MixedProfile::constant(6, 1.0);
    let mut split = vec![1.0; 3];
    split.extend([0.0; 3]);
    vec![
        DeskInstance { name: "k33-coordination", game: polymatrix_on(&k33, MATCH, MATCH), equilibrium: ones.clone() },
        DeskInstance { name: "k33-one-sided", game: polymatrix_on(&k33, MATCH, ZERO), equilibrium: ones },
        DeskInstance {
            name: "k33-anticoordination",
            game: polymatrix_on(&k33, MISMATCH, ZERO),
            equilibrium: MixedProfile { p: split },
        },
    ]
}
