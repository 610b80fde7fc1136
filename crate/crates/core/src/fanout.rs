//! Fan-out normalization: rewrite a circuit so no node is read more than twice.
//!
//! Logical outputs are copied through even-depth NOT trees. Arithmetic
//! values are parsed into ε-unary bits by a subtract-compare ladder, the bits
//! are copied by NOT trees, and each consumer gets its own reconstruction.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::gcircuit::{ensure_valid, fanouts, ideal_gate_value, Assignment, Gate, GateType, GeneralizedCircuit};

/// Constant in the bound `gates ≤ |T|·C0/ε` on the normalized circuit.
pub const C0: f64 = 32.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub orig: String,
    pub replicas: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FanoutMetadata {
    /// Unary levels per arithmetic node, ⌈1/ε⌉.
    pub levels: usize,
    pub not_tree_gates: usize,
    /// LESS + MULZ + SUB per level.
    pub parse_gates: usize,
    /// Per-level threshold CONST gates of the parse.
    pub threshold_gates: usize,
    pub copy_tree_gates: usize,
    pub reconstruction_gates: usize,
    pub added_gates: usize,
    pub original_gates: usize,
    pub c0: f64,
    /// `ε/C0`: scale applied to δ so the allowed count of bad gates stays comparable.
    pub delta_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationResult {
    pub circuit: GeneralizedCircuit,
    pub node_map: Vec<ReplicaRecord>,
    pub eps: f64,
    pub eps_hat: f64,
    pub original_nodes: Vec<String>,
    pub metadata: FanoutMetadata,
}

impl NormalizationResult {
    /// Gates added by normalization, in topological order.
    pub fn scaffold(&self) -> &[Gate] {
        &self.circuit.gates[self.metadata.original_gates..]
    }

    pub fn gate_bound(&self) -> f64 {
        self.metadata.original_gates as f64 * C0 / self.eps
    }
}

/// Complete-tree depth for `f` leaves: ⌈log₂ f⌉ rounded up to even.
pub fn tree_depth(f: usize) -> usize {
    let mut d = 0;
    while (1usize << d) < f {
        d += 1;
    }
    d + d % 2
}

pub fn tree_gate_count(f: usize) -> usize {
    (1usize << (tree_depth(f) + 1)) - 2
}

struct Builder {
    names: HashSet<String>,
    new_nodes: Vec<String>,
    gates: Vec<Gate>,
    orig: String,
    counter: usize,
}

impl Builder {
    fn claim(&mut self, id: String) -> Result<String> {
        if !self.names.insert(id.clone()) {
            return input(format!("generated node id {id} collides with an existing node"));
        }
        self.new_nodes.push(id.clone());
        Ok(id)
    }

    fn fresh(&mut self) -> Result<String> {
        let id = format!("{}#{}", self.orig, self.counter);
        self.counter += 1;
        self.claim(id)
    }

    fn start(&mut self, orig: &str, replicas: usize) -> Result<Vec<String>> {
        self.orig = orig.to_string();
        self.counter = replicas;
        (0..replicas).map(|k| self.claim(format!("{orig}#{k}"))).collect()
    }

    /// NOT tree over `root`; leaf `k < named.len()` is written to `named[k]`.
    fn not_tree(&mut self, root: &str, f: usize, named: Option<&[String]>) -> Result<Vec<String>> {
        let depth = tree_depth(f);
        let mut level = vec![root.to_string()];
        for d in 1..=depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for parent in &level {
                for _ in 0..2 {
                    let k = next.len();
                    let out = match named {
                        Some(n) if d == depth && k < n.len() => n[k].clone(),
                        _ => self.fresh()?,
                    };
                    self.gates.push(Gate::unary(GateType::Not, parent, &out));
                    next.push(out);
                }
            }
            level = next;
        }
        level.truncate(f);
        Ok(level)
    }
}

pub fn normalize_fanout(c: &GeneralizedCircuit, eps: f64) -> Result<NormalizationResult> {
    if !(eps > 0.0 && eps <= 0.25) {
        return input(format!("eps must lie in (0, 1/4], got {eps}"));
    }
    ensure_valid(c)?;
    let levels = (1.0 / eps).ceil() as usize;
    let mut meta = FanoutMetadata {
        levels,
        original_gates: c.gates.len(),
        c0: C0,
        delta_scale: eps / C0,
        ..Default::default()
    };
    let producer: BTreeMap<&str, GateType> = c.gates.iter().map(|g| (g.output.as_str(), g.kind)).collect();
    let reads = fanouts(c);
    let high: Vec<(String, usize)> = c
        .nodes
        .iter()
        .filter_map(|n| (reads[n] > 2).then(|| (n.clone(), reads[n])))
        .collect();

    let mut b = Builder {
        names: c.nodes.iter().cloned().collect(),
        new_nodes: Vec::new(),
        gates: Vec::new(),
        orig: String::new(),
        counter: 0,
    };
    let mut node_map = Vec::new();
    for (node, f) in &high {
        let replicas = b.start(node, *f)?;
        let logical = producer.get(node.as_str()).is_some_and(|k| k.is_logical());
        if logical {
            b.not_tree(node, *f, Some(&replicas))?;
            meta.not_tree_gates += tree_gate_count(*f);
        } else {
            // each bit feeds only its NOT tree; the spare last leaf drives the subtraction
            let mut copies = Vec::with_capacity(levels);
            let mut rest = node.clone();
            for _ in 0..levels {
                let th = b.fresh()?;
                b.gates.push(Gate::constant(eps / 2.0, &th));
                let bit = b.fresh()?;
                b.gates.push(Gate::binary(GateType::Less, &th, &rest, &bit));
                let mut leaves = b.not_tree(&bit, *f + 1, None)?;
                let spare = leaves.pop().expect("tree has f+1 leaves");
                let step = b.fresh()?;
                b.gates.push(Gate::mulz(eps, &spare, &step));
                let next = b.fresh()?;
                b.gates.push(Gate::binary(GateType::Sub, &rest, &step, &next));
                copies.push(leaves);
                rest = next;
            }
            meta.threshold_gates += levels;
            meta.parse_gates += 3 * levels;
            meta.copy_tree_gates += levels * tree_gate_count(*f + 1);
            for (k, replica) in replicas.iter().enumerate() {
                let mut acc = if levels == 1 { replica.clone() } else { b.fresh()? };
                b.gates.push(Gate::mulz(eps, &copies[0][k], &acc));
                for (i, copy) in copies.iter().enumerate().skip(1) {
                    let term = b.fresh()?;
                    b.gates.push(Gate::mulz(eps, &copy[k], &term));
                    let out = if i + 1 == levels { replica.clone() } else { b.fresh()? };
                    b.gates.push(Gate::binary(GateType::Add, &acc, &term, &out));
                    acc = out;
                }
            }
            meta.reconstruction_gates += f * (2 * levels - 1);
        }
        node_map.push(ReplicaRecord { orig: node.clone(), replicas });
    }

    // rewire consumer slots to their replicas, in gate/slot order
    let mut next_slot: BTreeMap<&str, usize> = BTreeMap::new();
    let lookup: BTreeMap<&str, &ReplicaRecord> = node_map.iter().map(|r| (r.orig.as_str(), r)).collect();
    let mut gates: Vec<Gate> = c.gates.clone();
    for g in gates.iter_mut() {
        for inp in g.inputs.iter_mut() {
            if let Some(rec) = lookup.get(inp.as_str()) {
                let slot = next_slot.entry(rec.orig.as_str()).or_insert(0);
                *inp = rec.replicas[*slot].clone();
                *slot += 1;
            }
        }
    }
    meta.added_gates = b.gates.len();
    gates.extend(b.gates);
    let mut nodes = c.nodes.clone();
    nodes.extend(b.new_nodes);
    Ok(NormalizationResult {
        circuit: GeneralizedCircuit { nodes, gates },
        node_map,
        eps,
        eps_hat: eps * eps / 16.0,
        original_nodes: c.nodes.clone(),
        metadata: meta,
    })
}

/// Extends an assignment on the original nodes by evaluating the added
/// scaffolding under the ideal semantics.
pub fn lift_assignment(res: &NormalizationResult, a: &Assignment) -> Result<Assignment> {
    let mut out = Assignment::new();
    for n in &res.original_nodes {
        out.set(n, a.get(n)?);
    }
    for g in res.scaffold() {
        let v = ideal_gate_value(g, &out)?;
        out.set(&g.output, v);
    }
    Ok(out)
}

pub fn restrict_assignment(res: &NormalizationResult, a: &Assignment) -> Result<Assignment> {
    let mut out = Assignment::new();
    for n in &res.original_nodes {
        out.set(n, a.get(n)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcircuit::{gate_satisfied, max_fanout};

    fn not_feeding_three() -> GeneralizedCircuit {
        GeneralizedCircuit::new(
            &["s", "x", "p", "q", "r"],
            vec![
                Gate::unary(GateType::Not, "s", "x"),
                Gate::unary(GateType::Copy, "x", "p"),
                Gate::unary(GateType::Not, "x", "q"),
                Gate::mulz(0.5, "x", "r"),
            ],
        )
    }

    fn add_feeding_three() -> GeneralizedCircuit {
        GeneralizedCircuit::new(
            &["a", "b", "s", "p", "q", "r"],
            vec![
                Gate::constant(0.25, "a"),
                Gate::constant(0.25, "b"),
                Gate::binary(GateType::Add, "a", "b", "s"),
                Gate::unary(GateType::Copy, "s", "p"),
                Gate::unary(GateType::Not, "s", "q"),
                Gate::mulz(1.0, "s", "r"),
            ],
        )
    }

    #[test]
    fn depths() {
        assert_eq!((tree_depth(3), tree_depth(4), tree_depth(5), tree_depth(16)), (2, 2, 4, 4));
        assert_eq!(tree_gate_count(3), 6);
    }

    #[test]
    fn logical_tree_example() {
        let res = normalize_fanout(&not_feeding_three(), 0.2).unwrap();
        assert!(max_fanout(&res.circuit) <= 2);
        assert_eq!(res.metadata.added_gates, 6);
        assert_eq!(res.metadata.not_tree_gates, 6);
        assert_eq!(res.node_map, vec![ReplicaRecord {
            orig: "x".into(),
            replicas: vec!["x#0".into(), "x#1".into(), "x#2".into()],
        }]);
        assert_eq!(res.circuit.gates[1].inputs, vec!["x#0".to_string()]);
        let a = Assignment::from_pairs(&[("s", 0.0), ("x", 1.0), ("p", 1.0), ("q", 0.0), ("r", 0.5)]);
        let lifted = lift_assignment(&res, &a).unwrap();
        for k in 0..3 {
            assert_eq!(lifted.get(&format!("x#{k}")).unwrap(), 1.0);
        }
        assert_eq!(restrict_assignment(&res, &lifted).unwrap(), a);
    }

    #[test]
    fn identity_case() {
        let c = GeneralizedCircuit::new(&["a", "b"], vec![Gate::constant(0.5, "a"), Gate::mulz(1.0, "a", "b")]);
        let res = normalize_fanout(&c, 0.1).unwrap();
        assert_eq!(res.circuit, c);
        assert!(res.node_map.is_empty());
        let a = Assignment::from_pairs(&[("a", 0.5), ("b", 0.5)]);
        assert_eq!(lift_assignment(&res, &a).unwrap(), a);
        assert_eq!(restrict_assignment(&res, &a).unwrap(), a);
    }

    #[test]
    fn arithmetic_parse_example() {
        let c = add_feeding_three();
        let res = normalize_fanout(&c, 0.25).unwrap();
        let l = 4;
        let m = &res.metadata;
        assert_eq!(m.levels, l);
        assert_eq!(m.parse_gates, 3 * l);
        assert_eq!(m.threshold_gates, l);
        assert_eq!(m.copy_tree_gates, 6 * l);
        assert_eq!(m.reconstruction_gates, 3 * (2 * l - 1));
        assert_eq!(m.added_gates, 3 * l + l + 6 * l + 3 * (2 * l - 1));
        assert_eq!(res.circuit.gates.len(), c.gates.len() + m.added_gates);
        let hi: Vec<_> = crate::gcircuit::fanouts(&res.circuit).into_iter().filter(|(_, f)| *f > 2).collect();
        assert!(max_fanout(&res.circuit) <= 2, "{hi:?}");
        assert!((res.circuit.gates.len() as f64) <= res.gate_bound());

        let a = Assignment::from_pairs(&[("a", 0.25), ("b", 0.25), ("s", 0.5), ("p", 0.5), ("q", 0.0), ("r", 0.5)]);
        let lifted = lift_assignment(&res, &a).unwrap();
        // per level: threshold, bit, six tree nodes, step, rest
        let bits: Vec<f64> = (0..l).map(|i| lifted.get(&format!("s#{}", 3 + 10 * i + 1)).unwrap()).collect();
        assert_eq!(bits, vec![1.0, 1.0, 0.0, 0.0]);
        for k in 0..3 {
            assert_eq!(lifted.get(&format!("s#{k}")).unwrap(), 0.5);
        }
        for g in &res.circuit.gates {
            assert!(gate_satisfied(g, &lifted, 1e-12).unwrap(), "{g:?}");
        }
        assert_eq!(restrict_assignment(&res, &lifted).unwrap(), a);
    }

    #[test]
    fn errors() {
        let c = not_feeding_three();
        assert!(normalize_fanout(&c, 0.3).is_err());
        assert!(normalize_fanout(&c, 0.0).is_err());
        let mut clash = c.clone();
        clash.nodes.push("x#1".into());
        assert!(normalize_fanout(&clash, 0.2).is_err());
        let res = normalize_fanout(&c, 0.2).unwrap();
        assert!(restrict_assignment(&res, &Assignment::from_pairs(&[("s", 0.0)])).is_err());
    }
}
