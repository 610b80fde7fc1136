//! Generalized circuits: nine gate types over line values in `[0,1]`,
//! cycles allowed, checked gate-by-gate against an additive tolerance.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Default upper bound for the `MULZ` parameter (1/ε for ε = 1/16).
pub const DEFAULT_MULZ_CAP: f64 = 16.0;

/// Default refusal threshold for grid enumeration in [`brute_force_search`].
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateType {
    Const,
    Mulz,
    Copy,
    Add,
    Sub,
    Less,
    Or,
    And,
    Not,
}

impl GateType {
    pub const ALL: [GateType; 9] = [
        GateType::Const,
        GateType::Mulz,
        GateType::Copy,
        GateType::Add,
        GateType::Sub,
        GateType::Less,
        GateType::Or,
        GateType::And,
        GateType::Not,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateType::Const => 0,
            GateType::Mulz | GateType::Copy | GateType::Not => 1,
            GateType::Add | GateType::Sub | GateType::Less | GateType::Or | GateType::And => 2,
        }
    }

    pub fn takes_zeta(self) -> bool {
        matches!(self, GateType::Const | GateType::Mulz)
    }

    /// Outputs of these gates are booleans up to noise; they can be
    /// replicated by NOT trees without accumulating error.
    pub fn is_logical(self) -> bool {
        matches!(self, GateType::Less | GateType::Or | GateType::And | GateType::Not)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateType::Const => "CONST",
            GateType::Mulz => "MULZ",
            GateType::Copy => "COPY",
            GateType::Add => "ADD",
            GateType::Sub => "SUB",
            GateType::Less => "LESS",
            GateType::Or => "OR",
            GateType::And => "AND",
            GateType::Not => "NOT",
        }
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    #[serde(rename = "type")]
    pub kind: GateType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(rename = "in", default)]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub output: String,
}

impl Gate {
    pub fn new(kind: GateType, zeta: Option<f64>, inputs: &[&str], output: &str) -> Self {
        Gate {
            kind,
            zeta,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.to_string(),
        }
    }

    pub fn constant(zeta: f64, out: &str) -> Self {
        Gate::new(GateType::Const, Some(zeta), &[], out)
    }

    pub fn mulz(zeta: f64, a: &str, out: &str) -> Self {
        Gate::new(GateType::Mulz, Some(zeta), &[a], out)
    }

    pub fn unary(kind: GateType, a: &str, out: &str) -> Self {
        Gate::new(kind, None, &[a], out)
    }

    pub fn binary(kind: GateType, a: &str, b: &str, out: &str) -> Self {
        Gate::new(kind, None, &[a, b], out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedCircuit {
    pub nodes: Vec<String>,
    pub gates: Vec<Gate>,
}

impl GeneralizedCircuit {
    pub fn new(nodes: &[&str], gates: Vec<Gate>) -> Self {
        GeneralizedCircuit {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            gates,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
    }
}

/// Line values, keyed by node id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<String, f64>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        Assignment(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    pub fn get(&self, node: &str) -> Result<f64> {
        self.0
            .get(node)
            .copied()
            .ok_or_else(|| Error::Input(format!("assignment has no value for node {node:?}")))
    }

    pub fn set(&mut self, node: &str, value: f64) {
        self.0.insert(node.to_string(), value);
    }

    /// Values in circuit node order; fails on missing nodes or values outside `[0,1]`.
    pub fn dense(&self, c: &GeneralizedCircuit) -> Result<Vec<f64>> {
        c.nodes
            .iter()
            .map(|n| {
                let v = self.get(n)?;
                if !(0.0..=1.0).contains(&v) {
                    return input(format!("value {v} for node {n:?} is outside [0,1]"));
                }
                Ok(v)
            })
            .collect()
    }

    pub fn from_dense(c: &GeneralizedCircuit, values: &[f64]) -> Self {
        Assignment(c.nodes.iter().cloned().zip(values.iter().copied()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
    pub delta: f64,
}

impl Tolerance {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return input(format!("eps must lie in (0,1), got {eps}"));
        }
        if !(0.0..=1.0).contains(&delta) {
            return input(format!("delta must lie in [0,1], got {delta}"));
        }
        Ok(Tolerance { eps, delta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Arity,
    Zeta,
    DuplicateOutput,
    UnknownNode,
    DuplicateNode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub gate: Option<usize>,
    pub kind: ViolationKind,
    pub detail: String,
}

pub fn validate_circuit(c: &GeneralizedCircuit) -> Vec<Violation> {
    validate_circuit_with_cap(c, DEFAULT_MULZ_CAP)
}

pub fn validate_circuit_with_cap(c: &GeneralizedCircuit, mulz_cap: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut known = HashSet::new();
    for n in &c.nodes {
        if !known.insert(n.as_str()) {
            out.push(Violation {
                gate: None,
                kind: ViolationKind::DuplicateNode,
                detail: format!("node {n:?} listed twice"),
            });
        }
    }
    let mut outputs: HashMap<&str, usize> = HashMap::new();
    for (gi, g) in c.gates.iter().enumerate() {
        let mut push = |kind, detail: String| {
            out.push(Violation { gate: Some(gi), kind, detail });
        };
        if g.inputs.len() != g.kind.arity() {
            push(
                ViolationKind::Arity,
                format!("{} expects {} inputs, got {}", g.kind, g.kind.arity(), g.inputs.len()),
            );
        }
        match (g.kind, g.zeta) {
            (GateType::Const, Some(z)) if !(0.0..=1.0).contains(&z) => {
                push(ViolationKind::Zeta, format!("CONST parameter {z} outside [0,1]"))
            }
            (GateType::Mulz, Some(z)) if !(z >= 0.0 && z <= mulz_cap) => push(
                ViolationKind::Zeta,
                format!("MULZ parameter {z} outside [0,{mulz_cap}]"),
            ),
            (k, None) if k.takes_zeta() => {
                push(ViolationKind::Zeta, format!("{k} requires a parameter"))
            }
            (k, Some(_)) if !k.takes_zeta() => {
                push(ViolationKind::Zeta, format!("{k} takes no parameter"))
            }
            _ => {}
        }
        for n in g.inputs.iter().chain(std::iter::once(&g.output)) {
            if !known.contains(n.as_str()) {
                push(ViolationKind::UnknownNode, format!("node {n:?} is not in V"));
            }
        }
        if let Some(prev) = outputs.insert(g.output.as_str(), gi) {
            push(
                ViolationKind::DuplicateOutput,
                format!("output {:?} already driven by gate {prev}", g.output),
            );
        }
    }
    out
}

pub(crate) fn ensure_valid(c: &GeneralizedCircuit) -> Result<()> {
    // zeta range is a construction-side rule; checking needs only structure
    let bad: Vec<_> = validate_circuit_with_cap(c, f64::INFINITY)
        .into_iter()
        .filter(|v| v.kind != ViolationKind::Zeta)
        .collect();
    if let Some(v) = bad.first() {
        return input(format!("invalid circuit ({} violations), first: {}", bad.len(), v.detail));
    }
    Ok(())
}

/// Gate with node references resolved to dense indices.
#[derive(Clone, Copy, Debug)]
pub(crate) struct IndexedGate {
    pub kind: GateType,
    pub zeta: f64,
    pub a: usize,
    pub b: usize,
    pub out: usize,
}

pub(crate) fn index_gates(c: &GeneralizedCircuit) -> Result<Vec<IndexedGate>> {
    ensure_valid(c)?;
    let idx = c.node_index();
    Ok(c
        .gates
        .iter()
        .map(|g| IndexedGate {
            kind: g.kind,
            zeta: g.zeta.unwrap_or(0.0),
            a: g.inputs.first().map(|n| idx[n.as_str()]).unwrap_or(usize::MAX),
            b: g.inputs.get(1).map(|n| idx[n.as_str()]).unwrap_or(usize::MAX),
            out: idx[g.output.as_str()],
        })
        .collect())
}

fn near(x: f64, target: f64, eps: f64) -> bool {
    (x - target).abs() <= eps
}

/// Truth of the constraint row for `kind` on raw values.
///
/// `x`, `y` are the first and second inputs (ignored beyond the gate's
/// arity) and `z` the output value.
pub fn constraint_holds(kind: GateType, zeta: f64, x: f64, y: f64, z: f64, eps: f64) -> bool {
    match kind {
        GateType::Const => near(z, zeta, eps),
        GateType::Mulz => near(z, (zeta * x).min(1.0), eps),
        GateType::Copy => near(z, x, eps),
        GateType::Add => near(z, (x + y).min(1.0), eps),
        GateType::Sub => near(z, (x - y).max(0.0), eps),
        GateType::Less => {
            if x < y - eps {
                near(z, 1.0, eps)
            } else if x > y + eps {
                near(z, 0.0, eps)
            } else {
                true
            }
        }
        GateType::Or => {
            let hi = near(x, 1.0, eps) || near(y, 1.0, eps);
            let lo = near(x, 0.0, eps) && near(y, 0.0, eps);
            (!hi || near(z, 1.0, eps)) && (!lo || near(z, 0.0, eps))
        }
        GateType::And => {
            let hi = near(x, 1.0, eps) && near(y, 1.0, eps);
            let lo = near(x, 0.0, eps) || near(y, 0.0, eps);
            (!hi || near(z, 1.0, eps)) && (!lo || near(z, 0.0, eps))
        }
        GateType::Not => {
            (!near(x, 0.0, eps) || near(z, 1.0, eps)) && (!near(x, 1.0, eps) || near(z, 0.0, eps))
        }
    }
}

fn round_bool(v: f64) -> f64 {
    if v > 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Noiseless centre of the constraint for `kind`.
pub fn ideal_value(kind: GateType, zeta: f64, x: f64, y: f64) -> f64 {
    match kind {
        GateType::Const => zeta,
        GateType::Mulz => (zeta * x).min(1.0),
        GateType::Copy => x,
        GateType::Add => (x + y).min(1.0),
        GateType::Sub => (x - y).max(0.0),
        GateType::Less => {
            if x < y {
                1.0
            } else {
                0.0
            }
        }
        GateType::Or => round_bool(x.max(y)),
        GateType::And => round_bool(x.min(y)),
        GateType::Not => 1.0 - round_bool(x),
    }
}

fn input_values(g: &Gate, a: &Assignment) -> Result<(f64, f64)> {
    let x = match g.inputs.first() {
        Some(n) => a.get(n)?,
        None => 0.0,
    };
    let y = match g.inputs.get(1) {
        Some(n) => a.get(n)?,
        None => 0.0,
    };
    Ok((x, y))
}

pub fn gate_satisfied(g: &Gate, a: &Assignment, eps: f64) -> Result<bool> {
    if g.inputs.len() != g.kind.arity() {
        return input(format!("{} gate with {} inputs", g.kind, g.inputs.len()));
    }
    let (x, y) = input_values(g, a)?;
    let z = a.get(&g.output)?;
    Ok(constraint_holds(g.kind, g.zeta.unwrap_or(0.0), x, y, z, eps))
}

pub fn ideal_gate_value(g: &Gate, a: &Assignment) -> Result<f64> {
    if g.inputs.len() != g.kind.arity() {
        return input(format!("{} gate with {} inputs", g.kind, g.inputs.len()));
    }
    let (x, y) = input_values(g, a)?;
    Ok(ideal_value(g.kind, g.zeta.unwrap_or(0.0), x, y))
}

pub(crate) fn count_violated(gates: &[IndexedGate], values: &[f64], eps: f64) -> usize {
    gates
        .iter()
        .filter(|g| {
            let x = if g.a == usize::MAX { 0.0 } else { values[g.a] };
            let y = if g.b == usize::MAX { 0.0 } else { values[g.b] };
            !constraint_holds(g.kind, g.zeta, x, y, values[g.out], eps)
        })
        .count()
}

pub fn violated_fraction(c: &GeneralizedCircuit, a: &Assignment, eps: f64) -> Result<f64> {
    if c.gates.is_empty() {
        return input("violated fraction is undefined for a circuit without gates");
    }
    let gates = index_gates(c)?;
    let values = a.dense(c)?;
    Ok(count_violated(&gates, &values, eps) as f64 / gates.len() as f64)
}

/// Indices of the gates whose constraint fails.
pub fn violated_gates(c: &GeneralizedCircuit, a: &Assignment, eps: f64) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, g) in c.gates.iter().enumerate() {
        if !gate_satisfied(g, a, eps)? {
            out.push(i);
        }
    }
    Ok(out)
}

pub fn is_satisfied(c: &GeneralizedCircuit, a: &Assignment, tol: Tolerance) -> Result<bool> {
    Ok(violated_fraction(c, a, tol.eps)? <= tol.delta)
}

/// Gauss-Seidel sweeps of the ideal semantics, gates updated in list order.
pub fn iterate_fixed_point(
    c: &GeneralizedCircuit,
    init: &Assignment,
    rounds: usize,
) -> Result<Assignment> {
    let gates = index_gates(c)?;
    let mut values: Vec<f64> = c
        .nodes
        .iter()
        .map(|n| init.0.get(n).copied().unwrap_or(0.0))
        .collect();
    for _ in 0..rounds {
        for g in &gates {
            let x = if g.a == usize::MAX { 0.0 } else { values[g.a] };
            let y = if g.b == usize::MAX { 0.0 } else { values[g.b] };
            values[g.out] = ideal_value(g.kind, g.zeta, x, y);
        }
    }
    Ok(Assignment::from_dense(c, &values))
}

fn grid_size(m: usize, nodes: usize) -> u128 {
    (m as u128 + 1).checked_pow(nodes as u32).unwrap_or(u128::MAX)
}

/// First grid assignment (lexicographic in node order, values ascending)
/// that `(eps, delta)`-satisfies the circuit.
pub fn brute_force_search(
    c: &GeneralizedCircuit,
    m: usize,
    tol: Tolerance,
    cap: u128,
) -> Result<Option<Assignment>> {
    Ok(brute_force_all(c, m, tol, cap, 1)?.into_iter().next())
}

/// Up to `limit` satisfying grid assignments in enumeration order.
pub fn brute_force_all(
    c: &GeneralizedCircuit,
    m: usize,
    tol: Tolerance,
    cap: u128,
    limit: usize,
) -> Result<Vec<Assignment>> {
    if m == 0 {
        return input("grid resolution must be at least 1");
    }
    if c.gates.is_empty() {
        return input("brute force needs at least one gate");
    }
    let total = grid_size(m, c.nodes.len());
    if total > cap {
        return Err(Error::Budget {
            what: format!("grid enumeration (m={m}, |V|={})", c.nodes.len()),
            needed: total,
            cap,
        });
    }
    let gates = index_gates(c)?;
    let n = c.nodes.len();
    let mut digits = vec![0usize; n];
    let mut values = vec![0.0f64; n];
    let mut found = Vec::new();
    loop {
        let bad = count_violated(&gates, &values, tol.eps);
        if bad as f64 / gates.len() as f64 <= tol.delta {
            found.push(Assignment::from_dense(c, &values));
            if found.len() >= limit {
                return Ok(found);
            }
        }
        // odometer, last node fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            if digits[pos] < m {
                digits[pos] += 1;
                values[pos] = digits[pos] as f64 / m as f64;
                break;
            }
            digits[pos] = 0;
            values[pos] = 0.0;
        }
    }
}

/// Maximum number of gate input slots reading a single node.
pub fn max_fanout(c: &GeneralizedCircuit) -> usize {
    fanouts(c).into_values().max().unwrap_or(0)
}

pub fn fanouts(c: &GeneralizedCircuit) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = c.nodes.iter().map(|n| (n.clone(), 0)).collect();
    for g in &c.gates {
        for i in &g.inputs {
            *counts.entry(i.clone()).or_insert(0) += 1;
        }
    }
    counts
}
