//! Greedy partition of a bipartite graph into blocks with few edges between
//! any pair of blocks.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteGraph {
    /// Vertices per side.
    pub n: usize,
    /// Degree bound (exact degree for regular graphs).
    pub d: usize,
    /// `(u, v)` with `u` on the left side and `v` on the right.
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(n: usize, d: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = BipartiteGraph { n, d, edges };
        g.validate(false)?;
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: BipartiteGraph = serde_json::from_str(s)?;
        g.validate(false)?;
        Ok(g)
    }

    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut du = vec![0; self.n];
        let mut dv = vec![0; self.n];
        for &(u, v) in &self.edges {
            du[u] += 1;
            dv[v] += 1;
        }
        (du, dv)
    }

    /// Checks endpoints, simplicity and degrees (`== d` when `regular`, else `≤ d`).
    pub fn validate(&self, regular: bool) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return input("graph needs n ≥ 1 and d ≥ 1");
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &self.edges {
            if u >= self.n || v >= self.n {
                return input(format!("edge ({u},{v}) out of range for n={}", self.n));
            }
            if !seen.insert((u, v)) {
                return input(format!("duplicate edge ({u},{v})"));
            }
        }
        let (du, dv) = self.degrees();
        for (side, degs) in [("left", &du), ("right", &dv)] {
            for (i, &x) in degs.iter().enumerate() {
                if x > self.d || (regular && x != self.d) {
                    return input(format!("{side} vertex {i} has degree {x}, expected {}{}", if regular { "" } else { "≤ " }, self.d));
                }
            }
        }
        Ok(())
    }

    pub fn is_regular(&self) -> bool {
        self.validate(true).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub k: usize,
    #[serde(rename = "S")]
    pub s_parts: Vec<Vec<usize>>,
    #[serde(rename = "T")]
    pub t_parts: Vec<Vec<usize>>,
}

pub fn default_block_size(n: usize) -> usize {
    let mut k = (n as f64).sqrt().ceil() as usize;
    // guard against float error on perfect squares
    while k > 1 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k.max(1)
}

/// The pairwise edge bound `2d²k²/n`.
pub fn edge_bound(n: usize, d: usize, k: usize) -> f64 {
    2.0 * (d * d * k * k) as f64 / n as f64
}

/// Number of blocks per side, `⌊n/k⌋`; the last left block absorbs the remainder.
pub fn block_count(n: usize, k: usize) -> usize {
    (n / k).max(1)
}

fn left_block(u: usize, k: usize, parts: usize) -> usize {
    (u / k).min(parts - 1)
}

pub fn greedy_partition(g: &BipartiteGraph, k: usize) -> Result<Partition> {
    g.validate(false)?;
    if k == 0 || k > g.n {
        return input(format!("block size k={k} must lie in [1, n={}]", g.n));
    }
    let parts = block_count(g.n, k);
    let bound = edge_bound(g.n, g.d, k);
    let mut s_parts = vec![Vec::new(); parts];
    for u in 0..g.n {
        s_parts[left_block(u, k, parts)].push(u);
    }
    let mut nbrs = vec![Vec::new(); g.n];
    for &(u, v) in &g.edges {
        nbrs[v].push(left_block(u, k, parts));
    }
    let mut counts = vec![vec![0usize; parts]; parts];
    let mut t_parts: Vec<Vec<usize>> = vec![Vec::new(); parts];
    for v in 0..g.n {
        let mut mult = vec![0usize; parts];
        for &i in &nbrs[v] {
            mult[i] += 1;
        }
        let fits = |j: usize| {
            t_parts[j].len() < 2 * k
                && (0..parts).all(|i| mult[i] == 0 || ((counts[i][j] + mult[i]) as f64) < bound)
        };
        let j = (0..parts).find(|&j| fits(j)).ok_or_else(|| {
            Error::Internal(format!("no feasible block for right vertex {v} (k={k}, bound {bound})"))
        })?;
        t_parts[j].push(v);
        for i in 0..parts {
            counts[i][j] += mult[i];
        }
    }
    Ok(Partition { k, s_parts, t_parts })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionViolation {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub valid: bool,
    pub bound: f64,
    pub max_pair_edges: usize,
    pub max_t_size: usize,
    pub violations: Vec<PartitionViolation>,
}

fn violation(kind: &str, detail: String) -> PartitionViolation {
    PartitionViolation { kind: kind.to_string(), detail }
}

/// Recomputes coverage, sizes and pairwise edge counts from scratch.
pub fn verify_partition(g: &BipartiteGraph, p: &Partition) -> PartitionReport {
    let mut violations = Vec::new();
    let bound = edge_bound(g.n, g.d, p.k.max(1));
    let mut owner_s = vec![None; g.n];
    let mut owner_t = vec![None; g.n];
    for (side, parts, owner) in [("S", &p.s_parts, &mut owner_s), ("T", &p.t_parts, &mut owner_t)] {
        for (i, part) in parts.iter().enumerate() {
            for &x in part {
                if x >= g.n {
                    violations.push(violation("coverage", format!("{side}-part {i} holds out-of-range vertex {x}")));
                } else if let Some(prev) = owner[x] {
                    violations.push(violation("coverage", format!("vertex {x} in {side}-parts {prev} and {i}")));
                } else {
                    owner[x] = Some(i);
                }
            }
        }
        for (x, o) in owner.iter().enumerate() {
            if o.is_none() {
                violations.push(violation("coverage", format!("{side}-side vertex {x} is not covered")));
            }
        }
    }
    if p.k == 0 {
        violations.push(violation("size", "block size k is zero".into()));
    }
    let expected = if p.k == 0 { 0 } else { block_count(g.n, p.k) };
    if p.s_parts.len() != expected || p.t_parts.len() != expected {
        violations.push(violation(
            "count",
            format!("expected {expected} parts per side, got {} and {}", p.s_parts.len(), p.t_parts.len()),
        ));
    }
    let last = p.s_parts.len().saturating_sub(1);
    for (i, part) in p.s_parts.iter().enumerate() {
        let ok = if i == last { part.len() >= p.k && part.len() < 2 * p.k.max(1) } else { part.len() == p.k };
        if !ok {
            violations.push(violation("size", format!("S-part {i} has size {}", part.len())));
        }
    }
    for (j, part) in p.t_parts.iter().enumerate() {
        if part.len() > 2 * p.k {
            violations.push(violation("size", format!("T-part {j} has size {} > 2k = {}", part.len(), 2 * p.k)));
        }
    }
    let mut counts = vec![vec![0usize; p.t_parts.len()]; p.s_parts.len()];
    for &(u, v) in &g.edges {
        if let (Some(Some(i)), Some(Some(j))) = (owner_s.get(u), owner_t.get(v)) {
            counts[*i][*j] += 1;
        }
    }
    let mut max_pair_edges = 0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            max_pair_edges = max_pair_edges.max(c);
            if c as f64 >= bound {
                violations.push(violation("edges", format!("S{i}×T{j} has {c} edges, bound {bound}")));
            }
        }
    }
    PartitionReport {
        valid: violations.is_empty(),
        bound,
        max_pair_edges,
        max_t_size: p.t_parts.iter().map(Vec::len).max().unwrap_or(0),
        violations,
    }
}
