//! Bimatrix and 2-action polymatrix games together with the equilibrium
//! notions used throughout the crate: additive, relative, weak `(ε,δ)` and
//! weak well-supported approximate equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Probability below which an action is treated as outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Default per-player degree bound for polymatrix games.
pub const DEFAULT_MAX_DEGREE: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimatrixGame {
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl BimatrixGame {
    pub fn new(r: Vec<Vec<f64>>, c: Vec<Vec<f64>>) -> Result<Self> {
        let g = BimatrixGame { r, c };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.r.len();
        if m == 0 || self.c.len() != m {
            return input("payoff matrices must be non-empty with equal row counts");
        }
        let n = self.r[0].len();
        if n == 0 {
            return input("payoff matrices must have at least one column");
        }
        for (rr, cr) in self.r.iter().zip(&self.c) {
            if rr.len() != n || cr.len() != n {
                return input("payoff matrices are ragged or differ in shape");
            }
            if rr.iter().chain(cr).any(|v| !v.is_finite()) {
                return input("payoff entries must be finite");
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.r.len()
    }

    pub fn cols(&self) -> usize {
        self.r.first().map_or(0, Vec::len)
    }

    /// `R y`, summed left to right.
    pub fn row_action_payoffs(&self, y: &[f64]) -> Vec<f64> {
        self.r.iter().map(|row| dot(row, y)).collect()
    }

    /// `Cᵀ x`, summed over rows in index order.
    pub fn col_action_payoffs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (xi, row) in x.iter().zip(&self.c) {
            if *xi == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o += xi * v;
            }
        }
        out
    }

    pub fn is_constant_sum(&self, tol: f64) -> Option<f64> {
        let s = self.r[0][0] + self.c[0][0];
        let ok = self
            .r
            .iter()
            .zip(&self.c)
            .all(|(rr, cr)| rr.iter().zip(cr).all(|(a, b)| (a + b - s).abs() <= tol));
        ok.then_some(s)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(pub Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let s = MixedStrategy(probs);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return input("mixed strategy is empty");
        }
        if self.0.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return input("mixed strategy has a negative or non-finite entry");
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return input(format!("mixed strategy sums to {sum}, not 1"));
        }
        Ok(())
    }

    pub fn pure(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        MixedStrategy(v)
    }

    pub fn uniform(n: usize) -> Self {
        MixedStrategy(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A pair of mixed strategies, serialized as `{"x":[...],"y":[...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedPair {
    pub x: MixedStrategy,
    pub y: MixedStrategy,
}

fn check_dims(g: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<()> {
    if x.len() != g.rows() || y.len() != g.cols() {
        return input(format!(
            "strategy sizes ({}, {}) do not match game shape {}x{}",
            x.len(),
            y.len(),
            g.rows(),
            g.cols()
        ));
    }
    Ok(())
}

pub fn expected_payoffs(g: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
    check_dims(g, x, y)?;
    let ry = g.row_action_payoffs(&y.0);
    let cy: Vec<f64> = g.c.iter().map(|row| dot(row, &y.0)).collect();
    Ok((dot(&x.0, &ry), dot(&x.0, &cy)))
}

/// Current and best-response utilities of both players.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub u_row: f64,
    pub best_row: f64,
    pub u_col: f64,
    pub best_col: f64,
}

pub fn utilities(g: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<UtilityReport> {
    check_dims(g, x, y)?;
    let ry = g.row_action_payoffs(&y.0);
    let cx = g.col_action_payoffs(&x.0);
    Ok(UtilityReport {
        u_row: dot(&x.0, &ry),
        best_row: max_of(&ry),
        u_col: dot(&y.0, &cx),
        best_col: max_of(&cx),
    })
}

pub fn regrets(g: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
    let u = utilities(g, x, y)?;
    Ok(((u.best_row - u.u_row).max(0.0), (u.best_col - u.u_col).max(0.0)))
}

pub fn is_eps_ne(g: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy, eps: f64) -> Result<bool> {
    let (rr, rc) = regrets(g, x, y)?;
    Ok(rr.max(rc) <= eps)
}

/// `|u* − u| ≤ ε·|u*|` for a single player.
pub fn relative_gap_ok(u: f64, best: f64, eps: f64) -> Result<bool> {
    if best == 0.0 && u != 0.0 {
        return Err(Error::Degenerate(format!(
            "best-response utility is 0 while current utility is {u}"
        )));
    }
    Ok((best - u).abs() <= eps * best.abs())
}

pub fn is_relative_eps_ne(
    g: &BimatrixGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    eps: f64,
) -> Result<bool> {
    let u = utilities(g, x, y)?;
    Ok(relative_gap_ok(u.u_row, u.best_row, eps)? && relative_gap_ok(u.u_col, u.best_col, eps)?)
}

pub type Table = [[f64; 2]; 2];

/// One polymatrix edge. `au[a_u][a_v]` is `u`'s payoff, `av[a_v][a_u]` is `v`'s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyEdge {
    pub u: usize,
    pub v: usize,
    #[serde(rename = "Au")]
    pub au: Table,
    #[serde(rename = "Av")]
    pub av: Table,
}

impl PolyEdge {
    /// Payoff table of `player` on this edge, indexed `[own action][other action]`.
    pub fn table_for(&self, player: usize) -> Option<&Table> {
        if player == self.u {
            Some(&self.au)
        } else if player == self.v {
            Some(&self.av)
        } else {
            None
        }
    }

    pub fn other(&self, player: usize) -> usize {
        if player == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolymatrixGame {
    pub players: usize,
    pub edges: Vec<PolyEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<[Vec<usize>; 2]>,
}

impl PolymatrixGame {
    pub fn new(players: usize) -> Self {
        PolymatrixGame { players, edges: Vec::new(), bipartition: None }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, au: Table, av: Table) {
        self.edges.push(PolyEdge { u, v, au, av });
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.players];
        for e in &self.edges {
            if e.u < self.players {
                d[e.u] += 1;
            }
            if e.v < self.players {
                d[e.v] += 1;
            }
        }
        d
    }

    /// Incident edge indices per player, in edge-list order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.players];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        adj
    }

    pub fn validate(&self, max_degree: usize) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.players || e.v >= self.players {
                return input(format!("edge {i} references a player outside 0..{}", self.players));
            }
            if e.u == e.v {
                return input(format!("edge {i} is a self-loop on player {}", e.u));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return input(format!("edge {i} duplicates the pair ({}, {})", e.u, e.v));
            }
            let entries = e.au.iter().chain(&e.av).flatten();
            if entries.clone().any(|p| !(0.0..=1.0).contains(p)) {
                return input(format!("edge {i} has a payoff outside [0,1]"));
            }
        }
        for (p, d) in self.degrees().into_iter().enumerate() {
            if d > max_degree {
                return input(format!("player {p} has degree {d} > {max_degree}"));
            }
        }
        if let Some([left, right]) = &self.bipartition {
            let mut side = vec![None; self.players];
            for (s, list) in [left, right].iter().enumerate() {
                for &p in list.iter() {
                    if p >= self.players {
                        return input(format!("bipartition names unknown player {p}"));
                    }
                    if side[p].is_some() {
                        return input(format!("player {p} appears twice in the bipartition"));
                    }
                    side[p] = Some(s);
                }
            }
            if let Some(p) = side.iter().position(Option::is_none) {
                return input(format!("player {p} is missing from the bipartition"));
            }
            for (i, e) in self.edges.iter().enumerate() {
                if side[e.u] == side[e.v] {
                    return input(format!("edge {i} does not cross the bipartition"));
                }
            }
        }
        Ok(())
    }

    /// Adds isolated players to the smaller side so both sides have equal size.
    pub fn pad_to_equal_sides(&self) -> Result<PolymatrixGame> {
        let Some([left, right]) = &self.bipartition else {
            return input("padding needs a bipartition");
        };
        let mut out = self.clone();
        let (mut l, mut r) = (left.clone(), right.clone());
        while l.len() < r.len() {
            l.push(out.players);
            out.players += 1;
        }
        while r.len() < l.len() {
            r.push(out.players);
            out.players += 1;
        }
        out.bipartition = Some([l, r]);
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedProfile {
    pub p: Vec<f64>,
}

impl MixedProfile {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return input(format!("profile entry {v} outside [0,1]"));
        }
        Ok(MixedProfile { p })
    }

    pub fn constant(n: usize, v: f64) -> Self {
        MixedProfile { p: vec![v; n] }
    }
}

fn check_profile(g: &PolymatrixGame, prof: &MixedProfile) -> Result<()> {
    if prof.p.len() != g.players {
        return input(format!(
            "profile has {} entries for {} players",
            prof.p.len(),
            g.players
        ));
    }
    Ok(())
}

/// Expected payoff of each of `v`'s two actions against the others' mixtures.
pub fn action_payoffs(g: &PolymatrixGame, prof: &MixedProfile, v: usize) -> Result<[f64; 2]> {
    if v >= g.players {
        return input(format!("unknown player {v}"));
    }
    check_profile(g, prof)?;
    let mut out = [0.0; 2];
    for e in g.edges.iter().filter(|e| e.u == v || e.v == v) {
        let t = e.table_for(v).expect("incident edge");
        let q = prof.p[e.other(v)];
        for (a, o) in out.iter_mut().enumerate() {
            *o += t[a][0] * (1.0 - q) + t[a][1] * q;
        }
    }
    Ok(out)
}

pub(crate) fn action_payoffs_adj(
    g: &PolymatrixGame,
    adj: &[usize],
    p: &[f64],
    v: usize,
) -> [f64; 2] {
    let mut out = [0.0; 2];
    for &ei in adj {
        let e = &g.edges[ei];
        let t = e.table_for(v).expect("incident edge");
        let q = p[e.other(v)];
        for (a, o) in out.iter_mut().enumerate() {
            *o += t[a][0] * (1.0 - q) + t[a][1] * q;
        }
    }
    out
}

fn regret_from(pay: [f64; 2], pv: f64) -> f64 {
    let current = pay[0] * (1.0 - pv) + pay[1] * pv;
    (pay[0].max(pay[1]) - current).max(0.0)
}

pub fn vertex_regret(g: &PolymatrixGame, prof: &MixedProfile, v: usize) -> Result<f64> {
    let pay = action_payoffs(g, prof, v)?;
    Ok(regret_from(pay, prof.p[v]))
}

pub fn all_regrets(g: &PolymatrixGame, prof: &MixedProfile) -> Result<Vec<f64>> {
    check_profile(g, prof)?;
    let adj = g.adjacency();
    Ok((0..g.players)
        .map(|v| regret_from(action_payoffs_adj(g, &adj[v], &prof.p, v), prof.p[v]))
        .collect())
}

pub fn is_weak_eps_delta_ne(g: &PolymatrixGame, prof: &MixedProfile, eps: f64, delta: f64) -> Result<bool> {
    let bad = all_regrets(g, prof)?.into_iter().filter(|r| *r > eps).count();
    Ok(bad as f64 <= delta * g.players as f64)
}

/// Whether every supported action of `v` is within `eps` of the best response.
pub fn well_supported(pay: [f64; 2], pv: f64, eps: f64) -> bool {
    let best = pay[0].max(pay[1]);
    let in_support = [1.0 - pv > SUPPORT_THRESHOLD, pv > SUPPORT_THRESHOLD];
    (0..2).all(|a| !in_support[a] || pay[a] >= best - eps)
}

pub fn is_weak_eps_delta_wsne(g: &PolymatrixGame, prof: &MixedProfile, eps: f64, delta: f64) -> Result<bool> {
    check_profile(g, prof)?;
    let adj = g.adjacency();
    let bad = (0..g.players)
        .filter(|&v| !well_supported(action_payoffs_adj(g, &adj[v], &prof.p, v), prof.p[v], eps))
        .count();
    Ok(bad as f64 <= delta * g.players as f64)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Bitmasks over `l` items with exactly `size` bits set, in ascending numeric order.
pub fn subsets_of_size(l: usize, size: usize) -> Vec<u64> {
    assert!(l < 64, "subset enumeration supports fewer than 64 items");
    (0u64..(1u64 << l)).filter(|m| m.count_ones() as usize == size).collect()
}

/// Hide-and-seek over `l` locations: the hider (rows) wins when its location
/// is outside the seeker's half-size set. Payoffs `u₂ = 1 − u₁`.
pub fn build_althofer(l: usize) -> Result<BimatrixGame> {
    if l < 2 || l % 2 != 0 {
        return input(format!("Althofer game needs an even l >= 2, got {l}"));
    }
    let sets = subsets_of_size(l, l / 2);
    let r: Vec<Vec<f64>> = (0..l)
        .map(|i| sets.iter().map(|b| if b >> i & 1 == 1 { 0.0 } else { 1.0 }).collect())
        .collect();
    let c = r.iter().map(|row| row.iter().map(|v| 1.0 - v).collect()).collect();
    BimatrixGame::new(r, c)
}

pub fn tv_to_uniform(marginals: &[f64]) -> Result<f64> {
    MixedStrategy(marginals.to_vec()).validate()?;
    let l = marginals.len() as f64;
    Ok(0.5 * marginals.iter().map(|m| (m - 1.0 / l).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> BimatrixGame {
        BimatrixGame::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
    }

    fn coord() -> BimatrixGame {
        let m = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        BimatrixGame::new(m.clone(), m).unwrap()
    }

    /// One edge; player 0 wants to match, player 1 wants to mismatch.
    pub(crate) fn pennies_poly() -> PolymatrixGame {
        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 1, [[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]);
        g.bipartition = Some([vec![0], vec![1]]);
        g
    }

    #[test]
    fn payoffs_and_regrets() {
        let e1 = MixedStrategy::pure(2, 0);
        assert_eq!(expected_payoffs(&coord(), &e1, &e1).unwrap(), (1.0, 1.0));
        let u = MixedStrategy::uniform(2);
        assert_eq!(expected_payoffs(&pennies(), &u, &u).unwrap(), (0.5, 0.5));
        let g = BimatrixGame::new(vec![vec![0.2]], vec![vec![0.7]]).unwrap();
        let p = MixedStrategy::pure(1, 0);
        assert_eq!(expected_payoffs(&g, &p, &p).unwrap(), (0.2, 0.7));

        assert_eq!(regrets(&coord(), &e1, &e1).unwrap(), (0.0, 0.0));
        assert_eq!(regrets(&pennies(), &e1, &e1).unwrap(), (0.0, 1.0));
        assert_eq!(regrets(&pennies(), &u, &u).unwrap(), (0.0, 0.0));
        assert!(regrets(&pennies(), &MixedStrategy::uniform(3), &u).is_err());
    }

    #[test]
    fn eps_ne_thresholds() {
        let e1 = MixedStrategy::pure(2, 0);
        assert!(!is_eps_ne(&pennies(), &e1, &e1, 0.5).unwrap());
        assert!(is_eps_ne(&pennies(), &e1, &e1, 1.0).unwrap());
        // regrets (0.3, 0.2): row gains 0.3 by switching, column 0.2
        let g = BimatrixGame::new(vec![vec![0.0], vec![0.3]], vec![vec![0.0], vec![0.0]]).unwrap();
        let g2 = BimatrixGame::new(
            vec![vec![0.0, 0.0], vec![0.3, 0.3]],
            vec![vec![0.0, 0.2], vec![0.0, 0.2]],
        )
        .unwrap();
        assert_eq!(regrets(&g, &e1, &MixedStrategy::pure(1, 0)).unwrap(), (0.3, 0.0));
        assert!(is_eps_ne(&g2, &e1, &e1, 0.3).unwrap());
        assert!(!is_eps_ne(&g2, &e1, &e1, 0.29).unwrap());
    }

    #[test]
    fn relative_rule() {
        assert!(relative_gap_ok(4.0, 5.0, 0.2).unwrap());
        assert!(!relative_gap_ok(-6.0, -5.0, 0.1).unwrap());
        assert!(relative_gap_ok(0.0, 0.0, 0.0).unwrap());
        assert!(matches!(relative_gap_ok(1.0, 0.0, 0.1), Err(Error::Degenerate(_))));
        let e1 = MixedStrategy::pure(2, 0);
        assert!(is_relative_eps_ne(&coord(), &e1, &e1, 0.0).unwrap());
    }

    #[test]
    fn polymatrix_regrets() {
        let g = pennies_poly();
        g.validate(3).unwrap();
        let half = MixedProfile::constant(2, 0.5);
        assert_eq!(all_regrets(&g, &half).unwrap(), vec![0.0, 0.0]);
        let zero = MixedProfile::constant(2, 0.0);
        // player 0 matches (payoff 1), player 1 should switch to mismatch
        assert_eq!(all_regrets(&g, &zero).unwrap(), vec![0.0, 1.0]);
        let iso = PolymatrixGame::new(3);
        assert_eq!(vertex_regret(&iso, &MixedProfile::constant(3, 0.3), 1).unwrap(), 0.0);
        assert!(vertex_regret(&iso, &MixedProfile::constant(3, 0.3), 7).is_err());
    }

    #[test]
    fn weak_equilibria() {
        let g = pennies_poly();
        let half = MixedProfile::constant(2, 0.5);
        for (e, d) in [(0.0, 0.0), (0.1, 0.0), (0.5, 1.0)] {
            assert!(is_weak_eps_delta_ne(&g, &half, e, d).unwrap());
        }
        let zero = MixedProfile::constant(2, 0.0);
        assert!(is_weak_eps_delta_ne(&g, &zero, 0.1, 0.6).unwrap());
        assert!(!is_weak_eps_delta_ne(&g, &zero, 0.1, 0.4).unwrap());
    }

    #[test]
    fn well_supported_single_player() {
        // one player, action payoffs (1.0, 0.7) via an edge to a pinned partner
        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 1, [[1.0, 1.0], [0.7, 0.7]], [[0.0, 0.0], [0.0, 0.0]]);
        let prof = MixedProfile::new(vec![0.5, 0.0]).unwrap();
        // player 1 is indifferent, so only player 0 can be non-compliant
        assert!(!is_weak_eps_delta_wsne(&g, &prof, 0.2, 0.0).unwrap());
        assert!(is_weak_eps_delta_wsne(&g, &prof, 0.2, 1.0).unwrap());
        assert!(is_weak_eps_delta_wsne(&g, &prof, 0.3, 0.0).unwrap());
        let pure = MixedProfile::new(vec![0.0, 0.0]).unwrap();
        assert!(is_weak_eps_delta_wsne(&g, &pure, 0.0, 0.0).unwrap());
    }

    #[test]
    fn polymatrix_validation() {
        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 0, [[0.0; 2]; 2], [[0.0; 2]; 2]);
        assert!(g.validate(3).is_err());
        let mut g = pennies_poly();
        g.add_edge(1, 0, [[0.0; 2]; 2], [[0.0; 2]; 2]);
        assert!(g.validate(3).is_err());
        let mut g = pennies_poly();
        g.edges[0].au[0][0] = 1.5;
        assert!(g.validate(3).is_err());
        let mut g = pennies_poly();
        g.bipartition = Some([vec![0, 1], vec![]]);
        assert!(g.validate(3).is_err());
        let mut g = PolymatrixGame::new(5);
        for v in 1..5 {
            g.add_edge(0, v, [[0.0; 2]; 2], [[0.0; 2]; 2]);
        }
        assert!(g.validate(3).is_err());
        assert!(g.validate(4).is_ok());
    }

    #[test]
    fn padding() {
        let mut g = PolymatrixGame::new(3);
        g.bipartition = Some([vec![0, 1], vec![2]]);
        let p = g.pad_to_equal_sides().unwrap();
        assert_eq!(p.players, 4);
        assert_eq!(p.bipartition, Some([vec![0, 1], vec![2, 3]]));
        p.validate(3).unwrap();
    }

    #[test]
    fn althofer_shapes() {
        let g = build_althofer(2).unwrap();
        let u = MixedStrategy::uniform(2);
        assert_eq!(expected_payoffs(&g, &u, &u).unwrap(), (0.5, 0.5));
        assert!(is_eps_ne(&g, &u, &u, 0.0).unwrap());
        assert_eq!(build_althofer(4).unwrap().cols(), 6);
        assert!(build_althofer(3).is_err());
        for l in [2, 4, 6, 8] {
            let g = build_althofer(l).unwrap();
            let against = g.col_action_payoffs(&MixedStrategy::uniform(l).0);
            let hider: Vec<f64> = against.iter().map(|c| 1.0 - c).collect();
            assert!(hider.iter().all(|v| (v - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn total_variation() {
        assert_eq!(tv_to_uniform(&[0.25; 4]).unwrap(), 0.0);
        assert_eq!(tv_to_uniform(&[1.0, 0.0]).unwrap(), 0.5);
        assert!((tv_to_uniform(&[0.3, 0.7]).unwrap() - 0.2).abs() < 1e-15);
        assert!(tv_to_uniform(&[0.3, 0.3]).is_err());
    }

    #[test]
    fn json_formats() {
        let g = pennies_poly();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"Au\"") && s.contains("\"bipartition\""));
        assert_eq!(serde_json::from_str::<PolymatrixGame>(&s).unwrap(), g);
        let b: BimatrixGame = serde_json::from_str(r#"{"R":[[1]],"C":[[0]]}"#).unwrap();
        assert_eq!(b.rows(), 1);
        let pair: MixedPair = serde_json::from_str(r#"{"x":[1],"y":[0.5,0.5]}"#).unwrap();
        assert_eq!(pair.y.len(), 2);
        let prof: MixedProfile = serde_json::from_str(r#"{"p":[0.5]}"#).unwrap();
        assert_eq!(prof.p, vec![0.5]);
    }
}
