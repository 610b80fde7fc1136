//! Reduction to a bimatrix game with non-negative row payoffs and
//! non-positive column payoffs, used for relative approximation.
//!
//! Each side picks a triple (node, node action, guess). Adjacent node pairs
//! play the shifted polymatrix edge; two chase games make both sides spread
//! their node choice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::games::{expected_payoffs, BimatrixGame, MixedProfile, MixedStrategy, PolymatrixGame, Table};

/// Slack for floating-point evaluation of the approximate zero-sum inequality.
pub const ZERO_SUM_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeParams {
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
    pub lambda: f64,
    pub eps_prime: f64,
}

impl RelativeParams {
    /// η = δ²/16, λ = 10η, ε' = εδ³/256.
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        let eta = delta * delta / 16.0;
        let p = RelativeParams { eps, delta, eta, lambda: 10.0 * eta, eps_prime: eps * delta.powi(3) / 256.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta <= 1.0) {
            return input("relative parameters need ε ∈ (0,1) and δ ∈ (0,1]");
        }
        if !(self.eta > 0.0) || self.lambda != 10.0 * self.eta || !(self.eps_prime > 0.0 && self.eps_prime < self.eta) {
            return input(format!("need η > 0, λ = 10η and 0 < ε' < η (η={}, λ={}, ε'={})", self.eta, self.lambda, self.eps_prime));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeAction {
    pub node: usize,
    pub action: usize,
    /// Row: the guessed column node. Column: the node hidden from the row's chase.
    pub guess: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeGame {
    pub game: BimatrixGame,
    pub n: usize,
    pub params: RelativeParams,
    pub sides: [Vec<usize>; 2],
    pub source: PolymatrixGame,
    /// `tables[i][j]` holds (row node's table, column node's table) when adjacent.
    #[serde(skip)]
    tables: Vec<Vec<Option<(Table, Table)>>>,
}

impl RelativeGame {
    pub fn actions(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn encode_action(&self, a: &RelativeAction) -> Result<usize> {
        if a.node >= self.n || a.action > 1 || a.guess >= self.n {
            return input(format!("action {a:?} outside n = {}", self.n));
        }
        Ok((a.node * 2 + a.action) * self.n + a.guess)
    }

    pub fn decode_action(&self, idx: usize) -> Result<RelativeAction> {
        if idx >= self.actions() {
            return input(format!("action index {idx} out of range"));
        }
        Ok(RelativeAction { node: idx / self.n / 2, action: idx / self.n % 2, guess: idx % self.n })
    }

    /// Main-game payoffs of a pure profile.
    pub fn main_entry(&self, r: &RelativeAction, c: &RelativeAction) -> (f64, f64) {
        match self.tables[r.node][c.node] {
            None => (0.0, 0.0),
            Some((ti, tj)) => {
                let eta = self.params.eta;
                (1.0 + eta * ti[r.action][c.action], -1.0 - eta * (1.0 - tj[c.action][r.action]))
            }
        }
    }

    /// Chase-game payoffs of a pure profile (row, column); exactly zero-sum.
    pub fn side_entry(&self, r: &RelativeAction, c: &RelativeAction) -> (f64, f64) {
        let hits = f64::from(u8::from(r.node == c.guess)) + f64::from(u8::from(r.guess == c.node));
        (hits, -hits)
    }
}

pub fn build_relative(p: &PolymatrixGame, params: RelativeParams) -> Result<RelativeGame> {
    params.validate()?;
    p.validate(3)?;
    let [left, right] = p
        .bipartition
        .clone()
        .ok_or_else(|| Error::Input("relative reduction needs a bipartite game".into()))?;
    if left.len() != right.len() || left.is_empty() {
        return input(format!("sides have sizes {} and {}; need equal non-empty sides", left.len(), right.len()));
    }
    let n = left.len();
    let mut lpos = vec![usize::MAX; p.players];
    let mut rpos = vec![usize::MAX; p.players];
    for (i, &v) in left.iter().enumerate() {
        lpos[v] = i;
    }
    for (i, &v) in right.iter().enumerate() {
        rpos[v] = i;
    }
    let mut tables = vec![vec![None; n]; n];
    for e in &p.edges {
        let (s, t) = if lpos[e.u] != usize::MAX { (e.u, e.v) } else { (e.v, e.u) };
        tables[lpos[s]][rpos[t]] = Some((*e.table_for(s).expect("endpoint"), *e.table_for(t).expect("endpoint")));
    }
    let mut rg = RelativeGame {
        game: BimatrixGame { r: vec![], c: vec![] },
        n,
        params,
        sides: [left, right],
        source: p.clone(),
        tables,
    };
    let m = rg.actions();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
        .into_par_iter()
        .map(|ri| {
            let ra = rg.decode_action(ri).expect("in range");
            let mut rr = vec![0.0; m];
            let mut cc = vec![0.0; m];
            for ci in 0..m {
                let ca = rg.decode_action(ci).expect("in range");
                let (mr, mc) = rg.main_entry(&ra, &ca);
                let (sr, sc) = rg.side_entry(&ra, &ca);
                rr[ci] = mr + sr;
                cc[ci] = mc + sc;
            }
            (rr, cc)
        })
        .collect();
    let (r, c): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    rg.game = BimatrixGame::new(r, c)?;
    Ok(rg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSumCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `|U_R + U_C| ≤ η·min(U_R, −U_C)` at a mixed pair of the full game.
pub fn approx_zero_sum_check(rg: &RelativeGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<ZeroSumCheck> {
    let (ur, uc) = expected_payoffs(&rg.game, x, y)?;
    let lhs = (ur + uc).abs();
    let rhs = rg.params.eta * ur.min(-uc);
    Ok(ZeroSumCheck { lhs, rhs, pass: lhs <= rhs + ZERO_SUM_SLACK })
}

fn side_strategy(rg: &RelativeGame, x: &MixedStrategy) -> Result<()> {
    if x.len() != rg.actions() {
        return input(format!("strategy has {} entries for {} actions", x.len(), rg.actions()));
    }
    Ok(())
}

/// Total probability of the triples whose node is `i`.
pub fn node_marginal(rg: &RelativeGame, x: &MixedStrategy, i: usize) -> Result<f64> {
    side_strategy(rg, x)?;
    if i >= rg.n {
        return input(format!("node {i} out of range"));
    }
    let per = 2 * rg.n;
    Ok(x.0[i * per..(i + 1) * per].iter().sum())
}

/// Probability of action 1 given node `i` is chosen; 1 when the node is never chosen.
pub fn node_action_conditional(rg: &RelativeGame, x: &MixedStrategy, i: usize) -> Result<f64> {
    let mass = node_marginal(rg, x, i)?;
    if mass == 0.0 {
        return Ok(1.0);
    }
    let start = (i * 2 + 1) * rg.n;
    Ok(x.0[start..start + rg.n].iter().sum::<f64>() / mass)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureCheck {
    pub row_deviation: f64,
    pub col_deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `Σ|x(i) − 1/n|` and `Σ|y(j) − 1/n|` against λ.
pub fn structure_check(rg: &RelativeGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<StructureCheck> {
    let share = 1.0 / rg.n as f64;
    let dev = |s: &MixedStrategy| -> Result<f64> {
        (0..rg.n).map(|i| node_marginal(rg, s, i).map(|m| (m - share).abs())).sum()
    };
    let (row_deviation, col_deviation) = (dev(x)?, dev(y)?);
    let bound = rg.params.lambda;
    Ok(StructureCheck { row_deviation, col_deviation, bound, pass: row_deviation <= bound && col_deviation <= bound })
}

pub fn decode_relative(rg: &RelativeGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<MixedProfile> {
    let mut p = vec![1.0; rg.source.players];
    for (side, s) in [(0, x), (1, y)] {
        for i in 0..rg.n {
            p[rg.sides[side][i]] = node_action_conditional(rg, s, i)?;
        }
    }
    Ok(MixedProfile { p })
}

/// Honest strategies: uniform node and guess, node action drawn from `q`.
pub fn encode_relative(rg: &RelativeGame, q: &MixedProfile) -> Result<(MixedStrategy, MixedStrategy)> {
    if q.p.len() != rg.source.players {
        return input("profile does not cover every polymatrix player");
    }
    let w = 1.0 / (rg.n * rg.n) as f64;
    let side = |s: usize| {
        let mut x = vec![0.0; rg.actions()];
        for i in 0..rg.n {
            let pv = q.p[rg.sides[s][i]];
            for c in 0..rg.n {
                x[(i * 2) * rg.n + c] = w * (1.0 - pv);
                x[(i * 2 + 1) * rg.n + c] = w * pv;
            }
        }
        MixedStrategy(x)
    };
    Ok((side(0), side(1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityBounds {
    pub u_row: f64,
    pub u_col: f64,
    pub row_lower: f64,
    pub row_upper: f64,
    pub col_upper: f64,
    pub col_lower: f64,
    pub row_ok: bool,
    pub col_ok: bool,
}

/// Evaluates both utility sandwiches an approximate equilibrium must satisfy.
pub fn utility_bounds_check(rg: &RelativeGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<UtilityBounds> {
    let (u_row, u_col) = expected_payoffs(&rg.game, x, y)?;
    let RelativeParams { eta, eps_prime: e, .. } = rg.params;
    let n = rg.n as f64;
    let row_lower = (1.0 - e) * 5.0 / n;
    let row_upper = (1.0 + eta) * (1.0 + e) * (5.0 + 3.0 * eta) / n;
    let col_upper = -(1.0 - e) * (1.0 - eta) * 5.0 / n;
    let col_lower = -(1.0 + e) * (5.0 + 3.0 * eta) / n;
    Ok(UtilityBounds {
        u_row,
        u_col,
        row_lower,
        row_upper,
        col_upper,
        col_lower,
        row_ok: row_lower <= u_row && u_row <= row_upper,
        col_ok: col_lower <= u_col && u_col <= col_upper,
    })
}
