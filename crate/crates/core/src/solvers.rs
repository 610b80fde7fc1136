//! Desk-scale equilibrium oracles.
//!
//! Everything here enumerates; callers set a [`SolverBudget`] and get a
//! budget refusal before any work starts when the enumeration is too big.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::games::{
    action_payoffs_adj, all_regrets, binomial, dot, is_eps_ne, BimatrixGame, MixedPair,
    MixedProfile, MixedStrategy, PolymatrixGame,
};

/// Largest indifference system solved exactly; bigger ones use `f64` with a residual check.
pub const EXACT_SOLVE_LIMIT: usize = 12;

const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverBudget {
    pub max_support: usize,
    pub grid: usize,
    pub iterations: usize,
    /// Cap on the number of candidate pairs (support pairs, grid pairs, ...).
    pub action_cap: u128,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget { max_support: 4, grid: 10, iterations: 10_000, action_cap: 50_000_000 }
    }
}

impl SolverBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_support == 0 || self.grid == 0 || self.iterations == 0 || self.action_cap == 0 {
            return input("solver budget fields must be positive");
        }
        Ok(())
    }

    fn refuse(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.action_cap {
            return Err(Error::Budget { what: what.to_string(), needed, cap: self.action_cap });
        }
        Ok(())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact integer image of a payoff matrix: every `f64` is dyadic, so a
/// single power-of-two scale makes all entries integers.
struct ScaledMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl ScaledMatrix {
    fn new(m: &[Vec<f64>]) -> Self {
        let rats: Vec<Vec<BigRational>> = m
            .iter()
            .map(|row| row.iter().map(|v| BigRational::from_float(*v).expect("finite")).collect())
            .collect();
        let denom = rats
            .iter()
            .flatten()
            .map(|r| r.denom().clone())
            .max()
            .unwrap_or_else(|| BigInt::from(1));
        let entries = rats
            .iter()
            .map(|row| row.iter().map(|r| (r * &denom).to_integer()).collect())
            .collect();
        ScaledMatrix { entries }
    }
}

/// Bareiss elimination on an integer augmented matrix `[A | b]`.
fn bareiss_solve(mut m: Vec<Vec<BigInt>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Some(x)
}

fn float_solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    let orig = m.clone();
    for k in 0..n {
        let pivot = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))?;
        if m[pivot][k].abs() < 1e-12 {
            return None;
        }
        m.swap(k, pivot);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    let residual = orig
        .iter()
        .map(|row| (dot(&row[..n], &x) - row[n]).abs())
        .fold(0.0, f64::max);
    (residual <= FLOAT_TOL).then_some(x)
}

/// Solves for a mixture over `support` (columns of `mat` restricted to
/// `support`, rows restricted to `against`) making every row in `against`
/// indifferent. Returns the mixture and the common value, exactly.
fn indifference_exact(
    mat: &ScaledMatrix,
    against: &[usize],
    support: &[usize],
    transpose: bool,
) -> Option<(Vec<BigRational>, BigRational)> {
    let s = support.len();
    let entry = |a: usize, b: usize| -> BigInt {
        if transpose {
            mat.entries[b][a].clone()
        } else {
            mat.entries[a][b].clone()
        }
    };
    // unknowns: mixture (s) then the value v; value coefficient is -1
    // (payoffs are scaled by D, so v is scaled too; divide back below)
    let mut m = Vec::with_capacity(s + 1);
    for &a in against {
        let mut row: Vec<BigInt> = support.iter().map(|&b| entry(a, b)).collect();
        row.push(BigInt::from(-1));
        row.push(BigInt::zero());
        m.push(row);
    }
    let mut sum_row = vec![BigInt::from(1); s];
    sum_row.push(BigInt::zero());
    sum_row.push(BigInt::from(1));
    m.push(sum_row);
    let sol = bareiss_solve(m)?;
    let value = sol[s].clone();
    Some((sol[..s].to_vec(), value))
}

fn indifference_float(
    mat: &[Vec<f64>],
    against: &[usize],
    support: &[usize],
    transpose: bool,
) -> Option<(Vec<f64>, f64)> {
    let s = support.len();
    let entry = |a: usize, b: usize| if transpose { mat[b][a] } else { mat[a][b] };
    let mut m = Vec::with_capacity(s + 1);
    for &a in against {
        let mut row: Vec<f64> = support.iter().map(|&b| entry(a, b)).collect();
        row.push(-1.0);
        row.push(0.0);
        m.push(row);
    }
    let mut sum_row = vec![1.0; s];
    sum_row.push(0.0);
    sum_row.push(1.0);
    m.push(sum_row);
    let sol = float_solve(m)?;
    Some((sol[..s].to_vec(), sol[s]))
}

fn expand(n: usize, support: &[usize], probs: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for (&i, &p) in support.iter().zip(probs) {
        v[i] = p;
    }
    v
}

fn exact_equilibrium(
    g: &BimatrixGame,
    r: &ScaledMatrix,
    c: &ScaledMatrix,
    rows: &[usize],
    cols: &[usize],
) -> Option<MixedPair> {
    // y makes the row player indifferent on `rows`; x does the same for columns
    let (y, v) = indifference_exact(r, rows, cols, false)?;
    let (x, w) = indifference_exact(c, cols, rows, true)?;
    if y.iter().chain(&x).any(|p| p < &BigRational::zero()) {
        return None;
    }
    for i in (0..g.rows()).filter(|i| !rows.contains(i)) {
        let pay: BigRational = cols
            .iter()
            .zip(&y)
            .map(|(&j, p)| BigRational::from_integer(r.entries[i][j].clone()) * p)
            .fold(BigRational::zero(), |a, b| a + b);
        if pay > v {
            return None;
        }
    }
    for j in (0..g.cols()).filter(|j| !cols.contains(j)) {
        let pay: BigRational = rows
            .iter()
            .zip(&x)
            .map(|(&i, p)| BigRational::from_integer(c.entries[i][j].clone()) * p)
            .fold(BigRational::zero(), |a, b| a + b);
        if pay > w {
            return None;
        }
    }
    let xf: Vec<f64> = x.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
    let yf: Vec<f64> = y.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
    Some(MixedPair {
        x: MixedStrategy(expand(g.rows(), rows, &xf)),
        y: MixedStrategy(expand(g.cols(), cols, &yf)),
    })
}

fn float_equilibrium(g: &BimatrixGame, rows: &[usize], cols: &[usize]) -> Option<MixedPair> {
    let (y, v) = indifference_float(&g.r, rows, cols, false)?;
    let (x, w) = indifference_float(&g.c, cols, rows, true)?;
    if y.iter().chain(&x).any(|p| *p < -FLOAT_TOL) {
        return None;
    }
    let xs = expand(g.rows(), rows, &x.iter().map(|p| p.max(0.0)).collect::<Vec<_>>());
    let ys = expand(g.cols(), cols, &y.iter().map(|p| p.max(0.0)).collect::<Vec<_>>());
    if g.row_action_payoffs(&ys).iter().any(|p| *p > v + FLOAT_TOL)
        || g.col_action_payoffs(&xs).iter().any(|p| *p > w + FLOAT_TOL)
    {
        return None;
    }
    Some(MixedPair { x: MixedStrategy(xs), y: MixedStrategy(ys) })
}

/// All equilibria with equal-size supports up to `budget.max_support`.
pub fn support_enumeration(g: &BimatrixGame, budget: &SolverBudget) -> Result<Vec<MixedPair>> {
    g.validate()?;
    budget.validate()?;
    let (m, n) = (g.rows(), g.cols());
    let smax = budget.max_support.min(m).min(n);
    let needed: u128 = (1..=smax).map(|s| binomial(m, s) * binomial(n, s)).sum();
    budget.refuse("support enumeration", needed)?;
    let r = ScaledMatrix::new(&g.r);
    let c = ScaledMatrix::new(&g.c);
    let mut found: Vec<MixedPair> = Vec::new();
    for s in 1..=smax {
        let row_sets = combinations(m, s);
        let col_sets = combinations(n, s);
        for rows in &row_sets {
            for cols in &col_sets {
                let eq = if s <= EXACT_SOLVE_LIMIT {
                    exact_equilibrium(g, &r, &c, rows, cols)
                } else {
                    float_equilibrium(g, rows, cols)
                };
                if let Some(eq) = eq {
                    if !found.contains(&eq) && is_eps_ne(g, &eq.x, &eq.y, 1e-7)? {
                        found.push(eq);
                    }
                }
            }
        }
    }
    Ok(found)
}

/// Count vectors of `total` items over `parts` slots, lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}

fn to_probs(counts: &[usize], total: usize) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Precomputed best-response data for a list of candidate strategies.
struct Candidates {
    probs: Vec<Vec<f64>>,
    /// payoff vector the *other* player faces
    against: Vec<Vec<f64>>,
    best: Vec<f64>,
}

impl Candidates {
    fn rows(g: &BimatrixGame, probs: Vec<Vec<f64>>) -> Self {
        let against: Vec<Vec<f64>> = probs.iter().map(|x| g.col_action_payoffs(x)).collect();
        let best = against.iter().map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        Candidates { probs, against, best }
    }

    fn cols(g: &BimatrixGame, probs: Vec<Vec<f64>>) -> Self {
        let against: Vec<Vec<f64>> = probs.iter().map(|y| g.row_action_payoffs(y)).collect();
        let best = against.iter().map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        Candidates { probs, against, best }
    }
}

fn sparse_dot(x: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(v).fold(0.0, |acc, (a, b)| if *a == 0.0 { acc } else { acc + a * b })
}

fn scan_pairs(xs: &Candidates, ys: &Candidates, eps: f64, limit: usize) -> Vec<MixedPair> {
    let mut out = Vec::new();
    for (xi, x) in xs.probs.iter().enumerate() {
        for (yi, y) in ys.probs.iter().enumerate() {
            let row_regret = ys.best[yi] - sparse_dot(x, &ys.against[yi]);
            if row_regret > eps {
                continue;
            }
            let col_regret = xs.best[xi] - sparse_dot(y, &xs.against[xi]);
            if col_regret > eps {
                continue;
            }
            out.push(MixedPair { x: MixedStrategy(x.clone()), y: MixedStrategy(y.clone()) });
            if out.len() >= limit {
                return out;
            }
        }
    }
    out
}

/// Every pair on the simplex grid with denominator `m` that is an `eps`-NE.
pub fn grid_eps_ne(g: &BimatrixGame, m: usize, eps: f64, budget: &SolverBudget) -> Result<Vec<MixedPair>> {
    g.validate()?;
    if m == 0 {
        return input("grid resolution must be at least 1");
    }
    let nx = binomial(m + g.rows() - 1, g.rows() - 1);
    let ny = binomial(m + g.cols() - 1, g.cols() - 1);
    budget.refuse("grid enumeration", nx.saturating_mul(ny))?;
    let xs = Candidates::rows(g, compositions(m, g.rows()).iter().map(|c| to_probs(c, m)).collect());
    let ys = Candidates::cols(g, compositions(m, g.cols()).iter().map(|c| to_probs(c, m)).collect());
    Ok(scan_pairs(&xs, &ys, eps, usize::MAX))
}

/// k-uniform strategies (multisets of size `k`) over `n` actions, ordered by
/// their sorted index tuples.
fn k_uniform(n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let mut p = vec![0.0; n];
        for &i in &idx {
            p[i] += 1.0;
        }
        for v in p.iter_mut() {
            *v /= k as f64;
        }
        out.push(p);
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[pos];
                }
                break;
            }
        }
    }
}

fn multiset_count(n: usize, k: usize) -> u128 {
    binomial(n + k - 1, k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallSupportOutcome {
    pub pair: Option<MixedPair>,
    /// Support multiplicity at which the pair was found (or the last one tried).
    pub k: usize,
    /// ⌈12·ln(m+n)/ε²⌉, the multiplicity that guarantees existence.
    pub k_target: usize,
    pub cap_hit: bool,
}

pub fn k_uniform_target(g: &BimatrixGame, eps: f64) -> usize {
    let a = (g.rows() + g.cols()) as f64;
    (12.0 * a.ln() / (eps * eps)).ceil().max(1.0) as usize
}

/// Searches k-uniform pairs for k = 1, 2, … up to the target multiplicity,
/// stopping at `budget.max_support` or when the pair count exceeds the cap.
pub fn small_support_search(g: &BimatrixGame, eps: f64, budget: &SolverBudget) -> Result<SmallSupportOutcome> {
    g.validate()?;
    budget.validate()?;
    let k_target = k_uniform_target(g, eps);
    let mut last = 0;
    for k in 1..=k_target {
        if k > budget.max_support {
            return Ok(SmallSupportOutcome { pair: None, k: last, k_target, cap_hit: true });
        }
        let pairs = multiset_count(g.rows(), k).saturating_mul(multiset_count(g.cols(), k));
        if pairs > budget.action_cap {
            return Ok(SmallSupportOutcome { pair: None, k: last, k_target, cap_hit: true });
        }
        last = k;
        if let Some(p) = k_uniform_pairs(g, eps, k, 1).into_iter().next() {
            return Ok(SmallSupportOutcome { pair: Some(p), k, k_target, cap_hit: false });
        }
    }
    Ok(SmallSupportOutcome { pair: None, k: last, k_target, cap_hit: false })
}

fn k_uniform_pairs(g: &BimatrixGame, eps: f64, k: usize, limit: usize) -> Vec<MixedPair> {
    let xs = Candidates::rows(g, k_uniform(g.rows(), k));
    let ys = Candidates::cols(g, k_uniform(g.cols(), k));
    scan_pairs(&xs, &ys, eps, limit)
}

/// Every k-uniform pair (exactly multiplicity `k` on both sides) that is an `eps`-NE.
pub fn small_support_all(g: &BimatrixGame, eps: f64, k: usize, budget: &SolverBudget) -> Result<Vec<MixedPair>> {
    g.validate()?;
    if k == 0 {
        return input("multiplicity must be positive");
    }
    let pairs = multiset_count(g.rows(), k).saturating_mul(multiset_count(g.cols(), k));
    budget.refuse(&format!("{k}-uniform enumeration"), pairs)?;
    Ok(k_uniform_pairs(g, eps, k, usize::MAX))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueBracket {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl ValueBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// Row player's value of a constant-sum game, bracketed by the guarantees of
/// the empirical mixtures of simultaneous fictitious play.
pub fn fictitious_play_value(g: &BimatrixGame, iters: usize) -> Result<ValueBracket> {
    g.validate()?;
    if g.is_constant_sum(1e-12).is_none() {
        return input("fictitious play value needs a zero-sum (constant-sum) game");
    }
    if iters == 0 {
        return input("at least one iteration is required");
    }
    let (m, n) = (g.rows(), g.cols());
    // row_cum[i] = Σ_t R[i][j_t]; col_cum[j] = Σ_t R[i_t][j]
    let mut row_cum = vec![0.0; m];
    let mut col_cum = vec![0.0; n];
    let (mut i, mut j) = (0usize, 0usize);
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 1..=iters {
        for (k, rc) in row_cum.iter_mut().enumerate() {
            *rc += g.r[k][j];
        }
        for (k, cc) in col_cum.iter_mut().enumerate() {
            *cc += g.r[i][k];
        }
        let tf = t as f64;
        let hi = row_cum[argmax(&row_cum)] / tf;
        let lo = col_cum[argmin(&col_cum)] / tf;
        upper = upper.min(hi);
        lower = lower.max(lo);
        i = argmax(&row_cum);
        j = argmin(&col_cum);
    }
    Ok(ValueBracket { lower, upper, iterations: iters })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrdOutcome {
    pub profile: MixedProfile,
    pub regrets: Vec<f64>,
    pub max_regret: f64,
}

/// Synchronous smoothed best-response dynamics with step 1/(t+1).
pub fn polymatrix_brd(g: &PolymatrixGame, init: &MixedProfile, iters: usize) -> Result<BrdOutcome> {
    if init.p.len() != g.players {
        return input("initial profile does not cover every player");
    }
    let adj = g.adjacency();
    let mut p = init.p.clone();
    for t in 1..=iters {
        let step = 1.0 / (t as f64 + 1.0);
        let target: Vec<f64> = (0..g.players)
            .map(|v| {
                let pay = action_payoffs_adj(g, &adj[v], &p, v);
                if pay[1] > pay[0] {
                    1.0
                } else if pay[0] > pay[1] {
                    0.0
                } else {
                    p[v]
                }
            })
            .collect();
        for (pv, tv) in p.iter_mut().zip(target) {
            *pv = (*pv + step * (tv - *pv)).clamp(0.0, 1.0);
        }
    }
    let profile = MixedProfile { p };
    let regrets = all_regrets(g, &profile)?;
    let max_regret = regrets.iter().copied().fold(0.0, f64::max);
    Ok(BrdOutcome { profile, regrets, max_regret })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::build_althofer;

    fn pennies() -> BimatrixGame {
        BimatrixGame::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
    }

    #[test]
    fn support_enumeration_basics() {
        let b = SolverBudget::default();
        let eqs = support_enumeration(&pennies(), &b).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].x.0, vec![0.5, 0.5]);
        assert_eq!(eqs[0].y.0, vec![0.5, 0.5]);

        let m = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let g = BimatrixGame::new(m.clone(), m).unwrap();
        let eqs = support_enumeration(&g, &b).unwrap();
        assert!(eqs.iter().any(|e| e.x.0 == vec![1.0, 0.0] && e.y.0 == vec![1.0, 0.0]));

        let alt = build_althofer(2).unwrap();
        let eqs = support_enumeration(&alt, &b).unwrap();
        assert!(eqs.iter().any(|e| e.x.0 == vec![0.5, 0.5] && e.y.0 == vec![0.5, 0.5]));
    }

    #[test]
    fn budget_refusal() {
        let b = SolverBudget { action_cap: 3, ..Default::default() };
        assert!(matches!(support_enumeration(&pennies(), &b), Err(Error::Budget { .. })));
        assert!(matches!(grid_eps_ne(&pennies(), 10, 0.1, &b), Err(Error::Budget { .. })));
    }

    #[test]
    fn float_fallback_agrees() {
        let g = pennies();
        let eq = float_equilibrium(&g, &[0, 1], &[0, 1]).unwrap();
        assert!((eq.x.0[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_cases() {
        let b = SolverBudget::default();
        let found = grid_eps_ne(&pennies(), 2, 0.5, &b).unwrap();
        assert!(found.iter().any(|p| p.x.0 == vec![0.5, 0.5] && p.y.0 == vec![0.5, 0.5]));
        let m = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let g = BimatrixGame::new(m.clone(), m).unwrap();
        let found = grid_eps_ne(&g, 1, 0.0, &b).unwrap();
        assert!(found.iter().any(|p| p.x.0 == vec![1.0, 0.0] && p.y.0 == vec![1.0, 0.0]));
    }

    #[test]
    fn small_support_cases() {
        let b = SolverBudget::default();
        let m = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let g = BimatrixGame::new(m.clone(), m).unwrap();
        let out = small_support_search(&g, 0.5, &b).unwrap();
        assert_eq!(out.k, 1);
        assert!(out.pair.is_some());
        let out = small_support_search(&pennies(), 0.1, &b).unwrap();
        assert_eq!(out.k, 2);
        assert_eq!(out.pair.unwrap().x.0, vec![0.5, 0.5]);
        assert_eq!(k_uniform(3, 2).len(), 6);
    }

    #[test]
    fn fictitious_play() {
        let alt = build_althofer(2).unwrap();
        let br = fictitious_play_value(&alt, 10_000).unwrap();
        assert!(br.contains(0.5) && br.lower >= 0.48 && br.upper <= 0.52, "{br:?}");
        let c = BimatrixGame::new(vec![vec![0.3, 0.3]], vec![vec![-0.3, -0.3]]).unwrap();
        let br = fictitious_play_value(&c, 1).unwrap();
        assert_eq!((br.lower, br.upper), (0.3, 0.3));
        let nz = BimatrixGame::new(vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]).unwrap();
        assert!(fictitious_play_value(&nz, 10).is_err());
    }

    #[test]
    fn best_response_dynamics() {
        let mut g = PolymatrixGame::new(2);
        g.add_edge(0, 1, [[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]);
        let out = polymatrix_brd(&g, &MixedProfile::constant(2, 0.0), 10_000).unwrap();
        assert!(out.max_regret < 0.05, "{out:?}");
        assert!(out.profile.p.iter().all(|p| (0.0..=1.0).contains(p)));

        let iso = PolymatrixGame::new(4);
        let out = polymatrix_brd(&iso, &MixedProfile::constant(4, 0.3), 1).unwrap();
        assert_eq!(out.max_regret, 0.0);
    }
}
