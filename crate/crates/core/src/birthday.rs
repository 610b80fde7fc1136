//! Birthday repetition: pack a bipartite polymatrix game into a two-player
//! game whose actions pick a block of vertices, an assignment to the block,
//! and a set of blocks to seek in the opponent's hide-and-seek game.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::games::{
    all_regrets, binomial, is_weak_eps_delta_ne, subsets_of_size, BimatrixGame, MixedProfile, MixedStrategy,
    PolymatrixGame, Table,
};
use crate::partition::{default_block_size, greedy_partition, BipartiteGraph, Partition};

/// Constant inside the good-block window `1 ± c·√λ`.
pub const GOOD_WINDOW: f64 = 8.0;
/// Constant in the uniformity bound `Σ|x(Sᵢ) − k/n| ≤ c·λ`.
pub const UNIFORMITY_CONST: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirthdayParams {
    pub eps: f64,
    pub delta: f64,
    pub lambda: f64,
    pub eps_prime: f64,
    pub k: usize,
}

impl BirthdayParams {
    /// λ = δ²/16 and ε' = εδλ/64, with `k` defaulting to ⌈√n⌉.
    pub fn new(eps: f64, delta: f64, n: usize) -> Result<Self> {
        let lambda = delta * delta / 16.0;
        let p = BirthdayParams { eps, delta, lambda, eps_prime: eps * delta * lambda / 64.0, k: default_block_size(n) };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta <= 1.0) {
            return input("birthday parameters need ε ∈ (0,1) and δ ∈ (0,1]");
        }
        if !(self.eps_prime > 0.0 && self.lambda > self.eps_prime && self.lambda < 1.0) {
            return input(format!("need 0 < ε' < λ < 1, got ε'={} λ={}", self.eps_prime, self.lambda));
        }
        if self.k == 0 {
            return input("block size must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirthdayAction {
    pub block: usize,
    /// Bit `b` is the action of the block's `b`-th vertex; bits past the block size are unused.
    pub alpha: u64,
    /// Bitmask of seeker blocks.
    pub seekers: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirthdayCodec {
    pub blocks: usize,
    pub alpha_bits: usize,
    pub seeker_sets: Vec<u64>,
}

impl BirthdayCodec {
    fn new(blocks: usize, alpha_bits: usize) -> Self {
        let size = blocks.div_ceil(2);
        BirthdayCodec { blocks, alpha_bits, seeker_sets: subsets_of_size(blocks, size) }
    }

    pub fn seeker_size(&self) -> usize {
        self.blocks.div_ceil(2)
    }

    pub fn len(&self) -> usize {
        (self.blocks << self.alpha_bits) * self.seeker_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn decode(&self, idx: usize) -> Result<BirthdayAction> {
        if idx >= self.len() {
            return input(format!("action index {idx} out of range {}", self.len()));
        }
        let nb = self.seeker_sets.len();
        let b = idx % nb;
        let rest = idx / nb;
        let alpha = (rest & ((1usize << self.alpha_bits) - 1)) as u64;
        Ok(BirthdayAction { block: rest >> self.alpha_bits, alpha, seekers: self.seeker_sets[b] })
    }

    pub fn encode(&self, a: &BirthdayAction) -> Result<usize> {
        if a.block >= self.blocks || a.alpha >> self.alpha_bits != 0 {
            return input(format!("action {a:?} outside the codec"));
        }
        let b = self
            .seeker_sets
            .binary_search(&a.seekers)
            .map_err(|_| Error::Input(format!("seeker set {:#b} has the wrong size", a.seekers)))?;
        Ok(((a.block << self.alpha_bits) + a.alpha as usize) * self.seeker_sets.len() + b)
    }
}

/// `(n/k)·2^{2k}·C(n/k, ⌈n/(2k)⌉)`.
pub fn action_count(n: usize, k: usize) -> u128 {
    let p = (n / k).max(1);
    (p as u128) * (1u128 << (2 * k)) * binomial(p, p.div_ceil(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Row,
    Col,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirthdayGame {
    pub game: BimatrixGame,
    pub codec: BirthdayCodec,
    pub partition: Partition,
    pub params: BirthdayParams,
    /// Polymatrix player ids on each side, in local order.
    pub sides: [Vec<usize>; 2],
    pub players: usize,
    pub source: PolymatrixGame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirthdayMetadata {
    pub k: usize,
    pub lambda: f64,
    pub eps_prime: f64,
    pub eps: f64,
    pub delta: f64,
    pub partition: Partition,
    pub row_codec: Vec<BirthdayAction>,
    pub col_codec: Vec<BirthdayAction>,
}

impl BirthdayGame {
    pub fn metadata(&self) -> BirthdayMetadata {
        let acts: Vec<BirthdayAction> = (0..self.codec.len()).map(|i| self.codec.decode(i).expect("in range")).collect();
        BirthdayMetadata {
            k: self.params.k,
            lambda: self.params.lambda,
            eps_prime: self.params.eps_prime,
            eps: self.params.eps,
            delta: self.params.delta,
            partition: self.partition.clone(),
            row_codec: acts.clone(),
            col_codec: acts,
        }
    }

    fn parts(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::Row => &self.partition.s_parts,
            Side::Col => &self.partition.t_parts,
        }
    }

    pub fn share(&self) -> f64 {
        1.0 / self.codec.blocks as f64
    }
}

struct PairEdge {
    bit_s: usize,
    bit_t: usize,
    ts: Table,
    tt: Table,
}

/// Builds the two-player game; sides must be equal (see `PolymatrixGame::pad_to_equal_sides`).
pub fn build_birthday(p: &PolymatrixGame, params: BirthdayParams) -> Result<BirthdayGame> {
    params.validate()?;
    p.validate(3)?;
    let [left, right] = p
        .bipartition
        .clone()
        .ok_or_else(|| Error::Input("birthday reduction needs a bipartite game".into()))?;
    if left.len() != right.len() {
        return input(format!("sides have sizes {} and {}; pad to equal sides first", left.len(), right.len()));
    }
    let n = left.len();
    if n == 0 || params.k > n {
        return input(format!("block size {} does not fit n = {n}", params.k));
    }
    let k = params.k;
    if 2 * k > 60 {
        return input("block size too large for bitmask actions");
    }
    let mut lpos = vec![usize::MAX; p.players];
    let mut rpos = vec![usize::MAX; p.players];
    for (i, &v) in left.iter().enumerate() {
        lpos[v] = i;
    }
    for (i, &v) in right.iter().enumerate() {
        rpos[v] = i;
    }
    let mut gedges = Vec::with_capacity(p.edges.len());
    let mut oriented = Vec::with_capacity(p.edges.len());
    for e in &p.edges {
        let (s, t) = if lpos[e.u] != usize::MAX { (e.u, e.v) } else { (e.v, e.u) };
        gedges.push((lpos[s], rpos[t]));
        oriented.push((s, t, *e.table_for(s).expect("endpoint"), *e.table_for(t).expect("endpoint")));
    }
    let d = p.degrees().into_iter().max().unwrap_or(0).max(1);
    let graph = BipartiteGraph::new(n, d, gedges.clone())?;
    let partition = greedy_partition(&graph, k)?;
    let blocks = partition.s_parts.len();
    let codec = BirthdayCodec::new(blocks, 2 * k);

    let mut s_of = vec![(0, 0); n];
    for (i, part) in partition.s_parts.iter().enumerate() {
        for (b, &u) in part.iter().enumerate() {
            s_of[u] = (i, b);
        }
    }
    let mut t_of = vec![(0, 0); n];
    for (j, part) in partition.t_parts.iter().enumerate() {
        for (b, &v) in part.iter().enumerate() {
            t_of[v] = (j, b);
        }
    }
    let mut pair_edges: Vec<Vec<PairEdge>> = (0..blocks * blocks).map(|_| Vec::new()).collect();
    for (&(su, tv), &(_, _, ts, tt)) in gedges.iter().zip(&oriented) {
        let (i, bs) = s_of[su];
        let (j, bt) = t_of[tv];
        pair_edges[i * blocks + j].push(PairEdge { bit_s: bs, bit_t: bt, ts, tt });
    }

    let scale = params.lambda / 18.0;
    let alphas = 1usize << (2 * k);
    let nb = codec.seeker_sets.len();
    let len = codec.len();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..len)
        .into_par_iter()
        .map(|r| {
            let ra = codec.decode(r).expect("in range");
            let mut rrow = vec![0.0; len];
            let mut crow = vec![0.0; len];
            for j in 0..blocks {
                let edges = &pair_edges[ra.block * blocks + j];
                for beta in 0..alphas {
                    let (mut mr, mut mc) = (0.0, 0.0);
                    for e in edges {
                        let a = ((ra.alpha >> e.bit_s) & 1) as usize;
                        let b = (beta >> e.bit_t) & 1;
                        mr += e.ts[a][b];
                        mc += e.tt[b][a];
                    }
                    let base = (j * alphas + beta) * nb;
                    for (bi, &bc) in codec.seeker_sets.iter().enumerate() {
                        let hide_r = f64::from(u8::from(bc >> ra.block & 1 == 0));
                        let seek_r = f64::from(u8::from(ra.seekers >> j & 1 == 1));
                        let hide_c = f64::from(u8::from(ra.seekers >> j & 1 == 0));
                        let seek_c = f64::from(u8::from(bc >> ra.block & 1 == 1));
                        rrow[base + bi] = (scale * mr + hide_r + seek_r) / 3.0;
                        crow[base + bi] = (scale * mc + hide_c + seek_c) / 3.0;
                    }
                }
            }
            (rrow, crow)
        })
        .collect();
    let (r, c): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let game = BimatrixGame::new(r, c)?;
    Ok(BirthdayGame { game, codec, partition, params, sides: [left, right], players: p.players, source: p.clone() })
}

fn check_len(bg: &BirthdayGame, x: &MixedStrategy) -> Result<()> {
    if x.len() != bg.codec.len() {
        return input(format!("strategy has {} entries for {} actions", x.len(), bg.codec.len()));
    }
    Ok(())
}

/// Probability of all actions choosing block `i`.
pub fn subset_marginal(bg: &BirthdayGame, x: &MixedStrategy, i: usize) -> Result<f64> {
    check_len(bg, x)?;
    if i >= bg.codec.blocks {
        return input(format!("block {i} out of range"));
    }
    let per = x.len() / bg.codec.blocks;
    Ok(x.0[i * per..(i + 1) * per].iter().sum())
}

pub fn subset_marginals(bg: &BirthdayGame, x: &MixedStrategy) -> Result<Vec<f64>> {
    (0..bg.codec.blocks).map(|i| subset_marginal(bg, x, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityCheck {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `Σᵢ |x(Sᵢ) − 1/(n/k)|` against `12λ`.
pub fn uniformity_check(bg: &BirthdayGame, x: &MixedStrategy) -> Result<UniformityCheck> {
    let share = bg.share();
    let value = subset_marginals(bg, x)?.iter().map(|m| (m - share).abs()).sum();
    let bound = UNIFORMITY_CONST * bg.params.lambda;
    Ok(UniformityCheck { value, bound, pass: value <= bound })
}

fn decode_side(bg: &BirthdayGame, x: &MixedStrategy, side: Side, p: &mut [f64]) -> Result<()> {
    check_len(bg, x)?;
    let ids = &bg.sides[side as usize];
    for (i, part) in bg.parts(side).iter().enumerate() {
        let mass = subset_marginal(bg, x, i)?;
        let mut ones = vec![0.0; part.len()];
        if mass > 0.0 {
            let per = x.len() / bg.codec.blocks;
            for idx in i * per..(i + 1) * per {
                let w = x.0[idx];
                if w == 0.0 {
                    continue;
                }
                let a = bg.codec.decode(idx)?;
                for (b, o) in ones.iter_mut().enumerate() {
                    if a.alpha >> b & 1 == 1 {
                        *o += w;
                    }
                }
            }
        }
        for (b, &local) in part.iter().enumerate() {
            // an unplayed block's vertices default to action 1
            p[ids[local]] = if mass > 0.0 { ones[b] / mass } else { 1.0 };
        }
    }
    Ok(())
}

/// Each vertex plays 1 with its conditional probability given its block is chosen.
pub fn decode_mixed(bg: &BirthdayGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<MixedProfile> {
    let mut p = vec![1.0; bg.players];
    decode_side(bg, x, Side::Row, &mut p)?;
    decode_side(bg, y, Side::Col, &mut p)?;
    Ok(MixedProfile { p })
}

fn encode_side(bg: &BirthdayGame, q: &MixedProfile, side: Side) -> MixedStrategy {
    let ids = &bg.sides[side as usize];
    let nb = bg.codec.seeker_sets.len();
    let mut x = vec![0.0; bg.codec.len()];
    let share = bg.share() / nb as f64;
    for (i, part) in bg.parts(side).iter().enumerate() {
        for alpha in 0..(1u64 << part.len()) {
            let mut w = share;
            for (b, &local) in part.iter().enumerate() {
                let pv = q.p[ids[local]];
                w *= if alpha >> b & 1 == 1 { pv } else { 1.0 - pv };
            }
            for bi in 0..nb {
                let a = BirthdayAction { block: i, alpha, seekers: bg.codec.seeker_sets[bi] };
                x[bg.codec.encode(&a).expect("valid action")] = w;
            }
        }
    }
    MixedStrategy(x)
}

/// Honest strategies: uniform over blocks and seeker sets, independent vertex draws for α.
pub fn encode_profile(bg: &BirthdayGame, q: &MixedProfile) -> Result<(MixedStrategy, MixedStrategy)> {
    if q.p.len() != bg.players {
        return input("profile does not cover every polymatrix player");
    }
    Ok((encode_side(bg, q, Side::Row), encode_side(bg, q, Side::Col)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNeReport {
    pub verdict: bool,
    pub eps: f64,
    pub delta: f64,
    pub profile: MixedProfile,
    pub regrets: Vec<f64>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
    /// Per player: block marginal inside `share·(1 ± 8√λ)`.
    pub good: Vec<bool>,
    pub good_and_stable: f64,
    pub good_and_unstable: f64,
    pub not_good: f64,
}

pub fn weak_ne_report(bg: &BirthdayGame, x: &MixedStrategy, y: &MixedStrategy, eps: f64, delta: f64) -> Result<WeakNeReport> {
    let profile = decode_mixed(bg, x, y)?;
    let regrets = all_regrets(&bg.source, &profile)?;
    let verdict = is_weak_eps_delta_ne(&bg.source, &profile, eps, delta)?;
    let row_marginals = subset_marginals(bg, x)?;
    let col_marginals = subset_marginals(bg, y)?;
    let share = bg.share();
    let window = GOOD_WINDOW * bg.params.lambda.sqrt();
    let inside = |m: f64| m >= share * (1.0 - window) && m <= share * (1.0 + window);
    let mut good = vec![true; bg.players];
    for (side, marg) in [(Side::Row, &row_marginals), (Side::Col, &col_marginals)] {
        for (i, part) in bg.parts(side).iter().enumerate() {
            for &local in part {
                good[bg.sides[side as usize][local]] = inside(marg[i]);
            }
        }
    }
    let n = bg.players.max(1) as f64;
    let count = |f: &dyn Fn(usize) -> bool| (0..bg.players).filter(|&v| f(v)).count() as f64 / n;
    let good_and_stable = count(&|v| good[v] && regrets[v] <= eps);
    let good_and_unstable = count(&|v| good[v] && regrets[v] > eps);
    let not_good = count(&|v| !good[v]);
    Ok(WeakNeReport {
        verdict,
        eps,
        delta,
        profile,
        regrets,
        row_marginals,
        col_marginals,
        good,
        good_and_stable,
        good_and_unstable,
        not_good,
    })
}
