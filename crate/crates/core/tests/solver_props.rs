use ppadforge::games::{is_eps_ne, BimatrixGame, MixedPair, MixedStrategy};
use ppadforge::instances::rng;
use ppadforge::solvers::{grid_eps_ne, small_support_search, support_enumeration, SolverBudget};
use proptest::prelude::*;
use rand::Rng;

/// All equilibria of a nondegenerate 2×2 game: pure ones plus the fully mixed
/// one from the two indifference equations.
fn closed_form_2x2(g: &BimatrixGame) -> Vec<(f64, f64)> {
    let (r, c) = (&g.r, &g.c);
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            if r[i][j] >= r[1 - i][j] && c[i][j] >= c[i][1 - j] {
                out.push((if i == 0 { 1.0 } else { 0.0 }, if j == 0 { 1.0 } else { 0.0 }));
            }
        }
    }
    // p, q: probabilities of action 0 for row and column
    let q = (r[1][1] - r[0][1]) / (r[0][0] - r[0][1] - r[1][0] + r[1][1]);
    let p = (c[1][1] - c[1][0]) / (c[0][0] - c[1][0] - c[0][1] + c[1][1]);
    if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
        out.push((p, q));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn random_game(seed: u64, m: usize, n: usize) -> BimatrixGame {
    let mut r = rng(seed);
    let mut mat = || (0..m).map(|_| (0..n).map(|_| r.gen_range(0.0..=1.0)).collect()).collect();
    let rr = mat();
    let cc = mat();
    BimatrixGame::new(rr, cc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn support_enumeration_matches_closed_form(seed in any::<u64>()) {
        let g = random_game(seed, 2, 2);
        let mut found: Vec<(f64, f64)> = support_enumeration(&g, &SolverBudget::default())
            .unwrap()
            .iter()
            .map(|p| (p.x.0[0], p.y.0[0]))
            .collect();
        found.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = closed_form_2x2(&g);
        prop_assert_eq!(found.len(), expected.len(), "{:?} vs {:?}", found, expected);
        for (a, b) in found.iter().zip(&expected) {
            prop_assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_outputs_pass_their_verifier(seed in any::<u64>(), m in 2usize..=4, n in 2usize..=4) {
        let g = random_game(seed, m, n);
        let budget = SolverBudget::default();
        for p in support_enumeration(&g, &budget).unwrap() {
            prop_assert!(is_eps_ne(&g, &p.x, &p.y, 1e-7).unwrap());
        }
        let eps = 0.1 + (seed % 97) as f64 / 1000.0;
        for p in grid_eps_ne(&g, 4, eps, &budget).unwrap() {
            prop_assert!(is_eps_ne(&g, &p.x, &p.y, eps).unwrap());
        }
        let out = small_support_search(&g, eps, &budget).unwrap();
        if let Some(p) = out.pair {
            prop_assert!(is_eps_ne(&g, &p.x, &p.y, eps).unwrap());
        }
    }

    #[test]
    fn grid_count_independent_of_order(seed in any::<u64>()) {
        let g = random_game(seed, 3, 2);
        let eps = 0.05 + (seed % 89) as f64 / 500.0;
        let m = 5;
        let found = grid_eps_ne(&g, m, eps, &SolverBudget::default()).unwrap();
        // recount with columns outermost and both simplices walked backwards
        let mut grid_x = Vec::new();
        for a in (0..=m).rev() {
            for b in (0..=m - a).rev() {
                grid_x.push(vec![a as f64 / m as f64, b as f64 / m as f64, (m - a - b) as f64 / m as f64]);
            }
        }
        let mut recount: Vec<MixedPair> = Vec::new();
        for b in (0..=m).rev() {
            let y = MixedStrategy(vec![b as f64 / m as f64, (m - b) as f64 / m as f64]);
            for x in &grid_x {
                let x = MixedStrategy(x.clone());
                if is_eps_ne(&g, &x, &y, eps).unwrap() {
                    recount.push(MixedPair { x, y: y.clone() });
                }
            }
        }
        prop_assert_eq!(found.len(), recount.len());
        for p in &recount {
            prop_assert!(found.contains(p));
        }
    }

    #[test]
    fn solvers_are_deterministic(seed in any::<u64>()) {
        let g = random_game(seed, 3, 3);
        let budget = SolverBudget::default();
        prop_assert_eq!(support_enumeration(&g, &budget).unwrap(), support_enumeration(&g, &budget).unwrap());
        prop_assert_eq!(grid_eps_ne(&g, 3, 0.2, &budget).unwrap(), grid_eps_ne(&g, 3, 0.2, &budget).unwrap());
    }
}
