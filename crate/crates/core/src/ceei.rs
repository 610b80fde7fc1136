//! Course allocation: demand at posted prices, clearing error, budget
//! normalization, Lorenz/Gini analytics and the NOT gadget verifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Slack for price-band membership and the normalization check.
pub const PRICE_SLACK: f64 = 1e-12;
/// Tolerance for closed-form vs trapezoid Gini agreement.
pub const GINI_AGREEMENT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Student {
    /// Permissible bundles, each a set of course indices.
    pub bundles: Vec<Vec<usize>>,
    /// Bundle indices from most to least preferred.
    pub pref: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourseAllocationProblem {
    pub capacities: Vec<usize>,
    pub students: Vec<Student>,
    /// Maximum bundle size, unchecked when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bundle: Option<usize>,
}

impl CourseAllocationProblem {
    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.capacities.len();
        for (i, s) in self.students.iter().enumerate() {
            for (b, bundle) in s.bundles.iter().enumerate() {
                let mut sorted = bundle.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != bundle.len() {
                    return input(format!("student {i} bundle {b} repeats a course"));
                }
                if let Some(&c) = bundle.iter().find(|&&c| c >= m) {
                    return input(format!("student {i} bundle {b} names course {c}; only {m} courses"));
                }
                if self.max_bundle.is_some_and(|k| bundle.len() > k) {
                    return input(format!("student {i} bundle {b} exceeds the bundle size limit"));
                }
            }
            let mut order = s.pref.clone();
            order.sort_unstable();
            if order != (0..s.bundles.len()).collect::<Vec<_>>() {
                return input(format!("student {i} preference is not a strict total order over its bundles"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationSolution {
    pub prices: Vec<f64>,
    pub budgets: Vec<f64>,
    /// Assigned course set per student; empty means no bundle.
    pub bundles: Vec<Vec<usize>>,
}

impl AllocationSolution {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn validate(&self, p: &CourseAllocationProblem) -> Result<()> {
        if self.prices.len() != p.capacities.len() {
            return input(format!("{} prices for {} courses", self.prices.len(), p.capacities.len()));
        }
        if self.budgets.len() != p.students.len() || self.bundles.len() != p.students.len() {
            return input("budgets and bundles must have one entry per student");
        }
        if self.prices.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return input("prices must be finite and non-negative");
        }
        if self.budgets.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return input("budgets must be finite and positive");
        }
        for (i, (b, s)) in self.bundles.iter().zip(&p.students).enumerate() {
            if !b.is_empty() && !s.bundles.iter().any(|x| same_set(x, b)) {
                return input(format!("student {i} is assigned a bundle outside its permissible set"));
            }
        }
        Ok(())
    }
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

pub fn bundle_price(prices: &[f64], bundle: &[usize]) -> f64 {
    bundle.iter().map(|&c| prices[c]).sum()
}

/// Index of the most preferred affordable bundle, `None` when nothing is affordable.
pub fn student_demand(prices: &[f64], budget: f64, student: &Student) -> Option<usize> {
    student.pref.iter().copied().find(|&b| bundle_price(prices, &student.bundles[b]) <= budget)
}

pub fn demands(p: &CourseAllocationProblem, prices: &[f64], budgets: &[f64]) -> Vec<Option<usize>> {
    p.students.par_iter().zip(budgets.par_iter()).map(|(s, &b)| student_demand(prices, b, s)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClearingReport {
    pub demand: Vec<usize>,
    pub error: usize,
    pub worst_course: Option<usize>,
}

/// Max over courses of |demand − capacity| at the posted prices.
pub fn clearing_error(p: &CourseAllocationProblem, s: &AllocationSolution) -> Result<ClearingReport> {
    p.validate()?;
    s.validate(p)?;
    let m = p.capacities.len();
    let demand = p
        .students
        .par_iter()
        .zip(s.budgets.par_iter())
        .fold(
            || vec![0usize; m],
            |mut acc, (st, &b)| {
                if let Some(k) = student_demand(&s.prices, b, st) {
                    for &c in &st.bundles[k] {
                        acc[c] += 1;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0usize; m], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let mut error = 0;
    let mut worst_course = None;
    for (j, (&d, &q)) in demand.iter().zip(&p.capacities).enumerate() {
        let e = d.abs_diff(q);
        if e > error {
            error = e;
            worst_course = Some(j);
        }
    }
    Ok(ClearingReport { demand, error, worst_course })
}

/// Lower median: element `(N−1)/2` of the sorted list.
pub fn lower_median(xs: &[f64]) -> Option<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.get(v.len().checked_sub(1)? / 2).copied()
}

/// Scales prices and budgets so the lower median budget is `1 + ε'/2`.
pub fn normalize_budgets(p: &CourseAllocationProblem, s: &AllocationSolution, eps_prime: f64) -> Result<AllocationSolution> {
    if !(eps_prime >= 0.0 && eps_prime.is_finite()) {
        return input("ε' must be a non-negative real");
    }
    if s.budgets.iter().any(|b| !(*b > 0.0)) {
        return input("budgets must be positive");
    }
    s.validate(p)?;
    let med = lower_median(&s.budgets).ok_or_else(|| Error::Input("no students".into()))?;
    let f = (1.0 + eps_prime / 2.0) / med;
    let out = AllocationSolution {
        prices: s.prices.iter().map(|x| x * f).collect(),
        budgets: s.budgets.iter().map(|x| x * f).collect(),
        bundles: s.bundles.clone(),
    };
    if demands(p, &s.prices, &s.budgets) != demands(p, &out.prices, &out.budgets) {
        return Err(Error::Internal("rescaling changed a demand (an affordability tie was rounded)".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncomeDistribution {
    pub incomes: Vec<f64>,
}

impl IncomeDistribution {
    pub fn new(incomes: Vec<f64>) -> Result<Self> {
        let d = IncomeDistribution { incomes };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.incomes.is_empty() {
            return input("income distribution is empty");
        }
        if self.incomes.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return input("incomes must be finite and non-negative");
        }
        if self.incomes.iter().all(|x| *x == 0.0) {
            return input("all incomes are zero");
        }
        Ok(())
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.incomes.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Lorenz ordinates at `i/N` for `i = 0..=N`.
    pub fn lorenz_points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let v = self.sorted();
        let total: f64 = v.iter().sum();
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for y in &v {
            acc += y;
            out.push(acc / total);
        }
        *out.last_mut().expect("nonempty") = 1.0;
        Ok(out)
    }
}

/// Piecewise-linear empirical Lorenz curve.
pub fn lorenz(d: &IncomeDistribution, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return input(format!("Lorenz argument {x} outside [0,1]"));
    }
    let pts = d.lorenz_points()?;
    let n = (pts.len() - 1) as f64;
    let t = x * n;
    let i = (t.floor() as usize).min(pts.len() - 2);
    let frac = t - i as f64;
    Ok(pts[i] + frac * (pts[i + 1] - pts[i]))
}

/// `1 − 2·∫L` with the exact trapezoid integral of the piecewise-linear curve.
pub fn gini_trapezoid(d: &IncomeDistribution) -> Result<f64> {
    let pts = d.lorenz_points()?;
    let n = (pts.len() - 1) as f64;
    let area: f64 = pts.windows(2).map(|w| (w[0] + w[1]) / (2.0 * n)).sum();
    Ok(1.0 - 2.0 * area)
}

/// `2Σ i·y₍ᵢ₎ / (N·Σy) − (N+1)/N` over ascending incomes, `i` from 1.
pub fn gini_closed_form(d: &IncomeDistribution) -> Result<f64> {
    d.validate()?;
    let v = d.sorted();
    let n = v.len() as f64;
    let total: f64 = v.iter().sum();
    let weighted: f64 = v.iter().enumerate().map(|(i, y)| (i + 1) as f64 * y).sum();
    Ok(2.0 * weighted / (n * total) - (n + 1.0) / n)
}

/// Gini index; errors if the two evaluations disagree beyond tolerance.
pub fn gini(d: &IncomeDistribution) -> Result<f64> {
    let a = gini_trapezoid(d)?;
    let b = gini_closed_form(d)?;
    if (a - b).abs() > GINI_AGREEMENT {
        return Err(Error::Internal(format!("Gini evaluations disagree: {a} vs {b}")));
    }
    Ok(b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GiniWitness {
    pub distribution: IncomeDistribution,
    pub gini: f64,
    /// `(δ'ε'/4)/(1 + ε'/2 + 1)`.
    pub bound: f64,
    /// `(δ'ε'/4)/(1 + ε'/2 − δ'ε'/2)`, the half-point Lorenz deficit.
    pub tight_bound: f64,
    pub pass: bool,
}

/// `⌈δ'N⌉` incomes at 1, the rest at `1 + ε'/2`.
pub fn gini_lowerbound_witness(eps_prime: f64, delta_prime: f64, n: usize) -> Result<GiniWitness> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) || !(delta_prime > 0.0 && delta_prime < 0.5) {
        return input("need ε' ∈ (0,1) and δ' ∈ (0,1/2)");
    }
    if n % 2 != 0 || (n as f64) < 2.0 / delta_prime {
        return input(format!("N={n} must be even and at least 2/δ'"));
    }
    let low = (delta_prime * n as f64).ceil() as usize;
    let high = 1.0 + eps_prime / 2.0;
    let mut incomes = vec![1.0; low];
    incomes.resize(n, high);
    let distribution = IncomeDistribution::new(incomes)?;
    let g = gini(&distribution)?;
    let de = delta_prime * eps_prime;
    let bound = (de / 4.0) / (high + 1.0);
    let tight_bound = (de / 4.0) / (high - de / 2.0);
    Ok(GiniWitness { distribution, gini: g, bound, tight_bound, pass: g >= bound && g >= tight_bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NotGadget {
    pub problem: CourseAllocationProblem,
    pub input_course: usize,
    pub output_course: usize,
    pub n_x: usize,
    /// Most students outside the gadget that may want the output course.
    pub allowance: usize,
}

impl NotGadget {
    /// Reads a gadget out of a problem: the first `n_x` students must want exactly
    /// `{input, output}` and the output course must have capacity `2n_x/3`.
    /// `n_x` defaults to the length of that leading run of students.
    pub fn from_problem(problem: CourseAllocationProblem, input_course: usize, output_course: usize, n_x: Option<usize>) -> Result<Self> {
        problem.validate()?;
        let m = problem.capacities.len();
        if input_course >= m || output_course >= m || input_course == output_course {
            return input("input and output courses must be distinct existing courses");
        }
        let wants_pair = |s: &Student| s.bundles.len() == 1 && same_set(&s.bundles[0], &[input_course, output_course]);
        let run = problem.students.iter().take_while(|s| wants_pair(s)).count();
        let n_x = n_x.unwrap_or(run);
        if n_x > run {
            return input(format!("only {run} leading students want exactly the gadget pair, n_x = {n_x}"));
        }
        if n_x < 6 || n_x % 6 != 0 {
            return input(format!("n_x = {n_x} must be a positive multiple of 6"));
        }
        if problem.capacities[output_course] != 2 * n_x / 3 {
            return input(format!("output course capacity {} differs from 2n_x/3 = {}", problem.capacities[output_course], 2 * n_x / 3));
        }
        Ok(NotGadget { problem, input_course, output_course, n_x, allowance: n_x / 6 })
    }

    pub fn output_capacity(&self) -> usize {
        self.problem.capacities[self.output_course]
    }
}

/// Input course 0 (capacity `n_x`), output course 1 (capacity `2n_x/3`) and
/// `n_x` students wanting exactly the pair.
pub fn build_not_gadget(n_x: usize) -> Result<NotGadget> {
    if n_x < 6 || n_x % 6 != 0 {
        return input(format!("n_x = {n_x} must be a positive multiple of 6"));
    }
    let student = Student { bundles: vec![vec![0, 1]], pref: vec![0] };
    let problem = CourseAllocationProblem { capacities: vec![n_x, 2 * n_x / 3], students: vec![student; n_x], max_bundle: Some(2) };
    problem.validate()?;
    Ok(NotGadget { problem, input_course: 0, output_course: 1, n_x, allowance: n_x / 6 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NotVerdict {
    GateSatisfied,
    InequalityWitness,
    Violation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandPosition {
    Below,
    Inside,
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NotReport {
    pub verdict: NotVerdict,
    pub position: BandPosition,
    pub band: [f64; 2],
    pub price_in: f64,
    pub price_out: f64,
    /// Gadget students with budget ≤ 1.
    pub low_budgets: usize,
    /// Gadget students with budget > 1 + ε'.
    pub high_budgets: usize,
    /// Gadget students who can afford the pair.
    pub affording: usize,
    /// Least clearing error on the output course consistent with the allowance.
    pub output_error_lower_bound: usize,
}

/// Classifies a normalized solution on the gadget. Solution entries for the
/// first `n_x` students are the gadget's; further entries belong to the wider market.
pub fn verify_not_gadget(g: &NotGadget, s: &AllocationSolution, eps_prime: f64, alpha_star: usize) -> Result<NotReport> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return input("ε' must lie in (0,1)");
    }
    if g.n_x <= 6 * alpha_star {
        return input(format!("n_x = {} must exceed 6α* = {}", g.n_x, 6 * alpha_star));
    }
    if s.prices.len() < 2 || s.budgets.len() < g.n_x {
        return input("solution does not cover the gadget courses and students");
    }
    if s.prices.iter().chain(&s.budgets).any(|x| !x.is_finite() || *x < 0.0) {
        return input("prices and budgets must be finite and non-negative");
    }
    let med = lower_median(&s.budgets).expect("nonempty");
    if (med - (1.0 + eps_prime / 2.0)).abs() > 1e-9 {
        return input(format!("solution is not normalized: median budget {med}, expected {}", 1.0 + eps_prime / 2.0));
    }
    let (p_in, p_out) = (s.prices[g.input_course], s.prices[g.output_course]);
    let band = [1.0 - p_in, 1.0 - p_in + eps_prime];
    let position = if p_out < band[0] - PRICE_SLACK {
        BandPosition::Below
    } else if p_out > band[1] + PRICE_SLACK {
        BandPosition::Above
    } else {
        BandPosition::Inside
    };
    let ours = &s.budgets[..g.n_x];
    let low_budgets = ours.iter().filter(|b| **b <= 1.0).count();
    let high_budgets = ours.iter().filter(|b| **b > 1.0 + eps_prime).count();
    let verdict = match position {
        BandPosition::Inside => NotVerdict::GateSatisfied,
        BandPosition::Below if 6 * low_budgets >= g.n_x => NotVerdict::InequalityWitness,
        BandPosition::Above if 3 * high_budgets >= g.n_x => NotVerdict::InequalityWitness,
        _ => NotVerdict::Violation,
    };
    let affording = ours
        .iter()
        .zip(&g.problem.students)
        .filter(|(&b, st)| student_demand(&s.prices, b, st).is_some())
        .count();
    let q = g.output_capacity();
    let output_error_lower_bound = affording.saturating_sub(q).max(q.saturating_sub(affording + g.allowance));
    Ok(NotReport {
        verdict,
        position,
        band,
        price_in: p_in,
        price_out: p_out,
        low_budgets,
        high_budgets,
        affording,
        output_error_lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(prices: Vec<f64>, budgets: Vec<f64>) -> AllocationSolution {
        let n = budgets.len();
        AllocationSolution { prices, budgets, bundles: vec![vec![]; n] }
    }

    #[test]
    fn demand_examples() {
        let s = Student { bundles: vec![vec![0], vec![1]], pref: vec![1, 0] };
        assert_eq!(student_demand(&[0.5, 0.5], 1.0, &s), Some(1));
        assert_eq!(student_demand(&[0.5, 2.0], 1.0, &s), Some(0));
        assert_eq!(student_demand(&[3.0, 2.0], 1.0, &s), None);
    }

    #[test]
    fn clearing_examples() {
        let st = Student { bundles: vec![vec![0]], pref: vec![0] };
        let p = CourseAllocationProblem { capacities: vec![2, 3], students: vec![st; 4], max_bundle: None };
        let r = clearing_error(&p, &sol(vec![0.5, 0.0], vec![1.0; 4])).unwrap();
        assert_eq!(r.demand, vec![4, 0]);
        assert_eq!(r.error, 3);
        let r = clearing_error(&p, &sol(vec![5.0, 0.0], vec![1.0; 4])).unwrap();
        assert_eq!(r.error, 3);
    }

    #[test]
    fn problem_json() {
        let p = CourseAllocationProblem::from_json(r#"{"capacities":[1,1,1,1],"students":[{"bundles":[[0,3],[1]],"pref":[0,1]}]}"#)
            .unwrap();
        assert_eq!(p.students[0].bundles[0], vec![0, 3]);
        assert!(CourseAllocationProblem::from_json(r#"{"capacities":[1],"students":[{"bundles":[[0],[0]],"pref":[0,0]}]}"#).is_err());
        assert!(CourseAllocationProblem::from_json(r#"{"capacities":[1],"students":[{"bundles":[[2]],"pref":[0]}]}"#).is_err());
    }

    #[test]
    fn normalization_examples() {
        let p = build_not_gadget(6).unwrap().problem;
        let out = normalize_budgets(&p, &sol(vec![0.3, 0.2], vec![2.0; 6]), 0.2).unwrap();
        assert!(out.budgets.iter().all(|b| (b - 1.1).abs() < 1e-15));
        let st = Student { bundles: vec![vec![0]], pref: vec![0] };
        let p2 = CourseAllocationProblem { capacities: vec![1], students: vec![st; 2], max_bundle: None };
        let out = normalize_budgets(&p2, &sol(vec![0.5], vec![1.0, 3.0]), 0.0).unwrap();
        assert_eq!(out.budgets, vec![1.0, 3.0]);
        assert!(normalize_budgets(&p2, &sol(vec![0.5], vec![0.0, 3.0]), 0.0).is_err());
    }

    #[test]
    fn gini_examples() {
        let g = |v: Vec<f64>| gini(&IncomeDistribution::new(v).unwrap()).unwrap();
        assert_eq!(g(vec![2.0; 5]), 0.0);
        assert!((g(vec![0.0, 1.0]) - 0.5).abs() < 1e-12);
        assert!((g(vec![1.0, 1.0, 1.0, 3.0]) - 0.25).abs() < 1e-12);
        assert!(IncomeDistribution::new(vec![0.0, 0.0]).is_err());
        let d = IncomeDistribution::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(lorenz(&d, 0.5).unwrap(), 0.0);
        assert_eq!(lorenz(&d, 0.75).unwrap(), 0.5);
        assert_eq!(lorenz(&d, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn witness_values() {
        let w = gini_lowerbound_witness(0.2, 0.1, 100).unwrap();
        // 10 incomes at 1, 90 at 1.1: Σ i·y = 55 + 1.1·4995, Σ y = 109
        let expected = 2.0 * (55.0 + 1.1 * 4995.0) / (100.0 * 109.0) - 1.01;
        assert!((w.gini - expected).abs() < 1e-12);
        assert!(w.pass && w.bound >= 0.002 && w.gini > w.tight_bound);
        let small = gini_lowerbound_witness(0.2, 0.001, 2000).unwrap();
        assert!(small.gini < 1e-4);
        assert!(gini_lowerbound_witness(0.2, 0.1, 99).is_err());
        assert!(gini_lowerbound_witness(0.2, 0.6, 100).is_err());
    }

    #[test]
    fn gadget_shape() {
        let g = build_not_gadget(12).unwrap();
        assert_eq!((g.output_capacity(), g.problem.students.len(), g.allowance), (8, 12, 2));
        assert_eq!(build_not_gadget(6).unwrap().output_capacity(), 4);
        assert!(build_not_gadget(9).is_err() && build_not_gadget(0).is_err());
        let back = NotGadget::from_problem(g.problem.clone(), 0, 1, None).unwrap();
        assert_eq!(back, g);
        assert!(NotGadget::from_problem(g.problem.clone(), 1, 1, None).is_err());
        assert!(NotGadget::from_problem(g.problem, 0, 1, Some(18)).is_err());
    }

    #[test]
    fn verdict_branches() {
        let g = build_not_gadget(12).unwrap();
        let r = verify_not_gadget(&g, &sol(vec![0.4, 0.65], vec![1.05; 12]), 0.1, 1).unwrap();
        assert_eq!(r.verdict, NotVerdict::GateSatisfied);

        let mut b = vec![1.05; 12];
        b[0] = 0.9;
        b[1] = 1.0;
        let r = verify_not_gadget(&g, &sol(vec![0.4, 0.5], b), 0.1, 1).unwrap();
        assert_eq!((r.verdict, r.position, r.low_budgets), (NotVerdict::InequalityWitness, BandPosition::Below, 2));

        let r = verify_not_gadget(&g, &sol(vec![0.4, 0.8], vec![1.05; 12]), 0.1, 1).unwrap();
        assert_eq!((r.verdict, r.position), (NotVerdict::Violation, BandPosition::Above));
        assert_eq!(r.affording, 0);
        assert!(r.output_error_lower_bound > 1);

        assert!(verify_not_gadget(&g, &sol(vec![0.4, 0.65], vec![2.0; 12]), 0.1, 1).is_err());
        assert!(verify_not_gadget(&g, &sol(vec![0.4, 0.65], vec![1.05; 12]), 0.1, 2).is_err());
    }
}
