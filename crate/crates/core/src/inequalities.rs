//! Exhaustive finite-range checks of binomial and entropy-type inequalities.
//!
//! Every comparison is done in exact integer arithmetic. Inequalities with
//! square-root factors are squared first, so no floating-point tolerance is
//! involved in pass/fail. Floats are only used to report how tight the
//! closest case was.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub inequality: &'static str,
    /// Parameters in the order `(a1, b1, a2, b2)` or `(a, b, k)`.
    pub params: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalitySummary {
    pub inequality: &'static str,
    pub checked: u64,
    pub violations: u64,
    /// Smallest `ln(larger side / smaller side)` seen; 0 means equality.
    pub tightest_log_ratio: f64,
    pub tightest_at: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub checked: u64,
    pub violations: Vec<Violation>,
    pub tightest_log_ratio: f64,
    /// `"exact"`: every comparison was done on integers.
    pub arithmetic: &'static str,
    pub per_inequality: Vec<InequalitySummary>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn from_summaries(mut per_inequality: Vec<InequalitySummary>, violations: Vec<Violation>) -> Self {
        per_inequality.iter_mut().for_each(|s| {
            s.violations = violations.iter().filter(|v| v.inequality == s.inequality).count() as u64;
        });
        InequalityReport {
            checked: per_inequality.iter().map(|s| s.checked).sum(),
            tightest_log_ratio: per_inequality
                .iter()
                .map(|s| s.tightest_log_ratio)
                .fold(f64::INFINITY, f64::min),
            violations,
            arithmetic: "exact",
            per_inequality,
        }
    }
}

/// Natural log of a big integer, exact enough for reporting.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

struct Tally {
    name: &'static str,
    checked: u64,
    tightest: f64,
    tightest_at: Vec<u64>,
    violations: Vec<Violation>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, tightest: f64::INFINITY, tightest_at: vec![], violations: vec![] }
    }

    /// Records `small <= large`.
    fn record(&mut self, small: &BigUint, large: &BigUint, params: &[u64]) {
        self.checked += 1;
        if small > large {
            self.violations.push(Violation { inequality: self.name, params: params.to_vec() });
        }
        let ratio = ln_big(large) - ln_big(small);
        if ratio < self.tightest {
            self.tightest = ratio;
            self.tightest_at = params.to_vec();
        }
    }

    /// Folds tallies produced in a fixed order.
    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        if other.tightest < self.tightest {
            self.tightest = other.tightest;
            self.tightest_at = other.tightest_at;
        }
        self.violations.extend(other.violations);
        self
    }

    fn summary(&self) -> InequalitySummary {
        InequalitySummary {
            inequality: self.name,
            checked: self.checked,
            violations: self.violations.len() as u64,
            tightest_log_ratio: self.tightest,
            tightest_at: self.tightest_at.clone(),
        }
    }
}

/// Pascal's triangle up to row `max`.
struct Binomials {
    rows: Vec<Vec<BigUint>>,
}

impl Binomials {
    fn new(max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max + 1);
        for a in 0..=max {
            let mut row = Vec::with_capacity(a + 1);
            for b in 0..=a {
                row.push(if b == 0 || b == a {
                    BigUint::one()
                } else {
                    &rows[a - 1][b - 1] + &rows[a - 1][b]
                });
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    fn get(&self, a: u64, b: u64) -> &BigUint {
        &self.rows[a as usize][b as usize]
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `x^x`, with `0^0 = 1`.
fn self_power(x: u64) -> BigUint {
    big(x).pow(x as u32)
}

/// All `(a1, b1, a2, b2)` with `1 <= b_i < a_i <= range_max`, grouped by `a1`.
fn quadruples(range_max: u64) -> impl ParallelIterator<Item = (u64, Vec<(u64, u64, u64, u64)>)> {
    (2..=range_max).into_par_iter().map(move |a1| {
        let mut out = Vec::new();
        for b1 in 1..a1 {
            for a2 in 2..=range_max {
                for b2 in 1..a2 {
                    out.push((a1, b1, a2, b2));
                }
            }
        }
        (a1, out)
    })
}

/// Checks `a^a / (b^b (a−b)^(a−b)) ≥ ∏ a_i^a_i / (b_i^b_i (a_i−b_i)^(a_i−b_i))`,
/// `a = a1 + a2`, `b = b1 + b2`, for `1 <= b_i < a_i <= range_max`, by
/// cross-multiplying the denominators.
pub fn check_lemma_aux(range_max: u64) -> InequalityReport {
    let range_max = range_max.max(2);
    let powers: Vec<BigUint> = (0..=2 * range_max).map(self_power).collect();
    let p = |x: u64| &powers[x as usize];
    let mut parts: Vec<(u64, Tally)> = quadruples(range_max)
        .map(|(a1, tuples)| {
            let mut t = Tally::new("lemma_aux");
            for (a1, b1, a2, b2) in tuples {
                let (a, b) = (a1 + a2, b1 + b2);
                let lhs = p(a) * p(b1) * p(a1 - b1) * p(b2) * p(a2 - b2);
                let rhs = p(a1) * p(a2) * p(b) * p(a - b);
                t.record(&rhs, &lhs, &[a1, b1, a2, b2]);
            }
            (a1, t)
        })
        .collect();
    parts.sort_by_key(|(a1, _)| *a1);
    let tally = parts.into_iter().map(|(_, t)| t).reduce(Tally::merge).unwrap_or_else(|| Tally::new("lemma_aux"));
    InequalityReport::from_summaries(vec![tally.summary()], tally.violations)
}

/// Checks the four hypergeometric anti-concentration bounds:
///
/// * `C(a1,b1) C(a2,b2) ≤ C(a,b)`
/// * `C(a1,b1) C(a2,b2) ≤ (2/3) √(b(a−b) a1 a2 / (a b1 (a1−b1) b2 (a2−b2))) C(a,b)`
/// * `C(a,b)^k ≤ (a/(b(a−b)))^((k−1)/2) C(ka,kb)` for `1 <= k <= k_max`
/// * `C(2a,2b) ≤ 4 √(b(a−b)/a) C(a,b)² ≤ 2 √a C(a,b)²`
///
/// over `0 < b_i < a_i <= range_max` (and `0 < b < a <= range_max`).
pub fn check_hypergeometric_anticoncentration(range_max: u64, k_max: u64) -> InequalityReport {
    let range_max = range_max.max(2);
    let k_max = k_max.max(1);
    let binom = Binomials::new((2 * range_max).max(k_max * range_max) as usize);
    let c = |a: u64, b: u64| binom.get(a, b);

    let mut parts: Vec<(u64, Tally, Tally)> = quadruples(range_max)
        .map(|(a1, tuples)| {
            let mut product = Tally::new("product");
            let mut refined = Tally::new("product_sqrt");
            for (a1, b1, a2, b2) in tuples {
                let (a, b) = (a1 + a2, b1 + b2);
                let params = [a1, b1, a2, b2];
                let lhs = c(a1, b1) * c(a2, b2);
                product.record(&lhs, c(a, b), &params);
                // 9 L² · a b1 (a1−b1) b2 (a2−b2) ≤ 4 b(a−b) a1 a2 C(a,b)²
                let l = &lhs * &lhs * big(9 * a * b1 * (a1 - b1) * b2 * (a2 - b2));
                let r = c(a, b) * c(a, b) * big(4 * b * (a - b) * a1 * a2);
                refined.record(&l, &r, &params);
            }
            (a1, product, refined)
        })
        .collect();
    parts.sort_by_key(|(a1, _, _)| *a1);
    let (mut product, mut refined) = (Tally::new("product"), Tally::new("product_sqrt"));
    for (_, p, r) in parts {
        product = product.merge(p);
        refined = refined.merge(r);
    }

    let mut power = Tally::new("power");
    let mut doubling = Tally::new("doubling");
    let mut doubling_sqrt_a = Tally::new("doubling_sqrt_a");
    for a in 2..=range_max {
        for b in 1..a {
            let cab = c(a, b);
            for k in 1..=k_max {
                // C(a,b)^(2k) (b(a−b))^(k−1) ≤ a^(k−1) C(ka,kb)²
                let e = (k - 1) as u32;
                let l = cab.pow(2 * k as u32) * big(b * (a - b)).pow(e);
                let r = big(a).pow(e) * c(k * a, k * b) * c(k * a, k * b);
                power.record(&l, &r, &[a, b, k]);
            }
            let c2 = c(2 * a, 2 * b);
            let c4 = cab.pow(4);
            // a C(2a,2b)² ≤ 16 b(a−b) C(a,b)⁴, then C(2a,2b)² ≤ 4a C(a,b)⁴
            doubling.record(&(c2 * c2 * big(a)), &(&c4 * big(16 * b * (a - b))), &[a, b]);
            doubling_sqrt_a.record(&(c2 * c2), &(&c4 * big(4 * a)), &[a, b]);
        }
    }

    let tallies = [product, refined, power, doubling, doubling_sqrt_a];
    let summaries = tallies.iter().map(Tally::summary).collect();
    let violations = tallies.into_iter().flat_map(|t| t.violations).collect();
    InequalityReport::from_summaries(summaries, violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_case_is_equality() {
        // a1 = a2 = 2, b1 = b2 = 1: both sides 16
        let r = check_lemma_aux(2);
        assert_eq!(r.checked, 1);
        assert!(r.passed());
        assert!(r.tightest_log_ratio.abs() < 1e-12);
    }

    #[test]
    fn aux_direct_instance() {
        // a1=3, b1=1, a2=2, b2=1: a=5, b=2
        let lhs = 5f64.powi(5) / (2f64.powi(2) * 3f64.powi(3));
        let rhs = (3f64.powi(3) / 2f64.powi(2)) * (2f64.powi(2) / 1.0);
        assert!(lhs.ln() - rhs.ln() >= 0.0);
        let r = check_lemma_aux(3);
        assert!(r.passed());
    }

    #[test]
    fn small_binomial_instances() {
        let b = Binomials::new(10);
        assert_eq!(b.get(4, 2), &big(6));
        assert_eq!(b.get(10, 3), &big(120));
        // doubling with a=2, b=1: 6 ≤ 2√2·4
        assert!(6.0 <= 2.0 * 2f64.sqrt() * 4.0);
        let r = check_hypergeometric_anticoncentration(4, 3);
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.per_inequality.len(), 5);
    }

    #[test]
    fn ln_big_matches_f64() {
        let x = big(3).pow(200);
        assert!((ln_big(&x) - 200.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(ln_big(&big(1)), 0.0);
    }

    #[test]
    fn deterministic() {
        assert_eq!(check_hypergeometric_anticoncentration(8, 4), check_hypergeometric_anticoncentration(8, 4));
    }
}
