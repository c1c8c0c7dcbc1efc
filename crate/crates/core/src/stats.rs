//! One-tailed Mann-Whitney U test and sample summaries.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Tie-free samples up to this combined size use the exact null
/// distribution under [`PValueMethod::Auto`].
pub const EXACT_MAX_TOTAL: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    Empty,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alternative {
    /// Values in the first sample tend to be smaller.
    ALessThanB,
    /// Values in the first sample tend to be larger.
    AGreaterThanB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PValueMethod {
    /// Exact for small tie-free samples, normal approximation otherwise.
    Auto,
    /// Exact permutation distribution; requires tie-free samples.
    Exact,
    /// Normal approximation with tie-corrected variance and continuity correction.
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UTestResult {
    /// U of the first sample: pairs with `a > b`, ties counted one half.
    pub u_statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    pub tie_correction_applied: bool,
    /// Every value equal; the p-value is fixed at 0.5.
    pub degenerate: bool,
    /// Method actually used (never `Auto`).
    pub method: PValueMethod,
}

/// `U_A = #{(i, j) : a_i > b_j} + 0.5 #{(i, j) : a_i == b_j}`.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &x in a {
        for &y in b {
            twice += if x > y {
                2
            } else if x == y {
                1
            } else {
                0
            };
        }
    }
    twice as f64 / 2.0
}

fn check(sample: &[f64]) -> Result<(), StatsError> {
    if sample.is_empty() {
        return Err(StatsError::Empty);
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// `sum(t^3 - t)` over groups of tied values in the pooled sample.
fn tie_term(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        term += t * t * t - t;
        i = j;
    }
    term
}

/// Number of arrangements giving each value of `U_A` under the null, for
/// sample sizes `n1`, `n2` without ties.
fn exact_counts(n1: usize, n2: usize) -> Vec<f64> {
    // counts[i][j][u] by the recurrence on whether the largest pooled value
    // belongs to the first sample (adding j to U) or the second.
    let max_u = n1 * n2;
    let mut prev_row: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n2 + 1];
    for cell in prev_row.iter_mut() {
        cell[0] = 1.0;
    }
    for _i in 1..=n1 {
        let mut row: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n2 + 1];
        row[0][0] = 1.0;
        for j in 1..=n2 {
            for u in 0..=max_u {
                let from_a = if u >= j { prev_row[j][u - j] } else { 0.0 };
                row[j][u] = from_a + row[j - 1][u];
            }
        }
        prev_row = row;
    }
    prev_row.swap_remove(n2)
}

fn exact_p(u: f64, n1: usize, n2: usize, alternative: Alternative) -> f64 {
    let counts = exact_counts(n1, n2);
    let total: f64 = counts.iter().sum();
    let u = u.round() as usize;
    let tail: f64 = match alternative {
        Alternative::ALessThanB => counts[..=u].iter().sum(),
        Alternative::AGreaterThanB => counts[u..].iter().sum(),
    };
    (tail / total).clamp(0.0, 1.0)
}

pub fn mann_whitney_one_tailed(a: &[f64], b: &[f64], alternative: Alternative) -> Result<UTestResult, StatsError> {
    mann_whitney_with(a, b, alternative, PValueMethod::Auto)
}

/// One-tailed Mann-Whitney U test of `a` against `b`.
///
/// [`PValueMethod::Exact`] falls back to the normal approximation when the
/// samples contain ties, since the exact distribution assumes none.
pub fn mann_whitney_with(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    method: PValueMethod,
) -> Result<UTestResult, StatsError> {
    check(a)?;
    check(b)?;
    let (n1, n2) = (a.len(), b.len());
    let u = u_statistic(a, b);
    let ties = tie_term(a, b);
    let n = (n1 + n2) as f64;

    let mut result = UTestResult {
        u_statistic: u,
        p_value: 0.5,
        n1,
        n2,
        tie_correction_applied: ties > 0.0,
        degenerate: false,
        method: PValueMethod::Normal,
    };

    let use_exact = ties == 0.0
        && match method {
            PValueMethod::Auto => n1 + n2 <= EXACT_MAX_TOTAL,
            PValueMethod::Exact => true,
            PValueMethod::Normal => false,
        };
    if use_exact {
        result.p_value = exact_p(u, n1, n2, alternative);
        result.method = PValueMethod::Exact;
        return Ok(result);
    }

    let mean = (n1 * n2) as f64 / 2.0;
    let variance = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)).max(1.0));
    if variance <= 0.0 {
        result.degenerate = true;
        return Ok(result);
    }
    let sd = variance.sqrt();
    let z = match alternative {
        Alternative::ALessThanB => (u - mean + 0.5) / sd,
        Alternative::AGreaterThanB => (mean - u + 0.5) / sd,
    };
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    result.p_value = standard.cdf(z).clamp(0.0, 1.0);
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator), 0 for one value.
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

pub fn summarize(samples: &[f64]) -> Result<Summary, StatsError> {
    check(samples)?;
    let count = samples.len();
    let mean = samples.iter().sum::<f64>() / count as f64;
    let ss: f64 = samples.iter().map(|v| (v - mean) * (v - mean)).sum();
    let stddev = if count > 1 { (ss / (count - 1) as f64).sqrt() } else { 0.0 };
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Summary {
        mean,
        stddev,
        min,
        max,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separated_samples() {
        let r = mann_whitney_one_tailed(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::ALessThanB).unwrap();
        assert_eq!(r.u_statistic, 0.0);
        assert!((r.p_value - 0.05).abs() < 1e-12);
        assert_eq!(r.method, PValueMethod::Exact);
        let normal = mann_whitney_with(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::ALessThanB, PValueMethod::Normal)
            .unwrap();
        assert!(normal.p_value <= 0.06, "{}", normal.p_value);
    }

    #[test]
    fn identical_samples() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = mann_whitney_one_tailed(&a, &a, Alternative::ALessThanB).unwrap();
        assert_eq!(r.u_statistic, 12.5);
        assert!(r.tie_correction_applied);
        assert!((r.p_value - 0.5).abs() < 0.1, "{}", r.p_value);
    }

    #[test]
    fn all_equal_is_degenerate() {
        let r = mann_whitney_one_tailed(&[2.0, 2.0], &[2.0, 2.0, 2.0], Alternative::ALessThanB).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 0.5);
    }

    #[test]
    fn exact_distribution_totals() {
        // C(7, 3) arrangements, symmetric around n1 n2 / 2.
        let c = exact_counts(3, 4);
        assert_eq!(c.iter().sum::<f64>(), 35.0);
        assert_eq!(c.len(), 13);
        for u in 0..c.len() {
            assert_eq!(c[u], c[c.len() - 1 - u]);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(mann_whitney_one_tailed(&[], &[1.0], Alternative::ALessThanB), Err(StatsError::Empty));
        assert_eq!(summarize(&[]), Err(StatsError::Empty));
        assert_eq!(summarize(&[f64::NAN]), Err(StatsError::NonFinite));
    }

    #[test]
    fn summaries() {
        let s = summarize(&[5.0]).unwrap();
        assert_eq!((s.mean, s.stddev, s.count), (5.0, 0.0, 1));
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!((s.stddev - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0i32..30).prop_map(f64::from), 1..40)
    }

    proptest! {
        #[test]
        fn u_statistics_complement(a in sample(), b in sample()) {
            let ua = u_statistic(&a, &b);
            let ub = u_statistic(&b, &a);
            prop_assert_eq!(ua + ub, (a.len() * b.len()) as f64);
        }

        #[test]
        fn swapping_flips_alternative(a in sample(), b in sample()) {
            for method in [PValueMethod::Auto, PValueMethod::Normal] {
                let p = mann_whitney_with(&a, &b, Alternative::ALessThanB, method).unwrap().p_value;
                let q = mann_whitney_with(&b, &a, Alternative::AGreaterThanB, method).unwrap().p_value;
                prop_assert!((p - q).abs() < 1e-12);
            }
        }

        #[test]
        fn shifting_b_up_lowers_p(a in sample(), b in sample(), shift in 1i32..20) {
            let shifted: Vec<f64> = b.iter().map(|v| v + f64::from(shift)).collect();
            for method in [PValueMethod::Auto, PValueMethod::Normal] {
                let p = mann_whitney_with(&a, &b, Alternative::ALessThanB, method).unwrap();
                let q = mann_whitney_with(&a, &shifted, Alternative::ALessThanB, method).unwrap();
                if !p.degenerate && !q.degenerate && p.method == q.method {
                    prop_assert!(q.p_value <= p.p_value + 1e-12);
                }
            }
        }
    }
}
