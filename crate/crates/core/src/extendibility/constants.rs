use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// `c*(k) = (k - 1)²/(4k)`.
pub fn c_star(k: usize) -> Result<BigRational> {
    if k == 0 {
        bail!(Domain, "k must be positive");
    }
    let k = BigInt::from(k);
    let km1 = &k - 1;
    Ok(BigRational::new(&km1 * &km1, 4 * k))
}

/// Which inequality `min_k_beating` solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `(k - 1)²/(4k) > constant`
    Threshold,
    /// `2/√k < constant`
    Width,
}

/// Largest constant accepted by [`min_k_beating`]; keeps the answer in `u64`.
pub const MAX_COMPARISON_CONSTANT: f64 = 1e15;

/// Smallest `k ≥ 2` satisfying the chosen inequality. Both sides are
/// compared in floating point; use [`min_k_beating_exact`] for rational
/// constants in threshold mode.
pub fn min_k_beating(comparison: Comparison, constant: f64) -> Result<u64> {
    if !(constant > 0.0) || !constant.is_finite() {
        bail!(Domain, "comparison constant must be positive and finite, got {constant}");
    }
    if comparison == Comparison::Threshold && constant > MAX_COMPARISON_CONSTANT {
        bail!(Domain, "comparison constant {constant} is too large");
    }
    let holds = |k: u64| -> bool {
        let kf = k as f64;
        match comparison {
            Comparison::Threshold => (kf - 1.0).powi(2) / (4.0 * kf) > constant,
            Comparison::Width => 2.0 / kf.sqrt() < constant,
        }
    };
    // Solve the inequality in closed form, then settle the boundary exactly.
    let guess = match comparison {
        Comparison::Threshold => {
            let b = 1.0 + 2.0 * constant;
            b + (b * b - 1.0).sqrt()
        }
        Comparison::Width => 4.0 / (constant * constant),
    };
    Ok(settle(guess, holds))
}

/// Threshold mode with an exact rational constant: smallest `k ≥ 2` with
/// `(k - 1)² > 4k · constant`.
pub fn min_k_beating_exact(constant: &BigRational) -> Result<u64> {
    if *constant <= BigRational::from_integer(0.into()) {
        bail!(Domain, "comparison constant must be positive");
    }
    let approx = num_traits::ToPrimitive::to_f64(constant).unwrap_or(f64::INFINITY);
    if !(approx <= MAX_COMPARISON_CONSTANT) {
        bail!(Domain, "comparison constant is too large");
    }
    let holds = |k: u64| -> bool {
        let k = BigInt::from(k);
        let km1 = &k - 1;
        BigRational::from_integer(&km1 * &km1) > BigRational::from_integer(4 * k) * constant
    };
    let b = 1.0 + 2.0 * approx;
    Ok(settle(b + (b * b - 1.0).sqrt(), holds))
}

fn settle(guess: f64, holds: impl Fn(u64) -> bool) -> u64 {
    let mut k = (guess.floor() as u64).saturating_sub(2).max(2);
    while k > 2 && holds(k - 1) {
        k -= 1;
    }
    while !holds(k) {
        k += 1;
    }
    k
}

/// PPT threshold constant `c_ppt = 4`.
pub fn ppt_threshold_constant() -> BigRational {
    BigRational::from_integer(4.into())
}

/// Realignment threshold constant `(8/(3π))²`.
pub fn realignment_threshold_constant() -> f64 {
    (8.0 / (3.0 * std::f64::consts::PI)).powi(2)
}

/// PPT mean-width constant `e^{-1/2}`.
pub fn ppt_width_constant() -> f64 {
    (-0.5f64).exp()
}

/// The published value for the PPT threshold comparison.
pub const PAPER_TABLE_VALUE_FOR_PPT: u64 = 17;

/// Smallest `k` from which k-extendibility beats the other criteria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub width_vs_ppt_k: u64,
    pub threshold_vs_realignment_k: u64,
    pub threshold_vs_ppt_k: u64,
    pub paper_table_value_for_ppt: u64,
    /// Set when the exact threshold-vs-PPT value differs from the printed one.
    pub ppt_threshold_discrepancy: bool,
}

pub fn comparison_table() -> Result<ComparisonTable> {
    let threshold_vs_ppt_k = min_k_beating_exact(&ppt_threshold_constant())?;
    Ok(ComparisonTable {
        width_vs_ppt_k: min_k_beating(Comparison::Width, ppt_width_constant())?,
        threshold_vs_realignment_k: min_k_beating(Comparison::Threshold, realignment_threshold_constant())?,
        threshold_vs_ppt_k,
        paper_table_value_for_ppt: PAPER_TABLE_VALUE_FOR_PPT,
        ppt_threshold_discrepancy: threshold_vs_ppt_k != PAPER_TABLE_VALUE_FOR_PPT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn threshold_values() {
        assert_eq!(c_star(1).unwrap(), ratio(0, 1));
        assert_eq!(c_star(2).unwrap(), ratio(1, 8));
        assert_eq!(c_star(6).unwrap(), ratio(25, 24));
        assert!(c_star(0).is_err());
        for k in 2..50 {
            assert!(c_star(k + 1).unwrap() > c_star(k).unwrap());
        }
    }

    #[test]
    fn table_constants() {
        let t = comparison_table().unwrap();
        assert_eq!(t.width_vs_ppt_k, 11);
        assert_eq!(t.threshold_vs_realignment_k, 5);
        assert_eq!(t.threshold_vs_ppt_k, 18);
        assert!(t.ppt_threshold_discrepancy);
        assert_eq!(min_k_beating(Comparison::Threshold, 4.0).unwrap(), 18);
    }

    #[test]
    fn boundary_cases() {
        // (k-1)²/4k at k = 9 is exactly 16/9; strict inequality pushes to 10.
        assert_eq!(min_k_beating_exact(&ratio(16, 9)).unwrap(), 10);
        assert_eq!(min_k_beating_exact(&ratio(1, 1000)).unwrap(), 2);
        assert_eq!(min_k_beating(Comparison::Width, 10.0).unwrap(), 2);
        // 2/√k < 1 needs k > 4.
        assert_eq!(min_k_beating(Comparison::Width, 1.0).unwrap(), 5);
        assert!(min_k_beating(Comparison::Width, 0.0).is_err());
        assert!(min_k_beating_exact(&ratio(-1, 2)).is_err());
    }
}
