//! Catalan and Narayana numbers, defect-class counts and the lifted-cycle identity.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::partition::{
    enumerate_pairings, enumerate_permutations, restricted_growth_strings, EnumerationCaps,
    PairPartition,
};
use super::permutation::{
    canonical_cycle_images, cycle_count_of, cycle_count_of_composite, gamma_images_for_blocks,
    LevelFunction, Permutation,
};
use crate::error::{bail, Result};

fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Cat_p = C(2p, p) / (p + 1)`.
pub fn catalan(p: u64) -> BigUint {
    binomial(2 * p, p) / (p + 1)
}

/// `Nar_p^m = C(p+1, m) C(p-1, m-1) / (p + 1)` for `1 <= m <= p`.
pub fn narayana(p: u64, m: u64) -> Result<BigUint> {
    if m == 0 || m > p {
        bail!(Domain, "narayana needs 1 <= m <= p, got p={p}, m={m}");
    }
    Ok(binomial(p + 1, m) * binomial(p - 1, m - 1) / (p + 1))
}

/// Narayana value extended by zero outside `1..=p`; handy inside bound sums.
pub(crate) fn narayana_or_zero(p: u64, m: i64) -> BigUint {
    if m < 1 || m as u64 > p {
        BigUint::zero()
    } else {
        narayana(p, m as u64).unwrap()
    }
}

/// `(2p - 1)!!`, the number of pairings of `2p` points.
pub fn double_factorial_odd(p: u64) -> BigUint {
    (1..=p).fold(BigUint::one(), |acc, i| acc * (2 * i - 1))
}

pub(crate) fn falling_factorial(k: usize, b: usize) -> u64 {
    (0..b).map(|i| (k - i) as u64).product()
}

/// Calls `visit(values)` for every `f: [p] -> [k]` (1-based values) in
/// lexicographic order.
pub fn for_each_level_function(p: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    let mut values = vec![1usize; p];
    loop {
        visit(&values);
        let mut pos = p;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if values[pos] < k {
                values[pos] += 1;
                break;
            }
            values[pos] = 1;
        }
    }
}

/// Level-set blocks (1-based) of a restricted growth string.
pub(crate) fn blocks_of_rgs(rgs: &[usize]) -> Vec<Vec<usize>> {
    let count = rgs.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); count];
    for (i, &b) in rgs.iter().enumerate() {
        blocks[b].push(i + 1);
    }
    blocks
}

/// The level-set partitions of functions `[n] -> [k]`, each with the inverse
/// of its `γ_f` as a 0-based table, its image size and the number of
/// functions sharing it (`k (k-1) .. (k-b+1)`).
pub(crate) fn level_classes(n: usize, k: usize) -> Vec<(Vec<usize>, usize, u64)> {
    restricted_growth_strings(n, k)
        .into_iter()
        .map(|rgs| {
            let blocks = blocks_of_rgs(&rgs);
            let b = blocks.len();
            let gamma = gamma_images_for_blocks(n, &blocks);
            let mut inv = vec![0; n];
            for (i, &g) in gamma.iter().enumerate() {
                inv[g] = i;
            }
            (inv, b, falling_factorial(k, b))
        })
        .collect()
}

/// `α̂_f` on `[p] × [k]`: `(i, r) -> (α(i), f(α(i)))` when `r = f(i)`, fixed
/// otherwise. Point `(i, r)` is numbered `(i - 1) k + r`.
pub fn lift_alpha_f(alpha: &Permutation, f: &LevelFunction, k: usize) -> Result<Permutation> {
    if alpha.size() != f.len() {
        bail!(
            Validation,
            "permutation on {} points but level function on {}",
            alpha.size(),
            f.len()
        );
    }
    if f.alphabet() != k {
        bail!(Validation, "level function alphabet {} differs from k = {k}", f.alphabet());
    }
    let p = alpha.size();
    let mut images: Vec<usize> = (0..p * k).collect();
    for i in 0..p {
        let r = f.values()[i] - 1;
        let j = alpha.zero_based()[i];
        let s = f.values()[j] - 1;
        images[i * k + r] = j * k + s;
    }
    Ok(Permutation::from_zero_based_unchecked(images))
}

/// `γ̂ = (γ, id)` on `[p] × [k]`.
pub fn lifted_gamma(p: usize, k: usize) -> Permutation {
    let gamma = canonical_cycle_images(p);
    let images = (0..p * k).map(|x| gamma[x / k] * k + x % k).collect();
    Permutation::from_zero_based_unchecked(images)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftCounterexample {
    pub alpha: Permutation,
    pub f: Vec<usize>,
    pub lifted_cycles: usize,
    pub expected: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftVerification {
    pub p: usize,
    pub k: usize,
    pub cases: u64,
    pub counterexamples: Vec<LiftCounterexample>,
}

impl LiftVerification {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Default sweep limits for [`verify_lift_formula`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiftCaps {
    pub max_p: usize,
    pub max_k: usize,
}

impl Default for LiftCaps {
    fn default() -> Self {
        Self { max_p: 5, max_k: 3 }
    }
}

/// Checks `#(γ̂⁻¹ α̂_f) = #(γ_f⁻¹ α) + k - |im f|` for all `α ∈ S(p)` and all
/// `f: [p] -> [k]`.
pub fn verify_lift_formula(p: usize, k: usize, caps: &LiftCaps) -> Result<LiftVerification> {
    if p == 0 || k == 0 {
        bail!(Domain, "lift sweep needs p, k >= 1");
    }
    if p > caps.max_p || k > caps.max_k {
        bail!(
            Resource,
            "lift sweep (p={p}, k={k}) exceeds caps (p<={}, k<={})",
            caps.max_p,
            caps.max_k
        );
    }
    let perms = enumerate_permutations(
        p,
        &EnumerationCaps {
            permutations: p,
            ..EnumerationCaps::default()
        },
    )?;
    let gamma_hat_inv = lifted_gamma(p, k).inverse();
    let mut seen = Vec::new();
    let mut cases = 0u64;
    let mut counterexamples = Vec::new();
    for_each_level_function(p, k, |values| {
        let f = LevelFunction::new(values.to_vec(), k).expect("odometer yields valid values");
        let gf_inv = super::permutation::gamma_f(&f).inverse();
        for alpha in &perms {
            cases += 1;
            let lifted = lift_alpha_f(alpha, &f, k).expect("sizes agree");
            let lhs = cycle_count_of_composite(gamma_hat_inv.zero_based(), lifted.zero_based(), &mut seen);
            let base = cycle_count_of_composite(gf_inv.zero_based(), alpha.zero_based(), &mut seen);
            let expected = base + k - f.image_size();
            if lhs != expected {
                counterexamples.push(LiftCounterexample {
                    alpha: alpha.clone(),
                    f: values.to_vec(),
                    lifted_cycles: lhs,
                    expected,
                });
            }
        }
    });
    Ok(LiftVerification {
        p,
        k,
        cases,
        counterexamples,
    })
}

/// An exact count together with the upper bound it is compared against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectCount {
    pub count: BigUint,
    /// `None` outside the range where the bound is stated
    /// (`δ ≤ ⌊p/2⌋`, and `m ≤ p - 2δ` for permutations).
    pub bound: Option<BigRational>,
    pub within_bound: bool,
}

impl DefectCount {
    fn new(count: BigUint, bound: Option<BigRational>) -> Self {
        let within_bound = match &bound {
            Some(b) => BigRational::from_integer(count.clone().into()) <= *b,
            None => true,
        };
        Self {
            count,
            bound,
            within_bound,
        }
    }
}

/// Work limit for the `(f, λ)` and `(f, α)` sweeps, counted in cycle evaluations.
pub const DEFAULT_SWEEP_BUDGET: u64 = 200_000_000;

fn rational(n: BigUint) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Histogram of `#(γ_f⁻¹ λ)`-defects. Without `k`: `|{λ : #(γ⁻¹λ) = p + 1 - 2δ}|`
/// over pairings of `2p` points, bounded by `Cat_p (p⁴/4)^δ`. With `k`: the number
/// of pairs `(f, λ)`, `f: [2p] -> [k]`, with `#(γ_f⁻¹ λ) = p + |im f| - 2δ`,
/// bounded by `k^(p+2δ) Cat_p (p⁴/4)^δ`.
pub fn count_defect_pairings(
    p: usize,
    delta: usize,
    k: Option<usize>,
    caps: &EnumerationCaps,
) -> Result<DefectCount> {
    let counts = defect_pairing_histogram(p, k, caps)?;
    let count = counts.get(delta).cloned().unwrap_or_default();
    let pu = p as u64;
    let base = rational(catalan(pu))
        * BigRational::new(BigUint::from(pu.pow(4)).into(), BigUint::from(4u32).into())
            .pow(delta as i32);
    let bound = match k {
        None => base,
        Some(k) => base * rational(BigUint::from(k).pow((p + 2 * delta) as u32)),
    };
    Ok(DefectCount::new(count, (delta <= p / 2).then_some(bound)))
}

/// Counts indexed by `δ` for every defect value that occurs.
pub fn defect_pairing_histogram(
    p: usize,
    k: Option<usize>,
    caps: &EnumerationCaps,
) -> Result<Vec<BigUint>> {
    let n = 2 * p;
    let pairings = enumerate_pairings(n, caps)?;
    let classes = match k {
        None => {
            let gamma = canonical_cycle_images(n);
            let mut inv = vec![0; n];
            for (i, &g) in gamma.iter().enumerate() {
                inv[g] = i;
            }
            vec![(inv, 1usize, 1u64)]
        }
        Some(0) => bail!(Domain, "k must be positive"),
        Some(k) => level_classes(n, k),
    };
    check_budget(classes.len() as u64 * pairings.len() as u64)?;
    let mut hist: Vec<BigUint> = Vec::new();
    let mut seen = Vec::new();
    for (inv, b, weight) in &classes {
        for lambda in &pairings {
            let c = cycle_count_of_composite(inv, lambda.to_involution().zero_based(), &mut seen);
            let total = p + b;
            debug_assert!(c <= total && (total - c).is_multiple_of(2));
            let delta = (total - c) / 2;
            if hist.len() <= delta {
                hist.resize(delta + 1, BigUint::zero());
            }
            hist[delta] += *weight;
        }
    }
    Ok(hist)
}

fn check_budget(work: u64) -> Result<()> {
    if work > DEFAULT_SWEEP_BUDGET {
        bail!(
            Resource,
            "sweep needs {work} cycle evaluations, above the budget {DEFAULT_SWEEP_BUDGET}"
        );
    }
    Ok(())
}

/// Without `k`: `|S_{δ,m}(p)| = |{α : #α = m, #α + #(γ⁻¹α) = p + 1 - 2δ}|`,
/// bounded by `|S_{0,m}(p)| (p³/2)^δ`. With `k`: the number of pairs `(f, α)`
/// with `#α = m` and `#α + #(γ_f⁻¹α) = p + |im f| - 2δ`, bounded by
/// `(4k⁴p⁴)^δ Σ_{ε=0}^{2δ} k^(m-ε) Nar_p^(m-ε)`.
pub fn count_defect_permutations(
    p: usize,
    delta: usize,
    m: usize,
    k: Option<usize>,
    caps: &EnumerationCaps,
) -> Result<DefectCount> {
    let table = defect_permutation_table(p, k, caps)?;
    let lookup = |d: usize, m: usize| -> BigUint {
        table
            .get(d)
            .and_then(|row| row.get(m))
            .cloned()
            .unwrap_or_default()
    };
    let count = lookup(delta, m);
    let pu = p as u64;
    let bound = match k {
        None => {
            let base = lookup(0, m);
            rational(base)
                * BigRational::new(BigUint::from(pu.pow(3)).into(), BigUint::from(2u32).into())
                    .pow(delta as i32)
        }
        Some(k) => {
            let ku = k as u64;
            let mut sum = BigUint::zero();
            for eps in 0..=2 * delta {
                let level = m as i64 - eps as i64;
                if level >= 0 {
                    sum += BigUint::from(ku).pow(level as u32) * narayana_or_zero(pu, level);
                }
            }
            rational(sum * (BigUint::from(4 * ku.pow(4) * pu.pow(4))).pow(delta as u32))
        }
    };
    let applies = delta <= p / 2 && m >= 1 && m + 2 * delta <= p;
    Ok(DefectCount::new(count, applies.then_some(bound)))
}

/// `table[δ][m]` counts for all `α ∈ S(p)` (weighted by functions when `k` is given).
pub fn defect_permutation_table(
    p: usize,
    k: Option<usize>,
    caps: &EnumerationCaps,
) -> Result<Vec<Vec<BigUint>>> {
    if p == 0 {
        bail!(Domain, "p must be positive");
    }
    let perms = enumerate_permutations(p, caps)?;
    let classes = match k {
        None => {
            let gamma = canonical_cycle_images(p);
            let mut inv = vec![0; p];
            for (i, &g) in gamma.iter().enumerate() {
                inv[g] = i;
            }
            vec![(inv, 1usize, 1u64)]
        }
        Some(0) => bail!(Domain, "k must be positive"),
        Some(k) => level_classes(p, k),
    };
    check_budget(classes.len() as u64 * perms.len() as u64)?;
    let mut table: Vec<Vec<BigUint>> = Vec::new();
    let mut seen = Vec::new();
    let cycles: Vec<usize> = perms.iter().map(|a| cycle_count_of(a.zero_based())).collect();
    for (inv, b, weight) in &classes {
        for (alpha, &m) in perms.iter().zip(&cycles) {
            let c = cycle_count_of_composite(inv, alpha.zero_based(), &mut seen);
            let total = p + b;
            let delta = (total - m - c) / 2;
            if table.len() <= delta {
                table.resize(delta + 1, vec![BigUint::zero(); p + 1]);
            }
            table[delta][m] += *weight;
        }
    }
    Ok(table)
}

/// `λ_α` on `2p` points: every cycle `(i_l .. i_1)` of `α` (so `α(i_{j+1}) = i_j`)
/// contributes the pairs `(2 i_j, 2 i_{j+1} - 1)`. Fixed points give `(2i - 1, 2i)`.
pub fn perm_to_evenodd_pairing(alpha: &Permutation) -> PairPartition {
    let p = alpha.size();
    let inv = alpha.inverse();
    let pairs = (1..=p).map(|x| (2 * x, 2 * inv.apply(x) - 1)).collect();
    PairPartition::new(pairs).expect("even/odd pairing is a perfect matching")
}

/// Inverse of [`perm_to_evenodd_pairing`]; every pair must join an even and an odd point.
pub fn collapse_evenodd_pairing(lambda: &PairPartition) -> Result<Permutation> {
    let p = lambda.pairs().len();
    let mut inv_images = vec![0usize; p];
    for &(a, b) in lambda.pairs() {
        let (even, odd) = match (a % 2, b % 2) {
            (0, 1) => (a, b),
            (1, 0) => (b, a),
            _ => bail!(Validation, "pair ({a} {b}) does not join an even and an odd point"),
        };
        inv_images[even / 2 - 1] = odd.div_ceil(2);
    }
    Ok(Permutation::from_images(&inv_images)?.inverse())
}

/// `#α + #(γ_p⁻¹α)` and `#(γ_{2p}⁻¹ λ_α)`; the two agree for every `α`.
pub fn evenodd_cycle_identity(alpha: &Permutation) -> (usize, usize) {
    let p = alpha.size();
    if p == 0 {
        return (0, 0);
    }
    let lambda = perm_to_evenodd_pairing(alpha);
    let mut seen = Vec::new();
    let g_inv = |n: usize| {
        let g = canonical_cycle_images(n);
        let mut inv = vec![0; n];
        for (i, &x) in g.iter().enumerate() {
            inv[x] = i;
        }
        inv
    };
    let left = alpha.cycle_count() + cycle_count_of_composite(&g_inv(p), alpha.zero_based(), &mut seen);
    let right = cycle_count_of_composite(&g_inv(2 * p), lambda.to_involution().zero_based(), &mut seen);
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::partition::{enumerate_nc_pairings, enumerate_noncrossing};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn catalan_and_narayana_values() {
        assert_eq!(catalan(6), big(132));
        assert_eq!(narayana(3, 2).unwrap(), big(3));
        for p in 1..=12 {
            assert_eq!(narayana(p, 1).unwrap(), big(1));
            let row: BigUint = (1..=p).map(|m| narayana(p, m).unwrap()).sum();
            assert_eq!(row, catalan(p));
        }
        assert!(narayana(3, 0).is_err());
        assert!(narayana(3, 4).is_err());
    }

    #[test]
    fn narayana_matches_block_histogram() {
        let caps = EnumerationCaps::default();
        for p in 1..=8usize {
            let all = enumerate_noncrossing(p, &caps).unwrap();
            let mut hist = vec![0u64; p + 1];
            for s in &all {
                hist[s.block_count()] += 1;
            }
            for m in 1..=p {
                assert_eq!(big(hist[m]), narayana(p as u64, m as u64).unwrap());
            }
        }
    }

    #[test]
    fn lift_worked_example() {
        let alpha = Permutation::from_cycles(4, &[&[1, 4], &[2, 3]]).unwrap();
        let f = LevelFunction::new(vec![1, 1, 2, 1], 3).unwrap();
        let lifted = lift_alpha_f(&alpha, &f, 3).unwrap();
        let composite = lifted_gamma(4, 3).inverse().compose(&lifted).unwrap();
        assert_eq!(composite.cycle_count(), 3);
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let f = LevelFunction::new(vec![2, 1, 2], 2).unwrap();
        assert!(lift_alpha_f(&Permutation::identity(3), &f, 2).unwrap().is_identity());
        let single = LevelFunction::new(vec![1], 2).unwrap();
        let lifted = lift_alpha_f(&Permutation::identity(1), &single, 2).unwrap();
        assert_eq!(lifted.size(), 2);
        assert!(lifted.is_identity());
    }

    #[test]
    fn lift_sweeps() {
        let caps = LiftCaps::default();
        let r = verify_lift_formula(1, 1, &caps).unwrap();
        assert!(r.passed() && r.cases == 1);
        let r = verify_lift_formula(3, 2, &caps).unwrap();
        assert!(r.passed() && r.cases == 48);
        let r = verify_lift_formula(4, 3, &caps).unwrap();
        assert!(r.passed() && r.cases == 24 * 81);
        assert!(matches!(verify_lift_formula(6, 2, &caps), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn defect_pairings_small() {
        let caps = EnumerationCaps::default();
        assert_eq!(count_defect_pairings(2, 0, None, &caps).unwrap().count, big(2));
        assert_eq!(count_defect_pairings(2, 1, None, &caps).unwrap().count, big(1));
        for p in 1..=5usize {
            let hist = defect_pairing_histogram(p, None, &caps).unwrap();
            let total: BigUint = hist.iter().sum();
            assert_eq!(total, double_factorial_odd(p as u64));
            assert_eq!(hist[0], catalan(p as u64));
        }
    }

    #[test]
    fn defect_pairings_with_functions_sum_to_all_pairs() {
        let caps = EnumerationCaps::default();
        for (p, k) in [(2usize, 2usize), (3, 2), (2, 3)] {
            let hist = defect_pairing_histogram(p, Some(k), &caps).unwrap();
            let total: BigUint = hist.iter().sum();
            assert_eq!(total, double_factorial_odd(p as u64) * big(k as u64).pow(2 * p as u32));
            for delta in 1..hist.len() {
                assert!(count_defect_pairings(p, delta, Some(k), &caps).unwrap().within_bound);
            }
        }
    }

    #[test]
    fn function_weighted_zero_defect_counts_exceed_k_to_the_p_catalan() {
        // f = (1,2,1,2) makes γ_f = (1 3)(2 4), so the crossing pairing
        // (1 3)(2 4) has no defect relative to γ_f. The zero-defect count is
        // Σ_f Π_{level sets} Cat, not k^p Cat_p.
        let caps = EnumerationCaps::default();
        let c = count_defect_pairings(2, 0, Some(2), &caps).unwrap();
        assert_eq!(c.count, big(10));
        assert_eq!(c.bound, Some(BigRational::from_integer(8.into())));
        assert!(!c.within_bound);
        let perm = count_defect_permutations(4, 0, 2, Some(2), &caps).unwrap();
        assert_eq!(perm.count, big(26));
        assert!(!perm.within_bound);
    }

    #[test]
    fn defect_permutations_small() {
        let caps = EnumerationCaps::default();
        assert_eq!(count_defect_permutations(3, 0, 2, None, &caps).unwrap().count, big(3));
        assert_eq!(count_defect_permutations(3, 1, 1, None, &caps).unwrap().count, big(1));
        for p in 1..=6usize {
            let table = defect_permutation_table(p, None, &caps).unwrap();
            let total: BigUint = table.iter().flatten().sum();
            let fact: u64 = (1..=p as u64).product();
            assert_eq!(total, big(fact));
            for m in 1..=p {
                assert_eq!(table[0][m], narayana(p as u64, m as u64).unwrap());
            }
        }
    }

    #[test]
    fn evenodd_pairing_examples() {
        let id = Permutation::identity(2);
        let lambda = perm_to_evenodd_pairing(&id);
        assert_eq!(lambda.pairs(), &[(1, 2), (3, 4)]);
        let gamma = crate::combinatorics::canonical_full_cycle(3).unwrap();
        assert_eq!(evenodd_cycle_identity(&gamma), (4, 4));
    }

    #[test]
    fn evenodd_identity_and_round_trip_on_s4() {
        let caps = EnumerationCaps::default();
        for alpha in enumerate_permutations(4, &caps).unwrap() {
            let (l, r) = evenodd_cycle_identity(&alpha);
            assert_eq!(l, r, "{alpha}");
            let lambda = perm_to_evenodd_pairing(&alpha);
            assert_eq!(collapse_evenodd_pairing(&lambda).unwrap(), alpha);
        }
    }

    #[test]
    fn nc_pairings_are_defect_free() {
        let caps = EnumerationCaps::default();
        for lambda in enumerate_nc_pairings(8, &caps).unwrap() {
            let f = LevelFunction::constant(8, 1).unwrap();
            assert_eq!(
                crate::combinatorics::geodesic_defect(&lambda.to_involution(), &f).unwrap(),
                0
            );
        }
    }
}
