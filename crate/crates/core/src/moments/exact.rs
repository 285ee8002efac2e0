//! Exact moments as sums over pairings or permutations weighted by powers of
//! the dimensions.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::polynomial::MomentPolynomial;
use crate::combinatorics::{
    canonical_cycle_images, catalan, cycle_count_of, cycle_count_of_composite, enumerate_pairings,
    enumerate_permutations, gamma_f, level_classes, EnumerationCaps, LevelFunction,
};
use crate::error::{bail, Result};

/// Limits on the exact enumerations. Raising them is allowed but runtimes grow
/// like `(2p-1)!! k^(2p)` or `p! k^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentCaps {
    pub gue_plain_p: usize,
    pub wishart_plain_p: usize,
    pub gue_modified_p: usize,
    pub gue_modified_k: usize,
    pub wishart_modified_p: usize,
    pub wishart_modified_k: usize,
    pub second_moment_p: usize,
    pub second_moment_k: usize,
    pub word_length: usize,
}

impl Default for MomentCaps {
    fn default() -> Self {
        Self {
            gue_plain_p: 6,
            wishart_plain_p: 8,
            gue_modified_p: 5,
            gue_modified_k: 4,
            wishart_modified_p: 6,
            wishart_modified_k: 3,
            second_moment_p: 3,
            second_moment_k: 2,
            word_length: 10,
        }
    }
}

fn check(what: &str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        bail!(Resource, "{what} = {value} exceeds the cap {cap}");
    }
    Ok(())
}

fn pairing_caps(two_p: usize) -> EnumerationCaps {
    EnumerationCaps {
        pairings: two_p,
        ..EnumerationCaps::default()
    }
}

fn permutation_caps(p: usize) -> EnumerationCaps {
    EnumerationCaps {
        permutations: p,
        ..EnumerationCaps::default()
    }
}

fn inverse_table(images: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; images.len()];
    for (i, &x) in images.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn into_poly(vars: &[&str], counts: BTreeMap<Vec<u32>, u128>) -> MomentPolynomial {
    let mut poly = MomentPolynomial::zero(vars);
    for (e, c) in counts {
        poly.add_term(&e, BigUint::from(c));
    }
    poly
}

fn merge(mut a: BTreeMap<Vec<u32>, u128>, b: BTreeMap<Vec<u32>, u128>) -> BTreeMap<Vec<u32>, u128> {
    for (e, c) in b {
        *a.entry(e).or_default() += c;
    }
    a
}

/// All pairings of `2p` points as 0-based involution tables.
fn pairing_tables(p: usize) -> Result<Vec<Vec<usize>>> {
    Ok(enumerate_pairings(2 * p, &pairing_caps(2 * p))?
        .iter()
        .map(|l| l.to_involution().zero_based().to_vec())
        .collect())
}

fn permutation_tables(p: usize) -> Result<Vec<Vec<usize>>> {
    Ok(enumerate_permutations(p, &permutation_caps(p))?
        .iter()
        .map(|a| a.zero_based().to_vec())
        .collect())
}

/// `E Tr G^{2p} = Σ_λ n^{#(γ⁻¹λ)}` for `G ~ GUE(n)`.
pub fn gue_plain_moment(p: usize, caps: &MomentCaps) -> Result<MomentPolynomial> {
    check("p", p, caps.gue_plain_p)?;
    if p == 0 {
        let mut one = MomentPolynomial::zero(&["n"]);
        one.add_term(&[1], 1u32);
        return Ok(one);
    }
    let g_inv = inverse_table(&canonical_cycle_images(2 * p));
    let mut counts = BTreeMap::new();
    let mut seen = Vec::new();
    for lambda in pairing_tables(p)? {
        let e = cycle_count_of_composite(&g_inv, &lambda, &mut seen) as u32;
        *counts.entry(vec![e]).or_default() += 1u128;
    }
    Ok(into_poly(&["n"], counts))
}

/// `E Tr G^order`; odd orders give the zero polynomial.
pub fn gue_plain_moment_of_order(order: usize, caps: &MomentCaps) -> Result<MomentPolynomial> {
    if order % 2 == 1 {
        return Ok(MomentPolynomial::zero(&["n"]));
    }
    gue_plain_moment(order / 2, caps)
}

/// `E Tr W^p = Σ_α n^{#(γ⁻¹α)} s^{#α}` for `W ~ W(n, s)`.
pub fn wishart_plain_moment(p: usize, caps: &MomentCaps) -> Result<MomentPolynomial> {
    check("p", p, caps.wishart_plain_p)?;
    if p == 0 {
        bail!(Domain, "Wishart moments start at p = 1");
    }
    let g_inv = inverse_table(&canonical_cycle_images(p));
    let mut counts = BTreeMap::new();
    let mut seen = Vec::new();
    for alpha in permutation_tables(p)? {
        let e = cycle_count_of_composite(&g_inv, &alpha, &mut seen) as u32;
        let m = cycle_count_of(&alpha) as u32;
        *counts.entry(vec![e, m]).or_default() += 1u128;
    }
    Ok(into_poly(&["n", "s"], counts))
}

/// Whether A and B carry the same dimension variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// One variable `d = d_A = d_B`.
    Balanced,
    /// Two variables `(dA, dB)`.
    Unbalanced,
}

/// `E Tr[(Σ_j G̃(j))^{2p}]` with `G ~ GUE(d_A d_B)` and `G̃(j)` acting on `A ⊗ B_j`:
/// `Σ_f Σ_λ dA^{#(γ⁻¹λ)} dB^{#(γ_f⁻¹λ) + k - |im f|}`.
pub fn gue_modified_moment(
    p: usize,
    k: usize,
    balance: Balance,
    caps: &MomentCaps,
) -> Result<MomentPolynomial> {
    check("p", p, caps.gue_modified_p)?;
    check("k", k, caps.gue_modified_k)?;
    if p == 0 || k == 0 {
        bail!(Domain, "modified GUE moments need p, k >= 1");
    }
    let n = 2 * p;
    let g_inv = inverse_table(&canonical_cycle_images(n));
    let pairings = pairing_tables(p)?;
    let classes = level_classes(n, k);
    let counts = pairings
        .par_iter()
        .map(|lambda| {
            let mut seen = Vec::new();
            let mut local: BTreeMap<Vec<u32>, u128> = BTreeMap::new();
            let a = cycle_count_of_composite(&g_inv, lambda, &mut seen) as u32;
            for (gf_inv, b, weight) in &classes {
                let c = cycle_count_of_composite(gf_inv, lambda, &mut seen);
                let bexp = (c + k - b) as u32;
                let key = match balance {
                    Balance::Balanced => vec![a + bexp],
                    Balance::Unbalanced => vec![a, bexp],
                };
                *local.entry(key).or_default() += *weight as u128;
            }
            local
        })
        .reduce(BTreeMap::new, merge);
    let vars: &[&str] = match balance {
        Balance::Balanced => &["d"],
        Balance::Unbalanced => &["dA", "dB"],
    };
    Ok(into_poly(vars, counts))
}

/// `E Tr[(Σ_j G̃(j))^order]`; odd orders give the zero polynomial.
pub fn gue_modified_moment_of_order(
    order: usize,
    k: usize,
    balance: Balance,
    caps: &MomentCaps,
) -> Result<MomentPolynomial> {
    if order % 2 == 1 {
        let vars: &[&str] = match balance {
            Balance::Balanced => &["d"],
            Balance::Unbalanced => &["dA", "dB"],
        };
        return Ok(MomentPolynomial::zero(vars));
    }
    gue_modified_moment(order / 2, k, balance, caps)
}

/// `E Tr[(Σ_j W̃(j))^p]` with `W ~ W(d², s)`:
/// `Σ_f Σ_α d^{#(γ⁻¹α) + #(γ_f⁻¹α) + k - |im f|} s^{#α}`.
pub fn wishart_modified_moment(p: usize, k: usize, caps: &MomentCaps) -> Result<MomentPolynomial> {
    check("p", p, caps.wishart_modified_p)?;
    check("k", k, caps.wishart_modified_k)?;
    if p == 0 || k == 0 {
        bail!(Domain, "modified Wishart moments need p, k >= 1");
    }
    let g_inv = inverse_table(&canonical_cycle_images(p));
    let perms = permutation_tables(p)?;
    let classes = level_classes(p, k);
    let counts = perms
        .par_iter()
        .map(|alpha| {
            let mut seen = Vec::new();
            let mut local: BTreeMap<Vec<u32>, u128> = BTreeMap::new();
            let a = cycle_count_of_composite(&g_inv, alpha, &mut seen);
            let m = cycle_count_of(alpha) as u32;
            for (gf_inv, b, weight) in &classes {
                let c = cycle_count_of_composite(gf_inv, alpha, &mut seen);
                let key = vec![(a + c + k - b) as u32, m];
                *local.entry(key).or_default() += *weight as u128;
            }
            local
        })
        .reduce(BTreeMap::new, merge);
    Ok(into_poly(&["d", "s"], counts))
}

/// `E Tr[G̃(f(1)) .. G̃(f(2p))]` for a fixed word `f`:
/// `Σ_λ d^{#(γ⁻¹λ) + #(γ_f⁻¹λ) + k - |im f|}`.
pub fn gue_word_moment(f: &LevelFunction, caps: &MomentCaps) -> Result<MomentPolynomial> {
    let n = f.len();
    if n == 0 || n % 2 == 1 {
        bail!(Domain, "word moments need a positive even word length, got {n}");
    }
    check("word length", n, caps.word_length)?;
    let k = f.alphabet();
    let g_inv = inverse_table(&canonical_cycle_images(n));
    let gf_inv = gamma_f(f).inverse();
    let b = f.image_size();
    let mut counts = BTreeMap::new();
    let mut seen = Vec::new();
    for lambda in pairing_tables(n / 2)? {
        let a = cycle_count_of_composite(&g_inv, &lambda, &mut seen);
        let c = cycle_count_of_composite(gf_inv.zero_based(), &lambda, &mut seen);
        *counts.entry(vec![(a + c + k - b) as u32]).or_default() += 1u128;
    }
    Ok(into_poly(&["d"], counts))
}

/// `lim d^{-(2p+k+1)} E Tr[G̃(f(1)) .. G̃(f(2p))]`: the coefficient of the
/// top admissible power, i.e. the number of non-crossing pairings `λ` with `f ∘ λ = f`.
pub fn gue_word_normalized_limit(f: &LevelFunction, caps: &MomentCaps) -> Result<BigUint> {
    let poly = gue_word_moment(f, caps)?;
    let top = (f.len() + f.alphabet() + 1) as u32;
    Ok(poly.coeff(&[top]))
}

/// One dominant term `coeff · d^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingTerm {
    pub exponent: u32,
    pub coeff: BigUint,
}

/// Dominant terms of `E Tr[(Σ_j G̃(j)^Γ)^{2p}]` with Γ on the last `⌈k/2⌉` copies:
/// `Cat_p (⌊k/2⌋^p d^{2p+⌊k/2⌋+1} + ⌈k/2⌉^p d^{2p+⌈k/2⌉+1})`, merged for even `k`
/// and listed by decreasing exponent. For `k = 1` only the `⌈k/2⌉` term survives.
pub fn gamma_modified_moment_leading(p: usize, k: usize) -> Result<Vec<LeadingTerm>> {
    if p > 6 {
        bail!(Resource, "p = {p} exceeds the cap 6");
    }
    if k == 0 {
        bail!(Domain, "k must be positive");
    }
    let cat = catalan(p as u64);
    let mut terms: BTreeMap<u32, BigUint> = BTreeMap::new();
    for half in [k / 2, k.div_ceil(2)] {
        if half == 0 {
            continue;
        }
        let exponent = (2 * p + half + 1) as u32;
        *terms.entry(exponent).or_default() += &cat * BigUint::from(half).pow(p as u32);
    }
    Ok(terms
        .into_iter()
        .rev()
        .map(|(exponent, coeff)| LeadingTerm { exponent, coeff })
        .collect())
}

/// `E (Tr[(Σ_j W̃(j))^p])²` in `(d, s)`: a sum over `α ∈ S(2p)` and pairs of
/// functions `f1` on `1..p`, `f2` on `p+1..2p` of
/// `s^{#α} d^{#((γ1γ2)⁻¹α) + #((γ_{1,f1}γ_{2,f2})⁻¹α) + 2k - |im f1| - |im f2|}`.
pub fn second_moment_poly(p: usize, k: usize, caps: &MomentCaps) -> Result<MomentPolynomial> {
    check("p", p, caps.second_moment_p)?;
    check("k", k, caps.second_moment_k)?;
    if p == 0 || k == 0 {
        bail!(Domain, "second moments need p, k >= 1");
    }
    let n = 2 * p;
    let shift = |table: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> = (0..n).collect();
        for (i, &x) in table.iter().enumerate() {
            out[i] = x;
        }
        out
    };
    let single = canonical_cycle_images(p);
    let mut gamma12: Vec<usize> = single.clone();
    gamma12.extend(single.iter().map(|x| x + p));
    let g12_inv = inverse_table(&gamma12);
    let one_side = level_classes(p, k);
    // Products γ_{1,f1} γ_{2,f2} for every pair of level classes.
    let mut pairs = Vec::with_capacity(one_side.len() * one_side.len());
    for (inv1, b1, w1) in &one_side {
        for (inv2, b2, w2) in &one_side {
            let mut table = shift(inv1);
            for i in 0..p {
                table[p + i] = inv2[i] + p;
            }
            pairs.push((table, b1 + b2, (*w1 as u128) * (*w2 as u128)));
        }
    }
    let perms = permutation_tables(n)?;
    let counts = perms
        .par_iter()
        .map(|alpha| {
            let mut seen = Vec::new();
            let mut local: BTreeMap<Vec<u32>, u128> = BTreeMap::new();
            let a = cycle_count_of_composite(&g12_inv, alpha, &mut seen);
            let m = cycle_count_of(alpha) as u32;
            for (inv, b, weight) in &pairs {
                let c = cycle_count_of_composite(inv, alpha, &mut seen);
                let key = vec![(a + c + 2 * k - b) as u32, m];
                *local.entry(key).or_default() += *weight;
            }
            local
        })
        .reduce(BTreeMap::new, merge);
    Ok(into_poly(&["d", "s"], counts))
}
