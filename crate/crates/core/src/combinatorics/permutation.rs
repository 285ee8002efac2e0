//! Permutations of `{1, .., p}` and the level functions `f: [p] -> [k]` that
//! index tensor factors in product words.
//!
//! Points are 1-based in every public constructor, accessor and serialized
//! form. Internally images are stored 0-based.
//!
//! Composition follows the right-to-left convention: `a.compose(&b)` is the
//! permutation `i -> a(b(i))`, written `ab`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{bail, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(p: usize) -> Self {
        Self {
            images: (0..p).collect(),
        }
    }

    /// Builds a permutation from its one-line notation `(π(1), .., π(p))`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let p = images.len();
        let mut seen = vec![false; p];
        let mut zero_based = Vec::with_capacity(p);
        for (i, &img) in images.iter().enumerate() {
            if img == 0 || img > p {
                bail!(Validation, "image {img} of point {} is outside 1..={p}", i + 1);
            }
            if seen[img - 1] {
                bail!(Validation, "image {img} appears twice; not a bijection");
            }
            seen[img - 1] = true;
            zero_based.push(img - 1);
        }
        Ok(Self { images: zero_based })
    }

    /// Builds a permutation from 0-based images without validation.
    pub(crate) fn from_zero_based_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&images));
        Self { images }
    }

    /// Builds a permutation of `{1..p}` from disjoint cycles in 1-based
    /// cycle notation; `(a b c)` maps `a -> b -> c -> a`.
    pub fn from_cycles(p: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<Option<usize>> = vec![None; p];
        for cycle in cycles {
            for (pos, &pt) in cycle.iter().enumerate() {
                let next = cycle[(pos + 1) % cycle.len()];
                if pt == 0 || pt > p || next == 0 || next > p {
                    bail!(Validation, "cycle point outside 1..={p}");
                }
                if images[pt - 1].is_some() {
                    bail!(Validation, "point {pt} appears in two cycles");
                }
                images[pt - 1] = Some(next - 1);
            }
        }
        let images: Vec<usize> = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| img.unwrap_or(i))
            .collect();
        if !is_bijection(&images) {
            bail!(Validation, "cycles do not define a bijection");
        }
        Ok(Self { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `i`, 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// One-line notation, 1-based.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            inv[img] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.size() != other.size() {
            bail!(
                Validation,
                "cannot compose permutations of sizes {} and {}",
                self.size(),
                other.size()
            );
        }
        Ok(Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        cycle_count_of(&self.images)
    }

    /// Minimal number of transpositions whose product is `self`.
    pub fn cayley_distance(&self) -> usize {
        self.size() - self.cycle_count()
    }

    /// Disjoint cycles in 1-based notation, each starting at its smallest
    /// point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let p = self.size();
        let mut seen = vec![false; p];
        let mut out = Vec::new();
        for start in 0..p {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_involution_without_fixed_points(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &j)| i != j && self.images[j] == i)
    }
}

/// Cycle count of a 0-based image table, counted with a visited bitmap.
pub(crate) fn cycle_count_of(images: &[usize]) -> usize {
    let mut seen = vec![false; images.len()];
    let mut count = 0;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i];
        }
    }
    count
}

/// Cycle count of `a⁻¹ ∘ b` given `a⁻¹` and `b` as 0-based tables, without
/// allocating the composite.
pub(crate) fn cycle_count_of_composite(a_inv: &[usize], b: &[usize], seen: &mut Vec<bool>) -> usize {
    seen.clear();
    seen.resize(b.len(), false);
    let mut count = 0;
    for start in 0..b.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = a_inv[b[i]];
        }
    }
    count
}

fn is_bijection(images: &[usize]) -> bool {
    let mut seen = vec![false; images.len()];
    for &i in images {
        if i >= images.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        for cycle in &cycles {
            let parts: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_images(&images).map_err(serde::de::Error::custom)
    }
}

/// The canonical full cycle `(p .. 1)`, i.e. `i -> i - 1` with `1 -> p`.
pub fn canonical_full_cycle(p: usize) -> Result<Permutation> {
    if p == 0 {
        bail!(Domain, "canonical full cycle needs p >= 1");
    }
    Ok(Permutation {
        images: canonical_cycle_images(p),
    })
}

pub(crate) fn canonical_cycle_images(p: usize) -> Vec<usize> {
    (0..p).map(|i| if i == 0 { p - 1 } else { i - 1 }).collect()
}

/// A map `f: [p] -> [k]`, stored 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LevelFunction {
    values: Vec<usize>,
    k: usize,
}

impl LevelFunction {
    pub fn new(values: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            bail!(Domain, "level alphabet size k must be >= 1");
        }
        if let Some(bad) = values.iter().find(|&&v| v == 0 || v > k) {
            bail!(Validation, "level value {bad} outside 1..={k}");
        }
        Ok(Self { values, k })
    }

    pub fn constant(p: usize, k: usize) -> Result<Self> {
        Self::new(vec![1; p], k)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `f(i)` for a 1-based point `i`.
    pub fn value(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    /// `|im(f)|`.
    pub fn image_size(&self) -> usize {
        let mut used = vec![false; self.k];
        for &v in &self.values {
            used[v - 1] = true;
        }
        used.iter().filter(|&&u| u).count()
    }

    /// Nonempty level sets `f⁻¹(r)` in increasing order of `r`, 1-based points.
    pub fn level_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.k];
        for (i, &v) in self.values.iter().enumerate() {
            sets[v - 1].push(i + 1);
        }
        sets.into_iter().filter(|s| !s.is_empty()).collect()
    }

    /// `f ∘ π = f`, i.e. `f` is constant on every cycle of `π`.
    pub fn is_invariant_under(&self, pi: &Permutation) -> bool {
        pi.size() == self.len()
            && (1..=self.len()).all(|i| self.value(pi.apply(i)) == self.value(i))
    }
}

impl<'de> Deserialize<'de> for LevelFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            values: Vec<usize>,
            k: usize,
        }
        let raw = Raw::deserialize(deserializer)?;
        LevelFunction::new(raw.values, raw.k).map_err(serde::de::Error::custom)
    }
}

/// `γ_f`: the product of the canonical full cycles on the level sets of `f`.
pub fn gamma_f(f: &LevelFunction) -> Permutation {
    Permutation {
        images: gamma_images_for_blocks(f.len(), &f.level_sets()),
    }
}

/// Product of canonical full cycles `(i_l .. i_1)` on the given 1-based blocks.
/// Points not covered by any block are fixed.
pub(crate) fn gamma_images_for_blocks(p: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut images: Vec<usize> = (0..p).collect();
    for block in blocks {
        let l = block.len();
        for pos in 0..l {
            let prev = if pos == 0 { l - 1 } else { pos - 1 };
            images[block[pos] - 1] = block[prev] - 1;
        }
    }
    images
}

/// Geodesic defect `δ` of `α` relative to `γ_f`:
/// `(p + |im f| - #(α) - #(γ_f⁻¹α)) / 2`.
pub fn geodesic_defect(alpha: &Permutation, f: &LevelFunction) -> Result<usize> {
    if alpha.size() != f.len() {
        bail!(
            Validation,
            "permutation on {} points but level function on {}",
            alpha.size(),
            f.len()
        );
    }
    let gf_inv = gamma_f(f).inverse();
    let mut seen = Vec::new();
    let composite = cycle_count_of_composite(gf_inv.zero_based(), alpha.zero_based(), &mut seen);
    let total = alpha.size() + f.image_size();
    let used = alpha.cycle_count() + composite;
    if used > total || !(total - used).is_multiple_of(2) {
        return Err(Error::Verification(format!(
            "geodesic defect of {alpha} w.r.t. f={:?} is not a nonnegative integer",
            f.values()
        )));
    }
    Ok((total - used) / 2)
}
