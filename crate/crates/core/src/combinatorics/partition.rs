//! Set partitions, pair partitions, and their non-crossing subfamilies.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::permutation::{gamma_images_for_blocks, Permutation};
use crate::error::{bail, Result};

/// Enumeration caps. They are configuration, so callers can raise them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationCaps {
    /// Largest `p` for set-partition enumeration of `{1..p}`.
    pub partitions: usize,
    /// Largest `p` for enumerating all of `S(p)`.
    pub permutations: usize,
    /// Largest number of points `2p` for pairing enumeration.
    pub pairings: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self {
            partitions: 12,
            permutations: 8,
            pairings: 12,
        }
    }
}

/// A partition of `{1..p}` into disjoint nonempty blocks. Blocks are kept
/// sorted internally and ordered by their minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let p: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; p];
        for block in &mut blocks {
            if block.is_empty() {
                bail!(Validation, "set partition has an empty block");
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x > p || seen[x - 1] {
                    bail!(Validation, "blocks do not partition 1..={p}");
                }
                seen[x - 1] = true;
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Stack scan over `1..p`: a block may only be touched again while it is
    /// the innermost open block.
    pub fn is_noncrossing(&self) -> bool {
        let p = self.size();
        let mut owner = vec![0usize; p];
        let mut last = vec![0usize; self.blocks.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                owner[x - 1] = b;
            }
            last[b] = *block.last().unwrap();
        }
        let mut open: Vec<usize> = Vec::new();
        let mut started = vec![false; self.blocks.len()];
        for i in 1..=p {
            let b = owner[i - 1];
            if started[b] {
                if open.last() != Some(&b) {
                    return false;
                }
            } else {
                started[b] = true;
                open.push(b);
            }
            if last[b] == i {
                open.pop();
            }
        }
        true
    }

    /// The product of the canonical full cycles on the blocks.
    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_zero_based_unchecked(gamma_images_for_blocks(self.size(), &self.blocks))
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        SetPartition::new(blocks).map_err(serde::de::Error::custom)
    }
}

/// A perfect matching of `{1..2p}`, pairs stored as `(min, max)` sorted by `min`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = 2 * pairs.len();
        let mut seen = vec![false; n];
        let mut normalized = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo == 0 || hi > n || lo == hi || seen[lo - 1] || seen[hi - 1] {
                bail!(Validation, "pairs do not partition 1..={n}");
            }
            seen[lo - 1] = true;
            seen[hi - 1] = true;
            normalized.push((lo, hi));
        }
        normalized.sort_unstable();
        Ok(Self { pairs: normalized })
    }

    pub fn from_involution(pi: &Permutation) -> Result<Self> {
        if !pi.is_involution_without_fixed_points() {
            bail!(Validation, "{pi} is not a fixed-point-free involution");
        }
        let pairs = (1..=pi.size())
            .filter(|&i| i < pi.apply(i))
            .map(|i| (i, pi.apply(i)))
            .collect();
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of points `2p`.
    pub fn points(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn to_involution(&self) -> Permutation {
        let mut images = vec![0; self.points()];
        for &(a, b) in &self.pairs {
            images[a - 1] = b - 1;
            images[b - 1] = a - 1;
        }
        Permutation::from_zero_based_unchecked(images)
    }

    pub fn to_set_partition(&self) -> SetPartition {
        SetPartition {
            blocks: self.pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
        }
    }

    pub fn is_noncrossing(&self) -> bool {
        self.to_set_partition().is_noncrossing()
    }
}

impl Serialize for PairPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let arrays: Vec<[usize; 2]> = self.pairs.iter().map(|&(a, b)| [a, b]).collect();
        arrays.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PairPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let arrays = Vec::<[usize; 2]>::deserialize(deserializer)?;
        PairPartition::new(arrays.into_iter().map(|[a, b]| (a, b)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// All non-crossing partitions of `{1..p}`, in sorted canonical order.
pub fn enumerate_noncrossing(p: usize, caps: &EnumerationCaps) -> Result<Vec<SetPartition>> {
    if p == 0 {
        bail!(Domain, "non-crossing enumeration needs p >= 1");
    }
    if p > caps.partitions {
        bail!(Resource, "p = {p} exceeds the partition cap {}", caps.partitions);
    }
    let mut out: Vec<SetPartition> = nc_on_interval(1, p)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort_by_key(|b| b[0]);
            SetPartition { blocks }
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Non-crossing partitions of the interval `lo..=hi` (empty when `lo > hi`).
/// The block containing `lo` is `{lo = a_1 < .. < a_m}`; each gap between
/// consecutive elements, and the tail after `a_m`, is filled independently.
fn nc_on_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut block = vec![lo];
    extend_first_block(hi, &mut block, &mut out);
    out
}

fn extend_first_block(
    hi: usize,
    block: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    let last = *block.last().unwrap();
    // Close the block here: the tail (last+1..=hi) is an independent interval.
    let gaps_inside = fill_gaps(block);
    for inside in &gaps_inside {
        for tail in nc_on_interval(last + 1, hi) {
            let mut blocks = vec![block.clone()];
            blocks.extend(inside.iter().cloned());
            blocks.extend(tail);
            out.push(blocks);
        }
    }
    for next in last + 1..=hi {
        block.push(next);
        extend_first_block(hi, block, out);
        block.pop();
    }
}

/// All ways of filling the gaps strictly between consecutive elements of `block`.
fn fill_gaps(block: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for w in block.windows(2) {
        let fills = nc_on_interval(w[0] + 1, w[1] - 1);
        let mut next = Vec::with_capacity(acc.len() * fills.len());
        for a in &acc {
            for f in &fills {
                let mut merged = a.clone();
                merged.extend(f.iter().cloned());
                next.push(merged);
            }
        }
        acc = next;
    }
    acc
}

/// All non-crossing pairings of `{1..two_p}`, sorted.
pub fn enumerate_nc_pairings(two_p: usize, caps: &EnumerationCaps) -> Result<Vec<PairPartition>> {
    check_pairing_request(two_p, caps)?;
    let mut out = Vec::new();
    nc_pairings_into(1, two_p, &mut Vec::new(), &mut out);
    let mut out: Vec<PairPartition> = out
        .into_iter()
        .map(|mut pairs: Vec<(usize, usize)>| {
            pairs.sort_unstable();
            PairPartition { pairs }
        })
        .collect();
    out.sort();
    Ok(out)
}

fn nc_pairings_into(
    lo: usize,
    hi: usize,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    // Pairings of several disjoint intervals are produced by threading a work list.
    fn go(
        intervals: &mut Vec<(usize, usize)>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some((lo, hi)) = intervals.pop() else {
            out.push(current.clone());
            return;
        };
        if lo > hi {
            go(intervals, current, out);
            intervals.push((lo, hi));
            return;
        }
        let mut partner = lo + 1;
        while partner <= hi {
            current.push((lo, partner));
            intervals.push((partner + 1, hi));
            intervals.push((lo + 1, partner - 1));
            go(intervals, current, out);
            intervals.pop();
            intervals.pop();
            current.pop();
            partner += 2;
        }
        intervals.push((lo, hi));
    }
    let mut intervals = vec![(lo, hi)];
    go(&mut intervals, current, out);
}

/// All pairings of `{1..two_p}` (there are `(2p-1)!!`), sorted.
pub fn enumerate_pairings(two_p: usize, caps: &EnumerationCaps) -> Result<Vec<PairPartition>> {
    check_pairing_request(two_p, caps)?;
    let mut out = Vec::new();
    let mut used = vec![false; two_p];
    let mut current = Vec::with_capacity(two_p / 2);
    all_pairings(&mut used, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn all_pairings(used: &mut [bool], current: &mut Vec<(usize, usize)>, out: &mut Vec<PairPartition>) {
    let Some(first) = used.iter().position(|&u| !u) else {
        out.push(PairPartition {
            pairs: current.clone(),
        });
        return;
    };
    used[first] = true;
    for partner in first + 1..used.len() {
        if used[partner] {
            continue;
        }
        used[partner] = true;
        current.push((first + 1, partner + 1));
        all_pairings(used, current, out);
        current.pop();
        used[partner] = false;
    }
    used[first] = false;
}

fn check_pairing_request(two_p: usize, caps: &EnumerationCaps) -> Result<()> {
    if two_p == 0 || !two_p.is_multiple_of(2) {
        bail!(Domain, "pairings need an even positive number of points, got {two_p}");
    }
    if two_p > caps.pairings {
        bail!(Resource, "2p = {two_p} exceeds the pairing cap {}", caps.pairings);
    }
    Ok(())
}

/// Every permutation of `{1..p}` in lexicographic order of one-line notation.
pub fn enumerate_permutations(p: usize, caps: &EnumerationCaps) -> Result<Vec<Permutation>> {
    if p > caps.permutations {
        bail!(Resource, "p = {p} exceeds the permutation cap {}", caps.permutations);
    }
    let mut current: Vec<usize> = (0..p).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation::from_zero_based_unchecked(current.clone()));
        if !next_permutation(&mut current) {
            break;
        }
    }
    Ok(out)
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Every set partition of `{1..p}` with at most `max_blocks` blocks, as
/// restricted growth strings (`rgs[0] = 0`, `rgs[i] <= 1 + max(rgs[..i])`).
pub(crate) fn restricted_growth_strings(p: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if p == 0 || max_blocks == 0 {
        return out;
    }
    let mut rgs = vec![0usize; p];
    fn go(pos: usize, max_used: usize, max_blocks: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        let limit = (max_used + 1).min(max_blocks - 1);
        for v in 0..=limit {
            rgs[pos] = v;
            go(pos + 1, max_used.max(v), max_blocks, rgs, out);
        }
    }
    go(1, 0, max_blocks, &mut rgs, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noncrossing_counts_small() {
        let caps = EnumerationCaps::default();
        assert_eq!(enumerate_noncrossing(3, &caps).unwrap().len(), 5);
        assert_eq!(enumerate_noncrossing(4, &caps).unwrap().len(), 14);
        let two_blocks = enumerate_noncrossing(4, &caps)
            .unwrap()
            .into_iter()
            .filter(|s| s.block_count() == 2)
            .count();
        assert_eq!(two_blocks, 6);
        assert!(matches!(enumerate_noncrossing(13, &caps), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn pairing_counts_small() {
        let caps = EnumerationCaps::default();
        assert_eq!(enumerate_nc_pairings(2, &caps).unwrap().len(), 1);
        assert_eq!(enumerate_nc_pairings(6, &caps).unwrap().len(), 5);
        assert_eq!(enumerate_pairings(6, &caps).unwrap().len(), 15);
        assert!(matches!(enumerate_nc_pairings(5, &caps), Err(crate::Error::Domain(_))));
        assert!(matches!(enumerate_pairings(14, &caps), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn crossing_detection() {
        let crossing = SetPartition::new(vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(!crossing.is_noncrossing());
        let nested = SetPartition::new(vec![vec![1, 4], vec![2, 3]]).unwrap();
        assert!(nested.is_noncrossing());
        let mixed = SetPartition::new(vec![vec![1, 5], vec![2, 3], vec![4, 6]]).unwrap();
        assert!(!mixed.is_noncrossing());
    }

    #[test]
    fn enumerated_partitions_are_noncrossing_and_distinct() {
        let caps = EnumerationCaps::default();
        let all = enumerate_noncrossing(7, &caps).unwrap();
        assert!(all.iter().all(SetPartition::is_noncrossing));
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        let pairs = enumerate_nc_pairings(10, &caps).unwrap();
        assert!(pairs.iter().all(PairPartition::is_noncrossing));
    }

    #[test]
    fn serde_shapes() {
        let s = SetPartition::new(vec![vec![3], vec![2, 1]]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[1,2],[3]]");
        let pp = PairPartition::new(vec![(4, 2), (1, 3)]).unwrap();
        assert_eq!(serde_json::to_string(&pp).unwrap(), "[[1,3],[2,4]]");
        assert!(serde_json::from_str::<PairPartition>("[[1,1]]").is_err());
        assert!(serde_json::from_str::<SetPartition>("[[1],[1]]").is_err());
    }

    #[test]
    fn involution_round_trip() {
        let pp = PairPartition::new(vec![(1, 4), (2, 3)]).unwrap();
        let inv = pp.to_involution();
        assert_eq!(PairPartition::from_involution(&inv).unwrap(), pp);
        assert!(PairPartition::from_involution(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn growth_strings_respect_block_bound() {
        // Stirling numbers of the second kind: S(5,1)+S(5,2) = 1 + 15.
        assert_eq!(restricted_growth_strings(5, 2).len(), 16);
        // Bell(5) = 52.
        assert_eq!(restricted_growth_strings(5, 5).len(), 52);
    }

    #[test]
    fn permutation_enumeration() {
        let caps = EnumerationCaps::default();
        assert_eq!(enumerate_permutations(4, &caps).unwrap().len(), 24);
        assert_eq!(enumerate_permutations(0, &caps).unwrap().len(), 1);
        assert!(enumerate_permutations(9, &caps).is_err());
    }
}
