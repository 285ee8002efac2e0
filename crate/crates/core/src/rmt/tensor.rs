//! Embedding, summing, partial transposition and symmetrization on `A ⊗ B^⊗k`.

use faer::{c64, Mat, MatRef};

use super::operator::{check_memory, checked_dim, HermitianOperator, DEFAULT_MEMORY_CAP};
use crate::combinatorics::{enumerate_permutations, EnumerationCaps};
use crate::error::{bail, Result};

/// Largest `k` accepted by [`symmetrize`].
pub const SYMMETRIZE_MAX_K: usize = 5;

fn bipartite_dims(m: &HermitianOperator) -> Result<(usize, usize)> {
    match m.factor_dims() {
        &[da, db] => Ok((da, db)),
        dims => bail!(Validation, "expected an operator on A ⊗ B, got factors {dims:?}"),
    }
}

fn extended_dims(da: usize, db: usize, k: usize) -> Vec<usize> {
    let mut dims = vec![da];
    dims.extend(std::iter::repeat_n(db, k));
    dims
}

/// `M_{AB_j} ⊗ Id` on `A ⊗ B^⊗k` (`j` is 1-based).
pub fn embed(m: &HermitianOperator, j: usize, k: usize) -> Result<HermitianOperator> {
    embed_sum(&[(m, j)], k)
}

/// `Σ_{j=1}^k embed(M, j, k)`.
pub fn tensor_sum(m: &HermitianOperator, k: usize) -> Result<HermitianOperator> {
    let terms: Vec<(&HermitianOperator, usize)> = (1..=k).map(|j| (m, j)).collect();
    embed_sum(&terms, k)
}

/// `Σ embed(M_t, j_t, k)` for arbitrary bipartite terms on the same `A ⊗ B`.
pub fn embed_sum(terms: &[(&HermitianOperator, usize)], k: usize) -> Result<HermitianOperator> {
    let Some((first, _)) = terms.first() else {
        bail!(Domain, "empty sum of embedded operators");
    };
    if k == 0 {
        bail!(Domain, "k must be positive");
    }
    let (da, db) = bipartite_dims(first)?;
    let dims = extended_dims(da, db, k);
    let dim = checked_dim(&dims)?;
    check_memory(dim, DEFAULT_MEMORY_CAP)?;
    let mut out = Mat::<c64>::zeros(dim, dim);
    for &(m, j) in terms {
        if bipartite_dims(m)? != (da, db) {
            bail!(Validation, "embedded terms have different factor dimensions");
        }
        if j == 0 || j > k {
            bail!(Domain, "embedding position j = {j} outside 1..={k}");
        }
        embed_into(&mut out, m.matrix(), da, db, j, k);
    }
    Ok(HermitianOperator::from_nearly_hermitian(out, dims))
}

/// Adds `M ⊗ Id` (with `M` on `A ⊗ B_j`, any square matrix) into `out`.
pub(crate) fn embed_into(out: &mut Mat<c64>, m: MatRef<'_, c64>, da: usize, db: usize, j: usize, k: usize) {
    let dim = out.nrows();
    let stride_a = db.pow(k as u32);
    let stride_j = db.pow((k - j) as u32);
    for col in 0..dim {
        let a_c = col / stride_a;
        let b_c = (col / stride_j) % db;
        let rest = col - a_c * stride_a - b_c * stride_j;
        for a_r in 0..da {
            for b_r in 0..db {
                let row = a_r * stride_a + b_r * stride_j + rest;
                out[(row, col)] += m[(a_r * db + b_r, a_c * db + b_c)];
            }
        }
    }
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn undigits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Transposes the tensor factors at the given positions (0 is the first
/// factor, usually A; position `j` is `B_j` on `A ⊗ B^⊗k`).
pub fn partial_transpose(m: &HermitianOperator, positions: &[usize]) -> Result<HermitianOperator> {
    let dims = m.factor_dims().to_vec();
    let mut selected = vec![false; dims.len()];
    for &p in positions {
        if p >= dims.len() {
            bail!(Domain, "factor position {p} out of range for {} factors", dims.len());
        }
        selected[p] = true;
    }
    let n = m.dim();
    let mut out = Mat::<c64>::zeros(n, n);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mm = m.matrix();
    for col in 0..n {
        digits(col, &dims, &mut cd);
        for row in 0..n {
            digits(row, &dims, &mut rd);
            let mut r2 = rd.clone();
            let mut c2 = cd.clone();
            for (i, &s) in selected.iter().enumerate() {
                if s {
                    r2[i] = cd[i];
                    c2[i] = rd[i];
                }
            }
            out[(undigits(&r2, &dims), undigits(&c2, &dims))] = mm[(row, col)];
        }
    }
    Ok(HermitianOperator::from_nearly_hermitian(out, dims))
}

/// `(1/k!) Σ_π (Id ⊗ U(π)) M (Id ⊗ U(π))†` over permutations of the `k` B factors.
/// Permutations act on indices directly; no unitary is formed.
pub fn symmetrize(m: &HermitianOperator) -> Result<HermitianOperator> {
    let dims = m.factor_dims().to_vec();
    if dims.len() < 2 {
        bail!(Validation, "symmetrize needs factors A, B_1, .., B_k");
    }
    let k = dims.len() - 1;
    if k > SYMMETRIZE_MAX_K {
        bail!(Resource, "k = {k} exceeds the symmetrization cap {SYMMETRIZE_MAX_K}");
    }
    if dims[1..].iter().any(|&d| d != dims[1]) {
        bail!(Validation, "B factors must share one dimension, got {dims:?}");
    }
    let n = m.dim();
    let perms = enumerate_permutations(
        k,
        &EnumerationCaps {
            permutations: k,
            ..EnumerationCaps::default()
        },
    )?;
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(perms.len());
    let mut d = vec![0; dims.len()];
    for pi in &perms {
        let mut map = vec![0; n];
        for (idx, slot) in map.iter_mut().enumerate() {
            digits(idx, &dims, &mut d);
            let mut moved = d.clone();
            for j in 1..=k {
                moved[pi.apply(j)] = d[j];
            }
            *slot = undigits(&moved, &dims);
        }
        maps.push(map);
    }
    let weight = 1.0 / perms.len() as f64;
    let mm = m.matrix();
    let out = Mat::from_fn(n, n, |row, col| {
        let mut acc = c64::new(0.0, 0.0);
        for map in &maps {
            acc += mm[(map[row], map[col])];
        }
        acc * weight
    });
    Ok(HermitianOperator::from_nearly_hermitian(out, dims))
}

/// `M ⊗ Id_{B^{k-1}}` with `M` on `A ⊗ B_1`.
pub fn pad_with_identity(m: &HermitianOperator, k: usize) -> Result<HermitianOperator> {
    embed(m, 1, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::eigen::eigenvalues;

    fn small(da: usize, db: usize, seed: u64) -> HermitianOperator {
        let n = da * db;
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        let raw = Mat::from_fn(n, n, |_, _| c64::new(next(), next()));
        let h = Mat::from_fn(n, n, |i, j| raw[(i, j)] + raw[(j, i)].conj());
        HermitianOperator::new(h, vec![da, db]).unwrap()
    }

    #[test]
    fn embed_identity_and_trivial_k() {
        let id = HermitianOperator::identity(vec![2, 3]).unwrap();
        let e = embed(&id, 2, 3).unwrap();
        assert_eq!(e, HermitianOperator::identity(vec![2, 3, 3, 3]).unwrap());
        let m = small(2, 3, 1);
        let same = embed(&m, 1, 1).unwrap();
        assert!(same.max_abs_diff(&m) == 0.0);
        assert!(matches!(embed(&m, 3, 2), Err(crate::Error::Domain(_))));
        assert!(matches!(embed(&m, 0, 2), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn embed_trace_and_spectrum() {
        let m = small(2, 2, 7);
        for j in 1..=3 {
            let e = embed(&m, j, 3).unwrap();
            assert!((e.trace() - 4.0 * m.trace()).abs() < 1e-12);
            let mut expected: Vec<f64> = eigenvalues(&m)
                .unwrap()
                .into_iter()
                .flat_map(|x| std::iter::repeat_n(x, 4))
                .collect();
            expected.sort_by(f64::total_cmp);
            let got = eigenvalues(&e).unwrap();
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tensor_sum_of_identity() {
        let id = HermitianOperator::identity(vec![2, 2]).unwrap();
        let s = tensor_sum(&id, 3).unwrap();
        assert_eq!(s, HermitianOperator::identity(vec![2, 2, 2, 2]).unwrap().scale(3.0));
    }

    #[test]
    fn partial_transpose_of_maximally_entangled_projector() {
        // |ψ⟩ = (|00⟩ + |11⟩)/√2
        let mut m = Mat::<c64>::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = c64::new(0.5, 0.0);
            }
        }
        let p = HermitianOperator::new(m, vec![2, 2]).unwrap();
        let g = partial_transpose(&p, &[1]).unwrap();
        let ev = eigenvalues(&g).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(partial_transpose(&p, &[2]).is_err());
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let m = small(2, 3, 11);
        let twice = partial_transpose(&partial_transpose(&m, &[1]).unwrap(), &[1]).unwrap();
        assert_eq!(twice.max_abs_diff(&m), 0.0);
        let full = partial_transpose(&m, &[0, 1]).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(full.entry(i, j), m.entry(j, i));
            }
        }
    }

    #[test]
    fn symmetrize_matches_normalized_sum() {
        for (d, k) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let m = small(d, d, 3 + d as u64 * 10 + k as u64);
            let sym = symmetrize(&pad_with_identity(&m, k).unwrap()).unwrap();
            let avg = tensor_sum(&m, k).unwrap().scale(1.0 / k as f64);
            assert!(sym.max_abs_diff(&avg) < 1e-12);
            let again = symmetrize(&sym).unwrap();
            assert!(again.max_abs_diff(&sym) < 1e-12);
            assert!((sym.trace() - m.trace() * (d as f64).powi(k as i32 - 1)).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetrize_cap() {
        let big = HermitianOperator::identity(vec![1, 2, 2, 2, 2, 2, 2]).unwrap();
        assert!(matches!(symmetrize(&big), Err(crate::Error::Resource(_))));
    }
}
