//! Sums `Σ_j M_j ⊗ Id` on `A ⊗ B^⊗k` kept in factored form: matrix-vector
//! products, low trace powers and extreme eigenvalues without ever forming
//! the dense operator unless asked to.

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, Par, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::operator::{check_memory, dense_product, HermitianOperator, DEFAULT_MEMORY_CAP};
use super::sampling::complex_normal;
use super::tensor::{embed_into, embed_sum, partial_transpose};
use crate::error::{bail, Error, Result};

/// `Σ_t M_t` embedded at positions `j_t`, each `M_t` acting on `A ⊗ B`.
#[derive(Clone, Debug)]
pub struct EmbeddedSum {
    da: usize,
    db: usize,
    k: usize,
    terms: Vec<(usize, HermitianOperator)>,
}

impl EmbeddedSum {
    pub fn new(da: usize, db: usize, k: usize) -> Result<Self> {
        if da == 0 || db == 0 || k == 0 {
            bail!(Domain, "dimensions and k must be positive");
        }
        let mut dim: usize = da;
        for _ in 0..k {
            dim = match dim.checked_mul(db) {
                Some(v) => v,
                None => bail!(Resource, "dimension overflows"),
            };
        }
        Ok(Self {
            da,
            db,
            k,
            terms: Vec::new(),
        })
    }

    /// `Σ_{j=1}^k M̃(j)`.
    pub fn uniform(m: &HermitianOperator, k: usize) -> Result<Self> {
        let (da, db) = dims_of(m)?;
        let mut sum = Self::new(da, db, k)?;
        for j in 1..=k {
            sum.push(j, m.clone())?;
        }
        Ok(sum)
    }

    /// `Σ_{j ≤ ⌊k/2⌋} M̃(j) + Σ_{j > ⌊k/2⌋} (M^{T_B})~(j)`: the sum after partial
    /// transposition of the last `⌈k/2⌉` B factors.
    pub fn with_upper_half_transposed(m: &HermitianOperator, k: usize) -> Result<Self> {
        let (da, db) = dims_of(m)?;
        let mt = partial_transpose(m, &[1])?;
        let mut sum = Self::new(da, db, k)?;
        for j in 1..=k {
            sum.push(j, if j > k / 2 { mt.clone() } else { m.clone() })?;
        }
        Ok(sum)
    }

    pub fn push(&mut self, j: usize, m: HermitianOperator) -> Result<()> {
        if dims_of(&m)? != (self.da, self.db) {
            bail!(Validation, "term has factors {:?}, expected [{}, {}]", m.factor_dims(), self.da, self.db);
        }
        if j == 0 || j > self.k {
            bail!(Domain, "embedding position j = {j} outside 1..={}", self.k);
        }
        self.terms.push((j, m));
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.da * self.db.pow(self.k as u32)
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.da];
        dims.extend(std::iter::repeat_n(self.db, self.k));
        dims
    }

    fn stride(&self, j: usize) -> usize {
        self.db.pow((self.k - j) as u32)
    }

    /// `y = X x`.
    pub fn apply(&self, x: &[c64], y: &mut [c64]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        y.iter_mut().for_each(|v| *v = c64::new(0.0, 0.0));
        let (da, db) = (self.da, self.db);
        let stride_a = self.stride(0);
        let others = n / (da * db);
        let mut gathered = Mat::<c64>::zeros(da * db, others);
        let mut product = Mat::<c64>::zeros(da * db, others);
        for (j, m) in &self.terms {
            let sj = self.stride(*j);
            let rests: Vec<usize> = (0..others)
                .map(|o| {
                    let post = o % sj;
                    let pre = o / sj;
                    pre * db * sj + post
                })
                .collect();
            for (col, &rest) in rests.iter().enumerate() {
                for a in 0..da {
                    for b in 0..db {
                        gathered[(a * db + b, col)] = x[a * stride_a + b * sj + rest];
                    }
                }
            }
            matmul(product.as_mut(), Accum::Replace, m.matrix(), gathered.as_ref(), c64::new(1.0, 0.0), Par::Seq);
            for (col, &rest) in rests.iter().enumerate() {
                for a in 0..da {
                    for b in 0..db {
                        y[a * stride_a + b * sj + rest] += product[(a * db + b, col)];
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> Result<HermitianOperator> {
        let terms: Vec<(&HermitianOperator, usize)> = self.terms.iter().map(|(j, m)| (m, *j)).collect();
        embed_sum(&terms, self.k)
    }

    /// Dense `M̃_s(j_s) M̃_t(j_t)` for two terms; for `j_s ≠ j_t` this costs
    /// `d_A³ d_B⁴` multiplications plus the scatter.
    pub fn pair_product(&self, s: usize, t: usize) -> Result<Mat<c64>> {
        let n = self.dim();
        check_memory(n, DEFAULT_MEMORY_CAP)?;
        let (ji, mi) = &self.terms[s];
        let (jj, mj) = &self.terms[t];
        if ji == jj {
            let product = dense_product(mi.matrix(), mj.matrix());
            let mut out = Mat::<c64>::zeros(n, n);
            embed_into(&mut out, product.as_ref(), self.da, self.db, *ji, self.k);
            return Ok(out);
        }
        let (da, db) = (self.da, self.db);
        let slice = |m: &HermitianOperator, b: usize, b2: usize| {
            Mat::from_fn(da, da, |a, a2| m.entry(a * db + b, a2 * db + b2))
        };
        let si = self.stride(*ji);
        let sj = self.stride(*jj);
        let stride_a = self.stride(0);
        // Remaining B digits, as offsets.
        let free: Vec<usize> = (1..=self.k).filter(|&p| p != *ji && p != *jj).collect();
        let mut rests = vec![0usize];
        for &p in &free {
            let sp = self.stride(p);
            rests = rests.iter().flat_map(|&r| (0..db).map(move |b| r + b * sp)).collect();
        }
        let mut out = Mat::<c64>::zeros(n, n);
        let slices_i: Vec<Vec<Mat<c64>>> = (0..db).map(|b| (0..db).map(|b2| slice(mi, b, b2)).collect()).collect();
        let slices_j: Vec<Vec<Mat<c64>>> = (0..db).map(|b| (0..db).map(|b2| slice(mj, b, b2)).collect()).collect();
        let mut prod = Mat::<c64>::zeros(da, da);
        for bi in 0..db {
            for bi2 in 0..db {
                for bj in 0..db {
                    for bj2 in 0..db {
                        matmul(
                            prod.as_mut(),
                            Accum::Replace,
                            slices_i[bi][bi2].as_ref(),
                            slices_j[bj][bj2].as_ref(),
                            c64::new(1.0, 0.0),
                            Par::Seq,
                        );
                        let row0 = bi * si + bj * sj;
                        let col0 = bi2 * si + bj2 * sj;
                        for &rest in &rests {
                            for a2 in 0..da {
                                let col = a2 * stride_a + col0 + rest;
                                for a in 0..da {
                                    out[(a * stride_a + row0 + rest, col)] += prod[(a, a2)];
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Dense `X²` from pairwise products.
    pub fn square(&self) -> Result<Mat<c64>> {
        let n = self.dim();
        let mut out = Mat::<c64>::zeros(n, n);
        for s in 0..self.terms.len() {
            for t in 0..self.terms.len() {
                let p = self.pair_product(s, t)?;
                out += &p;
            }
        }
        Ok(out)
    }

    /// `Tr X^p` for `p <= 4` without any `dim³` work.
    pub fn trace_power(&self, p: u32) -> Result<f64> {
        let n = self.dim() as f64;
        let db = self.db as f64;
        let k = self.k as i32;
        Ok(match p {
            0 => n,
            1 => self.terms.iter().map(|(_, m)| m.trace()).sum::<f64>() * db.powi(k - 1),
            2 => {
                let reduced: Vec<Mat<c64>> = self.terms.iter().map(|(_, m)| trace_out_b(m, self.da, self.db)).collect();
                let mut acc = 0.0;
                for (s, (js, ms)) in self.terms.iter().enumerate() {
                    for (t, (jt, mt)) in self.terms.iter().enumerate() {
                        acc += if js == jt {
                            trace_of_product(ms.matrix(), mt.matrix()) * db.powi(k - 1)
                        } else {
                            trace_of_product(reduced[s].as_ref(), reduced[t].as_ref()) * db.powi(k - 2)
                        };
                    }
                }
                acc
            }
            3 => {
                let x = self.to_dense()?;
                let sq = self.square()?;
                trace_of_product(sq.as_ref(), x.matrix())
            }
            4 => {
                let sq = self.square()?;
                trace_of_product(sq.as_ref(), sq.as_ref())
            }
            _ => bail!(Domain, "structured trace powers are implemented for p <= 4"),
        })
    }

    /// `[Tr X^0, .., Tr X^max_p]` for `max_p <= 4`, forming `X²` at most once.
    pub fn trace_powers(&self, max_p: u32) -> Result<Vec<f64>> {
        if max_p > 4 {
            bail!(Domain, "structured trace powers are implemented for p <= 4");
        }
        let mut out: Vec<f64> = (0..=max_p.min(2)).map(|p| self.trace_power(p)).collect::<Result<_>>()?;
        if max_p >= 3 {
            let sq = self.square()?;
            let x = self.to_dense()?;
            out.push(trace_of_product(sq.as_ref(), x.matrix()));
            if max_p == 4 {
                out.push(trace_of_product(sq.as_ref(), sq.as_ref()));
            }
        }
        Ok(out)
    }

    /// `Tr[M̃_{w_1} .. M̃_{w_l}]` for a word of term indices (0-based) of length 1, 2 or 4.
    pub fn word_trace(&self, word: &[usize]) -> Result<c64> {
        if word.iter().any(|&w| w >= self.terms.len()) {
            bail!(Domain, "word refers to a missing term");
        }
        match word {
            [s] => {
                let single = EmbeddedSum {
                    terms: vec![self.terms[*s].clone()],
                    ..self.clone()
                };
                Ok(c64::new(single.trace_power(1)?, 0.0))
            }
            [s, t] => {
                let p = self.pair_product(*s, *t)?;
                Ok((0..self.dim()).map(|i| p[(i, i)]).sum())
            }
            [s, t, u, v] => {
                let left = self.pair_product(*s, *t)?;
                let right = self.pair_product(*u, *v)?;
                let n = self.dim();
                let mut acc = c64::new(0.0, 0.0);
                for c in 0..n {
                    for r in 0..n {
                        acc += left[(r, c)] * right[(c, r)];
                    }
                }
                Ok(acc)
            }
            _ => bail!(Domain, "word traces are implemented for lengths 1, 2 and 4"),
        }
    }

    /// Smallest and largest eigenvalue by Lanczos; see [`lanczos_extremes`].
    pub fn extreme_eigenvalues(&self, tolerance: f64) -> Result<(f64, f64)> {
        let n = self.dim();
        lanczos_extremes(n, |x, y| self.apply(x, y), tolerance)
    }

    pub fn operator_norm(&self, tolerance: f64) -> Result<f64> {
        let (lo, hi) = self.extreme_eigenvalues(tolerance)?;
        Ok(lo.abs().max(hi.abs()))
    }

    /// `λ_max`; equals the norm when every term is positive semidefinite.
    pub fn largest_eigenvalue(&self, tolerance: f64) -> Result<f64> {
        lanczos_largest(self.dim(), |x, y| self.apply(x, y), tolerance)
    }
}

fn dims_of(m: &HermitianOperator) -> Result<(usize, usize)> {
    match m.factor_dims() {
        &[da, db] => Ok((da, db)),
        dims => bail!(Validation, "expected an operator on A ⊗ B, got factors {dims:?}"),
    }
}

/// `Tr_B M` as a `d_A × d_A` matrix.
pub fn trace_out_b(m: &HermitianOperator, da: usize, db: usize) -> Mat<c64> {
    Mat::from_fn(da, da, |a, a2| (0..db).map(|b| m.entry(a * db + b, a2 * db + b)).sum())
}

/// Real part of `Tr(XY) = Σ X_rc Y_cr`.
fn trace_of_product(x: faer::MatRef<'_, c64>, y: faer::MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for c in 0..x.ncols() {
        for r in 0..x.nrows() {
            let (a, b) = (x[(r, c)], y[(c, r)]);
            acc += a.re * b.re - a.im * b.im;
        }
    }
    acc
}

/// Extreme eigenvalues of a Hermitian operator given by its action, using
/// Lanczos with full reorthogonalization. Stops once both extreme Ritz pairs
/// have residual `≤ tolerance · max|θ|`, when the Krylov space becomes
/// invariant, or at `dim` steps (where the answer is exact up to roundoff).
/// The start vector is fixed, so results are deterministic.
pub fn lanczos_extremes(
    dim: usize,
    apply: impl FnMut(&[c64], &mut [c64]),
    tolerance: f64,
) -> Result<(f64, f64)> {
    lanczos(dim, apply, tolerance, true)
}

/// Like [`lanczos_extremes`], but only the largest Ritz pair has to converge.
/// The returned lower value is then just the current smallest Ritz value.
pub fn lanczos_largest(
    dim: usize,
    apply: impl FnMut(&[c64], &mut [c64]),
    tolerance: f64,
) -> Result<f64> {
    Ok(lanczos(dim, apply, tolerance, false)?.1)
}

fn lanczos(
    dim: usize,
    mut apply: impl FnMut(&[c64], &mut [c64]),
    tolerance: f64,
    need_low: bool,
) -> Result<(f64, f64)> {
    if dim == 0 {
        bail!(Domain, "empty operator");
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x1a2c_205e_ed00_0001);
    let mut v: Vec<c64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
    normalize(&mut v);
    let mut basis: Vec<Vec<c64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![c64::new(0.0, 0.0); dim];
    let mut last = (0.0, 0.0);
    for step in 0..dim {
        apply(&basis[step], &mut w);
        let alpha = dot(&basis[step], &w).re;
        alphas.push(alpha);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= h * qi;
                }
            }
        }
        let beta = norm(&w);
        let m = alphas.len();
        let check = m == dim || beta <= 1e-14 * alphas.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300) || m.is_multiple_of(8);
        if check {
            let (lo, hi, r_lo, r_hi) = ritz_extremes(&alphas, &betas, beta)?;
            last = (lo, hi);
            let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            let invariant = beta <= 1e-14 * scale;
            if m == dim || invariant || ((!need_low || r_lo <= tolerance * scale) && r_hi <= tolerance * scale) {
                return Ok((lo, hi));
            }
        }
        betas.push(beta);
        let mut next = w.clone();
        for x in next.iter_mut() {
            *x /= beta;
        }
        basis.push(next);
    }
    Ok(last)
}

fn ritz_extremes(alphas: &[f64], betas: &[f64], beta_next: f64) -> Result<(f64, f64, f64, f64)> {
    let m = alphas.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("tridiagonal eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let (mut i_lo, mut i_hi) = (0, 0);
    for i in 0..m {
        if s[i] < s[i_lo] {
            i_lo = i;
        }
        if s[i] > s[i_hi] {
            i_hi = i;
        }
    }
    let r_lo = beta_next * u[(m - 1, i_lo)].abs();
    let r_hi = beta_next * u[(m - 1, i_hi)].abs();
    Ok((s[i_lo], s[i_hi], r_lo, r_hi))
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [c64]) {
    let n = norm(a);
    for x in a.iter_mut() {
        *x /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::eigen::eigenvalues;
    use crate::rmt::sampling::{sample_gue, SeedScheme};
    use crate::rmt::tensor::tensor_sum;

    fn gue(da: usize, db: usize, rep: u64) -> HermitianOperator {
        let mut rng = SeedScheme::new(5).stream(rep);
        sample_gue(da * db, &mut rng).unwrap().with_factor_dims(vec![da, db]).unwrap()
    }

    #[test]
    fn apply_matches_dense() {
        for (da, db, k) in [(2usize, 3usize, 2usize), (3, 2, 3), (1, 2, 3), (2, 1, 2)] {
            let g = gue(da, db, (da * 10 + db) as u64);
            let sum = EmbeddedSum::with_upper_half_transposed(&g, k).unwrap();
            let dense = sum.to_dense().unwrap();
            let n = sum.dim();
            let x: Vec<c64> = (0..n).map(|i| c64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
            let mut y = vec![c64::new(0.0, 0.0); n];
            sum.apply(&x, &mut y);
            for r in 0..n {
                let expected: c64 = (0..n).map(|c| dense.entry(r, c) * x[c]).sum();
                assert!((expected - y[r]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn traces_match_dense() {
        for (da, db, k) in [(2usize, 2usize, 2usize), (2, 3, 3), (3, 2, 2)] {
            let g = gue(da, db, 1);
            let sum = EmbeddedSum::with_upper_half_transposed(&g, k).unwrap();
            let dense = sum.to_dense().unwrap();
            for p in 0..=4u32 {
                let a = sum.trace_power(p).unwrap();
                let b = dense.trace_power(p as usize);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "p={p}: {a} vs {b}");
            }
            let all = sum.trace_powers(4).unwrap();
            for (p, v) in all.iter().enumerate() {
                assert!((v - sum.trace_power(p as u32).unwrap()).abs() <= 1e-12 * v.abs().max(1.0));
            }
            assert!(sum.trace_powers(5).is_err());
        }
    }

    #[test]
    fn word_traces_match_dense() {
        let g = gue(2, 2, 3);
        let h = gue(2, 2, 4);
        let mut sum = EmbeddedSum::new(2, 2, 2).unwrap();
        sum.push(1, g).unwrap();
        sum.push(2, h).unwrap();
        let dense: Vec<HermitianOperator> = sum
            .terms
            .iter()
            .map(|(j, m)| embed_sum(&[(m, *j)], 2).unwrap())
            .collect();
        let word = [0usize, 1, 0, 1];
        let mut prod = dense[word[0]].matrix().to_owned();
        for &w in &word[1..] {
            prod = dense_product(prod.as_ref(), dense[w].matrix());
        }
        let expected: c64 = (0..sum.dim()).map(|i| prod[(i, i)]).sum();
        let got = sum.word_trace(&word).unwrap();
        assert!((expected - got).norm() < 1e-10);
        assert!(sum.word_trace(&[0, 1, 0]).is_err());
    }

    #[test]
    fn lanczos_matches_dense_extremes() {
        let g = gue(3, 3, 8);
        let sum = EmbeddedSum::uniform(&g, 2).unwrap();
        let ev = eigenvalues(&tensor_sum(&g, 2).unwrap()).unwrap();
        let (lo, hi) = sum.extreme_eigenvalues(1e-12).unwrap();
        assert!((lo - ev[0]).abs() < 1e-9);
        assert!((hi - ev[ev.len() - 1]).abs() < 1e-9);
        let id = HermitianOperator::identity(vec![2, 2]).unwrap();
        let (lo, hi) = EmbeddedSum::uniform(&id, 3).unwrap().extreme_eigenvalues(1e-12).unwrap();
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
        let top = sum.largest_eigenvalue(1e-12).unwrap();
        assert!((top - ev[ev.len() - 1]).abs() < 1e-9);
    }
}
