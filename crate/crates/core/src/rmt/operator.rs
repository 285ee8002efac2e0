use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{c64, Accum, Mat, MatRef, Par};

use crate::error::{bail, Result};

/// Relative tolerance for the Hermitian check on construction.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Default memory cap for dense operators, in bytes.
pub const DEFAULT_MEMORY_CAP: usize = 2 << 30;

/// Dense Hermitian matrix on a tensor product `A ⊗ B_1 ⊗ .. ⊗ B_k`.
///
/// Basis vectors are numbered with the first factor most significant, so
/// `(a, b_1, .., b_k)` sits at `((a·d_1 + b_1)·d_2 + b_2)..`.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: Mat<c64>,
    factor_dims: Vec<usize>,
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.factor_dims == other.factor_dims && self.matrix == other.matrix
    }
}

impl HermitianOperator {
    /// Validates shape and Hermiticity (within [`HERMITIAN_TOLERANCE`] relative
    /// to the largest entry), then replaces the matrix by `(M + M†)/2`.
    pub fn new(matrix: Mat<c64>, factor_dims: Vec<usize>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            bail!(Validation, "matrix is {}x{}, not square", n, matrix.ncols());
        }
        check_factor_dims(n, &factor_dims)?;
        let mut scale: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let x = matrix[(i, j)];
                scale = scale.max(x.norm());
                defect = defect.max((x - matrix[(j, i)].conj()).norm());
            }
        }
        if defect > HERMITIAN_TOLERANCE * scale.max(1.0) {
            bail!(Validation, "matrix is not Hermitian (max |M - M†| = {defect:e})");
        }
        Ok(Self::from_nearly_hermitian(matrix, factor_dims))
    }

    pub(crate) fn from_nearly_hermitian(matrix: Mat<c64>, factor_dims: Vec<usize>) -> Self {
        let n = matrix.nrows();
        let sym = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(matrix[(i, i)].re, 0.0)
            } else {
                (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5
            }
        });
        Self {
            matrix: sym,
            factor_dims,
        }
    }

    pub fn identity(factor_dims: Vec<usize>) -> Result<Self> {
        let n = checked_dim(&factor_dims)?;
        Ok(Self {
            matrix: Mat::identity(n, n),
            factor_dims,
        })
    }

    /// Real diagonal operator on a single factor.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            bail!(Domain, "diagonal operator needs at least one entry");
        }
        let n = values.len();
        Ok(Self {
            matrix: Mat::from_fn(n, n, |i, j| {
                if i == j {
                    c64::new(values[i], 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }),
            factor_dims: vec![n],
        })
    }

    /// Builds from real and imaginary parts given row-major; validated like [`HermitianOperator::new`].
    pub fn from_rows(rows: &[Vec<(f64, f64)>], factor_dims: Vec<usize>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            bail!(Validation, "rows have inconsistent lengths");
        }
        Self::new(Mat::from_fn(n, n, |i, j| c64::new(rows[i][j].0, rows[i][j].1)), factor_dims)
    }

    /// Same matrix, regrouped into different tensor factors.
    pub fn with_factor_dims(mut self, factor_dims: Vec<usize>) -> Result<Self> {
        check_factor_dims(self.dim(), &factor_dims)?;
        self.factor_dims = factor_dims;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// `Tr(M²) = Σ |M_ij|²`.
    pub fn trace_of_square(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += self.matrix[(i, j)].norm_sqr();
            }
        }
        acc
    }

    /// `Tr(M^p)` by repeated multiplication.
    pub fn trace_power(&self, p: usize) -> f64 {
        match p {
            0 => self.dim() as f64,
            1 => self.trace(),
            2 => self.trace_of_square(),
            _ => {
                let mut acc = self.matrix.clone();
                for _ in 1..p {
                    acc = dense_product(acc.as_ref(), self.matrix.as_ref());
                }
                (0..self.dim()).map(|i| acc[(i, i)].re).sum()
            }
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] * factor),
            factor_dims: self.factor_dims.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.factor_dims != other.factor_dims {
            bail!(
                Validation,
                "factor dimensions differ: {:?} vs {:?}",
                self.factor_dims,
                other.factor_dims
            );
        }
        Ok(Self {
            matrix: Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] + other.matrix[(i, j)]),
            factor_dims: self.factor_dims.clone(),
        })
    }

    /// `U M U†` for a unitary `U` of matching size; Hermiticity is restored exactly.
    pub fn conjugate_by(&self, unitary: MatRef<'_, c64>) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            bail!(Validation, "unitary has the wrong size");
        }
        let left = dense_product(unitary, self.matrix.as_ref());
        let full = dense_product(left.as_ref(), unitary.adjoint());
        Ok(Self::from_nearly_hermitian(full, self.factor_dims.clone()))
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut out: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                out = out.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        out
    }
}

pub(crate) fn dense_product<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> Mat<c64>
where
    L: Conjugate<Canonical = c64>,
    R: Conjugate<Canonical = c64>,
{
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, c64::new(1.0, 0.0), Par::Seq);
    out
}

fn check_factor_dims(n: usize, factor_dims: &[usize]) -> Result<()> {
    if factor_dims.is_empty() || factor_dims.contains(&0) {
        bail!(Validation, "factor dimensions must be a nonempty list of positive integers");
    }
    let product = checked_dim(factor_dims)?;
    if product != n {
        bail!(Validation, "factor dimensions {factor_dims:?} multiply to {product}, matrix has dimension {n}");
    }
    Ok(())
}

pub(crate) fn checked_dim(factor_dims: &[usize]) -> Result<usize> {
    let mut n: usize = 1;
    for &d in factor_dims {
        if d == 0 {
            bail!(Validation, "factor dimensions must be positive");
        }
        n = match n.checked_mul(d) {
            Some(v) => v,
            None => bail!(Resource, "dimension overflows"),
        };
    }
    Ok(n)
}

/// Fails when a dense `dim × dim` complex matrix would exceed `cap_bytes`.
pub fn check_memory(dim: usize, cap_bytes: usize) -> Result<()> {
    let bytes = (dim as u128) * (dim as u128) * 16;
    if bytes > cap_bytes as u128 {
        bail!(Resource, "a dense {dim}x{dim} operator needs {bytes} bytes, above the cap {cap_bytes}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat::from_fn(2, 2, |i, j| c64::new((i + 2 * j) as f64, 0.0));
        assert!(matches!(HermitianOperator::new(m, vec![2]), Err(crate::Error::Validation(_))));
        let ok = Mat::from_fn(2, 2, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, if i < j { 1.0 } else { -1.0 }) });
        let h = HermitianOperator::new(ok, vec![2]).unwrap();
        assert_eq!(h.trace(), 2.0);
        assert!(HermitianOperator::identity(vec![2, 3]).unwrap().dim() == 6);
        assert!(HermitianOperator::identity(vec![2, 0]).is_err());
    }

    #[test]
    fn factor_dims_must_match() {
        let h = HermitianOperator::identity(vec![4]).unwrap();
        assert!(h.clone().with_factor_dims(vec![2, 2]).is_ok());
        assert!(h.with_factor_dims(vec![2, 3]).is_err());
    }

    #[test]
    fn trace_powers_of_diagonal() {
        let h = HermitianOperator::diagonal(&[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(h.trace_power(1), 2.0);
        assert_eq!(h.trace_power(2), 14.0);
        assert_eq!(h.trace_power(3), 1.0 - 8.0 + 27.0);
    }

    #[test]
    fn memory_cap() {
        assert!(check_memory(1000, DEFAULT_MEMORY_CAP).is_ok());
        assert!(matches!(check_memory(20_000, DEFAULT_MEMORY_CAP), Err(crate::Error::Resource(_))));
    }
}
