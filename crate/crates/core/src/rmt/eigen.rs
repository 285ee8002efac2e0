use faer::{Mat, Par, Side};

use super::operator::{dense_product, HermitianOperator};
use crate::error::{bail, Error, Result};

/// Residual bar for [`eigenvalues_validated`], relative to `‖M‖∞`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;

/// All eigenvalues, ascending.
pub fn eigenvalues(m: &HermitianOperator) -> Result<Vec<f64>> {
    faer::set_global_parallelism(Par::Seq);
    let mut values = m
        .matrix()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues together with a check that `‖M - VΛV†‖∞` (max entry) stays
/// below [`RECONSTRUCTION_TOLERANCE`] times the largest entry of `M`.
pub fn eigenvalues_validated(m: &HermitianOperator) -> Result<Vec<f64>> {
    faer::set_global_parallelism(Par::Seq);
    let evd = m
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let n = m.dim();
    let u = evd.U();
    let s = evd.S().column_vector();
    let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * s[j].re);
    let rebuilt = dense_product(scaled.as_ref(), u.adjoint());
    let mut scale: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(m.entry(i, j).norm());
            residual = residual.max((m.entry(i, j) - rebuilt[(i, j)]).norm());
        }
    }
    if residual > RECONSTRUCTION_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        bail!(Numerical, "eigendecomposition residual {residual:e} exceeds tolerance");
    }
    let mut values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `max |λ_i|` from a dense decomposition.
pub fn operator_norm(m: &HermitianOperator) -> Result<f64> {
    let values = eigenvalues(m)?;
    Ok(values.first().unwrap().abs().max(values.last().unwrap().abs()))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let id = HermitianOperator::identity(vec![7]).unwrap();
        assert_eq!(eigenvalues(&id).unwrap(), vec![1.0; 7]);
        let d = HermitianOperator::diagonal(&[3.0, -1.0, 2.0]).unwrap();
        assert_eq!(eigenvalues_validated(&d).unwrap(), vec![-1.0, 2.0, 3.0]);
        let n = HermitianOperator::diagonal(&[3.0, -5.0]).unwrap();
        assert_eq!(operator_norm(&n).unwrap(), 5.0);
    }
}
