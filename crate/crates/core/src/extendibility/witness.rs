use crate::error::{bail, Result};
use crate::rmt::{check_memory, eigenvalues, tensor_sum, EmbeddedSum, HermitianOperator, DEFAULT_MEMORY_CAP};

/// Margin by which the witness must fall below the purity to count as a detection.
pub const DETECTION_TOLERANCE: f64 = 1e-10;

/// Tolerance for the state checks (trace one, no negative eigenvalue).
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Operators up to this dimension are diagonalized densely; larger ones use Lanczos.
pub const DENSE_WITNESS_MAX_DIM: usize = 256;

const LANCZOS_TOLERANCE: f64 = 1e-13;

fn bipartite(rho: &HermitianOperator) -> Result<(usize, usize)> {
    match rho.factor_dims() {
        &[da, db] => Ok((da, db)),
        dims => bail!(Validation, "expected a state on A ⊗ B, got factors {dims:?}"),
    }
}

/// Checks that `ρ` is a bipartite density matrix.
pub fn validate_state(rho: &HermitianOperator) -> Result<()> {
    bipartite(rho)?;
    let tr = rho.trace();
    if (tr - 1.0).abs() > STATE_TOLERANCE {
        bail!(Validation, "state has trace {tr}, expected 1");
    }
    let lowest = eigenvalues(rho)?[0];
    if lowest < -STATE_TOLERANCE {
        bail!(Validation, "state has a negative eigenvalue {lowest:e}");
    }
    Ok(())
}

/// `Tr ρ²`.
pub fn purity(rho: &HermitianOperator) -> f64 {
    rho.trace_of_square()
}

/// `sup_{σ k-extendible} Tr(ρσ) = ‖(1/k) Σ_j ρ̃(j)‖_∞`.
pub fn witness_value(rho: &HermitianOperator, k: usize) -> Result<f64> {
    validate_state(rho)?;
    witness_value_unchecked(rho, k)
}

pub(crate) fn witness_value_unchecked(rho: &HermitianOperator, k: usize) -> Result<f64> {
    if k == 0 {
        bail!(Domain, "k must be positive");
    }
    let sum = EmbeddedSum::uniform(rho, k)?;
    let dim = sum.dim();
    check_memory(dim, DEFAULT_MEMORY_CAP)?;
    let top = if dim <= DENSE_WITNESS_MAX_DIM {
        let ev = eigenvalues(&tensor_sum(rho, k)?)?;
        ev[ev.len() - 1].abs().max(ev[0].abs())
    } else {
        // Validated states are PSD up to tolerance, so the norm is λ_max.
        sum.largest_eigenvalue(LANCZOS_TOLERANCE)?
    };
    Ok(top / k as f64)
}

/// True when `witness_value(ρ, k) < Tr ρ² - DETECTION_TOLERANCE`, which proves
/// `ρ` is not k-extendible. False proves nothing.
pub fn detect_not_k_extendible(rho: &HermitianOperator, k: usize) -> Result<bool> {
    validate_state(rho)?;
    Ok(detects(witness_value_unchecked(rho, k)?, purity(rho)))
}

pub(crate) fn detects(witness: f64, purity: f64) -> bool {
    witness < purity - DETECTION_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::{c64, sample_induced_state, Mat, SeedScheme};

    fn pure(vector: &[c64], dims: Vec<usize>) -> HermitianOperator {
        let n = vector.len();
        let m = Mat::from_fn(n, n, |i, j| vector[i] * vector[j].conj());
        HermitianOperator::new(m, dims).unwrap()
    }

    fn max_entangled(d: usize) -> HermitianOperator {
        let mut v = vec![c64::new(0.0, 0.0); d * d];
        for i in 0..d {
            v[i * d + i] = c64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        pure(&v, vec![d, d])
    }

    #[test]
    fn maximally_mixed_is_never_detected() {
        for d in 2..=4 {
            let rho = HermitianOperator::identity(vec![d, d]).unwrap().scale(1.0 / (d * d) as f64);
            for k in 1..=3 {
                let w = witness_value(&rho, k).unwrap();
                assert!((w - 1.0 / (d * d) as f64).abs() < 1e-12);
                assert!(!detect_not_k_extendible(&rho, k).unwrap());
            }
        }
    }

    #[test]
    fn pure_product_is_not_detected() {
        let mut v = vec![c64::new(0.0, 0.0); 9];
        v[0] = c64::new(1.0, 0.0);
        let rho = pure(&v, vec![3, 3]);
        for k in 1..=3 {
            assert!((witness_value(&rho, k).unwrap() - 1.0).abs() < 1e-12);
            assert!(!detect_not_k_extendible(&rho, k).unwrap());
        }
    }

    #[test]
    fn maximally_entangled_qubits_are_not_two_extendible() {
        let rho = max_entangled(2);
        let w = witness_value(&rho, 2).unwrap();
        assert!(w < 1.0 - 1e-3);
        assert!(detect_not_k_extendible(&rho, 2).unwrap());
        assert!(!detect_not_k_extendible(&rho, 1).unwrap());
    }

    #[test]
    fn lanczos_and_dense_paths_agree() {
        let mut rng = SeedScheme::new(3).stream(0);
        let rho = sample_induced_state(9, 4, &mut rng).unwrap().with_factor_dims(vec![3, 3]).unwrap();
        let k = 5; // dim 729, Lanczos path
        let fast = witness_value(&rho, k).unwrap();
        let dense = eigenvalues(&tensor_sum(&rho, k).unwrap()).unwrap();
        assert!((fast - dense[dense.len() - 1] / k as f64).abs() < 1e-11);
    }

    #[test]
    fn rejects_non_states() {
        let not_normalized = HermitianOperator::identity(vec![2, 2]).unwrap();
        assert!(matches!(witness_value(&not_normalized, 2), Err(crate::Error::Validation(_))));
        let negative = HermitianOperator::diagonal(&[1.5, -0.5, 0.0, 0.0])
            .unwrap()
            .with_factor_dims(vec![2, 2])
            .unwrap();
        assert!(matches!(witness_value(&negative, 2), Err(crate::Error::Validation(_))));
        let single = HermitianOperator::diagonal(&[1.0]).unwrap();
        assert!(witness_value(&single, 2).is_err());
    }
}
