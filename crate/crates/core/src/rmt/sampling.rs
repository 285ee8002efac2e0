use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::operator::{dense_product, HermitianOperator};
use crate::error::{bail, Result};

/// Per-repetition random streams derived from one master seed.
///
/// Repetition `r` uses ChaCha20 keyed by `master_seed` on stream number `r`,
/// so distinct `(master_seed, r)` never share a stream and the sample for a
/// repetition does not depend on which worker draws it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedScheme {
    pub master_seed: u64,
}

impl SeedScheme {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, repetition: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(repetition);
        rng
    }

    /// A sub-scheme for an independent experiment family (e.g. one grid point).
    pub fn child(&self, label: u64) -> SeedScheme {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(u64::MAX - label);
        SeedScheme {
            master_seed: rng.random(),
        }
    }
}

/// Complex normal with independent `N(0, 1/2)` real and imaginary parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `G = (H + H†)/√2` with `H` having i.i.d. complex normal entries: the
/// diagonal is real `N(0, 1)` and off-diagonal entries have `E|G_ij|² = 1`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianOperator> {
    if n == 0 {
        bail!(Domain, "GUE dimension must be positive");
    }
    let mut g = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            g[(i, j)] = complex_normal(rng);
        }
    }
    let sym = Mat::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)].conj()) * std::f64::consts::FRAC_1_SQRT_2);
    Ok(HermitianOperator::from_nearly_hermitian(sym, vec![n]))
}

/// `W = G G†` with `G` an `n × s` complex Gaussian matrix.
pub fn sample_wishart<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<HermitianOperator> {
    if n == 0 || s == 0 {
        bail!(Domain, "Wishart dimensions must be positive");
    }
    let mut g = Mat::<c64>::zeros(n, s);
    for j in 0..s {
        for i in 0..n {
            g[(i, j)] = complex_normal(rng);
        }
    }
    let w = dense_product(g.as_ref(), g.adjoint());
    Ok(HermitianOperator::from_nearly_hermitian(w, vec![n]))
}

/// `ρ = W / Tr W` with `W ~ W(n, s)`.
pub fn sample_induced_state<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<HermitianOperator> {
    let w = sample_wishart(n, s, rng)?;
    let tr = w.trace();
    Ok(w.scale(1.0 / tr))
}
