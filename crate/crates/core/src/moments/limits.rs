//! Semicircular and Marčenko-Pastur limit laws: exact moments and densities.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{catalan, narayana};
use crate::error::{bail, Result};

fn big(n: num_bigint::BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `M_SC(σ²)^(order)`: `σ^{2p} Cat_p` for `order = 2p`, zero for odd orders.
pub fn sc_moment(sigma2: &BigRational, order: usize) -> BigRational {
    if order % 2 == 1 {
        return BigRational::zero();
    }
    let p = order / 2;
    sigma2.pow(p as i32) * big(catalan(p as u64))
}

/// `M_MP(λ)^(p) = Σ_m λ^m Nar_p^m`, with `M^(0) = 1`.
pub fn mp_moment(lambda: &BigRational, order: usize) -> BigRational {
    if order == 0 {
        return BigRational::from_integer(1.into());
    }
    (1..=order as u64)
        .map(|m| lambda.pow(m as i32) * big(narayana(order as u64, m).unwrap()))
        .sum()
}

/// One of the two limit laws, with a parameter that may be irrational in
/// the floating-point routines and is exact in the moment routines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitLaw {
    Semicircular { sigma2: f64 },
    MarchenkoPastur { lambda: f64 },
}

impl LimitLaw {
    pub fn semicircular(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            bail!(Domain, "semicircular variance must be positive, got {sigma2}");
        }
        Ok(LimitLaw::Semicircular { sigma2 })
    }

    pub fn marchenko_pastur(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            bail!(Domain, "Marchenko-Pastur parameter must be positive, got {lambda}");
        }
        Ok(LimitLaw::MarchenkoPastur { lambda })
    }

    /// Closed support `[lo, hi]` of the absolutely continuous part.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            LimitLaw::Semicircular { sigma2 } => {
                let r = 2.0 * sigma2.sqrt();
                (-r, r)
            }
            LimitLaw::MarchenkoPastur { lambda } => {
                let s = lambda.sqrt();
                ((s - 1.0).powi(2), (s + 1.0).powi(2))
            }
        }
    }

    /// Density of the absolutely continuous part. For Marchenko-Pastur with
    /// `λ < 1` this part has mass `λ` and [`LimitLaw::atom_at_zero`] carries the rest.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return 0.0;
        }
        match *self {
            LimitLaw::Semicircular { sigma2 } => (4.0 * sigma2 - x * x).sqrt() / (2.0 * PI * sigma2),
            LimitLaw::MarchenkoPastur { .. } => ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * x),
        }
    }

    pub fn atom_at_zero(&self) -> f64 {
        match *self {
            LimitLaw::Semicircular { .. } => 0.0,
            LimitLaw::MarchenkoPastur { lambda } => (1.0 - lambda).max(0.0),
        }
    }

    /// Exact moment, with the parameter converted to the nearest rational.
    pub fn moment(&self, order: usize) -> f64 {
        let to_rational = |x: f64| BigRational::from_float(x).expect("finite parameter");
        let value = match *self {
            LimitLaw::Semicircular { sigma2 } => sc_moment(&to_rational(sigma2), order),
            LimitLaw::MarchenkoPastur { lambda } => mp_moment(&to_rational(lambda), order),
        };
        value.to_f64().unwrap_or(f64::NAN)
    }

    /// `∫ g(x) dμ(x)` by the substitution `x = mid + half·cos θ`, which turns
    /// the square-root edge behaviour into a smooth periodic integrand; the
    /// midpoint rule is then spectrally accurate.
    pub fn integrate(&self, g: impl Fn(f64) -> f64, nodes: usize) -> f64 {
        let (lo, hi) = self.support();
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let h = PI / nodes as f64;
        let mut acc = 0.0;
        for i in 0..nodes {
            let theta = (i as f64 + 0.5) * h;
            let x = mid + half * theta.cos();
            let sin = theta.sin();
            // density(x) dx with the square root written as half·sin θ.
            let weight = match *self {
                LimitLaw::Semicircular { sigma2 } => half * half * sin * sin / (2.0 * PI * sigma2),
                LimitLaw::MarchenkoPastur { .. } => half * half * sin * sin / (2.0 * PI * x),
            };
            acc += g(x) * weight;
        }
        acc * h + self.atom_at_zero() * g(0.0)
    }

    /// `∫ x^order dμ` by quadrature; used to cross-check [`LimitLaw::moment`].
    pub fn moment_by_quadrature(&self, order: usize) -> f64 {
        self.integrate(|x| x.powi(order as i32), 4096)
    }

    /// Mass of `[a, b]` under the law (atom included when `a <= 0 <= b`).
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.support();
        let (a_c, b_c) = (a.max(lo), b.min(hi));
        let mut total = if a <= 0.0 && 0.0 <= b { self.atom_at_zero() } else { 0.0 };
        if a_c < b_c {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (lo + hi);
            let t_hi = ((a_c - mid) / half).clamp(-1.0, 1.0).acos();
            let t_lo = ((b_c - mid) / half).clamp(-1.0, 1.0).acos();
            let nodes = 512;
            let h = (t_hi - t_lo) / nodes as f64;
            for i in 0..nodes {
                let theta = t_lo + (i as f64 + 0.5) * h;
                let x = mid + half * theta.cos();
                let sin = theta.sin();
                let w = match *self {
                    LimitLaw::Semicircular { sigma2 } => half * half * sin * sin / (2.0 * PI * sigma2),
                    LimitLaw::MarchenkoPastur { .. } => half * half * sin * sin / (2.0 * PI * x),
                };
                total += w * h;
            }
        }
        total
    }
}
