//! Sampling `Σ_j M̃(j)` for random `M` and the normalized spectra of such sums.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::eigenvalues;
use super::sampling::{sample_gue, sample_wishart, SeedScheme};
use super::spectrum::{empirical_moment, histogram, Histogram};
use super::structured::EmbeddedSum;
use crate::error::{bail, Result};
use crate::moments::LimitLaw;

/// Which random `M` is embedded, and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModifiedEnsemble {
    /// `Σ_j G̃(j)` with `G ~ GUE(d_A d_B)`.
    GueMod,
    /// `Σ_j W̃(j)` with `W ~ W(d_A d_B, s)`.
    WishartMod,
    /// `Σ_j G̃(j)^Γ`, partial transpose on the last `⌈k/2⌉` B factors.
    GueModPt,
}

impl ModifiedEnsemble {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GueMod => "gue-mod",
            Self::WishartMod => "wishart-mod",
            Self::GueModPt => "gue-mod-pt",
        }
    }
}

/// One draw of the embedded sum; `s` is only read for the Wishart ensemble.
pub fn sample_modified<R: Rng + ?Sized>(
    ensemble: ModifiedEnsemble,
    da: usize,
    db: usize,
    k: usize,
    s: usize,
    rng: &mut R,
) -> Result<EmbeddedSum> {
    let n = da * db;
    let m = match ensemble {
        ModifiedEnsemble::WishartMod => sample_wishart(n, s, rng)?,
        _ => sample_gue(n, rng)?,
    }
    .with_factor_dims(vec![da, db])?;
    match ensemble {
        ModifiedEnsemble::GueModPt => EmbeddedSum::with_upper_half_transposed(&m, k),
        _ => EmbeddedSum::uniform(&m, k),
    }
}

/// `s = round(c·d²)`, halves rounded up; at least 1 is required.
pub fn environment_size(c: f64, d: usize) -> Result<usize> {
    if !(c > 0.0) || !c.is_finite() {
        bail!(Domain, "c must be a positive finite number, got {c}");
    }
    let s = (c * (d * d) as f64 + 0.5).floor();
    if s < 1.0 {
        bail!(Domain, "s = round(c d²) = 0 for c = {c}, d = {d}");
    }
    if s > u32::MAX as f64 {
        bail!(Resource, "environment dimension {s} is too large");
    }
    Ok(s as usize)
}

/// Eigenvalues of `X/d` (GUE kinds) or `X/d²` (Wishart) are compared with
/// `SC(k)` and `MP(ck)` respectively; the transposed GUE sum has no overlay.
pub fn limit_law(ensemble: ModifiedEnsemble, k: usize, c: f64) -> Result<Option<LimitLaw>> {
    Ok(match ensemble {
        ModifiedEnsemble::GueMod => Some(LimitLaw::semicircular(k as f64)?),
        ModifiedEnsemble::WishartMod => Some(LimitLaw::marchenko_pastur(c * k as f64)?),
        ModifiedEnsemble::GueModPt => None,
    })
}

fn normalization(ensemble: ModifiedEnsemble, d: usize) -> f64 {
    match ensemble {
        ModifiedEnsemble::WishartMod => (d * d) as f64,
        _ => d as f64,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub order: u32,
    pub empirical: f64,
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub ensemble: ModifiedEnsemble,
    pub d: usize,
    pub k: usize,
    pub c: Option<f64>,
    pub s: Option<usize>,
    pub repetitions: u64,
    pub seed: u64,
    pub scale: f64,
    pub limit: Option<LimitLaw>,
    pub histogram: Histogram,
    pub moments: Vec<MomentComparison>,
}

/// Pools the normalized spectra of `reps` draws (balanced, `d_A = d_B = d`)
/// and bins them. Repetition `r` draws from stream `r` of `seed`.
pub fn run_spectrum_experiment(
    ensemble: ModifiedEnsemble,
    d: usize,
    k: usize,
    c: f64,
    reps: u64,
    bins: usize,
    seed: u64,
) -> Result<SpectrumReport> {
    if reps == 0 {
        bail!(Domain, "at least one repetition is needed");
    }
    let s = match ensemble {
        ModifiedEnsemble::WishartMod => Some(environment_size(c, d)?),
        _ => None,
    };
    let scale = normalization(ensemble, d);
    let scheme = SeedScheme::new(seed);
    let spectra = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = scheme.stream(rep);
            let x = sample_modified(ensemble, d, d, k, s.unwrap_or(1), &mut rng)?;
            let ev = eigenvalues(&x.to_dense()?)?;
            Ok(ev.into_iter().map(|v| v / scale).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let pooled: Vec<f64> = spectra.into_iter().flatten().collect();
    let limit = limit_law(ensemble, k, c)?;
    let hist = histogram(&pooled, bins, limit.as_ref())?;
    let moments = (1..=4)
        .map(|order| {
            Ok(MomentComparison {
                order,
                empirical: empirical_moment(&pooled, order, 1.0)?,
                limit: limit.as_ref().map(|law| law.moment(order as usize)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        ensemble,
        d,
        k,
        c: s.map(|_| c),
        s,
        repetitions: reps,
        seed,
        scale,
        limit,
        histogram: hist,
        moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn environment_rounding() {
        assert_eq!(environment_size(0.125, 8).unwrap(), 8);
        assert_eq!(environment_size(0.05, 8).unwrap(), 3);
        assert_eq!(environment_size(0.5 / 64.0, 8).unwrap(), 1);
        assert!(environment_size(0.001, 8).is_err());
        assert!(environment_size(-1.0, 8).is_err());
    }

    #[test]
    fn spectrum_report_is_deterministic() {
        let a = run_spectrum_experiment(ModifiedEnsemble::WishartMod, 3, 2, 1.0, 4, 10, 5).unwrap();
        let b = run_spectrum_experiment(ModifiedEnsemble::WishartMod, 3, 2, 1.0, 4, 10, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.s, Some(9));
        assert_eq!(a.moments[1].limit, Some(6.0));
        let pt = run_spectrum_experiment(ModifiedEnsemble::GueModPt, 2, 2, 1.0, 2, 0, 5).unwrap();
        assert!(pt.limit.is_none() && pt.c.is_none());
    }
}
