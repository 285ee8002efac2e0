use std::fmt::Write as _;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::c_star;
use super::witness::{detects, purity, witness_value_unchecked};
use crate::error::{bail, Result};
use crate::rmt::{
    environment_size, sample_induced_state, sample_modified, EmbeddedSum, ModifiedEnsemble, SeedScheme,
};

/// Lanczos tolerance for sampled operator norms.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Mean and standard error of the mean (`n - 1` in the variance).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let center = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn check_common(d: usize, k: usize, reps: u64) -> Result<()> {
    if d == 0 || k == 0 {
        bail!(Domain, "d and k must be positive");
    }
    if reps == 0 {
        bail!(Domain, "at least one repetition is needed");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRep {
    pub rep: u64,
    pub purity: f64,
    pub witness_value: f64,
    pub detected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub d: usize,
    pub k: usize,
    pub c: f64,
    pub s: usize,
    pub repetitions: u64,
    pub seed: u64,
    pub reps: Vec<WitnessRep>,
    pub purity_mean: f64,
    pub purity_se: f64,
    pub witness_mean: f64,
    pub witness_se: f64,
    pub detections: u64,
    pub detection_rate: f64,
    pub detection_ci: (f64, f64),
    /// `(1 + 1/c)/d²`
    pub purity_pred: f64,
    /// `(√(ck) + 1)²/(ck d²)`
    pub witness_pred: f64,
}

impl WitnessReport {
    /// One repetition per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rep,purity,witness_value,detected\n");
        for r in &self.reps {
            writeln!(out, "{},{:e},{:e},{}", r.rep, r.purity, r.witness_value, r.detected).unwrap();
        }
        out
    }
}

/// Purity and witness of `ρ ~ μ(d², s)`, `s = round(c d²)`, over `reps`
/// repetitions; repetition `r` uses stream `r` of `seed`.
pub fn run_witness_experiment(d: usize, k: usize, c: f64, reps: u64, seed: u64) -> Result<WitnessReport> {
    check_common(d, k, reps)?;
    let s = environment_size(c, d)?;
    let scheme = SeedScheme::new(seed);
    let rows = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = scheme.stream(rep);
            let rho = sample_induced_state(d * d, s, &mut rng)?.with_factor_dims(vec![d, d])?;
            let pur = purity(&rho);
            let wit = witness_value_unchecked(&rho, k)?;
            Ok(WitnessRep {
                rep,
                purity: pur,
                witness_value: wit,
                detected: detects(wit, pur),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let purities: Vec<f64> = rows.iter().map(|r| r.purity).collect();
    let witnesses: Vec<f64> = rows.iter().map(|r| r.witness_value).collect();
    let (purity_mean, purity_se) = mean_and_se(&purities);
    let (witness_mean, witness_se) = mean_and_se(&witnesses);
    let detections = rows.iter().filter(|r| r.detected).count() as u64;
    let d2 = (d * d) as f64;
    let ck = c * k as f64;
    Ok(WitnessReport {
        d,
        k,
        c,
        s,
        repetitions: reps,
        seed,
        reps: rows,
        purity_mean,
        purity_se,
        witness_mean,
        witness_se,
        detections,
        detection_rate: detections as f64 / reps as f64,
        detection_ci: wilson_interval(detections, reps, WILSON_Z),
        purity_pred: (1.0 + 1.0 / c) / d2,
        witness_pred: (ck.sqrt() + 1.0).powi(2) / (ck * d2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub c: f64,
    pub s: usize,
    pub seed: u64,
    pub detections: u64,
    pub detection_rate: f64,
    pub detection_ci: (f64, f64),
    pub purity_mean: f64,
    pub witness_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub d: usize,
    pub k: usize,
    pub repetitions: u64,
    pub seed: u64,
    pub c_grid: Vec<f64>,
    pub points: Vec<ThresholdPoint>,
    /// `(k - 1)²/(4k)` exactly.
    pub c_star: BigRational,
    pub c_star_approx: f64,
    /// Every rate is at most the previous one, up to overlapping Wilson intervals.
    pub nonincreasing_within_ci: bool,
}

impl ThresholdReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,s,detections,detection_rate,ci_low,ci_high,purity_mean,witness_mean\n");
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{:e},{:e}",
                p.c, p.s, p.detections, p.detection_rate, p.detection_ci.0, p.detection_ci.1, p.purity_mean, p.witness_mean
            )
            .unwrap();
        }
        out
    }
}

/// Detection rates along a grid of `c`. Grid point `i` uses the seed
/// `SeedScheme::new(seed).child(i)`.
pub fn run_threshold_sweep(d: usize, k: usize, c_grid: &[f64], reps: u64, seed: u64) -> Result<ThresholdReport> {
    check_common(d, k, reps)?;
    if c_grid.is_empty() {
        bail!(Domain, "empty c grid");
    }
    if let Some(bad) = c_grid.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        bail!(Domain, "grid values must be positive, got {bad}");
    }
    let master = SeedScheme::new(seed);
    let mut points = Vec::with_capacity(c_grid.len());
    for (i, &c) in c_grid.iter().enumerate() {
        let child = master.child(i as u64).master_seed;
        let report = run_witness_experiment(d, k, c, reps, child)?;
        points.push(ThresholdPoint {
            c,
            s: report.s,
            seed: child,
            detections: report.detections,
            detection_rate: report.detection_rate,
            detection_ci: report.detection_ci,
            purity_mean: report.purity_mean,
            witness_mean: report.witness_mean,
        });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].c.total_cmp(&points[b].c));
    let nonincreasing_within_ci = order
        .windows(2)
        .all(|w| points[w[1]].detection_ci.0 <= points[w[0]].detection_ci.1);
    let exact = c_star(k)?;
    Ok(ThresholdReport {
        d,
        k,
        repetitions: reps,
        seed,
        c_grid: c_grid.to_vec(),
        points,
        c_star_approx: num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN),
        c_star: exact,
        nonincreasing_within_ci,
    })
}

/// What is averaged in a mean-width estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanWidthMode {
    /// `E‖(1/k) Σ G̃(j)‖_∞ / d²`, `G ~ GUE(d²)`, against `2/(√k d)`.
    Plain { d: usize },
    /// `E‖Σ G̃(j)^Γ‖_∞` (Γ on the last `⌈k/2⌉` B factors) against `√(2k) d`.
    PptExtension { d: usize },
    /// `E‖(1/k) Σ G̃(j)‖_∞ / (d_A d_B)`, `G ~ GUE(d_A d_B)`, against
    /// `2/(√k √(d_A d_B))`; for fixed `d_B` the ratio is expected to settle
    /// at or above `(1 + (k-1)/d_B²)^{1/4}`.
    Unbalanced { da: usize, db: usize },
}

impl MeanWidthMode {
    fn dims(&self) -> (usize, usize) {
        match *self {
            Self::Plain { d } | Self::PptExtension { d } => (d, d),
            Self::Unbalanced { da, db } => (da, db),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanWidthReport {
    pub mode: MeanWidthMode,
    pub k: usize,
    pub repetitions: u64,
    pub seed: u64,
    pub samples: Vec<f64>,
    pub estimate: f64,
    pub standard_error: f64,
    pub prediction: f64,
    pub ratio: f64,
    pub ratio_se: f64,
    /// Unbalanced mode only: `(1 + (k-1)/d_B²)^{1/4}`.
    pub correction_bound: Option<f64>,
}

impl MeanWidthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rep,value\n");
        for (i, v) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{v:e}").unwrap();
        }
        out
    }
}

/// Monte Carlo mean width; norms come from Lanczos on the factored sum.
pub fn estimate_mean_width(mode: MeanWidthMode, k: usize, reps: u64, seed: u64) -> Result<MeanWidthReport> {
    let (da, db) = mode.dims();
    check_common(da.min(db), k, reps)?;
    let ensemble = match mode {
        MeanWidthMode::PptExtension { .. } => ModifiedEnsemble::GueModPt,
        _ => ModifiedEnsemble::GueMod,
    };
    EmbeddedSum::new(da, db, k)?;
    let kf = k as f64;
    let n = (da * db) as f64;
    let scheme = SeedScheme::new(seed);
    let samples = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = scheme.stream(rep);
            let x = sample_modified(ensemble, da, db, k, 1, &mut rng)?;
            let norm = x.operator_norm(NORM_TOLERANCE)?;
            Ok(match mode {
                MeanWidthMode::PptExtension { .. } => norm,
                _ => norm / kf / n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (estimate, standard_error) = mean_and_se(&samples);
    let (prediction, correction_bound) = match mode {
        MeanWidthMode::Plain { d } => (2.0 / (kf.sqrt() * d as f64), None),
        MeanWidthMode::PptExtension { d } => ((2.0 * kf).sqrt() * d as f64, None),
        MeanWidthMode::Unbalanced { db, .. } => (
            2.0 / (kf.sqrt() * n.sqrt()),
            Some((1.0 + (kf - 1.0) / (db * db) as f64).powf(0.25)),
        ),
    };
    Ok(MeanWidthReport {
        mode,
        k,
        repetitions: reps,
        seed,
        samples,
        estimate,
        standard_error,
        prediction,
        ratio: estimate / prediction,
        ratio_se: standard_error / prediction,
        correction_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub d: usize,
    pub s: usize,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatio {
    pub d1: usize,
    pub d2: usize,
    /// `var(d1) / var(d2)`
    pub ratio: f64,
    /// `(d2/d1)²`
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecayReport {
    pub k: usize,
    pub p: u32,
    pub c: f64,
    pub repetitions: u64,
    pub seed: u64,
    pub points: Vec<VariancePoint>,
    pub ratios: Vec<VarianceRatio>,
}

/// `(1/d^{k+1}) Tr(W_d^p)` with `W_d = (1/d²) Σ_j W̃(j)`, `W ~ W(d², round(c d²))`.
pub fn normalized_wishart_trace<R: rand::Rng + ?Sized>(d: usize, k: usize, p: u32, s: usize, rng: &mut R) -> Result<f64> {
    let x = sample_modified(ModifiedEnsemble::WishartMod, d, d, k, s, rng)?;
    let tr = if p <= 4 {
        x.trace_power(p)?
    } else {
        x.to_dense()?.trace_power(p as usize)
    };
    Ok(tr / (d as f64).powi(2 * p as i32) / (d as f64).powi(k as i32 + 1))
}

/// Sample variance (with `n - 1`) of the normalized trace moment at each `d`
/// and the ratios between consecutive `d`. The point for `d` uses the seed
/// `SeedScheme::new(seed).child(d)`.
pub fn variance_decay_check(d_list: &[usize], k: usize, p: u32, c: f64, reps: u64, seed: u64) -> Result<VarianceDecayReport> {
    if d_list.len() < 2 {
        bail!(Domain, "variance decay needs at least two values of d");
    }
    if d_list.windows(2).any(|w| w[0] >= w[1]) {
        bail!(Domain, "d values must be strictly increasing");
    }
    if reps < 2 {
        bail!(Domain, "a variance needs at least two repetitions");
    }
    if p == 0 {
        bail!(Domain, "p must be positive");
    }
    check_common(d_list[0], k, reps)?;
    let master = SeedScheme::new(seed);
    let mut points = Vec::new();
    for &d in d_list {
        let s = environment_size(c, d)?;
        let child = master.child(d as u64).master_seed;
        let scheme = SeedScheme::new(child);
        let values = (0..reps)
            .into_par_iter()
            .map(|rep| normalized_wishart_trace(d, k, p, s, &mut scheme.stream(rep)))
            .collect::<Result<Vec<_>>>()?;
        let (mean, se) = mean_and_se(&values);
        points.push(VariancePoint {
            d,
            s,
            seed: child,
            mean,
            variance: se * se * reps as f64,
        });
    }
    let ratios = points
        .windows(2)
        .map(|w| VarianceRatio {
            d1: w[0].d,
            d2: w[1].d,
            ratio: w[0].variance / w[1].variance,
            target: (w[1].d as f64 / w[0].d as f64).powi(2),
        })
        .collect();
    Ok(VarianceDecayReport {
        k,
        p,
        c,
        repetitions: reps,
        seed,
        points,
        ratios,
    })
}
