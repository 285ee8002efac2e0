use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::eigen::eigenvalues;
use super::operator::HermitianOperator;
use crate::error::{bail, Result};
use crate::moments::LimitLaw;

/// Provenance of a spectral sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub ensemble: String,
    pub d: usize,
    pub k: usize,
    pub c: Option<f64>,
    pub seed: u64,
    pub rep: u64,
}

/// Sorted eigenvalues of one sampled operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub meta: SampleMeta,
}

impl SpectralSample {
    pub fn from_operator(m: &HermitianOperator, meta: SampleMeta) -> Result<Self> {
        Ok(Self {
            eigenvalues: eigenvalues(m)?,
            meta,
        })
    }

    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let c = m.c.map_or_else(|| "none".to_string(), |c| c.to_string());
        let mut out = format!(
            "# ensemble={}, d={}, k={}, c={}, seed={}, rep={}\neigenvalue\n",
            m.ensemble, m.d, m.k, c, m.seed, m.rep
        );
        for x in &self.eigenvalues {
            writeln!(out, "{x:e}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = None;
        let mut eigenvalues = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(header) = line.strip_prefix('#') {
                meta = Some(parse_meta(header)?);
            } else if line.is_empty() || line == "eigenvalue" {
                continue;
            } else {
                match line.parse::<f64>() {
                    Ok(x) => eigenvalues.push(x),
                    Err(_) => bail!(Validation, "bad eigenvalue line {line:?}"),
                }
            }
        }
        let Some(meta) = meta else {
            bail!(Validation, "missing metadata header");
        };
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            bail!(Validation, "eigenvalues are not sorted");
        }
        Ok(Self { eigenvalues, meta })
    }
}

fn parse_meta(header: &str) -> Result<SampleMeta> {
    let mut fields = std::collections::HashMap::new();
    for part in header.split(',') {
        let Some((key, value)) = part.trim().split_once('=') else {
            bail!(Validation, "bad metadata field {part:?}");
        };
        fields.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get = |key: &str| -> Result<String> {
        match fields.get(key) {
            Some(v) => Ok(v.clone()),
            None => bail!(Validation, "metadata lacks {key}"),
        }
    };
    let num = |key: &str| -> Result<u64> {
        match get(key)?.parse() {
            Ok(v) => Ok(v),
            Err(_) => bail!(Validation, "metadata field {key} is not an integer"),
        }
    };
    let c = match get("c")?.as_str() {
        "none" => None,
        s => match s.parse() {
            Ok(v) => Some(v),
            Err(_) => bail!(Validation, "metadata field c is not a number"),
        },
    };
    Ok(SampleMeta {
        ensemble: get("ensemble")?,
        d: num("d")? as usize,
        k: num("k")? as usize,
        c,
        seed: num("seed")?,
        rep: num("rep")?,
    })
}

/// `(1/N) Σ (λ_i / scale)^p`.
pub fn empirical_moment(eigenvalues: &[f64], p: u32, scale: f64) -> Result<f64> {
    if eigenvalues.is_empty() {
        bail!(Domain, "empirical moment of an empty sample");
    }
    if !(scale > 0.0) {
        bail!(Domain, "scale must be positive");
    }
    Ok(eigenvalues.iter().map(|x| (x / scale).powi(p as i32)).sum::<f64>() / eigenvalues.len() as f64)
}

/// `max |λ_i|` over a sorted sample.
pub fn sample_norm(eigenvalues: &[f64]) -> Result<f64> {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(a), Some(b)) => Ok(a.abs().max(b.abs())),
        _ => bail!(Domain, "norm of an empty sample"),
    }
}

/// Binned empirical density with the limit density at each bin center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_rule: String,
    pub edges: Vec<f64>,
    pub empirical_density: Vec<f64>,
    pub limit_density: Vec<f64>,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# bins={}, rule={}\nbin_center,empirical_density,limit_density\n", self.empirical_density.len(), self.bin_rule);
        for ((c, e), l) in self.centers().iter().zip(&self.empirical_density).zip(&self.limit_density) {
            writeln!(out, "{c:e},{e:e},{l:e}").unwrap();
        }
        out
    }
}

/// Histogram of pooled values (already scaled). `bins = 0` picks the
/// Freedman-Diaconis width `2·IQR·N^{-1/3}`. When a limit law is given, its
/// value in each bin is the bin-averaged density, atoms included.
pub fn histogram(values: &[f64], bins: usize, law: Option<&LimitLaw>) -> Result<Histogram> {
    if values.is_empty() {
        bail!(Domain, "histogram of an empty sample");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let hi = *sorted.last().unwrap();
    let (count, rule) = if bins > 0 {
        (bins, "fixed".to_string())
    } else {
        let q = |f: f64| sorted[((sorted.len() - 1) as f64 * f).round() as usize];
        let iqr = q(0.75) - q(0.25);
        let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
        let count = if width > 0.0 { ((hi - lo) / width).ceil() as usize } else { 1 };
        (count.clamp(1, 10_000), "freedman-diaconis".to_string())
    };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let width = span / count as f64;
    let edges: Vec<f64> = (0..=count).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0usize; count];
    for &x in &sorted {
        let idx = (((x - lo) / width) as usize).min(count - 1);
        counts[idx] += 1;
    }
    let n = sorted.len() as f64;
    let empirical_density = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let limit_density = match law {
        None => vec![0.0; count],
        Some(law) => edges
            .windows(2)
            .map(|w| law.mass(w[0], w[1]) / (w[1] - w[0]))
            .collect(),
    };
    Ok(Histogram {
        bin_rule: rule,
        edges,
        empirical_density,
        limit_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SampleMeta {
        SampleMeta {
            ensemble: "gue".into(),
            d: 3,
            k: 2,
            c: Some(0.5),
            seed: 9,
            rep: 1,
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = SpectralSample {
            eigenvalues: vec![-1.5, 0.25, 3.0],
            meta: meta(),
        };
        let text = s.to_csv();
        assert!(text.starts_with("# ensemble=gue, d=3, k=2, c=0.5, seed=9, rep=1\n"));
        assert_eq!(SpectralSample::from_csv(&text).unwrap(), s);
        assert!(SpectralSample::from_csv("1.0\n").is_err());
    }

    #[test]
    fn moments_and_norms() {
        let ones = vec![1.0; 5];
        for p in 1..5 {
            assert_eq!(empirical_moment(&ones, p, 1.0).unwrap(), 1.0);
        }
        assert_eq!(sample_norm(&[-5.0, 3.0]).unwrap(), 5.0);
        assert!(empirical_moment(&[], 1, 1.0).is_err());
        assert!(sample_norm(&[]).is_err());
    }

    #[test]
    fn histogram_integrates_to_one() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64 / 999.0) * 4.0 - 2.0).collect();
        let law = LimitLaw::semicircular(1.0).unwrap();
        for bins in [0, 17] {
            let h = histogram(&values, bins, Some(&law)).unwrap();
            let width = h.edges[1] - h.edges[0];
            let total: f64 = h.empirical_density.iter().sum::<f64>() * width;
            assert!((total - 1.0).abs() < 1e-12);
            let limit_total: f64 = h.limit_density.iter().sum::<f64>() * width;
            assert!((limit_total - 1.0).abs() < 1e-6);
        }
    }
}
