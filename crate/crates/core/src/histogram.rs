//! Histograms and distribution diagnostics (KS distance, total variation,
//! summary statistics).

use crate::error::{Error, Result};

/// Equal-width histogram with unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidSpec(format!("need ≥ 2 bins, got {bins}")));
        }
        if !(hi > lo) {
            return Err(Error::InvalidSpec(format!(
                "histogram range must be increasing, got [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            masses: vec![0.0; bins],
        })
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.bin_width()
    }

    /// Index of the bin containing `x`; values at `hi` land in the last bin,
    /// values outside the range clamp to the edge bins.
    pub fn bin_index(&self, x: f64) -> usize {
        let raw = ((x - self.lo) / self.bin_width()).floor();
        (raw.max(0.0) as usize).min(self.bins() - 1)
    }

    pub fn add(&mut self, x: f64, weight: f64) {
        let i = self.bin_index(x);
        self.masses[i] += weight;
    }

    /// Builds a histogram from equally weighted samples.
    pub fn from_samples(lo: f64, hi: f64, bins: usize, samples: &[f64]) -> Result<Self> {
        let mut h = Self::new(lo, hi, bins)?;
        if samples.is_empty() {
            return Ok(h);
        }
        let w = 1.0 / samples.len() as f64;
        for &x in samples {
            h.add(x, w);
        }
        Ok(h)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Probability density at the center of bin `i` (mass / width).
    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / self.bin_width()
    }
}

/// Total variation distance ½·Σ|p_i − q_i| between two histograms on the
/// same binning.
pub fn total_variation(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.bins() != b.bins() || a.lo != b.lo || a.hi != b.hi {
        return Err(Error::InvalidSpec(
            "total variation needs identical binnings".into(),
        ));
    }
    Ok(0.5
        * a.masses
            .iter()
            .zip(&b.masses)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

/// Two-sided Kolmogorov–Smirnov distance between samples and a reference CDF.
///
/// Sorts a copy of the samples; `cdf` must be nondecreasing on their range.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Mean, standard deviation and a fixed quantile set of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// (probability, value) pairs for p ∈ {0.05, 0.25, 0.5, 0.75, 0.95}.
    pub quantiles: Vec<(f64, f64)>,
}

impl SampleSummary {
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "summary of empty sample");
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let mut xs = samples.to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
        let q = |p: f64| -> f64 {
            let idx = (p * (n - 1) as f64).round() as usize;
            xs[idx.min(n - 1)]
        };
        SampleSummary {
            n,
            mean,
            std: var.sqrt(),
            min: xs[0],
            max: xs[n - 1],
            quantiles: [0.05, 0.25, 0.5, 0.75, 0.95]
                .iter()
                .map(|&p| (p, q(p)))
                .collect(),
        }
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
