//! Samples and empirical distribution functions.
//!
//! A [`Sample`] owns a sorted vector of finite observations. An
//! [`EmpiricalCdf`] is the right-continuous step function
//! `F(t) = #{values <= t} / n` built from one. Cumulative probabilities are
//! stored as integer counts so that two CDFs can be compared exactly, with no
//! floating-point tolerance on probabilities.

use crate::error::{Error, Result};

/// Absolute tolerance for merging support points that differ only by
/// floating-point noise.
pub const SUPPORT_DEDUP_TOL: f64 = 1e-12;

/// A non-empty univariate sample, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    label: String,
}

impl Sample {
    /// Builds a sample from raw observations. Values are sorted ascending.
    /// Fails on an empty vector or any non-finite value.
    pub fn new(mut values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        values.sort_by(f64::total_cmp);
        Ok(Sample {
            values,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[allow(clippy::len_without_is_empty)] // construction guarantees non-empty
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Median of the sorted values; the midpoint average for even sizes.
    pub fn median(&self) -> f64 {
        let n = self.values.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }
}

/// Right-continuous empirical CDF with strictly increasing support.
///
/// Support points closer than [`SUPPORT_DEDUP_TOL`] are merged; cumulative
/// counts are kept as integers, so every probability is an exact multiple of
/// `1/n` and the final one is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    support: Vec<f64>,
    counts: Vec<usize>,
    n: usize,
}

impl EmpiricalCdf {
    pub fn from_sample(sample: &Sample) -> Self {
        let values = sample.values();
        let n = values.len();
        let mut support = Vec::new();
        let mut counts = Vec::new();
        let mut i = 0;
        while i < n {
            let head = values[i];
            let lim = head + SUPPORT_DEDUP_TOL;
            while i < n && values[i] <= lim {
                i += 1;
            }
            support.push(head);
            counts.push(i);
        }
        EmpiricalCdf { support, counts, n }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Cumulative probabilities aligned with [`Self::support`]. Strictly
    /// increasing, each an exact multiple of `1/n`, ending at exactly 1.
    pub fn probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Cumulative counts aligned with [`Self::support`].
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    /// Evaluates `F(t)`: the fraction of observations at or below `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.support.partition_point(|v| *v <= t);
        if idx == 0 {
            0.0
        } else {
            self.counts[idx - 1] as f64 / self.n as f64
        }
    }
}
