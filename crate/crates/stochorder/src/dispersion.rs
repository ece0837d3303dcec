//! Dispersion orderings through resampled inter-point statistics.
//!
//! For a multivariate sample, dispersion is summarised by the distribution of
//! a statistic of randomly drawn tuples: the L1 or L2 distance between two
//! points, or the k-volume of the simplex spanned by k+1 points. Two samples
//! are then compared by applying the stochastic-dominance machinery from
//! [`crate::ordering`] to their statistic distributions: the more dispersed
//! sample produces stochastically larger statistics.
//!
//! Resampling is deterministic: resample `i` draws its generator from stream
//! `i` of a ChaCha keyed by the configured seed. Two datasets resampled under
//! the same configuration therefore draw the same index tuples ("shared
//! derived seeds"), which keeps comparisons paired and makes identical inputs
//! compare exactly equal.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordering::{fsd_compare, ks_one_sided_test, DominanceVerdict, KsResult, TestConfig};
use crate::sample::Sample;

// ── Types ───────────────────────────────────────────────────────────────────

/// A multivariate sample: `n >= 2` points of equal finite dimension `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSample {
    points: Vec<Vec<f64>>,
    dim: usize,
    coord_labels: Vec<String>,
    label: String,
}

impl MultiSample {
    pub fn new(
        points: Vec<Vec<f64>>,
        coord_labels: Vec<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: points.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
        }
        if coord_labels.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coord_labels.len(),
            });
        }
        Ok(MultiSample {
            points,
            dim,
            coord_labels,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.points[idx]
    }

    #[allow(clippy::len_without_is_empty)] // construction guarantees n >= 2
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coord_labels(&self) -> &[String] {
        &self.coord_labels
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMetric {
    /// Sum of absolute coordinate differences between two points.
    L1,
    /// Euclidean distance between two points.
    L2,
    /// k-volume of the simplex spanned by k+1 points.
    Simplex { k: usize },
}

impl DispersionMetric {
    /// Number of points drawn per resample.
    pub fn tuple_size(&self) -> usize {
        match self {
            DispersionMetric::L1 | DispersionMetric::L2 => 2,
            DispersionMetric::Simplex { k } => k + 1,
        }
    }

    /// L1 and L2 compare absolute coordinate spans, so they default to unit
    /// normalization; the simplex volume is used on raw values.
    pub fn default_normalize(&self) -> bool {
        !matches!(self, DispersionMetric::Simplex { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DispersionMetric::L1 => "l1",
            DispersionMetric::L2 => "l2",
            DispersionMetric::Simplex { .. } => "simplex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionConfig {
    pub metric: DispersionMetric,
    /// Bootstrap resamples; at least 100.
    pub num_resamples: usize,
    pub seed: u64,
    /// Rescale every coordinate to the unit range before resampling.
    pub normalize: bool,
}

impl DispersionConfig {
    /// Configuration with the metric's default normalization.
    pub fn new(metric: DispersionMetric, num_resamples: usize, seed: u64) -> Self {
        DispersionConfig {
            metric,
            num_resamples,
            seed,
            normalize: metric.default_normalize(),
        }
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    fn validate_for(&self, dim: usize) -> Result<()> {
        if self.num_resamples < 100 {
            return Err(Error::InsufficientResamples(self.num_resamples));
        }
        if let DispersionMetric::Simplex { k } = self.metric {
            if k < 1 || k > dim {
                return Err(Error::InvalidSimplexOrder { k, d: dim });
            }
        }
        Ok(())
    }
}

/// The resampled statistic distribution together with the configuration that
/// produced it.
#[derive(Debug, Clone)]
pub struct DispersionSample {
    pub stats: Sample,
    pub config: DispersionConfig,
}

// ── Point statistics ─────────────────────────────────────────────────────────

/// Sum of absolute coordinate differences.
pub fn l1_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

/// Euclidean distance.
pub fn l2_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Squared k-volume of the simplex spanned by `points` (k = points.len() - 1)
/// via the Gram determinant of the edge vectors:
/// `vol^2 = det(M^T M) / (k!)^2` with edge matrix columns `x_i - x_{k+1}`.
/// When k = d the edge matrix is square and `det(M^T M) = det(M)^2`, so the
/// determinant is taken directly — forming the Gram matrix first would
/// square the condition number and lose half the precision on thin
/// simplices. Requires `1 <= k <= d`; the result is clamped at 0 against
/// rounding.
pub fn simplex_sq_volume(points: &[Vec<f64>]) -> Result<f64> {
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    sq_volume_of(&refs)
}

/// Non-negative root of [`simplex_sq_volume`].
pub fn simplex_volume(points: &[Vec<f64>]) -> Result<f64> {
    simplex_sq_volume(points).map(f64::sqrt)
}

fn sq_volume_of(points: &[&[f64]]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let k = points.len() - 1;
    let d = points[k].len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
    }
    if k > d {
        return Err(Error::InvalidSimplexOrder { k, d });
    }
    let base = points[k];
    let edges: Vec<Vec<f64>> = points[..k]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    if k == d {
        let det = determinant(edges) / factorial;
        return Ok(det * det);
    }
    let mut gram = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let dot: f64 = edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    Ok((determinant(gram) / (factorial * factorial)).max(0.0))
}

/// Determinant by Gaussian elimination with partial pivoting. A zero pivot
/// column means a singular matrix and an exact zero determinant.
fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(r);
            for (x, &p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * p;
            }
        }
    }
    det
}

// ── Normalization ────────────────────────────────────────────────────────────

/// Rescales every coordinate to `[0, 1]` by `(v - min) / (max - min)`.
/// Coordinates that are constant across the sample map to 0; their indices
/// are returned as a warning list.
pub fn normalize_unit_range(data: &MultiSample) -> (MultiSample, Vec<usize>) {
    let bounds = coordinate_bounds(std::iter::once(data));
    let constant: Vec<usize> = bounds
        .iter()
        .enumerate()
        .filter(|(_, (lo, hi))| lo == hi)
        .map(|(c, _)| c)
        .collect();
    (apply_unit_bounds(data, &bounds), constant)
}

/// Unit-rescales several same-dimension samples with coordinate bounds taken
/// over their union, preserving relative spread between them.
pub fn normalize_jointly(samples: &[&MultiSample]) -> Result<Vec<MultiSample>> {
    let dim = match samples.first() {
        Some(s) => s.dim(),
        None => return Ok(Vec::new()),
    };
    for s in samples {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.dim(),
            });
        }
    }
    let bounds = coordinate_bounds(samples.iter().copied());
    Ok(samples
        .iter()
        .map(|s| apply_unit_bounds(s, &bounds))
        .collect())
}

fn coordinate_bounds<'a>(samples: impl Iterator<Item = &'a MultiSample>) -> Vec<(f64, f64)> {
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    for ms in samples {
        if bounds.is_empty() {
            bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); ms.dim()];
        }
        for p in ms.points() {
            for (c, v) in p.iter().enumerate() {
                bounds[c].0 = bounds[c].0.min(*v);
                bounds[c].1 = bounds[c].1.max(*v);
            }
        }
    }
    bounds
}

fn apply_unit_bounds(data: &MultiSample, bounds: &[(f64, f64)]) -> MultiSample {
    let points = data
        .points()
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(c, v)| {
                    let (lo, hi) = bounds[c];
                    if hi == lo {
                        0.0
                    } else {
                        (v - lo) / (hi - lo)
                    }
                })
                .collect()
        })
        .collect();
    MultiSample {
        points,
        dim: data.dim,
        coord_labels: data.coord_labels.clone(),
        label: data.label.clone(),
    }
}

// ── Resampling ──────────────────────────────────────────────────────────────

/// Draws `num_resamples` tuples with replacement and records the metric's
/// statistic for each. Degenerate draws (repeated points) are kept; they
/// contribute zeros to the statistic distribution. Deterministic in the seed.
pub fn dispersion_sample(data: &MultiSample, cfg: &DispersionConfig) -> Result<DispersionSample> {
    cfg.validate_for(data.dim())?;
    let needed = cfg.metric.tuple_size();
    if data.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: data.len(),
        });
    }
    let normalized;
    let source = if cfg.normalize {
        normalized = normalize_unit_range(data).0;
        &normalized
    } else {
        data
    };
    let stats = resample_statistics(source, cfg)?;
    let label = format!("{} dispersion of {}", cfg.metric.name(), data.label());
    Ok(DispersionSample {
        stats: Sample::new(stats, label)?,
        config: *cfg,
    })
}

fn resample_statistics(data: &MultiSample, cfg: &DispersionConfig) -> Result<Vec<f64>> {
    let n = data.len();
    let tuple = cfg.metric.tuple_size();
    let mut out = Vec::with_capacity(cfg.num_resamples);
    let mut picks: Vec<&[f64]> = Vec::with_capacity(tuple);
    for idx in 0..cfg.num_resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(idx as u64);
        picks.clear();
        for _ in 0..tuple {
            picks.push(data.point(rng.random_range(0..n)));
        }
        let stat = match cfg.metric {
            DispersionMetric::L1 => l1_distance(picks[0], picks[1])?,
            DispersionMetric::L2 => l2_distance(picks[0], picks[1])?,
            DispersionMetric::Simplex { .. } => sq_volume_of(&picks)?.sqrt(),
        };
        out.push(stat);
    }
    Ok(out)
}

/// Compares the dispersion of two samples of equal dimension.
///
/// Both statistic distributions are resampled under the same configuration,
/// hence with shared derived seeds. Returns the dominance verdict between the
/// statistic samples (`LeftDominates` meaning `a` is more dispersed) and the
/// one-sided test whose null hypothesis is that `a` is at least as dispersed
/// as `b`.
///
/// When `cfg.normalize` is set, the unit rescaling uses coordinate bounds
/// taken over the union of both samples, so that relative spread between the
/// two is preserved.
pub fn dispersion_compare(
    a: &MultiSample,
    b: &MultiSample,
    cfg: &DispersionConfig,
    test_cfg: &TestConfig,
) -> Result<(DominanceVerdict, KsResult)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (sa, sb) = if cfg.normalize {
        let scaled = normalize_jointly(&[a, b])?;
        let raw_cfg = cfg.with_normalize(false);
        (
            dispersion_sample(&scaled[0], &raw_cfg)?,
            dispersion_sample(&scaled[1], &raw_cfg)?,
        )
    } else {
        (dispersion_sample(a, cfg)?, dispersion_sample(b, cfg)?)
    };
    let verdict = fsd_compare(&sa.stats, &sb.stats);
    let test = ks_one_sided_test(&sa.stats, &sb.stats, test_cfg)?;
    Ok((verdict, test))
}
