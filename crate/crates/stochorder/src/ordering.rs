//! First-order stochastic dominance and Kolmogorov–Smirnov comparisons.
//!
//! Two empirical CDFs are compared on the pooled set of support points, where
//! both step functions attain every value they ever take. Probabilities are
//! compared through integer cross-products (`i*m` vs `j*n`), so dominance
//! verdicts involve no floating-point tolerance.
//!
//! Conventions:
//! * `LeftDominates` means the left sample's CDF lies weakly below the
//!   right's everywhere and strictly below somewhere, i.e. the left sample is
//!   stochastically larger.
//! * `d_minus(x, y)` is `sup_t (F_y(t) - F_x(t))`, the statistic of the
//!   one-sided test whose null hypothesis is that `y` stochastically
//!   dominates `x` (`F_x >= F_y` everywhere). Large values are evidence
//!   against that null. The sup always includes the trivial value 0 attained
//!   beyond both supports.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::{Sample, SUPPORT_DEDUP_TOL};

// ── Types ───────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    /// Left CDF weakly below the right everywhere, strictly somewhere:
    /// the left sample is stochastically larger.
    LeftDominates,
    /// Mirror image: the right sample is stochastically larger.
    RightDominates,
    /// The CDFs agree at every pooled support point.
    Equal,
    /// The CDFs cross; neither dominates.
    Incomparable,
}

#[derive(Debug, Clone)]
pub struct DominanceVerdict {
    pub relation: DominanceRelation,
    /// Human-readable justification (pooled points inspected, crossings).
    pub note: String,
}

/// Outcome of a Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, Serialize)]
pub struct KsResult {
    /// Two-sided distance `sup_t |F_x(t) - F_y(t)|`.
    pub d_two_sided: f64,
    /// One-sided deviation `sup_t (F_y(t) - F_x(t))`, clamped at 0.
    pub d_minus: f64,
    /// Present unless the caller asked for distances only.
    pub p_value: Option<f64>,
    /// `p_value <= alpha / num_comparisons`; present iff `p_value` is.
    pub rejected: Option<bool>,
    pub n: usize,
    pub m: usize,
    /// True when both samples were produced from one shared input grid; the
    /// test then treats dependent samples as independent and its p-value
    /// should be read as approximate.
    pub shared_inputs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValueMethod {
    /// `p = exp(-2 d^2 nm / (n + m))`, the large-sample tail of the
    /// one-sided two-sample statistic.
    Asymptotic,
    /// Pooled-relabelling permutation test with plus-one smoothing:
    /// `p = (#{D >= observed} + 1) / (B + 1)`.
    Permutation { num_permutations: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct TestConfig {
    /// Family-wise significance level, in (0, 1).
    pub alpha: f64,
    /// Bonferroni divisor: number of simultaneous comparisons, >= 1.
    pub num_comparisons: usize,
    pub method: PValueMethod,
    /// Copied into [`KsResult::shared_inputs`].
    pub shared_inputs: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            alpha: 0.05,
            num_comparisons: 1,
            method: PValueMethod::Asymptotic,
            shared_inputs: false,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        bonferroni_level(self.alpha, self.num_comparisons)?;
        if let PValueMethod::Permutation {
            num_permutations, ..
        } = self.method
        {
            if num_permutations < 100 {
                return Err(Error::InsufficientPermutations(num_permutations));
            }
        }
        Ok(())
    }
}

// ── Pooled sweep ─────────────────────────────────────────────────────────────

/// Exact CDF differences over the pooled support. With `i = #{x <= t}` and
/// `j = #{y <= t}`, the signed difference `F_x - F_y` at `t` has numerator
/// `i*m - j*n` over the common denominator `n*m`.
struct Sweep {
    n: usize,
    m: usize,
    /// max of `i*m - j*n` (>= 0; the trailing point contributes 0).
    max_xy: i64,
    /// max of `j*n - i*m` (>= 0 likewise).
    max_yx: i64,
    /// Support value where each max is first attained.
    at_xy: f64,
    at_yx: f64,
    /// Pooled points where F_x > F_y, respectively F_x < F_y.
    strict_xy: usize,
    strict_yx: usize,
    points: usize,
}

impl Sweep {
    fn ks_numerator(&self) -> i64 {
        self.max_xy.max(self.max_yx)
    }

    fn denom(&self) -> f64 {
        (self.n as f64) * (self.m as f64)
    }
}

fn pooled_sweep(x: &Sample, y: &Sample) -> Sweep {
    let xv = x.values();
    let yv = y.values();
    let (n, m) = (xv.len(), yv.len());
    let (ni, mi) = (n as i64, m as i64);
    let mut sweep = Sweep {
        n,
        m,
        max_xy: 0,
        max_yx: 0,
        at_xy: f64::NAN,
        at_yx: f64::NAN,
        strict_xy: 0,
        strict_yx: 0,
        points: 0,
    };
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        let head = match (xv.get(i), yv.get(j)) {
            (Some(a), Some(b)) => a.min(*b),
            (Some(a), None) => *a,
            (None, Some(b)) => *b,
            (None, None) => unreachable!(),
        };
        let lim = head + SUPPORT_DEDUP_TOL;
        while i < n && xv[i] <= lim {
            i += 1;
        }
        while j < m && yv[j] <= lim {
            j += 1;
        }
        let diff = i as i64 * mi - j as i64 * ni;
        if diff > sweep.max_xy {
            sweep.max_xy = diff;
            sweep.at_xy = head;
        }
        if -diff > sweep.max_yx {
            sweep.max_yx = -diff;
            sweep.at_yx = head;
        }
        if diff > 0 {
            sweep.strict_xy += 1;
        } else if diff < 0 {
            sweep.strict_yx += 1;
        }
        sweep.points += 1;
    }
    sweep
}

// ── Distances and dominance ──────────────────────────────────────────────────

/// Two-sided Kolmogorov–Smirnov distance `sup_t |F_x(t) - F_y(t)|`.
pub fn ks_distance(x: &Sample, y: &Sample) -> f64 {
    let sweep = pooled_sweep(x, y);
    sweep.ks_numerator() as f64 / sweep.denom()
}

/// One-sided deviation `sup_t (F_y(t) - F_x(t))`, clamped at 0.
pub fn d_minus(x: &Sample, y: &Sample) -> f64 {
    let sweep = pooled_sweep(x, y);
    sweep.max_yx as f64 / sweep.denom()
}

/// Compares the empirical CDFs at every pooled support point, exactly.
pub fn fsd_compare(x: &Sample, y: &Sample) -> DominanceVerdict {
    let sweep = pooled_sweep(x, y);
    let denom = sweep.denom();
    let (relation, note) = match (sweep.max_xy > 0, sweep.max_yx > 0) {
        (false, false) => (
            DominanceRelation::Equal,
            format!(
                "identical empirical CDFs at all {} pooled support points",
                sweep.points
            ),
        ),
        (false, true) => (
            DominanceRelation::LeftDominates,
            format!(
                "left CDF at or below right at all {} pooled points, strictly below at {}",
                sweep.points, sweep.strict_yx
            ),
        ),
        (true, false) => (
            DominanceRelation::RightDominates,
            format!(
                "right CDF at or below left at all {} pooled points, strictly below at {}",
                sweep.points, sweep.strict_xy
            ),
        ),
        (true, true) => (
            DominanceRelation::Incomparable,
            format!(
                "CDFs cross: F_left-F_right reaches {:+.6} at {} and {:+.6} at {}",
                sweep.max_xy as f64 / denom,
                sweep.at_xy,
                -(sweep.max_yx as f64) / denom,
                sweep.at_yx
            ),
        ),
    };
    DominanceVerdict { relation, note }
}

/// Distances only; `p_value` and `rejected` are left empty.
pub fn ks_statistics(x: &Sample, y: &Sample) -> KsResult {
    let sweep = pooled_sweep(x, y);
    let denom = sweep.denom();
    KsResult {
        d_two_sided: sweep.ks_numerator() as f64 / denom,
        d_minus: sweep.max_yx as f64 / denom,
        p_value: None,
        rejected: None,
        n: sweep.n,
        m: sweep.m,
        shared_inputs: false,
    }
}

/// One-sided test of the null hypothesis that `y` stochastically dominates
/// `x` (`F_x >= F_y` everywhere). Small p-values reject that null.
pub fn ks_one_sided_test(x: &Sample, y: &Sample, cfg: &TestConfig) -> Result<KsResult> {
    cfg.validate()?;
    let sweep = pooled_sweep(x, y);
    let denom = sweep.denom();
    let d_two_sided = sweep.ks_numerator() as f64 / denom;
    let stat = sweep.max_yx as f64 / denom;
    let p = match cfg.method {
        PValueMethod::Asymptotic => asymptotic_p(stat, sweep.n, sweep.m),
        PValueMethod::Permutation {
            num_permutations,
            seed,
        } => permutation_p(x, y, num_permutations, seed, sweep.max_yx),
    };
    let adjusted = bonferroni_level(cfg.alpha, cfg.num_comparisons)?;
    Ok(KsResult {
        d_two_sided,
        d_minus: stat,
        p_value: Some(p),
        rejected: Some(p <= adjusted),
        n: sweep.n,
        m: sweep.m,
        shared_inputs: cfg.shared_inputs,
    })
}

/// Bonferroni-adjusted per-comparison level `alpha / num_comparisons`.
pub fn bonferroni_level(alpha: f64, num_comparisons: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if num_comparisons < 1 {
        return Err(Error::InvalidComparisons);
    }
    Ok(alpha / num_comparisons as f64)
}

fn asymptotic_p(d: f64, n: usize, m: usize) -> f64 {
    let nm = (n as f64) * (m as f64);
    (-2.0 * d * d * nm / (n + m) as f64).exp()
}

/// Pooled-relabelling permutation p-value. The statistic is compared through
/// its integer numerator, so ties with the observed value are exact. Each
/// permutation draws its generator from a counter-derived stream, which makes
/// the result independent of scheduling.
fn permutation_p(x: &Sample, y: &Sample, permutations: usize, seed: u64, observed: i64) -> f64 {
    let n = x.len();
    let m = y.len();
    let total = n + m;
    let (ni, mi) = (n as i64, m as i64);

    let mut pooled: Vec<f64> = Vec::with_capacity(total);
    pooled.extend_from_slice(x.values());
    pooled.extend_from_slice(y.values());
    pooled.sort_by(f64::total_cmp);

    // Evaluation points under the same merge rule as the observed sweep.
    let mut boundary = vec![false; total];
    let mut k = 0;
    while k < total {
        let lim = pooled[k] + SUPPORT_DEDUP_TOL;
        let mut e = k;
        while e + 1 < total && pooled[e + 1] <= lim {
            e += 1;
        }
        boundary[e] = true;
        k = e + 1;
    }

    let template: Vec<bool> = (0..total).map(|k| k < n).collect();
    let hits: u64 = (0..permutations)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let mut labels = template.clone();
            labels.shuffle(&mut rng);
            let (mut i, mut j) = (0i64, 0i64);
            let mut best = 0i64;
            for (k, is_x) in labels.iter().enumerate() {
                if *is_x {
                    i += 1;
                } else {
                    j += 1;
                }
                if boundary[k] {
                    let v = j * ni - i * mi;
                    if v > best {
                        best = v;
                    }
                }
            }
            u64::from(best >= observed)
        })
        .sum();
    (hits + 1) as f64 / (permutations + 1) as f64
}
