//! Decision support for comparing alternatives under uncertainty via
//! stochastic ordering.
//!
//! The crate has three layers:
//!
//! - **Ordering statistics** ([`sample`], [`ordering`], [`dispersion`]):
//!   empirical CDFs, first-order stochastic dominance verdicts, one-sided
//!   Kolmogorov–Smirnov tests with Bonferroni correction, and dispersion
//!   orderings built from resampled pair-distance and simplex-volume
//!   statistics.
//! - **Domain model** ([`heatsim`], [`config`], [`experiment`]): a
//!   deterministic 20-year district-heating cost model, its TOML
//!   configuration, and the full factorial experiment harness producing
//!   (NPC, emissions) datasets.
//! - **Reporting** ([`report`]): pairwise dominance/KS/p-value tables, CDF
//!   curve CSV exports, and a machine-readable JSON report.
//!
//! Everything is deterministic: resampling derives one RNG stream per
//! resample index from a configured seed, so results are independent of
//! thread scheduling, and repeated runs are byte-identical.
//!
//! # Example
//!
//! ```
//! use stochorder::ordering::{fsd_compare, DominanceRelation};
//! use stochorder::sample::Sample;
//!
//! let a = Sample::new(vec![1.0, 2.0, 3.0], "a")?;
//! let b = Sample::new(vec![4.0, 5.0, 6.0], "b")?;
//! // Every value of `b` exceeds every value of `a`, so `b` is
//! // stochastically larger.
//! assert_eq!(fsd_compare(&a, &b).relation, DominanceRelation::RightDominates);
//! # Ok::<(), stochorder::Error>(())
//! ```

pub mod config;
pub mod dispersion;
pub mod error;
pub mod experiment;
pub mod heatsim;
pub mod ordering;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
