//! Runtime configuration: TOML schema, dotted-path overrides, validation and
//! content hashing.
//!
//! The full parameter set ships as a checked-in default (see
//! `defaults.toml`); a user file replaces it wholesale and `key=value`
//! overrides patch individual entries. The SHA-256 hash of the canonical JSON
//! serialization identifies a configuration, and datasets record it so that
//! analysis against a changed configuration is refused.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dispersion::{DispersionConfig, DispersionMetric};
use crate::error::{Error, Result};
use crate::heatsim::{BaseDemand, FactorLevels, Scenario, ScenarioKind, TechnologyParams};
use crate::ordering::{PValueMethod, TestConfig};

/// The checked-in default configuration, embedded at compile time.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("defaults.toml");

/// Scenario parameters as they appear in the file; the scenario name is the
/// section key, not a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub carbon_penalty_eur_per_mton: f64,
    pub demand_growth: f64,
    pub elec_price_eur_per_mwh: Vec<f64>,
    pub gas_price_eur_per_mwh: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSet {
    pub green: ScenarioParams,
    pub neutral: ScenarioParams,
    pub market: ScenarioParams,
}

impl ScenarioSet {
    pub fn params(&self, kind: ScenarioKind) -> &ScenarioParams {
        match kind {
            ScenarioKind::Green => &self.green,
            ScenarioKind::Neutral => &self.neutral,
            ScenarioKind::Market => &self.market,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    L1,
    L2,
    Simplex,
}

impl MetricChoice {
    pub fn to_metric(self, simplex_k: usize) -> DispersionMetric {
        match self {
            MetricChoice::L1 => DispersionMetric::L1,
            MetricChoice::L2 => DispersionMetric::L2,
            MetricChoice::Simplex => DispersionMetric::Simplex { k: simplex_k },
        }
    }
}

/// Statistical settings shared by the analysis commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub seed: u64,
    /// Bootstrap resamples for dispersion statistics.
    pub bootstrap_resamples: usize,
    pub alpha: f64,
    /// Simultaneous tests sharing the significance budget.
    pub num_comparisons: usize,
    pub metric: MetricChoice,
    /// Simplex order used when `metric = "simplex"`.
    pub simplex_k: usize,
    /// Unit-range normalization before dispersion resampling.
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub base_demand: BaseDemand,
    pub technology: TechnologyParams,
    pub scenarios: ScenarioSet,
    pub levels: FactorLevels,
    pub analysis: AnalysisConfig,
}

impl ModelConfig {
    /// The built-in defaults. Panics only if the embedded file is broken,
    /// which the test suite rules out.
    pub fn defaults() -> ModelConfig {
        Self::from_toml_str(DEFAULT_CONFIG_TOML, Path::new("<defaults>"))
            .expect("embedded default configuration must parse")
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<ModelConfig> {
        let cfg: ModelConfig = toml::from_str(text).map_err(|e| parse_error(origin, text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ModelConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// Loads `path` (or the defaults when absent) and applies `key=value`
    /// overrides addressed by dotted paths, e.g.
    /// `technology.capital_costs.d3_mln_eur=4.0`.
    pub fn load_with_overrides(path: Option<&Path>, overrides: &[String]) -> Result<ModelConfig> {
        let (text, origin) = match path {
            Some(p) => (
                fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
                p.to_path_buf(),
            ),
            None => (
                DEFAULT_CONFIG_TOML.to_string(),
                Path::new("<defaults>").to_path_buf(),
            ),
        };
        if overrides.is_empty() {
            return Self::from_toml_str(&text, &origin);
        }
        let mut doc: toml::Value =
            toml::from_str(&text).map_err(|e| parse_error(&origin, &text, &e))?;
        for entry in overrides {
            let (key, raw) = entry
                .split_once('=')
                .ok_or_else(|| Error::config(entry.clone(), "override must look like key=value"))?;
            apply_override(&mut doc, key.trim(), raw.trim())?;
        }
        let cfg: ModelConfig = doc
            .try_into()
            .map_err(|e| Error::config("<override result>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.base_demand.validate()?;
        self.technology.validate()?;
        self.build_scenarios()?;
        self.levels.validate()?;
        let a = &self.analysis;
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(Error::config(
                "analysis.alpha",
                format!("must lie strictly between 0 and 1, got {}", a.alpha),
            ));
        }
        if a.num_comparisons == 0 {
            return Err(Error::config(
                "analysis.num_comparisons",
                "must be at least 1",
            ));
        }
        if a.bootstrap_resamples < 100 {
            return Err(Error::config(
                "analysis.bootstrap_resamples",
                format!("need at least 100, got {}", a.bootstrap_resamples),
            ));
        }
        if a.metric == MetricChoice::Simplex && a.simplex_k < 1 {
            return Err(Error::config("analysis.simplex_k", "must be at least 1"));
        }
        Ok(())
    }

    /// All scenarios in canonical order (green, neutral, market).
    pub fn build_scenarios(&self) -> Result<Vec<Scenario>> {
        ScenarioKind::ALL
            .iter()
            .map(|kind| self.build_scenario(*kind))
            .collect()
    }

    pub fn build_scenario(&self, kind: ScenarioKind) -> Result<Scenario> {
        let p = self.scenarios.params(kind);
        Scenario::new(
            kind,
            p.carbon_penalty_eur_per_mton,
            p.demand_growth,
            p.elec_price_eur_per_mwh.clone(),
            p.gas_price_eur_per_mwh.clone(),
        )
    }

    /// Test settings for the pipeline's pairwise comparisons. `shared_inputs`
    /// is set because every comparison reuses the same factorial grid, which
    /// violates the independence assumption behind the p-values.
    pub fn test_config(&self) -> TestConfig {
        TestConfig {
            alpha: self.analysis.alpha,
            num_comparisons: self.analysis.num_comparisons,
            method: PValueMethod::Asymptotic,
            shared_inputs: true,
        }
    }

    pub fn dispersion_config(&self) -> DispersionConfig {
        DispersionConfig {
            metric: self.analysis.metric.to_metric(self.analysis.simplex_k),
            num_resamples: self.analysis.bootstrap_resamples,
            seed: self.analysis.seed,
            normalize: self.analysis.normalize,
        }
    }

    /// SHA-256 of the canonical JSON serialization, as lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_error(origin: &Path, text: &str, err: &toml::de::Error) -> Error {
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
        .unwrap_or(0);
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        reason: err.message().to_string(),
    }
}

/// Replaces the value at a dotted path. Every path segment, including the
/// final key, must already exist — overrides can change values but never
/// introduce new keys.
fn apply_override(doc: &mut toml::Value, key: &str, raw: &str) -> Result<()> {
    let mut node = &mut *doc;
    let segments: Vec<&str> = key.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::config(key, "empty path segment"));
    }
    for segment in &segments[..segments.len() - 1] {
        node = node
            .as_table_mut()
            .and_then(|t| t.get_mut(*segment))
            .ok_or_else(|| Error::config(key, format!("unknown section `{segment}`")))?;
    }
    let last = segments[segments.len() - 1];
    let slot = node
        .as_table_mut()
        .and_then(|t| t.get_mut(last))
        .ok_or_else(|| Error::config(key, format!("unknown key `{last}`")))?;
    *slot = parse_override_value(raw);
    Ok(())
}

/// Parses the right-hand side as a TOML literal (number, boolean, array,
/// quoted string); anything unparsable is taken as a bare string.
fn parse_override_value(raw: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Wrapper {
        v: toml::Value,
    }
    toml::from_str::<Wrapper>(&format!("v = {raw}"))
        .map(|w| w.v)
        .unwrap_or_else(|_| toml::Value::String(raw.to_string()))
}
