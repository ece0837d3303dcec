//! Full factorial experiment generation, parallel orchestration, and the
//! grouping of results into comparison cells.
//!
//! The standard experiment crosses four inputs at three levels each (81
//! combinations), runs every (scenario, design, combination) cell through the
//! heat model, and collects one dataset row per cell. `combo_id` is a stable
//! join key: the same id denotes the same level assignment in every cell, so
//! samples grouped for comparison are paired, not independent.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::dispersion::MultiSample;
use crate::error::{Error, Result};
use crate::heatsim::{
    simulate, BaseDemand, DesignOption, FactorLevels, Level, LevelSelection, Scenario,
    ScenarioKind, TechnologyParams,
};
use crate::sample::Sample;

// ── Factorial design ────────────────────────────────────────────────────────

/// Factor order of the standard experiment; enumeration is lexicographic over
/// this order with Low < Med < High, so combo 0 is all-low.
pub const STANDARD_FACTORS: [&str; 4] = [
    "operational_cost",
    "discount_rate",
    "cop",
    "emission_factor",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialDesign {
    factor_names: Vec<String>,
    combos: Vec<Vec<Level>>,
}

/// Cartesian product of the given factors, each of which must offer exactly
/// three levels. Combos are ordered lexicographically (first factor varies
/// slowest) and indexed by their position: `combo_id` 0..3^f.
pub fn enumerate_factorial(factors: &[(&str, &[Level])]) -> Result<FactorialDesign> {
    for (_, levels) in factors {
        if levels.len() != 3 {
            return Err(Error::WrongLevelCount);
        }
    }
    let mut names: Vec<String> = Vec::with_capacity(factors.len());
    for (name, _) in factors {
        if names.iter().any(|n| n == name) {
            return Err(Error::DuplicateFactor);
        }
        names.push((*name).to_string());
    }
    let f = factors.len();
    let total = 3usize.pow(f as u32);
    let mut combos = Vec::with_capacity(total);
    for id in 0..total {
        let mut assignment = Vec::with_capacity(f);
        for (i, (_, levels)) in factors.iter().enumerate() {
            let digit = (id / 3usize.pow((f - 1 - i) as u32)) % 3;
            assignment.push(levels[digit]);
        }
        combos.push(assignment);
    }
    Ok(FactorialDesign {
        factor_names: names,
        combos,
    })
}

impl FactorialDesign {
    /// The standard four-factor design (81 combinations).
    pub fn standard() -> FactorialDesign {
        let spec: Vec<(&str, &[Level])> = STANDARD_FACTORS
            .iter()
            .map(|name| (*name, &Level::ALL[..]))
            .collect();
        enumerate_factorial(&spec).expect("standard factorial is well-formed")
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn combos(&self) -> &[Vec<Level>] {
        &self.combos
    }

    pub fn num_combos(&self) -> usize {
        self.combos.len()
    }

    /// Interprets a combo as a heat-model level selection; only defined for
    /// designs with the standard factor list.
    pub fn selection(&self, combo_id: usize) -> Result<LevelSelection> {
        if self.factor_names != STANDARD_FACTORS {
            return Err(Error::config(
                "factorial.factors",
                "level selection requires the standard four factors",
            ));
        }
        let combo = self
            .combos
            .get(combo_id)
            .ok_or(Error::IncompleteDataset(format!("no combo {combo_id}")))?;
        Ok(LevelSelection {
            operational_cost: combo[0],
            discount_rate: combo[1],
            cop: combo[2],
            emission_factor: combo[3],
        })
    }
}

// ── Dataset ─────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub scenario: ScenarioKind,
    pub design: DesignOption,
    pub combo_id: usize,
    pub npc_mln_eur: f64,
    pub emissions_mton: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
struct DatasetMeta {
    config_hash: String,
    rows: usize,
}

/// A complete run: one row per (scenario, design, combo), sorted by that key,
/// tagged with the hash of the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDataset {
    rows: Vec<ExperimentRow>,
    config_hash: String,
}

impl ExperimentDataset {
    /// Validates row uniqueness and rectangular completeness: every present
    /// (scenario, design) cell must carry exactly the combo ids 0..n.
    pub fn new(mut rows: Vec<ExperimentRow>, config_hash: impl Into<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::IncompleteDataset("no rows".into()));
        }
        rows.sort_by_key(|r| (r.scenario, r.design, r.combo_id));
        let scenarios: Vec<ScenarioKind> = dedup_sorted(rows.iter().map(|r| r.scenario));
        let designs: Vec<DesignOption> = dedup_sorted(rows.iter().map(|r| r.design));
        let n_combos = rows.iter().map(|r| r.combo_id).max().unwrap() + 1;
        let expected = scenarios.len() * designs.len() * n_combos;
        if rows.len() != expected {
            return Err(Error::IncompleteDataset(format!(
                "{} rows, expected {expected} ({} scenarios × {} designs × {n_combos} combos)",
                rows.len(),
                scenarios.len(),
                designs.len(),
            )));
        }
        let mut idx = 0;
        for s in &scenarios {
            for d in &designs {
                for c in 0..n_combos {
                    let r = &rows[idx];
                    if (r.scenario, r.design, r.combo_id) != (*s, *d, c) {
                        return Err(Error::IncompleteDataset(format!(
                            "missing row ({}, {}, combo {c})",
                            s.name(),
                            d.name()
                        )));
                    }
                    idx += 1;
                }
            }
        }
        Ok(ExperimentDataset {
            rows,
            config_hash: config_hash.into(),
        })
    }

    pub fn rows(&self) -> &[ExperimentRow] {
        &self.rows
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn scenarios(&self) -> Vec<ScenarioKind> {
        dedup_sorted(self.rows.iter().map(|r| r.scenario))
    }

    pub fn designs(&self) -> Vec<DesignOption> {
        dedup_sorted(self.rows.iter().map(|r| r.design))
    }

    pub fn num_combos(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.combo_id)
            .max()
            .map_or(0, |m| m + 1)
    }
}

fn dedup_sorted<T: Ord + Copy>(it: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = it.collect();
    v.sort();
    v.dedup();
    v
}

// ── Orchestration ───────────────────────────────────────────────────────────

/// Runs every (scenario, design, combo) cell. Cells execute in parallel;
/// results are collected in deterministic row order regardless of scheduling.
pub fn run_experiment(
    designs: &[DesignOption],
    scenarios: &[Scenario],
    factorial: &FactorialDesign,
    levels: &FactorLevels,
    tech: &TechnologyParams,
    base: BaseDemand,
) -> Result<Vec<ExperimentRow>> {
    if scenarios.is_empty() {
        return Err(Error::NoScenarios);
    }
    if designs.is_empty() {
        return Err(Error::NoDesigns);
    }
    let mut tasks = Vec::new();
    for scenario in scenarios {
        for design in designs {
            for combo_id in 0..factorial.num_combos() {
                tasks.push((scenario, *design, combo_id));
            }
        }
    }
    let mut rows = tasks
        .into_par_iter()
        .map(|(scenario, design, combo_id)| {
            let selection = factorial.selection(combo_id)?;
            let inputs = levels.resolve(selection);
            let result = simulate(design, scenario, &inputs, tech, base).map_err(|e| {
                Error::SimulationCell {
                    scenario: scenario.kind.name().to_string(),
                    design: design.name().to_string(),
                    combo_id,
                    source: Box::new(e),
                }
            })?;
            Ok(ExperimentRow {
                scenario: scenario.kind,
                design,
                combo_id,
                npc_mln_eur: result.npc_mln_eur,
                emissions_mton: result.emissions_mton,
            })
        })
        .collect::<Result<Vec<ExperimentRow>>>()?;
    rows.sort_by_key(|r| (r.scenario, r.design, r.combo_id));
    Ok(rows)
}

/// The full standard pipeline for a configuration: all designs, the selected
/// scenarios (all three when `scenario_filter` is empty), standard factorial.
pub fn run_configured_experiment(
    cfg: &ModelConfig,
    scenario_filter: &[ScenarioKind],
    design_filter: &[DesignOption],
) -> Result<ExperimentDataset> {
    let kinds: Vec<ScenarioKind> = if scenario_filter.is_empty() {
        ScenarioKind::ALL.to_vec()
    } else {
        dedup_sorted(scenario_filter.iter().copied())
    };
    let designs: Vec<DesignOption> = if design_filter.is_empty() {
        DesignOption::ALL.to_vec()
    } else {
        dedup_sorted(design_filter.iter().copied())
    };
    let scenarios = kinds
        .iter()
        .map(|k| cfg.build_scenario(*k))
        .collect::<Result<Vec<Scenario>>>()?;
    let rows = run_experiment(
        &designs,
        &scenarios,
        &FactorialDesign::standard(),
        &cfg.levels,
        &cfg.technology,
        cfg.base_demand,
    )?;
    ExperimentDataset::new(rows, cfg.hash())
}

// ── Grouping ────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMode {
    /// One context per scenario; members are the designs.
    DesignWithinScenario,
    /// One context per design; members are the scenarios.
    ScenarioWithinDesign,
}

impl GroupingMode {
    pub fn name(&self) -> &'static str {
        match self {
            GroupingMode::DesignWithinScenario => "design_within_scenario",
            GroupingMode::ScenarioWithinDesign => "scenario_within_design",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Npc,
    Emissions,
}

impl OutputKind {
    pub fn name(&self) -> &'static str {
        match self {
            OutputKind::Npc => "npc",
            OutputKind::Emissions => "emissions",
        }
    }

    fn extract(&self, row: &ExperimentRow) -> f64 {
        match self {
            OutputKind::Npc => row.npc_mln_eur,
            OutputKind::Emissions => row.emissions_mton,
        }
    }
}

/// One comparison cell: the named members of a context, e.g. the three
/// designs under the green scenario.
#[derive(Debug, Clone)]
pub struct ScalarGroup {
    pub context: String,
    pub members: Vec<(String, Sample)>,
}

#[derive(Debug, Clone)]
pub struct VectorGroup {
    pub context: String,
    pub members: Vec<(String, MultiSample)>,
}

fn context_and_member(mode: GroupingMode, row: &ExperimentRow) -> (String, String) {
    match mode {
        GroupingMode::DesignWithinScenario => (
            row.scenario.name().to_string(),
            row.design.name().to_string(),
        ),
        GroupingMode::ScenarioWithinDesign => (
            row.design.name().to_string(),
            row.scenario.name().to_string(),
        ),
    }
}

/// Rows bucketed as context -> labeled member groups, borrowing the dataset.
type GroupedRows<'a> = Vec<(String, Vec<(String, Vec<&'a ExperimentRow>)>)>;

fn grouped_rows(ds: &ExperimentDataset, mode: GroupingMode) -> GroupedRows<'_> {
    let contexts: Vec<String> = match mode {
        GroupingMode::DesignWithinScenario => ds
            .scenarios()
            .iter()
            .map(|s| s.name().to_string())
            .collect(),
        GroupingMode::ScenarioWithinDesign => {
            ds.designs().iter().map(|d| d.name().to_string()).collect()
        }
    };
    let members: Vec<String> = match mode {
        GroupingMode::DesignWithinScenario => {
            ds.designs().iter().map(|d| d.name().to_string()).collect()
        }
        GroupingMode::ScenarioWithinDesign => ds
            .scenarios()
            .iter()
            .map(|s| s.name().to_string())
            .collect(),
    };
    contexts
        .into_iter()
        .map(|ctx| {
            let cells = members
                .iter()
                .map(|member| {
                    // Rows are sorted, so each cell's rows arrive by combo_id.
                    let rows = ds
                        .rows()
                        .iter()
                        .filter(|r| {
                            let (c, m) = context_and_member(mode, r);
                            c == ctx && m == *member
                        })
                        .collect();
                    (member.clone(), rows)
                })
                .collect();
            (ctx, cells)
        })
        .collect()
}

/// Per context, one sample per member over the chosen output. Group sizes all
/// equal the combo count; dataset completeness is validated on construction.
pub fn group_outputs(
    ds: &ExperimentDataset,
    mode: GroupingMode,
    output: OutputKind,
) -> Result<Vec<ScalarGroup>> {
    grouped_rows(ds, mode)
        .into_iter()
        .map(|(context, cells)| {
            let members = cells
                .into_iter()
                .map(|(member, rows)| {
                    let values: Vec<f64> = rows.iter().map(|r| output.extract(r)).collect();
                    let label = format!("{} {member} @ {context}", output.name());
                    Ok((member, Sample::new(values, label)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScalarGroup { context, members })
        })
        .collect()
}

/// Per context, one 2-dimensional (NPC, emissions) point cloud per member,
/// points ordered by combo_id.
pub fn group_vector_outputs(
    ds: &ExperimentDataset,
    mode: GroupingMode,
) -> Result<Vec<VectorGroup>> {
    grouped_rows(ds, mode)
        .into_iter()
        .map(|(context, cells)| {
            let members = cells
                .into_iter()
                .map(|(member, rows)| {
                    let points: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|r| vec![r.npc_mln_eur, r.emissions_mton])
                        .collect();
                    let ms = MultiSample::new(
                        points,
                        vec!["npc_mln_eur".to_string(), "emissions_mton".to_string()],
                        format!("{member} @ {context}"),
                    )?;
                    Ok((member, ms))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(VectorGroup { context, members })
        })
        .collect()
}

// ── Persistence ─────────────────────────────────────────────────────────────

const DATASET_HEADER: &str = "scenario,design,combo_id,npc_mln_eur,emissions_mton";

fn meta_path(csv_path: &Path) -> std::path::PathBuf {
    let mut os = csv_path.as_os_str().to_os_string();
    os.push(".meta.json");
    std::path::PathBuf::from(os)
}

/// Writes the dataset CSV plus a `<path>.meta.json` sidecar carrying the
/// config hash and row count. Floats are written in shortest round-trip form,
/// so a read-back reproduces them bit-for-bit.
pub fn write_dataset(ds: &ExperimentDataset, csv_path: &Path) -> Result<()> {
    let mut out = String::with_capacity(ds.rows().len() * 64);
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for r in ds.rows() {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.scenario.name(),
            r.design.name(),
            r.combo_id,
            r.npc_mln_eur,
            r.emissions_mton
        )
        .expect("string write");
    }
    fs::write(csv_path, out).map_err(|e| Error::io(csv_path, e))?;
    let meta = DatasetMeta {
        config_hash: ds.config_hash().to_string(),
        rows: ds.rows().len(),
    };
    let meta_json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    let mp = meta_path(csv_path);
    fs::write(&mp, meta_json).map_err(|e| Error::io(mp, e))?;
    Ok(())
}

pub fn read_dataset(csv_path: &Path) -> Result<ExperimentDataset> {
    let text = fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: csv_path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == DATASET_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(1, format!("unexpected header `{header}`")));
        }
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let scenario = ScenarioKind::parse(fields[0])
            .ok_or_else(|| parse_err(lineno, format!("unknown scenario `{}`", fields[0])))?;
        let design = DesignOption::parse(fields[1])
            .ok_or_else(|| parse_err(lineno, format!("unknown design `{}`", fields[1])))?;
        let combo_id: usize = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad combo_id: {e}")))?;
        let npc_mln_eur: f64 = fields[3]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad npc: {e}")))?;
        let emissions_mton: f64 = fields[4]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad emissions: {e}")))?;
        rows.push(ExperimentRow {
            scenario,
            design,
            combo_id,
            npc_mln_eur,
            emissions_mton,
        });
    }
    let mp = meta_path(csv_path);
    let meta_text = fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
    let meta: DatasetMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
        path: mp.clone(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    if meta.rows != rows.len() {
        return Err(Error::IncompleteDataset(format!(
            "sidecar declares {} rows, file has {}",
            meta.rows,
            rows.len()
        )));
    }
    ExperimentDataset::new(rows, meta.config_hash)
}

/// Guards analysis against data produced under a different configuration.
pub fn check_freshness(ds: &ExperimentDataset, cfg: &ModelConfig) -> Result<()> {
    let expected = cfg.hash();
    if ds.config_hash() != expected {
        return Err(Error::StaleDataset {
            dataset: ds.config_hash().to_string(),
            config: expected,
        });
    }
    Ok(())
}
