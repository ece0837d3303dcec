//! Analysis artefacts: pairwise dominance/KS/p-value tables, CDF curve
//! exports, and the JSON report tying them together.
//!
//! Table cell convention, for ordered pair (row, column) within a context:
//! the KS distance appears in the cell iff the column's CDF lies weakly below
//! the row's (the column variable is stochastically larger — it "dominates");
//! a dash marks the transposed cell; NA marks both cells when the CDFs cross,
//! and no hypothesis test is performed there. Equal distributions carry a
//! zero KS value on both sides. The p-value in a cell tests the null
//! hypothesis that the column dominates the row.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::ser::Serializer;
use serde::Serialize;

use crate::config::ModelConfig;
use crate::dispersion::{dispersion_sample, normalize_jointly, DispersionConfig, MultiSample};
use crate::error::{Error, Result};
use crate::experiment::{
    check_freshness, group_outputs, group_vector_outputs, ExperimentDataset, GroupingMode,
    OutputKind, ScalarGroup, VectorGroup,
};
use crate::ordering::{
    bonferroni_level, fsd_compare, ks_one_sided_test, DominanceRelation, TestConfig,
};
use crate::sample::{EmpiricalCdf, Sample};

// ── Table types ─────────────────────────────────────────────────────────────

/// KS entry of one directed cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KsCell {
    Value(f64),
    /// Dominance runs the other way; the value sits in the transposed cell.
    Dash,
    /// The CDFs cross; no distance or test is reported.
    Na,
}

impl Serialize for KsCell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KsCell::Value(v) => s.serialize_f64(*v),
            KsCell::Dash => s.serialize_str("-"),
            KsCell::Na => s.serialize_str("NA"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCell {
    pub row: String,
    pub col: String,
    pub context: String,
    pub relation: DominanceRelation,
    pub ks: KsCell,
    /// Null hypothesis: the column dominates the row. Absent when the CDFs
    /// cross.
    pub p_value: Option<f64>,
    /// p ≤ adjusted alpha, exactly. Absent with the p-value.
    pub rejected: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableAxis {
    Design,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableOutput {
    Npc,
    Emissions,
    Dispersion,
}

impl TableOutput {
    pub fn name(&self) -> &'static str {
        match self {
            TableOutput::Npc => "npc",
            TableOutput::Emissions => "emissions",
            TableOutput::Dispersion => "dispersion",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairwiseTable {
    pub axis: TableAxis,
    pub output: TableOutput,
    pub grouping: String,
    /// Row/column labels (the compared members), canonical order.
    pub labels: Vec<String>,
    /// Context names (the third dimension of every cell triple).
    pub contexts: Vec<String>,
    /// One entry per ordered label pair per context, ordered (row, col,
    /// context) with all three loops in canonical order.
    pub cells: Vec<PairCell>,
}

impl PairwiseTable {
    pub fn cell(&self, row: &str, col: &str, context: &str) -> Option<&PairCell> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.col == col && c.context == context)
    }
}

// ── Table construction ──────────────────────────────────────────────────────

fn axis_of(mode: GroupingMode) -> TableAxis {
    match mode {
        GroupingMode::DesignWithinScenario => TableAxis::Design,
        GroupingMode::ScenarioWithinDesign => TableAxis::Scenario,
    }
}

fn build_table(
    groups: &[ScalarGroup],
    output: TableOutput,
    mode: GroupingMode,
    test_cfg: &TestConfig,
) -> Result<PairwiseTable> {
    if groups.is_empty() {
        return Err(Error::IncompleteDataset("no groups to tabulate".into()));
    }
    test_cfg.validate()?;
    let labels: Vec<String> = groups[0].members.iter().map(|(n, _)| n.clone()).collect();
    let size = groups[0]
        .members
        .first()
        .map(|(_, s)| s.len())
        .ok_or_else(|| Error::IncompleteDataset("empty group".into()))?;
    for g in groups {
        let names: Vec<String> = g.members.iter().map(|(n, _)| n.clone()).collect();
        if names != labels {
            return Err(Error::IncompleteDataset(format!(
                "group `{}` members {names:?} differ from {labels:?}",
                g.context
            )));
        }
        for (_, s) in &g.members {
            if s.len() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: s.len(),
                });
            }
        }
    }
    let contexts: Vec<String> = groups.iter().map(|g| g.context.clone()).collect();
    let mut cells = Vec::new();
    for row in &labels {
        for col in &labels {
            if row == col {
                continue;
            }
            for g in groups {
                let row_sample = &g.members.iter().find(|(n, _)| n == row).unwrap().1;
                let col_sample = &g.members.iter().find(|(n, _)| n == col).unwrap().1;
                cells.push(make_cell(
                    row, col, &g.context, row_sample, col_sample, test_cfg,
                )?);
            }
        }
    }
    Ok(PairwiseTable {
        axis: axis_of(mode),
        output,
        grouping: mode.name().to_string(),
        labels,
        contexts,
        cells,
    })
}

fn make_cell(
    row: &str,
    col: &str,
    context: &str,
    row_sample: &Sample,
    col_sample: &Sample,
    test_cfg: &TestConfig,
) -> Result<PairCell> {
    let verdict = fsd_compare(row_sample, col_sample);
    let (ks, p_value, rejected) = match verdict.relation {
        DominanceRelation::Incomparable => (KsCell::Na, None, None),
        relation => {
            let test = ks_one_sided_test(row_sample, col_sample, test_cfg)?;
            let ks = match relation {
                // Right = column stochastically larger: its CDF lies below.
                DominanceRelation::RightDominates => KsCell::Value(test.d_two_sided),
                DominanceRelation::LeftDominates => KsCell::Dash,
                DominanceRelation::Equal => KsCell::Value(0.0),
                DominanceRelation::Incomparable => unreachable!(),
            };
            (ks, test.p_value, test.rejected)
        }
    };
    Ok(PairCell {
        row: row.to_string(),
        col: col.to_string(),
        context: context.to_string(),
        relation: verdict.relation,
        ks,
        p_value,
        rejected,
    })
}

/// Mean-ordering table over scalar outputs (the Tables 3–6 analogues).
pub fn pairwise_dominance_table(
    groups: &[ScalarGroup],
    output: OutputKind,
    mode: GroupingMode,
    test_cfg: &TestConfig,
) -> Result<PairwiseTable> {
    let out = match output {
        OutputKind::Npc => TableOutput::Npc,
        OutputKind::Emissions => TableOutput::Emissions,
    };
    build_table(groups, out, mode, test_cfg)
}

/// Resamples each member's dispersion statistic once, with shared derived
/// seeds across members. Under `cfg.normalize` the unit rescaling uses
/// bounds over the union of all members in a context.
pub fn dispersion_stat_groups(
    groups: &[VectorGroup],
    cfg: &DispersionConfig,
) -> Result<Vec<ScalarGroup>> {
    groups
        .iter()
        .map(|g| {
            let raw: Vec<&MultiSample> = g.members.iter().map(|(_, m)| m).collect();
            let scaled;
            let sources: Vec<&MultiSample> = if cfg.normalize {
                scaled = normalize_jointly(&raw)?;
                scaled.iter().collect()
            } else {
                raw
            };
            let resample_cfg = cfg.with_normalize(false);
            let members = g
                .members
                .iter()
                .zip(&sources)
                .map(|((name, _), ms)| {
                    Ok((name.clone(), dispersion_sample(ms, &resample_cfg)?.stats))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScalarGroup {
                context: g.context.clone(),
                members,
            })
        })
        .collect()
}

/// Dispersion-ordering table over resampled statistics (Tables 7–8
/// analogues). A KS value at (row, col) means the column's statistic is
/// stochastically larger — the column member is more dispersed.
pub fn dispersion_table(
    groups: &[VectorGroup],
    disp_cfg: &DispersionConfig,
    mode: GroupingMode,
    test_cfg: &TestConfig,
) -> Result<PairwiseTable> {
    let stats = dispersion_stat_groups(groups, disp_cfg)?;
    build_table(&stats, TableOutput::Dispersion, mode, test_cfg)
}

// ── Curve export ────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfCurve {
    pub label: String,
    /// Step points (value, cumulative probability), sorted by value, ending
    /// at probability 1.
    pub points: Vec<(f64, f64)>,
}

/// Step-point list of a sample's empirical CDF.
pub fn cdf_curve(sample: &Sample) -> CdfCurve {
    let cdf = EmpiricalCdf::from_sample(sample);
    CdfCurve {
        label: sample.label().to_string(),
        points: cdf.support().iter().copied().zip(cdf.probs()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRef {
    pub output: String,
    pub grouping: String,
    pub context: String,
    pub label: String,
    pub file: String,
}

fn curve_file_name(output: &str, grouping: &str, context: &str, label: &str) -> String {
    format!("{output}_{grouping}_{context}_{label}.csv")
}

/// Writes one `value,cum_prob` CSV per (context, member) and returns the
/// references. Floats use shortest round-trip formatting.
pub fn export_cdf_curves(
    groups: &[ScalarGroup],
    output: &str,
    grouping: &str,
    out_dir: &Path,
) -> Result<Vec<CurveRef>> {
    if groups.is_empty() {
        return Err(Error::IncompleteDataset("no groups to export".into()));
    }
    let mut refs = Vec::new();
    for g in groups {
        for (name, sample) in &g.members {
            let curve = cdf_curve(sample);
            let file = curve_file_name(output, grouping, &g.context, name);
            let path = out_dir.join(&file);
            let mut text = String::from("value,cum_prob\n");
            for (v, p) in &curve.points {
                writeln!(text, "{v},{p}").expect("string write");
            }
            fs::write(&path, text).map_err(|e| Error::io(path.clone(), e))?;
            refs.push(CurveRef {
                output: output.to_string(),
                grouping: grouping.to_string(),
                context: g.context.clone(),
                label: name.clone(),
                file,
            });
        }
    }
    Ok(refs)
}

// ── Report assembly ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config_hash: String,
    pub alpha: f64,
    pub num_comparisons: usize,
    /// Bonferroni-adjusted level, full precision.
    pub adjusted_alpha: f64,
    /// The adjusted level to three significant figures, e.g. "0.0167".
    pub adjusted_alpha_display: String,
    /// The compared samples share their input grid, so p-values rest on an
    /// independence assumption the data violates.
    pub shared_inputs: bool,
    pub tables: Vec<PairwiseTable>,
    pub curve_files: Vec<CurveRef>,
}

pub fn render_report(
    tables: Vec<PairwiseTable>,
    curve_files: Vec<CurveRef>,
    config_hash: impl Into<String>,
    test_cfg: &TestConfig,
) -> Result<Report> {
    if tables.is_empty() {
        return Err(Error::IncompleteDataset("no tables to report".into()));
    }
    let adjusted = bonferroni_level(test_cfg.alpha, test_cfg.num_comparisons)?;
    Ok(Report {
        config_hash: config_hash.into(),
        alpha: test_cfg.alpha,
        num_comparisons: test_cfg.num_comparisons,
        adjusted_alpha: adjusted,
        adjusted_alpha_display: format_sig(adjusted, 3),
        shared_inputs: test_cfg.shared_inputs,
        tables,
        curve_files,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Artefact paths produced by a full analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisArtifacts {
    pub report: Report,
    pub report_path: PathBuf,
    pub curve_paths: Vec<PathBuf>,
}

/// The complete analysis pipeline: freshness check, four mean-ordering
/// tables, two dispersion tables, CDF curves for every compared sample, and
/// `report.json`, all under `out_dir`.
pub fn build_full_report(
    ds: &ExperimentDataset,
    cfg: &ModelConfig,
    out_dir: &Path,
) -> Result<AnalysisArtifacts> {
    check_freshness(ds, cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let test_cfg = cfg.test_config();
    let disp_cfg = cfg.dispersion_config();
    let mut tables = Vec::new();
    let mut curves = Vec::new();
    for mode in [
        GroupingMode::DesignWithinScenario,
        GroupingMode::ScenarioWithinDesign,
    ] {
        for output in [OutputKind::Npc, OutputKind::Emissions] {
            let groups = group_outputs(ds, mode, output)?;
            tables.push(pairwise_dominance_table(&groups, output, mode, &test_cfg)?);
            curves.extend(export_cdf_curves(
                &groups,
                output.name(),
                mode.name(),
                out_dir,
            )?);
        }
        let vgroups = group_vector_outputs(ds, mode)?;
        let stat_groups = dispersion_stat_groups(&vgroups, &disp_cfg)?;
        tables.push(build_table(
            &stat_groups,
            TableOutput::Dispersion,
            mode,
            &test_cfg,
        )?);
        curves.extend(export_cdf_curves(
            &stat_groups,
            TableOutput::Dispersion.name(),
            mode.name(),
            out_dir,
        )?);
    }
    // Canonical table order: outputs within grouping mode, npc first.
    tables.sort_by_key(|t| {
        let grouping_rank = (t.grouping != GroupingMode::DesignWithinScenario.name()) as usize;
        let output_rank = match t.output {
            TableOutput::Npc => 0,
            TableOutput::Emissions => 1,
            TableOutput::Dispersion => 2,
        };
        (grouping_rank, output_rank)
    });
    let curve_paths: Vec<PathBuf> = curves.iter().map(|c| out_dir.join(&c.file)).collect();
    let report = render_report(tables, curves, ds.config_hash(), &test_cfg)?;
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, report.to_json()).map_err(|e| Error::io(report_path.clone(), e))?;
    Ok(AnalysisArtifacts {
        report,
        report_path,
        curve_paths,
    })
}

// ── Formatting ──────────────────────────────────────────────────────────────

/// `v` to `sig` significant figures using plain decimal notation.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).clamp(0, 12) as usize;
    format!("{v:.decimals$}")
}

fn format_p(p: Option<f64>, rejected: Option<bool>) -> String {
    match p {
        None => "NA".to_string(),
        Some(p) => {
            let body = if p < 1e-4 {
                "<0.001".to_string()
            } else {
                format_sig(p, 3)
            };
            if rejected == Some(true) {
                format!("{body}*")
            } else {
                body
            }
        }
    }
}

fn format_ks(cell: &KsCell) -> String {
    match cell {
        KsCell::Value(v) => format_sig(*v, 3),
        KsCell::Dash => "-".to_string(),
        KsCell::Na => "NA".to_string(),
    }
}

/// Human-readable rendering with the slash-joined per-context triples: a KS
/// block and a p-value block (`*` marks rejections at the adjusted level).
pub fn format_table(table: &PairwiseTable) -> String {
    let mut out = String::new();
    let contexts = table.contexts.join("/");
    writeln!(
        out,
        "{} — KS distances (contexts: {contexts}; value shown when the column dominates the row)",
        table.output.name()
    )
    .unwrap();
    let render = |out: &mut String, f: &dyn Fn(&PairCell) -> String| {
        let mut widths = vec![table.labels.iter().map(|l| l.len()).max().unwrap_or(0)];
        let mut grid: Vec<Vec<String>> = Vec::new();
        for row in &table.labels {
            let mut line = Vec::new();
            for col in &table.labels {
                if row == col {
                    line.push(".".to_string());
                    continue;
                }
                let triple: Vec<String> = table
                    .contexts
                    .iter()
                    .map(|ctx| table.cell(row, col, ctx).map(f).unwrap_or_default())
                    .collect();
                line.push(triple.join("/"));
            }
            grid.push(line);
        }
        for c in 0..table.labels.len() {
            let w = grid
                .iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(table.labels[c].len()))
                .max()
                .unwrap();
            widths.push(w);
        }
        let mut header = format!("{:w$}", "", w = widths[0]);
        for (c, label) in table.labels.iter().enumerate() {
            write!(header, "  {label:>w$}", w = widths[c + 1]).unwrap();
        }
        out.push_str(&header);
        out.push('\n');
        for (r, row) in table.labels.iter().enumerate() {
            let mut line = format!("{row:w$}", w = widths[0]);
            for c in 0..table.labels.len() {
                write!(line, "  {:>w$}", grid[r][c], w = widths[c + 1]).unwrap();
            }
            out.push_str(&line);
            out.push('\n');
        }
    };
    render(&mut out, &|cell| format_ks(&cell.ks));
    writeln!(out, "p-values (null: column dominates row)").unwrap();
    render(&mut out, &|cell| format_p(cell.p_value, cell.rejected));
    out
}
