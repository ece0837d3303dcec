//! End-to-end report pipeline checks: table structure and internal
//! consistency, exported curve files, and agreement between reported KS
//! distances and distances recomputed from the exported step functions.

use std::collections::BTreeSet;
use std::path::Path;

use stochorder::config::ModelConfig;
use stochorder::experiment::run_configured_experiment;
use stochorder::ordering::DominanceRelation;
use stochorder::report::{build_full_report, format_table, AnalysisArtifacts, KsCell};
use stochorder::Error;

fn artifacts(dir: &Path) -> (ModelConfig, AnalysisArtifacts) {
    let cfg = ModelConfig::defaults();
    let ds = run_configured_experiment(&cfg, &[], &[]).unwrap();
    let art = build_full_report(&ds, &cfg, dir).unwrap();
    (cfg, art)
}

#[test]
fn report_contains_six_tables_in_canonical_order() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, art) = artifacts(dir.path());
    let shape: Vec<(String, String)> = art
        .report
        .tables
        .iter()
        .map(|t| (t.grouping.clone(), t.output.name().to_string()))
        .collect();
    let want = [
        ("design_within_scenario", "npc"),
        ("design_within_scenario", "emissions"),
        ("design_within_scenario", "dispersion"),
        ("scenario_within_design", "npc"),
        ("scenario_within_design", "emissions"),
        ("scenario_within_design", "dispersion"),
    ];
    assert_eq!(shape.len(), 6);
    for (got, want) in shape.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str()), want);
    }
    assert_eq!(art.report.config_hash, cfg.hash());
    for t in &art.report.tables {
        let (labels, contexts) = if t.grouping == "design_within_scenario" {
            (vec!["d1", "d2", "d3"], vec!["green", "neutral", "market"])
        } else {
            (vec!["green", "neutral", "market"], vec!["d1", "d2", "d3"])
        };
        assert_eq!(t.labels, labels);
        assert_eq!(t.contexts, contexts);
        // Full off-diagonal cell grid: 3 contexts x (3x3 - 3) ordered pairs.
        assert_eq!(t.cells.len(), 18);
    }
}

#[test]
fn table_cells_are_internally_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let (_, art) = artifacts(dir.path());
    let adjusted = art.report.adjusted_alpha;
    for t in &art.report.tables {
        for cell in &t.cells {
            let transpose = t.cell(&cell.col, &cell.row, &cell.context).unwrap();
            match cell.relation {
                DominanceRelation::Incomparable => {
                    assert!(matches!(cell.ks, KsCell::Na));
                    assert!(matches!(transpose.ks, KsCell::Na));
                    assert!(cell.p_value.is_none() && cell.rejected.is_none());
                }
                DominanceRelation::Equal => {
                    assert!(matches!(cell.ks, KsCell::Value(v) if v == 0.0));
                    assert!(matches!(transpose.ks, KsCell::Value(v) if v == 0.0));
                    assert_eq!(cell.p_value, Some(1.0));
                }
                DominanceRelation::RightDominates => {
                    // Column dominates the row: the KS distance is shown
                    // here and the transposed cell carries the dash.
                    assert!(matches!(cell.ks, KsCell::Value(v) if v > 0.0));
                    assert!(matches!(transpose.ks, KsCell::Dash));
                }
                DominanceRelation::LeftDominates => {
                    assert!(matches!(cell.ks, KsCell::Dash));
                    assert!(matches!(transpose.ks, KsCell::Value(v) if v > 0.0));
                }
            }
            if let Some(p) = cell.p_value {
                assert!((0.0..=1.0).contains(&p));
                assert_eq!(cell.rejected, Some(p <= adjusted));
            }
        }
    }
}

#[test]
fn emissions_tables_show_full_separation() {
    let dir = tempfile::tempdir().unwrap();
    let (_, art) = artifacts(dir.path());
    let t = art
        .report
        .tables
        .iter()
        .find(|t| t.grouping == "design_within_scenario" && t.output.name() == "emissions")
        .unwrap();
    // Emissions fall with the design index, so every lower-numbered design
    // dominates stochastically: the column cell shows KS = 1 when the
    // column is the larger design... the dominating (larger) member is the
    // lower-numbered design, so cells with col < row show the distance.
    for ctx in ["green", "neutral", "market"] {
        for (row, col) in [("d2", "d1"), ("d3", "d1"), ("d3", "d2")] {
            let cell = t.cell(row, col, ctx).unwrap();
            assert!(
                matches!(cell.ks, KsCell::Value(v) if v == 1.0),
                "expected KS 1.0 at ({row},{col},{ctx}), got {:?}",
                cell.ks
            );
            let transpose = t.cell(col, row, ctx).unwrap();
            assert!(matches!(transpose.ks, KsCell::Dash));
        }
    }
}

fn read_curve(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "value,cum_prob");
    lines
        .map(|l| {
            let (v, p) = l.split_once(',').unwrap();
            (v.parse().unwrap(), p.parse().unwrap())
        })
        .collect()
}

/// Two-sided KS distance between two exported ECDF step functions.
fn ks_between_curves(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let eval = |curve: &[(f64, f64)], t: f64| -> f64 {
        match curve.partition_point(|(v, _)| *v <= t) {
            0 => 0.0,
            i => curve[i - 1].1,
        }
    };
    a.iter()
        .chain(b)
        .map(|(v, _)| (eval(a, *v) - eval(b, *v)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn curve_files_cover_every_group_and_match_reported_ks() {
    let dir = tempfile::tempdir().unwrap();
    let (_, art) = artifacts(dir.path());
    // 2 groupings x 3 outputs x 3 contexts x 3 members.
    assert_eq!(art.report.curve_files.len(), 54);
    assert_eq!(art.curve_paths.len(), 54);
    let names: BTreeSet<&str> = art
        .report
        .curve_files
        .iter()
        .map(|c| c.file.as_str())
        .collect();
    assert_eq!(names.len(), 54, "curve file names must be unique");
    for c in &art.report.curve_files {
        assert_eq!(
            c.file,
            format!("{}_{}_{}_{}.csv", c.output, c.grouping, c.context, c.label)
        );
        let path = dir.path().join(&c.file);
        let points = read_curve(&path);
        assert_eq!(
            points.last().unwrap().1,
            1.0,
            "{}: cdf must end at 1",
            c.file
        );
        assert!(points
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    }

    // Reported KS values must agree with the exported step functions.
    let find = |output: &str, grouping: &str, context: &str, label: &str| {
        let c = art
            .report
            .curve_files
            .iter()
            .find(|c| {
                c.output == output
                    && c.grouping == grouping
                    && c.context == context
                    && c.label == label
            })
            .unwrap();
        read_curve(&dir.path().join(&c.file))
    };
    let mut checked = 0;
    for t in &art.report.tables {
        for cell in &t.cells {
            if let KsCell::Value(v) = cell.ks {
                let row = find(t.output.name(), &t.grouping, &cell.context, &cell.row);
                let col = find(t.output.name(), &t.grouping, &cell.context, &cell.col);
                let recomputed = ks_between_curves(&row, &col);
                assert!(
                    (recomputed - v).abs() <= 1e-9,
                    "{} {} ({} vs {} @ {}): reported {v}, recomputed {recomputed}",
                    t.grouping,
                    t.output.name(),
                    cell.row,
                    cell.col,
                    cell.context
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 10, "only {checked} KS cells verified");
}

#[test]
fn stale_dataset_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ModelConfig::defaults();
    let ds = run_configured_experiment(&cfg, &[], &[]).unwrap();
    let mut changed = ModelConfig::defaults();
    changed.analysis.seed += 1;
    let err = build_full_report(&ds, &changed, dir.path()).unwrap_err();
    assert!(matches!(err, Error::StaleDataset { .. }), "got {err:?}");
}

#[test]
fn report_json_round_trips_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let (_, art) = artifacts(dir.path());
    let text = std::fs::read_to_string(&art.report_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["adjusted_alpha_display"], "0.0167");
    assert_eq!(parsed["tables"].as_array().unwrap().len(), 6);
    assert_eq!(parsed["curve_files"].as_array().unwrap().len(), 54);
    assert_eq!(parsed["shared_inputs"], true);
    // Dash and NA cells serialize as strings, values as numbers.
    let cells = parsed["tables"][0]["cells"].as_array().unwrap();
    assert!(cells
        .iter()
        .all(|c| c["ks"].is_number() || c["ks"] == "-" || c["ks"] == "NA"));

    for t in &art.report.tables {
        let rendered = format_table(t);
        assert!(rendered.contains('/'), "triples joined with slashes");
        for label in &t.labels {
            assert!(rendered.contains(label.as_str()));
        }
    }
}
