//! Acceptance gate: one test per criterion, each printing a PASS line.
//!
//! Exact criteria assert equality or bit-identity; qualitative criteria
//! assert verdict directions only; property criteria run randomized suites
//! with fixed seeds and demand zero violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stochorder::config::ModelConfig;
use stochorder::dispersion::{
    dispersion_compare, dispersion_sample, normalize_jointly, simplex_sq_volume, simplex_volume,
    DispersionConfig, DispersionMetric, MultiSample,
};
use stochorder::experiment::{
    group_outputs, group_vector_outputs, run_configured_experiment, write_dataset,
    ExperimentDataset, GroupingMode, OutputKind,
};
use stochorder::ordering::{
    d_minus, fsd_compare, ks_distance, ks_one_sided_test, DominanceRelation, PValueMethod,
    TestConfig,
};
use stochorder::report::{build_full_report, dispersion_stat_groups};
use stochorder::sample::Sample;

fn default_dataset() -> ExperimentDataset {
    run_configured_experiment(&ModelConfig::defaults(), &[], &[]).unwrap()
}

fn member<'a, T>(members: &'a [(String, T)], name: &str) -> &'a T {
    &members.iter().find(|(n, _)| n == name).unwrap().1
}

fn standard_gaussians(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}

#[test]
fn acceptance_01_factorial_structure() {
    let ds = default_dataset();
    assert_eq!(ds.num_combos(), 81);
    assert_eq!(ds.rows().len(), 729);
    for scenario in ds.scenarios() {
        for design in ds.designs() {
            let cell = ds
                .rows()
                .iter()
                .filter(|r| r.scenario == scenario && r.design == design)
                .count();
            assert_eq!(cell, 81, "cell ({scenario:?}, {design:?})");
        }
    }
    println!("ACCEPTANCE 1 (factorial structure: 81 combos per cell, 729 rows): PASS");
}

#[test]
fn acceptance_02_emissions_full_separation() {
    let ds = default_dataset();
    let groups = group_outputs(
        &ds,
        GroupingMode::DesignWithinScenario,
        OutputKind::Emissions,
    )
    .unwrap();
    assert_eq!(groups.len(), 3);
    for g in &groups {
        let d1 = member(&g.members, "d1");
        let d2 = member(&g.members, "d2");
        let d3 = member(&g.members, "d3");
        for (a, b) in [(d1, d2), (d2, d3), (d1, d3)] {
            assert_eq!(
                ks_distance(a, b),
                1.0,
                "emissions KS must be exactly 1 in {}",
                g.context
            );
            assert_eq!(
                fsd_compare(a, b).relation,
                DominanceRelation::LeftDominates,
                "emissions ordering violated in {}",
                g.context
            );
        }
    }
    println!("ACCEPTANCE 2 (emissions separation: KS = 1, D1 > D2 > D3 in every scenario): PASS");
}

#[test]
fn acceptance_03_npc_ordering_reversal() {
    let ds = default_dataset();
    let groups = group_outputs(&ds, GroupingMode::DesignWithinScenario, OutputKind::Npc).unwrap();
    let verdict = |ctx: &str, a: &str, b: &str| {
        let g = groups.iter().find(|g| g.context == ctx).unwrap();
        fsd_compare(member(&g.members, a), member(&g.members, b)).relation
    };
    // Market: cheaper designs are stochastically smaller, D1 < D2 < D3.
    assert_eq!(
        verdict("market", "d1", "d2"),
        DominanceRelation::RightDominates,
        "market: d2 must dominate d1"
    );
    assert_eq!(
        verdict("market", "d2", "d3"),
        DominanceRelation::RightDominates,
        "market: d3 must dominate d2"
    );
    // Green: the ordering reverses, D3 < D2 < D1.
    assert_eq!(
        verdict("green", "d1", "d2"),
        DominanceRelation::LeftDominates,
        "green: d1 must dominate d2"
    );
    assert_eq!(
        verdict("green", "d2", "d3"),
        DominanceRelation::LeftDominates,
        "green: d2 must dominate d3"
    );
    println!("ACCEPTANCE 3 (NPC ordering: market D1<D2<D3, green reversed): PASS");
}

#[test]
fn acceptance_04_bonferroni_level_in_report() {
    let cfg = ModelConfig::defaults();
    let ds = default_dataset();
    let dir = tempfile::tempdir().unwrap();
    let artifacts = build_full_report(&ds, &cfg, dir.path()).unwrap();
    assert_eq!(artifacts.report.alpha, 0.05);
    assert_eq!(artifacts.report.num_comparisons, 3);
    assert_eq!(artifacts.report.adjusted_alpha_display, "0.0167");
    assert!((artifacts.report.adjusted_alpha - 0.05 / 3.0).abs() < 1e-15);
    println!("ACCEPTANCE 4 (Bonferroni: adjusted level 0.0167 recorded): PASS");
}

#[test]
fn acceptance_05_one_sided_test_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA11B8);
    let mut close = 0;
    let total = 200;
    for pair in 0..total {
        let x = Sample::new(standard_gaussians(&mut rng, 20), "x").unwrap();
        let y = Sample::new(standard_gaussians(&mut rng, 20), "y").unwrap();
        let asym = ks_one_sided_test(
            &x,
            &y,
            &TestConfig {
                method: PValueMethod::Asymptotic,
                ..TestConfig::default()
            },
        )
        .unwrap();
        let perm = ks_one_sided_test(
            &x,
            &y,
            &TestConfig {
                method: PValueMethod::Permutation {
                    num_permutations: 10_000,
                    seed: 1000 + pair as u64,
                },
                ..TestConfig::default()
            },
        )
        .unwrap();
        if (asym.p_value.unwrap() - perm.p_value.unwrap()).abs() <= 0.05 {
            close += 1;
        }
    }
    let frac = close as f64 / total as f64;
    assert!(frac >= 0.95, "only {frac} of pairs within 0.05");
    println!(
        "ACCEPTANCE 5 (one-sided test calibration: asymptotic vs permutation within 0.05 for {:.1}% of pairs): PASS",
        frac * 100.0
    );
}

#[test]
fn acceptance_06_simplex_volume_oracles() {
    fn shoelace(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        0.5 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1])).abs()
    }
    fn naive_det(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(cc, _)| *cc != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * naive_det(&minor)
            })
            .sum()
    }
    fn cayley_menger_sq(points: &[Vec<f64>]) -> f64 {
        let k = points.len() - 1;
        let size = k + 2;
        let mut b = vec![vec![0.0; size]; size];
        b[0][1..].fill(1.0);
        for row in b.iter_mut().skip(1) {
            row[0] = 1.0;
        }
        for (i, pi) in points.iter().enumerate() {
            for (j, pj) in points.iter().enumerate() {
                b[i + 1][j + 1] = pi
                    .iter()
                    .zip(pj)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>();
            }
        }
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * naive_det(&b) / (2f64.powi(k as i32) * factorial * factorial)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x51F1);
    for _ in 0..1000 {
        let tri: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let vol = simplex_volume(&tri).unwrap();
        let area = shoelace(&tri[0], &tri[1], &tri[2]);
        assert!(
            (vol - area).abs() <= 1e-10 * area.max(1e-12),
            "gram {vol} vs shoelace {area}"
        );
    }
    let mut compared = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=4usize);
        let k = rng.random_range(1..=d);
        let pts: Vec<Vec<f64>> = (0..=k)
            .map(|_| (0..d).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let gram = simplex_sq_volume(&pts).unwrap();
        let cm = cayley_menger_sq(&pts);
        if gram.max(cm) < 1e-6 {
            // Near-degenerate: the oracle loses relative precision, require
            // absolute agreement instead.
            assert!((gram - cm).abs() <= 1e-8, "degenerate: {gram} vs {cm}");
            continue;
        }
        compared += 1;
        assert!(
            (gram - cm).abs() <= 1e-8 * gram.max(cm),
            "gram {gram} vs cayley-menger {cm}"
        );
    }
    assert!(compared >= 950, "only {compared} non-degenerate simplices");
    println!(
        "ACCEPTANCE 6 (simplex volume oracles: shoelace rel 1e-10, Cayley-Menger rel 1e-8 on {compared} simplices): PASS"
    );
}

#[test]
fn acceptance_07_scale_invariance_and_l1_sensitivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CA1E);
    let labels = vec!["x".to_string(), "y".to_string()];
    let draw = |rng: &mut ChaCha8Rng, n: usize, spread: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                vec![
                    rng.random_range(-spread..spread),
                    rng.random_range(-spread..spread),
                ]
            })
            .collect()
    };
    let a_pts = draw(&mut rng, 30, 5.0);
    let b_pts = draw(&mut rng, 30, 2.0);
    let scale = |pts: &[Vec<f64>], cx: f64, cy: f64| -> Vec<Vec<f64>> {
        pts.iter().map(|p| vec![p[0] * cx, p[1] * cy]).collect()
    };
    let cfg = DispersionConfig::new(DispersionMetric::Simplex { k: 2 }, 400, 9);
    let tcfg = TestConfig::default();
    let a = MultiSample::new(a_pts.clone(), labels.clone(), "a").unwrap();
    let b = MultiSample::new(b_pts.clone(), labels.clone(), "b").unwrap();
    let (v0, t0) = dispersion_compare(&a, &b, &cfg, &tcfg).unwrap();
    for (cx, cy) in [(3.7, 0.25), (128.0, 0.0625), (0.01, 42.0)] {
        let a2 = MultiSample::new(scale(&a_pts, cx, cy), labels.clone(), "a").unwrap();
        let b2 = MultiSample::new(scale(&b_pts, cx, cy), labels.clone(), "b").unwrap();
        let (v1, t1) = dispersion_compare(&a2, &b2, &cfg, &tcfg).unwrap();
        assert_eq!(
            v0.relation, v1.relation,
            "verdict changed under ({cx},{cy})"
        );
        assert_eq!(
            t0.d_two_sided.to_bits(),
            t1.d_two_sided.to_bits(),
            "KS changed under ({cx},{cy})"
        );
        assert_eq!(
            t0.p_value.unwrap().to_bits(),
            t1.p_value.unwrap().to_bits(),
            "p changed under ({cx},{cy})"
        );
    }
    // The L1 pair-distance ordering, by contrast, is scale-sensitive: this
    // fixture flips its verdict when the second coordinate is stretched.
    let a_pts = vec![vec![0.0, 0.3], vec![1.0, 0.3]];
    let b_pts = vec![vec![0.5, 0.0], vec![0.5, 0.5]];
    let l1 = DispersionConfig::new(DispersionMetric::L1, 1000, 13).with_normalize(false);
    let fixture = |pts: &[Vec<f64>], name: &str| {
        MultiSample::new(pts.to_vec(), labels.clone(), name).unwrap()
    };
    let (raw, _) =
        dispersion_compare(&fixture(&a_pts, "a"), &fixture(&b_pts, "b"), &l1, &tcfg).unwrap();
    let (stretched, _) = dispersion_compare(
        &fixture(&scale(&a_pts, 1.0, 4.0), "a"),
        &fixture(&scale(&b_pts, 1.0, 4.0), "b"),
        &l1,
        &tcfg,
    )
    .unwrap();
    assert_eq!(raw.relation, DominanceRelation::LeftDominates);
    assert_eq!(stretched.relation, DominanceRelation::RightDominates);
    println!(
        "ACCEPTANCE 7 (simplex comparison scale-invariant bit-for-bit; L1 fixture flips): PASS"
    );
}

#[test]
fn acceptance_08_k1_reduction_and_pair_distance_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF00D);
    let pts: Vec<Vec<f64>> = (0..50)
        .map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let labels: Vec<String> = (0..3).map(|c| format!("c{c}")).collect();
    let ms = MultiSample::new(pts, labels, "m").unwrap();
    let l2 = dispersion_sample(
        &ms,
        &DispersionConfig::new(DispersionMetric::L2, 2000, 77).with_normalize(false),
    )
    .unwrap();
    let k1 = dispersion_sample(
        &ms,
        &DispersionConfig::new(DispersionMetric::Simplex { k: 1 }, 2000, 77).with_normalize(false),
    )
    .unwrap();
    for (a, b) in l2.stats.values().iter().zip(k1.stats.values()) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    // Mean squared pair distance estimates twice the population variance.
    let values: Vec<f64> = standard_gaussians(&mut rng, 1000)
        .into_iter()
        .map(|z| 3.0 + 2.0 * z)
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    let one_d = MultiSample::new(
        values.iter().map(|v| vec![*v]).collect(),
        vec!["v".to_string()],
        "gauss",
    )
    .unwrap();
    let ds = dispersion_sample(
        &one_d,
        &DispersionConfig::new(DispersionMetric::L2, 10_000, 4242).with_normalize(false),
    )
    .unwrap();
    let mean_sq =
        ds.stats.values().iter().map(|d| d * d).sum::<f64>() / ds.stats.values().len() as f64;
    let rel = (mean_sq - 2.0 * var).abs() / (2.0 * var);
    assert!(rel <= 0.05, "mean squared distance off by {rel}");
    println!(
        "ACCEPTANCE 8 (k=1 simplex equals L2 resampling; E[d^2] within {:.2}% of 2*variance): PASS",
        rel * 100.0
    );
}

// KNOWN RED. The target orderings cannot hold under this model: the
// design-1 cell responds to only three of the four varied factors, so its
// (npc, emissions) cloud has 27 distinct points and its emissions take
// exactly 3 distinct values. Resampled triangles whose three draws share an
// emission-factor level are then exactly collinear, which puts an atom of
// mass >= 1/9 at volume zero for design 1 — versus ~1/81 for designs 2 and
// 3, whose emissions also respond to the COP factor. The empirical volume
// CDFs therefore cross near zero for every seed and bootstrap size, and the
// exact first-order verdict is Incomparable for every pair involving
// design 1. The test states the intended orderings and stays red rather
// than asserting the weaker outcome.
#[test]
fn acceptance_09_dispersion_ordering_reproduction() {
    let cfg = ModelConfig::defaults();
    let ds = default_dataset();
    let vgroups = group_vector_outputs(&ds, GroupingMode::DesignWithinScenario).unwrap();
    let stats = dispersion_stat_groups(&vgroups, &cfg.dispersion_config()).unwrap();
    let verdict = |ctx: &str, a: &str, b: &str| {
        let g = stats.iter().find(|g| g.context == ctx).unwrap();
        fsd_compare(member(&g.members, a), member(&g.members, b)).relation
    };
    let mut failures = Vec::new();
    let mut expect = |ctx: &str, a: &str, b: &str| {
        let got = verdict(ctx, a, b);
        println!("  {ctx}: {a} vs {b} -> {got:?}");
        if got != DominanceRelation::LeftDominates {
            failures.push(format!(
                "{ctx}: wanted {a} more dispersed than {b}, got {got:?}"
            ));
        }
    };
    for ctx in ["green", "neutral"] {
        expect(ctx, "d1", "d2");
        expect(ctx, "d2", "d3");
        expect(ctx, "d1", "d3");
    }
    expect("market", "d1", "d3");
    expect("market", "d2", "d3");
    if failures.is_empty() {
        println!(
            "ACCEPTANCE 9 (simplex dispersion: D1 > D2 > D3 in green/neutral, D3 least in market): PASS"
        );
    } else {
        println!(
            "ACCEPTANCE 9 (simplex dispersion: D1 > D2 > D3 in green/neutral, D3 least in market): FAIL — {} of 8 legs violated; design 1's exact output ties put an atom at volume zero (mass ~0.15 vs ~0.03) that forces CDF crossings for every seed",
            failures.len()
        );
        panic!("dispersion ordering not reproduced: {failures:?}");
    }
}

#[test]
fn acceptance_10_fsd_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFACADE);
    let mut pairs = 0usize;
    let mut violations = 0usize;

    let lattice = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| rng.random_range(-400i64..400) as f64 / 8.0)
            .collect()
    };

    let check_pair = |x: &Sample, y: &Sample, violations: &mut usize| {
        let fwd = fsd_compare(x, y).relation;
        let bwd = fsd_compare(y, x).relation;
        let mirrored = match fwd {
            DominanceRelation::LeftDominates => DominanceRelation::RightDominates,
            DominanceRelation::RightDominates => DominanceRelation::LeftDominates,
            other => other,
        };
        if bwd != mirrored {
            *violations += 1;
        }
        let d = ks_distance(x, y);
        let dm_xy = d_minus(x, y);
        let dm_yx = d_minus(y, x);
        if dm_xy > d + 1e-15 || dm_yx > d + 1e-15 {
            *violations += 1;
        }
        if (d - dm_xy.max(dm_yx)).abs() > 1e-15 {
            *violations += 1;
        }
        // Monotone increasing transform preserves the verdict bit-for-bit.
        let map = |s: &Sample| {
            Sample::new(s.values().iter().map(|v| 2.0 * v + 3.0).collect(), "t").unwrap()
        };
        if fsd_compare(&map(x), &map(y)).relation != fwd {
            *violations += 1;
        }
        // Directional verdicts order means and medians.
        let (larger, smaller) = match fwd {
            DominanceRelation::LeftDominates => (x, y),
            DominanceRelation::RightDominates => (y, x),
            _ => return,
        };
        if larger.mean() < smaller.mean() - 1e-12 || larger.median() < smaller.median() - 1e-12 {
            *violations += 1;
        }
    };

    // Unconstrained random pairs (ties likely thanks to the lattice).
    for _ in 0..4000 {
        let n = rng.random_range(3..25usize);
        let m = rng.random_range(3..25usize);
        let x = Sample::new(lattice(&mut rng, n), "x").unwrap();
        let y = Sample::new(lattice(&mut rng, m), "y").unwrap();
        check_pair(&x, &y, &mut violations);
        pairs += 1;
    }

    // Constructed dominance pairs: y = x plus nonnegative shifts.
    for _ in 0..3000 {
        let n = rng.random_range(3..25usize);
        let base = lattice(&mut rng, n);
        let shifted: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let bump = if i == 0 {
                    rng.random_range(1..20) as f64 / 8.0
                } else {
                    rng.random_range(0..20) as f64 / 8.0
                };
                v + bump
            })
            .collect();
        let x = Sample::new(base, "x").unwrap();
        let y = Sample::new(shifted, "y").unwrap();
        if fsd_compare(&y, &x).relation != DominanceRelation::LeftDominates {
            violations += 1;
        }
        check_pair(&x, &y, &mut violations);
        pairs += 1;
    }

    // Chains: transitivity of directed verdicts.
    for _ in 0..1000 {
        let n = rng.random_range(3..20usize);
        let a = lattice(&mut rng, n);
        let bump = |rng: &mut ChaCha8Rng, v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(i, x)| {
                    let b = if i == 0 {
                        rng.random_range(1..16) as f64 / 8.0
                    } else {
                        rng.random_range(0..16) as f64 / 8.0
                    };
                    x + b
                })
                .collect()
        };
        let b = bump(&mut rng, &a);
        let c = bump(&mut rng, &b);
        let sa = Sample::new(a, "a").unwrap();
        let sb = Sample::new(b, "b").unwrap();
        let sc = Sample::new(c, "c").unwrap();
        let ab = fsd_compare(&sb, &sa).relation;
        let bc = fsd_compare(&sc, &sb).relation;
        let ac = fsd_compare(&sc, &sa).relation;
        if ab == DominanceRelation::LeftDominates
            && bc == DominanceRelation::LeftDominates
            && ac != DominanceRelation::LeftDominates
        {
            violations += 1;
        }
        check_pair(&sa, &sb, &mut violations);
        check_pair(&sb, &sc, &mut violations);
        check_pair(&sa, &sc, &mut violations);
        pairs += 3;
    }

    assert!(pairs >= 10_000, "only {pairs} pairs exercised");
    assert_eq!(violations, 0, "{violations} property violations");
    println!("ACCEPTANCE 10 (FSD property suite: {pairs} pairs, {violations} violations): PASS");
}

#[test]
fn acceptance_11_end_to_end_determinism() {
    let cfg = ModelConfig::defaults();
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(tag);
        std::fs::create_dir_all(&out).unwrap();
        let ds = run_configured_experiment(&cfg, &[], &[]).unwrap();
        let csv = out.join("dataset.csv");
        write_dataset(&ds, &csv).unwrap();
        let artifacts = build_full_report(&ds, &cfg, &out).unwrap();
        (csv, artifacts)
    };
    let (csv_a, art_a) = run("a");
    let (csv_b, art_b) = run("b");
    assert_eq!(
        std::fs::read(&csv_a).unwrap(),
        std::fs::read(&csv_b).unwrap(),
        "dataset CSV differs between runs"
    );
    assert_eq!(
        std::fs::read(&art_a.report_path).unwrap(),
        std::fs::read(&art_b.report_path).unwrap(),
        "report JSON differs between runs"
    );
    assert_eq!(art_a.curve_paths.len(), art_b.curve_paths.len());
    for (pa, pb) in art_a.curve_paths.iter().zip(&art_b.curve_paths) {
        assert_eq!(
            std::fs::read(pa).unwrap(),
            std::fs::read(pb).unwrap(),
            "curve file {pa:?} differs"
        );
    }
    println!("ACCEPTANCE 11 (end-to-end determinism: byte-identical reruns): PASS");
}

// Joint normalization must commute with common power-of-two scalings; this
// guards the bounds logic the scale-invariance criterion relies on.
#[test]
fn joint_normalization_supports_the_scale_criterion() {
    let labels = vec!["x".to_string(), "y".to_string()];
    let a = MultiSample::new(
        vec![vec![0.0, 3.0], vec![4.0, 1.0], vec![2.0, 2.0]],
        labels.clone(),
        "a",
    )
    .unwrap();
    let b = MultiSample::new(
        vec![vec![1.0, 1.5], vec![1.5, 2.0], vec![2.5, 1.0]],
        labels.clone(),
        "b",
    )
    .unwrap();
    let scaled: Vec<MultiSample> = normalize_jointly(&[&a, &b]).unwrap();
    let a4 = MultiSample::new(
        a.points()
            .iter()
            .map(|p| p.iter().map(|v| v * 4.0).collect())
            .collect(),
        labels.clone(),
        "a",
    )
    .unwrap();
    let b4 = MultiSample::new(
        b.points()
            .iter()
            .map(|p| p.iter().map(|v| v * 4.0).collect())
            .collect(),
        labels,
        "b",
    )
    .unwrap();
    let scaled4 = normalize_jointly(&[&a4, &b4]).unwrap();
    for (s, s4) in scaled.iter().zip(&scaled4) {
        for (p, p4) in s.points().iter().zip(s4.points()) {
            for (v, v4) in p.iter().zip(p4) {
                assert_eq!(v.to_bits(), v4.to_bits());
            }
        }
    }
}
