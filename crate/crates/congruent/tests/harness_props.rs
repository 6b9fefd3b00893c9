use congruent::config::{parse_config_str, Param, RunConfig, Suite};
use congruent::harness::{build_pool, resolve, run, run_resolved};
use congruent::output::{report_json, write_residuals_csv};

fn small(n: usize, suites: &[Suite]) -> RunConfig {
    RunConfig {
        n,
        semi_axes: (1..=n).rev().map(|a| a as f64).collect(),
        delta: Param::Auto,
        epsilon: Param::Value(0.1 / (n * n) as f64),
        directions: 60,
        subsphere_samples: 500,
        seed: 3,
        suites: suites.to_vec(),
    }
}

#[test]
fn case_counts_cover_every_direction() {
    let report = run(
        &small(
            4,
            &[Suite::SectionsO, Suite::ProjectionsO, Suite::SectionsSO],
        ),
        1,
    )
    .unwrap();
    assert!(report.pass);
    for s in &report.suites {
        assert_eq!(s.case_counts.unwrap().total(), 60);
        assert_eq!(s.histogram.as_ref().unwrap().total(), 60);
        assert_eq!(s.directions.len(), 60);
        let worst = s.worst.as_ref().unwrap();
        assert_eq!(Some(worst.residual), s.max_residual);
    }
}

#[test]
fn rotation_suite_refuses_three_dimensions_without_affecting_others() {
    let report = run(
        &small(
            3,
            &[Suite::SectionsO, Suite::SectionsSO, Suite::Distinctness],
        ),
        1,
    )
    .unwrap();
    assert!(!report.pass);
    assert!(report.suites[0].pass);
    assert!(!report.suites[1].pass);
    assert_eq!(report.suites[1].failures[0].kind, "unsupported-dimension");
    assert!(report.suites[2].pass);
}

#[test]
fn residuals_are_monotone_in_nested_sample_counts() {
    let mut cfg = small(4, &[Suite::SectionsO, Suite::ProjectionsO]);
    cfg.epsilon = Param::Value(0.5);
    let resolved = resolve(&cfg).unwrap();
    let pool = build_pool(1).unwrap();
    let mut previous: Option<Vec<f64>> = None;
    for samples in [100, 200, 400, 800, 1600] {
        cfg.subsphere_samples = samples;
        let report = run_resolved(&cfg, &resolved, &pool);
        let maxima: Vec<f64> = report
            .suites
            .iter()
            .map(|s| s.max_residual.unwrap())
            .collect();
        if let Some(prev) = &previous {
            for (a, b) in prev.iter().zip(&maxima) {
                assert!(b >= a, "{samples}: {b} < {a}");
            }
        }
        previous = Some(maxima);
    }
}

#[test]
fn reports_are_deterministic_and_independent_of_workers() {
    let cfg = small(4, &Suite::ALL);
    let a = run(&cfg, 1).unwrap();
    let b = run(&cfg, 3).unwrap();
    assert_eq!(report_json(&a), report_json(&b));
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    write_residuals_csv(&a, &mut ca).unwrap();
    write_residuals_csv(&b, &mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn config_echo_round_trips() {
    let mut cfg = small(5, &[Suite::Distinctness]);
    cfg.delta = Param::Value(0.3 + 1e-17);
    let report = run(&cfg, 1).unwrap();
    let echo = serde_json::to_string(&report.config).unwrap();
    assert_eq!(parse_config_str(&echo).unwrap(), cfg);
}

#[test]
fn csv_has_one_row_per_direction_and_suite() {
    let report = run(&small(3, &[Suite::SectionsO, Suite::ProjectionsO]), 1).unwrap();
    let mut buf = Vec::new();
    write_residuals_csv(&report, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,xi_index,case,det,residual"));
    assert_eq!(lines.clone().count(), 120);
    assert_eq!(
        lines.filter(|l| l.starts_with("projections-O,")).count(),
        60
    );
}

#[test]
fn zero_perturbation_fails_distinctness_only() {
    let mut cfg = small(3, &[Suite::SectionsO, Suite::Distinctness]);
    cfg.epsilon = Param::Value(0.0);
    let report = run(&cfg, 1).unwrap();
    assert!(report.suites[0].pass);
    assert!(!report.suites[1].pass);
}
