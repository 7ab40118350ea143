use crowdnet_core::data::generate_synthetic;
use crowdnet_core::metrics::{Belt, BeltCell};
use crowdnet_core::report::{
    analyze, emit_report, load_run, render_bar_chart, AnalysisOptions, ChartSpec, TestStatus, ANOVA_FILE,
};
use crowdnet_core::SynthConfig;

fn spec(n: usize) -> ChartSpec {
    ChartSpec {
        title: "Average worker reliability per belt per cluster".into(),
        y_label: "RL".into(),
        cluster_count: n,
    }
}

#[test]
fn charts_are_well_formed_svg() {
    let cases: Vec<Vec<BeltCell>> = vec![
        vec![],
        vec![BeltCell { cluster: 0, belt: Belt::Blue, mean: Some(0.5), count: 1 }],
        (0..3)
            .flat_map(|c| {
                Belt::REPORTED.into_iter().map(move |b| BeltCell {
                    cluster: c,
                    belt: b,
                    mean: (b != Belt::Yellow).then_some(0.1 * (c + b.index()) as f64),
                    count: 1,
                })
            })
            .collect(),
    ];
    for cells in cases {
        let svg = render_bar_chart(&spec(3), &cells);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let bars = doc.descendants().filter(|n| n.has_tag_name("rect") && n.has_children()).count();
        assert_eq!(bars, cells.iter().filter(|c| c.mean.is_some()).count());
    }
}

#[test]
fn synthetic_run_reports_and_reloads() {
    let d = generate_synthetic(&SynthConfig::planted(160, 4, 7)).unwrap().dataset;
    let dir = tempfile::tempdir().unwrap();
    let run = analyze(&d, &AnalysisOptions::default(), dir.path()).unwrap();
    assert_eq!(run.outputs, load_run(dir.path()).unwrap());
    assert!(run.outputs.partition.cluster_count >= 2);
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert_eq!(md, emit_report(&run.outputs));
    assert!(md.contains("charts/reliability.svg"));
    for test in &run.outputs.anova.tests {
        assert_eq!(test.status, TestStatus::Tested, "{}", test.metric);
    }
    let json = std::fs::read_to_string(dir.path().join(ANOVA_FILE)).unwrap();
    assert!(json.contains("\"design\""));
}

#[test]
fn significance_markers() {
    let d = generate_synthetic(&SynthConfig::planted(120, 3, 1)).unwrap().dataset;
    let dir = tempfile::tempdir().unwrap();
    let mut run = analyze(&d, &AnalysisOptions::default(), dir.path()).unwrap().outputs;
    let t = &mut run.anova.tests[0];
    t.status = TestStatus::Tested;
    t.f_statistic = Some(3.0);
    t.df_between = Some(2);
    t.df_within = Some(6);
    t.p_value = Some(0.125);
    let u = &mut run.anova.tests[1];
    u.status = TestStatus::Tested;
    u.f_statistic = Some(0.0);
    u.p_value = Some(1.0);
    u.df_between = Some(2);
    u.df_within = Some(6);
    let md = emit_report(&run);
    assert!(md.contains("| reliability (RL) | 3 | 3.0000 | (2, 6) | 0.1250 | not significant at 0.05 |"), "{md}");
    assert!(md.contains("| 0.0000 | (2, 6) | 1.0000 | not significant at 0.05 |"));
    run.anova.tests[0].p_value = Some(0.01);
    assert!(emit_report(&run).contains("| 0.0100 | significant at 0.05 |"));
}
