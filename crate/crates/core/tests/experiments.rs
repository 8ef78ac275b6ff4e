use bullwhip::export::{export_reports, read_frontier, read_suite, Outputs};
use bullwhip::harness::{strategic_choice_config, DEFAULT_REPLICATIONS};
use bullwhip::{
    hoarding_demo, run_replications, run_simulation, scenario_suite, strategic_choice_experiment,
    DisruptionKind, Error, PolicyKind, Role, RunConfig,
};

fn hoarding() -> RunConfig {
    RunConfig::new(PolicyKind::HoardingVmi, DisruptionKind::None)
}

#[test]
fn hoarding_starves_the_retailer() {
    let run = hoarding_demo(&hoarding()).unwrap();
    assert!(
        run.report.service_level < 5.0,
        "{}",
        run.report.service_level
    );
    assert_eq!(run.world.received[Role::Retailer.index()], 0);

    let retailer: Vec<u64> = run
        .trace
        .iter()
        .filter(|r| r.entity == Role::Retailer)
        .map(|r| r.on_hand)
        .collect();
    assert!(retailer.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*retailer.last().unwrap(), 0);

    let m_end = run.world.entity(Role::Manufacturer).on_hand;
    assert!(m_end > run.world.entity(Role::Retailer).on_hand);
    let m_first = run
        .trace
        .iter()
        .find(|r| r.entity == Role::Manufacturer)
        .unwrap()
        .on_hand;
    assert!(
        m_end > m_first,
        "manufacturer stock should pile up: {m_first} -> {m_end}"
    );
}

#[test]
fn hoarding_demo_rejects_other_policies() {
    let c = RunConfig::new(PolicyKind::StaticBaseline, DisruptionKind::None);
    assert!(matches!(hoarding_demo(&c), Err(Error::Experiment(_))));
}

#[test]
fn collaborative_retailer_never_orders() {
    for kind in DisruptionKind::DISRUPTIVE {
        let run = run_simulation(&RunConfig::new(PolicyKind::CollaborativeVmi, kind)).unwrap();
        assert_eq!(run.world.orders_placed[Role::Retailer.index()], 0, "{kind}");
        assert!(run.world.received[Role::Retailer.index()] > 0);
    }
}

#[test]
fn strategic_choice_is_deterministic_and_complete() {
    let c = strategic_choice_config(&RunConfig::default());
    let a = strategic_choice_experiment(&c).unwrap();
    let b = strategic_choice_experiment(&c).unwrap();
    assert_eq!(a.frontier, b.frontier);
    assert_eq!(a.frontier.len(), 3);
    assert_eq!(a.evaluations.len(), 3);
    for (p, run) in a.frontier.iter().zip(&a.runs) {
        assert_eq!(p.total_cost, run.report.total_cost);
    }

    let dir = tempfile::tempdir().unwrap();
    let outputs = Outputs {
        frontier: Some(&a.frontier),
        evaluations: Some(&a.evaluations),
        ..Outputs::default()
    };
    let first = export_reports(&outputs, dir.path()).unwrap();
    let second = export_reports(&outputs, dir.path()).unwrap();
    assert_eq!(first, second);
    let rows: Vec<bullwhip::export::FrontierRow<f64>> =
        read_frontier(std::fs::File::open(dir.path().join("frontier.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].total_cost, a.frontier[0].total_cost);
}

#[test]
fn strategic_choice_checks_its_preconditions() {
    let base = RunConfig::new(
        PolicyKind::StaticBaseline,
        DisruptionKind::TransportDisruption,
    );
    assert!(matches!(
        strategic_choice_experiment(&base),
        Err(Error::Experiment(_))
    ));
    let base = RunConfig::new(PolicyKind::CollaborativeVmi, DisruptionKind::DemandSurge);
    assert!(matches!(
        strategic_choice_experiment(&base),
        Err(Error::Experiment(_))
    ));
}

#[test]
fn premium_only_with_a_strategy() {
    let c = RunConfig::new(
        PolicyKind::CollaborativeVmi,
        DisruptionKind::TransportDisruption,
    );
    assert_eq!(run_simulation(&c).unwrap().report.premium_cost, 0.0);
    let choice = strategic_choice_experiment(&c).unwrap();
    for (params, run) in choice.parameters.iter().zip(&choice.runs) {
        assert_eq!(
            run.report.premium_cost > 0.0,
            params.transport_cost_premium > 0.0
        );
    }
}

#[test]
fn replications_use_consecutive_seeds() {
    let mut c = RunConfig::new(PolicyKind::StaticBaseline, DisruptionKind::DemandSurge);
    c.seed = 11;
    let reps = run_replications(&c, 4).unwrap();
    for (r, report) in reps.reports.iter().enumerate() {
        let mut single = c.clone();
        single.seed = 11 + r as u64;
        assert_eq!(&run_simulation(&single).unwrap().report, report);
    }
    assert!(run_replications(&c, 0).is_err());
    let one = run_replications(&c, 1).unwrap();
    assert_eq!(one.stats.std_cost, 0.0);
}

#[test]
fn suite_exports_one_row_per_cell() {
    let suite = scenario_suite(
        &RunConfig::default(),
        &[PolicyKind::StaticBaseline, PolicyKind::SelfishRag],
        &DisruptionKind::DISRUPTIVE,
        3,
    )
    .unwrap();
    assert_eq!(suite.cells.len(), 8);
    let dir = tempfile::tempdir().unwrap();
    export_reports(
        &Outputs {
            suite: Some(&suite),
            ..Outputs::default()
        },
        dir.path(),
    )
    .unwrap();
    let rows: Vec<bullwhip::export::SuiteRow<f64>> =
        read_suite(std::fs::File::open(dir.path().join("suite.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.n == 3));
    assert_eq!(DEFAULT_REPLICATIONS, 30);
}
