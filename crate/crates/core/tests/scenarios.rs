use pollinate_core::scenarios::{match_budget, run_suite_with, sweep_values, SuiteSelection};
use pollinate_core::{
    default_calibration, landscape_aggregate, param_sweep, price_sweep, run_suite, ParameterSet, PolicyKind,
    Regime, SolverConfig, SuiteResult,
};

fn suite() -> SuiteResult {
    run_suite(&default_calibration(), &SolverConfig::default()).unwrap()
}

#[test]
fn calibration_examples() {
    let p = default_calibration();
    assert_eq!(p.delta, 0.5);
    assert_eq!(p.p_osr, 350.0);
    assert!(p.validate().is_ok());
    assert_eq!(p.b_ref, 0.72 * 18_900.0 + 5_000.0);
}

#[test]
fn suite_has_seven_cells_in_canonical_order() {
    let s = suite();
    let order: Vec<(PolicyKind, Regime)> = s.cells.iter().map(|c| (c.policy.kind, c.regime)).collect();
    assert_eq!(
        order,
        vec![
            (PolicyKind::Bau, Regime::Communication),
            (PolicyKind::HiveSubsidy, Regime::Communication),
            (PolicyKind::HiveSubsidy, Regime::NoCommunication),
            (PolicyKind::PriceSubsidy, Regime::Communication),
            (PolicyKind::PriceSubsidy, Regime::NoCommunication),
            (PolicyKind::PesticideTax, Regime::Communication),
            (PolicyKind::PesticideTax, Regime::NoCommunication),
        ]
    );
    assert!(s.cells[0].marginals.is_none());
    assert!(s.cells[1..].iter().all(|c| c.marginals.is_some()));
    assert!(s.all_converged());
}

#[test]
fn ledgers_balance() {
    let s = suite();
    let p = &s.params;
    assert_eq!(s.baseline().ledger.public_balance, 0.0);
    for c in &s.cells {
        let l = &c.ledger;
        let eq = &c.equilibrium;
        let expected = -(p.landscape_area * eq.transfer_beekeeper) - p.farmland_area() * eq.transfer_farmer;
        assert_eq!(l.public_balance, expected);
        assert!((l.total_delta() - (l.agricultural_delta + l.beekeeping_delta + l.public_delta)).abs() <= 1e-9);
        let fresh = landscape_aggregate(eq, p);
        assert_eq!(fresh.agricultural_wealth, l.agricultural_wealth);
        assert!(
            (c.indicators.e2_total_wealth - (c.indicators.e1_stakeholder_wealth + l.public_balance)).abs() <= 1e-9
        );
    }
}

#[test]
fn communication_is_win_win_for_subsidies() {
    let s = suite();
    for kind in [PolicyKind::HiveSubsidy, PolicyKind::PriceSubsidy] {
        let c = s.cell(kind, Regime::Communication).unwrap();
        let n = s.cell(kind, Regime::NoCommunication).unwrap();
        assert!(c.ledger.agricultural_wealth >= n.ledger.agricultural_wealth);
        assert!(c.ledger.beekeeping_wealth >= n.ledger.beekeeping_wealth);
    }
}

#[test]
fn suite_is_deterministic_across_thread_counts() {
    let p = default_calibration();
    let cfg = SolverConfig::default();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(&p, &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(1));
    assert_eq!(one, run(4));
}

#[test]
fn selection_restricts_cells_but_keeps_bau() {
    let p = default_calibration();
    let sel = SuiteSelection {
        policies: vec![PolicyKind::PesticideTax],
        regimes: vec![Regime::Communication],
    };
    let s = run_suite_with(&p, &SolverConfig::default(), &sel).unwrap();
    assert_eq!(s.cells.len(), 2);
    assert_eq!(s.cells[0].policy.kind, PolicyKind::Bau);
    let full = suite();
    assert_eq!(s.cells[1], *full.cell(PolicyKind::PesticideTax, Regime::Communication).unwrap());
}

#[test]
fn price_sweep_closes_acreage_and_reproduces_default() {
    let p = default_calibration();
    let cfg = SolverConfig::default();
    let points = price_sweep(&p, 300.0, 400.0, 11, &cfg).unwrap();
    assert_eq!(points.len(), 11);
    let mut last = -1.0;
    for pt in &points {
        let s = pt.suite.as_ref().expect("sweep point solved");
        for c in &s.cells {
            let f = &c.equilibrium.farmer;
            assert!((f.x_w + f.x_g + f.x_osr - 1.0).abs() <= 1e-9);
        }
        let x_osr = s.baseline().equilibrium.farmer.x_osr;
        assert!(x_osr >= last - 1e-9, "p_osr {}: {x_osr} < {last}", pt.value);
        last = x_osr;
    }
    assert_eq!(points[0].suite.as_ref().unwrap().baseline().equilibrium.farmer.x_osr, 0.0);
    assert_eq!(points[5].value, 350.0);
    assert_eq!(points[5].suite.as_ref().unwrap().cells, suite().cells);
}

#[test]
fn sweep_records_failures_and_continues() {
    let p = default_calibration();
    let points = param_sweep(&p, "epsilon", &[0.5, 1.2, 0.6], &SolverConfig::default(), &SuiteSelection::default()).unwrap();
    assert!(points[0].suite.is_some() && points[2].suite.is_some());
    assert!(points[1].suite.is_none());
    assert!(points[1].error.as_deref().unwrap().contains("epsilon"));
}

#[test]
fn sweeping_capacity_rederives_the_reference_abundance() {
    let p = default_calibration();
    let points = param_sweep(&p, "x_h_max", &[1.0], &SolverConfig::default(), &SuiteSelection::default()).unwrap();
    let q: &ParameterSet = &points[0].suite.as_ref().unwrap().params;
    assert_eq!(q.b_ref, q.derived_b_ref());
    assert!(sweep_values(1.0, 1.0, 3).is_err());
    assert!(price_sweep(&p, -1.0, 400.0, 3, &SolverConfig::default()).is_err());
}

#[test]
fn budget_matching_hits_the_target() {
    let p = default_calibration();
    let cfg = SolverConfig::default();
    for kind in [PolicyKind::HiveSubsidy, PolicyKind::PriceSubsidy] {
        let m = match_budget(kind, 5000.0, Regime::Communication, &p, &cfg).unwrap();
        assert!((m.total_transfer - 5000.0).abs() <= 1.0, "{kind}: {m:?}");
        assert!(m.level > 0.0);
    }
    assert!(match_budget(PolicyKind::PesticideTax, 5000.0, Regime::Communication, &p, &cfg).is_err());
}

#[test]
fn results_roundtrip_through_json() {
    let s = suite();
    let text = serde_json::to_string(&s).unwrap();
    let back: SuiteResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back.cells.len(), s.cells.len());
    assert_eq!(back.cells[3].equilibrium.farmer, s.cells[3].equilibrium.farmer);
}
