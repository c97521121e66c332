use pollinate_core::equilibrium::{solve_against_baseline, solve_baseline, SolverReport};
use pollinate_core::indicators::percent_change;
use pollinate_core::model::{bee_abundance, honey_production, osr_production};
use pollinate_core::{
    compute_indicators, marginal_cascade, run_suite, solve_equilibrium, BeekeeperDecision, Equilibrium,
    FarmerDecision, IndicatorBundle, ParameterSet, Policy, PolicyKind, Regime, SolverConfig,
};
use proptest::prelude::*;

fn params() -> ParameterSet {
    ParameterSet::default_calibration()
}

fn policy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        Just(Policy::bau()),
        (0.0..90.0f64).prop_map(|z| Policy::hive_subsidy(z).unwrap()),
        (0.0..5.0f64).prop_map(|z| Policy::price_subsidy(z).unwrap()),
        (0.0..200.0f64).prop_map(|z| Policy::pesticide_tax(z).unwrap()),
    ]
}

proptest! {
    #[test]
    fn bundle_identities(o in 0.0..=1.0f64, g in 0.0..=1.0f64, x_p in 0.0..=1.0f64, x_h in 0.0..=0.72f64, pol in policy()) {
        let p = params();
        let fd = FarmerDecision::from_shares(g * (1.0 - o), o, x_p).unwrap();
        let eq = Equilibrium::evaluate(fd, BeekeeperDecision { x_h }, &pol, &p, true, SolverReport::default());
        let b = IndicatorBundle::of(&eq, &p);
        let transfers = p.landscape_area * eq.transfer_beekeeper + p.farmland_area() * eq.transfer_farmer;
        prop_assert!((b.e2_total_wealth - (b.e1_stakeholder_wealth - transfers)).abs() <= 1e-9 * b.e1_stakeholder_wealth.abs().max(1.0));
        prop_assert_eq!(b.es4_water_nutrient, fd.x_g);
        prop_assert_eq!(b.bc1_wildbees, eq.bees.wildbees);
        prop_assert!((0.0..=1.0).contains(&b.es3_water_pesticide));
        prop_assert!((0.0..=1.0).contains(&b.bc2_plant_richness));
        prop_assert_eq!(b.es1_pollination, eq.bees.normalized);
    }
}

#[test]
fn baseline_against_itself_changes_nothing() {
    let p = params();
    let bau = solve_baseline(&p, &SolverConfig::default()).unwrap();
    let r = compute_indicators(&bau, &bau, &p);
    assert!(r.relative.values().iter().all(|c| *c == Some(0.0)));
}

#[test]
fn zero_baselines_are_undefined_not_infinite() {
    let p = params();
    let corner = FarmerDecision::mono_wheat();
    let eq = Equilibrium::evaluate(corner, BeekeeperDecision { x_h: 0.0 }, &Policy::bau(), &p, true, SolverReport::default());
    let other = Equilibrium::evaluate(
        FarmerDecision::new(0.5, 0.3, 0.2, 0.5).unwrap(),
        BeekeeperDecision { x_h: 0.2 },
        &Policy::bau(),
        &p,
        true,
        SolverReport::default(),
    );
    let r = compute_indicators(&other, &eq, &p);
    assert_eq!(r.relative.es4_water_nutrient, None);
    assert_eq!(r.relative.bc1_wildbees, None);
    assert!(r.relative.e1_stakeholder_wealth.unwrap().is_finite());
}

#[test]
fn price_subsidy_marginal_revenue_is_exact() {
    let p = params();
    let m = marginal_cascade(&Policy::from_params(PolicyKind::PriceSubsidy, &p), &p, &SolverConfig::default()).unwrap();
    assert_eq!(m.honey_marginal_revenue.scenario, Some(p.p_h + p.z_ps));
    let pct = m.honey_marginal_revenue.percent_change.unwrap();
    assert!((pct - 100.0 * p.z_ps / p.p_h).abs() <= 1e-12);
}

#[test]
fn percent_changes_are_exact_ratios() {
    let p = params();
    for kind in PolicyKind::INCENTIVES {
        let m = marginal_cascade(&Policy::from_params(kind, &p), &p, &SolverConfig::default()).unwrap();
        for e in m.entries() {
            if let (Some(b), Some(s)) = (e.bau, e.scenario) {
                assert_eq!(e.percent_change, percent_change(s, b));
            }
        }
    }
}

/// Central differences of the production functions at each cascade point.
#[test]
fn cascade_derivatives_match_finite_differences() {
    let p = params();
    let cfg = SolverConfig::default();
    let bau = solve_baseline(&p, &cfg).unwrap();
    let h = 1e-6;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
    for kind in PolicyKind::INCENTIVES {
        let policy = Policy::from_params(kind, &p);
        let point = solve_against_baseline(&policy, Regime::NoCommunication, &bau, &p, &cfg).unwrap();
        let m = marginal_cascade(&policy, &p, &cfg).unwrap();
        assert!(m.diagnostics.is_empty(), "{:?}", m.diagnostics);
        let (fd, bk) = (point.farmer, point.beekeeper);

        let honey = |x_h: f64| honey_production(&BeekeeperDecision { x_h }, &fd, &p);
        let d_honey = (honey(bk.x_h + h) - honey(bk.x_h - h)) / (2.0 * h);
        assert!(rel(m.beehive_marginal_product.scenario.unwrap(), d_honey) <= 1e-4);

        let output = |f: &FarmerDecision| osr_production(f, &bee_abundance(&bk, f, &p), &p);
        let area = |o: f64| FarmerDecision { x_w: 1.0 - fd.x_g - o, x_osr: o, ..fd };
        let d_area = (output(&area(fd.x_osr + h)) - output(&area(fd.x_osr - h))) / (2.0 * h);
        assert!(rel(m.osr_area_marginal_product.scenario.unwrap(), d_area) <= 1e-4);

        let rate = |x_p: f64| FarmerDecision { x_p, ..fd };
        let d_rate = (output(&rate(fd.x_p + h)) - output(&rate(fd.x_p - h))) / (2.0 * h);
        assert!(rel(m.pesticide_marginal_product.scenario.unwrap(), d_rate) <= 1e-4);

        // Beekeeper revenue (honey sales plus transfer) per unit of honey.
        let revenue = |x_h: f64| {
            let b = BeekeeperDecision { x_h };
            p.p_h * honey(x_h) + pollinate_core::model::beekeeper_transfer(&b, &fd, &policy, &p)
        };
        let d_revenue = (revenue(bk.x_h + h) - revenue(bk.x_h - h)) / (2.0 * h);
        assert!(rel(m.honey_marginal_revenue.scenario.unwrap(), d_revenue / d_honey) <= 1e-4);
    }
}

#[test]
fn suite_indicators_do_not_depend_on_solve_order() {
    let p = params();
    let cfg = SolverConfig::default();
    let suite = run_suite(&p, &cfg).unwrap();
    let bau = solve_baseline(&p, &cfg).unwrap();
    for cell in suite.cells.iter().rev() {
        let eq = solve_equilibrium(&cell.policy, cell.regime, &p, &cfg).unwrap();
        let r = compute_indicators(&eq, &bau, &p);
        assert_eq!(r.values, cell.indicators);
        assert_eq!(r.relative, cell.relative_changes);
    }
}
