//! Acceptance suite. Prints one verdict line per criterion (with its
//! sub-checks indented underneath) and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pollinate_core::equilibrium::compare_with_oracle;
use pollinate_core::model::{
    bee_abundance, beehive_marginal_product, beekeeper_transfer, damage, farmer_transfer, honey_production,
    osr_area_marginal_product, osr_production, pesticide_marginal_product,
};
use pollinate_core::scenarios::ScenarioCell;
use pollinate_core::{
    default_calibration, price_sweep, run_suite, solve_equilibrium, solve_farmer, BeekeeperDecision, Coupling,
    FarmerDecision, ParameterSet, Policy, PolicyKind, Regime, SolverConfig, SuiteResult,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use PolicyKind::{HiveSubsidy as HS, PesticideTax as PT, PriceSubsidy as PS};
use Regime::{Communication as C, NoCommunication as N};

struct Criterion {
    id: u8,
    title: &'static str,
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, pass: bool, detail: impl Into<String>) {
        self.checks.push((pass, detail.into()));
    }

    /// `got` within `tol` of `expected`, with the same strict sign when asked.
    fn near(&mut self, what: &str, got: f64, expected: f64, tol: f64, sign: bool) {
        let sign_ok = !sign || (got > 0.0) == (expected > 0.0) && got != 0.0;
        let pass = (got - expected).abs() <= tol && sign_ok;
        self.check(pass, format!("{what}: got {got:.2}, expected {expected} ± {tol}"));
    }

    fn within_time(&mut self, elapsed: Duration, limit: Duration) {
        self.check(
            elapsed <= limit,
            format!("runtime {:.2} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.0)
    }

    fn print(&self) {
        let ok = self.checks.iter().filter(|c| c.0).count();
        println!(
            "criterion {:>2} {} {} ({ok}/{} sub-checks)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len()
        );
        for (pass, detail) in &self.checks {
            println!("      [{}] {detail}", if *pass { "ok" } else { "FAIL" });
        }
    }
}

fn cell(s: &SuiteResult, kind: PolicyKind, regime: Regime) -> &ScenarioCell {
    s.cell(kind, regime).expect("cell solved")
}

fn pct(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn c1(p: &ParameterSet, cfg: &SolverConfig) -> Criterion {
    let mut c = Criterion::new(1, "BAU land use (45.6 / 28.0 / 26.4 %)");
    let t = Instant::now();
    let eq = solve_equilibrium(&Policy::bau(), C, p, cfg).unwrap();
    let elapsed = t.elapsed();
    c.near("wheat %", 100.0 * eq.farmer.x_w, 45.6, 2.0, false);
    c.near("grassland %", 100.0 * eq.farmer.x_g, 28.0, 2.0, false);
    c.near("OSR %", 100.0 * eq.farmer.x_osr, 26.4, 2.0, false);
    c.within_time(elapsed, Duration::from_secs(5));
    c
}

fn c2(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(2, "Communication pollination change (HS +62, PS +26.8, PT -7 %)");
    for (kind, expected) in [(HS, 62.0), (PS, 26.8), (PT, -7.0)] {
        let got = pct(cell(s, kind, C).relative_changes.es1_pollination);
        c.near(&format!("{kind} ES1 %"), got, expected, 10.0, true);
    }
    c
}

fn c3(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(3, "Communication wealth (total 3.7/3.2/-0.8, stakeholder 5/3/-1.28 %)");
    for (kind, total, stakeholder) in [(HS, 3.7, 5.0), (PS, 3.2, 3.0), (PT, -0.8, -1.28)] {
        let r = &cell(s, kind, C).relative_changes;
        c.near(&format!("{kind} total wealth E2 %"), pct(r.e2_total_wealth), total, 2.0, true);
        c.near(&format!("{kind} stakeholder wealth E1 %"), pct(r.e1_stakeholder_wealth), stakeholder, 2.0, true);
    }
    c
}

fn c4(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(4, "PT Communication environmental gains (ES3 5.5, ES4 10.4, BC1 15.3, BC2 2.5 %)");
    let r = &cell(s, PT, C).relative_changes;
    c.near("ES3 %", pct(r.es3_water_pesticide), 5.5, 5.0, true);
    c.near("ES4 %", pct(r.es4_water_nutrient), 10.4, 5.0, true);
    c.near("BC1 %", pct(r.bc1_wildbees), 15.3, 5.0, true);
    c.near("BC2 %", pct(r.bc2_plant_richness), 2.5, 5.0, true);
    c
}

fn c5(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(5, "Subsidy environmental costs under Communication");
    for (kind, bc1, bc2, es4) in [(HS, -29.8, -6.9, -24.8), (PS, -18.2, -4.0, -15.1)] {
        let r = &cell(s, kind, C).relative_changes;
        c.near(&format!("{kind} BC1 %"), pct(r.bc1_wildbees), bc1, 8.0, true);
        c.near(&format!("{kind} BC2 %"), pct(r.bc2_plant_richness), bc2, 8.0, true);
        c.near(&format!("{kind} ES4 %"), pct(r.es4_water_nutrient), es4, 8.0, true);
    }
    c
}

fn c6(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(6, "No-communication contrasts");
    // Share of the communication gain lost without communication.
    for (kind, expected) in [(HS, 21.5), (PS, 20.0)] {
        let comm = pct(cell(s, kind, C).relative_changes.es1_pollination);
        let none = pct(cell(s, kind, N).relative_changes.es1_pollination);
        c.near(&format!("{kind} pollination gain reduction %"), 100.0 * (comm - none) / comm, expected, 10.0, true);
    }
    let comm = &cell(s, PT, C).relative_changes;
    let none = &cell(s, PT, N).relative_changes;
    c.near("PT ES1 % (communication)", pct(comm.es1_pollination), -7.0, 10.0, true);
    c.near("PT ES1 % (no communication)", pct(none.es1_pollination), 7.0, 10.0, true);
    // Change of the no-communication effect relative to the communication effect.
    let contrast = |a: Option<f64>, b: Option<f64>| 100.0 * (pct(b) - pct(a)) / pct(a).abs();
    c.near("PT wild bees contrast %", contrast(comm.bc1_wildbees, none.bc1_wildbees), 60.0, 10.0, true);
    c.near("PT ES3 contrast %", contrast(comm.es3_water_pesticide, none.es3_water_pesticide), 23.0, 10.0, true);
    c
}

fn c7(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(7, "Marginal cascade");
    let p = &s.params;
    let m = |kind| cell(s, kind, C).marginals.as_ref().expect("incentive cell has marginals");
    let ps = pct(m(PS).honey_marginal_revenue.percent_change);
    let exact = 100.0 * p.z_ps / p.p_h;
    c.check(
        (ps - exact).abs() <= 1e-9,
        format!("PS honey marginal revenue %: got {ps:.6}, expected z_ps/p_h = {exact:.6} exactly"),
    );
    c.near("HS honey marginal revenue %", pct(m(HS).honey_marginal_revenue.percent_change), 37.0, 8.0, true);
    c.near("PT OSR marginal revenue %", pct(m(PT).osr_marginal_revenue.percent_change), -2.3, 2.0, true);
    let bau = &s.baseline().equilibrium;
    let pt = &cell(s, PT, C).equilibrium;
    let change = |a: f64, b: f64| 100.0 * (b - a) / a;
    c.near("PT beehive change % (communication)", change(bau.beekeeper.x_h, pt.beekeeper.x_h), -15.0, 10.0, true);
    c.near("PT pesticide rate change % (communication)", change(bau.farmer.x_p, pt.farmer.x_p), -38.9, 10.0, true);
    c
}

fn c8(s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(8, "Landscape ledger signs and magnitudes");
    for kind in [HS, PS] {
        for regime in Regime::ALL {
            let l = &cell(s, kind, regime).ledger;
            c.check(
                l.agricultural_delta > 0.0 && l.beekeeping_delta > 0.0 && l.public_delta < 0.0,
                format!(
                    "{kind}/{regime}: private gains, public expense (agr {:+.0}, bee {:+.0}, public {:+.0} €)",
                    l.agricultural_delta, l.beekeeping_delta, l.public_delta
                ),
            );
        }
    }
    for regime in Regime::ALL {
        let l = &cell(s, PT, regime).ledger;
        c.check(
            l.agricultural_delta < 0.0 && l.beekeeping_delta < 0.0 && l.public_delta > 0.0,
            format!(
                "PT/{regime}: private losses, public gain (agr {:+.0}, bee {:+.0}, public {:+.0} €)",
                l.agricultural_delta, l.beekeeping_delta, l.public_delta
            ),
        );
    }
    let hs = cell(s, HS, C).ledger.agricultural_delta;
    c.check(
        hs > 4000.0 * 0.7,
        format!("HS/communication agricultural delta {hs:.0} € > 4000 € (30% slack: 2800 €)"),
    );
    let hs_none = cell(s, HS, N).ledger.agricultural_delta;
    c.near("HS agricultural gain, communication over none %", 100.0 * (hs - hs_none) / hs_none, 48.0, 15.0, true);
    let budget = -cell(s, HS, C).ledger.public_balance;
    c.check(
        (budget - 5000.0).abs() <= 750.0,
        format!("HS/communication total transfer {budget:.0} € ≈ 5000 € ± 15%"),
    );
    let (pc, pn) = (&cell(s, PT, C).ledger, &cell(s, PT, N).ledger);
    c.check(
        pc.beekeeping_delta > pn.beekeeping_delta && pc.agricultural_delta < pn.agricultural_delta,
        format!(
            "PT communication buffers beekeeping ({:+.0} vs {:+.0} €) and costs farmers ({:+.0} vs {:+.0} €)",
            pc.beekeeping_delta, pn.beekeeping_delta, pc.agricultural_delta, pn.agricultural_delta
        ),
    );
    c
}

fn c9(p: &ParameterSet, cfg: &SolverConfig) -> Criterion {
    let mut c = Criterion::new(9, "Oracle equivalence at resolution 50");
    let t = Instant::now();
    let mut cells = vec![(Policy::bau(), C)];
    for kind in PolicyKind::INCENTIVES {
        for regime in Regime::ALL {
            cells.push((Policy::from_params(kind, p), regime));
        }
    }
    for (policy, regime) in cells {
        let r = compare_with_oracle(&policy, regime, p, cfg, 50).unwrap();
        c.check(
            r.within_bound,
            format!(
                "{}/{regime}: gap {:.2e} ≤ slack {:.2e}, argmax {:.2} cells ≤ 1",
                policy.kind, r.gap, r.bound, r.argmax_cells
            ),
        );
    }
    c.within_time(t.elapsed(), Duration::from_secs(120));
    c
}

fn random_decision(rng: &mut StdRng) -> FarmerDecision {
    let o: f64 = rng.gen();
    let g: f64 = rng.gen();
    FarmerDecision::from_shares(g * (1.0 - o), o, rng.gen()).unwrap()
}

fn c10(p: &ParameterSet, cfg: &SolverConfig, s: &SuiteResult) -> Criterion {
    let mut c = Criterion::new(10, "Property suites");
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_240_601);

    let closure = (0..1000).all(|_| {
        let fd = random_decision(&mut rng);
        (fd.x_w + fd.x_g + fd.x_osr - 1.0).abs() <= 1e-9 && fd.x_w >= 0.0
    });
    c.check(closure, "acreage closure on 1000 random decisions");

    let damage_ok = (0..1000).all(|_| {
        let (o, x_p, step): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen::<f64>() * 0.1);
        let d = damage(o, x_p, p).unwrap();
        (0.0..=1.0).contains(&d)
            && damage((o + step).min(1.0), x_p, p).unwrap() <= d
            && damage(o, (x_p + step).min(1.0), p).unwrap() <= d
    });
    c.check(damage_ok, "damage within [0,1] and non-increasing in x_osr and x_p");

    let transfers_ok = (0..1000).all(|_| {
        let fd = random_decision(&mut rng);
        let bk = BeekeeperDecision {
            x_h: rng.gen::<f64>() * p.x_h_max,
        };
        let hs = Policy::hive_subsidy(p.z_hs).unwrap();
        let ps = Policy::price_subsidy(p.z_ps).unwrap();
        let pt = Policy::pesticide_tax(p.z_pt).unwrap();
        beekeeper_transfer(&bk, &fd, &hs, p) == p.z_hs * bk.x_h
            && beekeeper_transfer(&bk, &fd, &ps, p) == p.z_ps * honey_production(&bk, &fd, p)
            && farmer_transfer(&fd, &pt) == -p.z_pt * fd.x_osr * fd.x_p
            && farmer_transfer(&fd, &hs) == 0.0
    });
    c.check(transfers_ok, "transfer identities on 1000 random points");

    let e2_ok = s.cells.iter().all(|cell| {
        let l = &cell.ledger;
        let i = &cell.indicators;
        i.e2_total_wealth == i.e1_stakeholder_wealth + l.public_balance
            && i.es4_water_nutrient == cell.equilibrium.farmer.x_g
    });
    c.check(e2_ok, "E2 = E1 - transfers and ES4 = x_g in every cell");

    let ps_mr = cell(s, PS, C).marginals.as_ref().unwrap().honey_marginal_revenue.scenario;
    c.check(ps_mr == Some(p.p_h + p.z_ps), "PS honey marginal revenue equals p_h + z_ps");

    let base = solve_farmer(&Policy::bau(), Coupling::BestResponse, p, cfg, None).unwrap();
    let invariant = [0.01, 1000.0].iter().all(|&f| {
        let scaled = solve_farmer(&Policy::bau(), Coupling::BestResponse, &p.scale_money(f), cfg, None).unwrap();
        let (a, b) = (base.decision, scaled.decision);
        [(a.x_g, b.x_g), (a.x_osr, b.x_osr), (a.x_p, b.x_p)]
            .iter()
            .all(|(x, y)| (x - y).abs() <= 1e-6)
    });
    c.check(invariant, "argmax unchanged when money is rescaled by 0.01 and 1000");

    let h = 1e-6;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let o = 0.05 + 0.85 * rng.gen::<f64>();
        let g = (0.05 + 0.9 * rng.gen::<f64>()) * (1.0 - o);
        let fd = FarmerDecision::from_shares(g, o, 0.05 + 0.9 * rng.gen::<f64>()).unwrap();
        let bk = BeekeeperDecision {
            x_h: 0.05 + 0.65 * rng.gen::<f64>(),
        };
        let honey = |x_h| honey_production(&BeekeeperDecision { x_h }, &fd, p);
        let out = |f: &FarmerDecision| osr_production(f, &bee_abundance(&bk, f, p), p);
        let area = |x_osr: f64| FarmerDecision { x_w: 1.0 - fd.x_g - x_osr, x_osr, ..fd };
        let rate = |x_p| FarmerDecision { x_p, ..fd };
        worst = worst
            .max(rel(
                beehive_marginal_product(&bk, &fd, p).unwrap(),
                (honey(bk.x_h + h) - honey(bk.x_h - h)) / (2.0 * h),
            ))
            .max(rel(
                osr_area_marginal_product(&fd, &bk, p),
                (out(&area(fd.x_osr + h)) - out(&area(fd.x_osr - h))) / (2.0 * h),
            ))
            .max(rel(
                pesticide_marginal_product(&fd, &bk, p).unwrap(),
                (out(&rate(fd.x_p + h)) - out(&rate(fd.x_p - h))) / (2.0 * h),
            ));
    }
    c.check(worst <= 1e-4, format!("analytic vs central differences at 50 points: worst rel. err {worst:.1e} ≤ 1e-4"));

    let pooled = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| run_suite(p, cfg).unwrap())
    };
    c.check(pooled(1) == pooled(4), "suite bit-identical with 1 and 4 threads");
    c.within_time(t.elapsed(), Duration::from_secs(60));
    c
}

fn c11(p: &ParameterSet, cfg: &SolverConfig) -> Criterion {
    let mut c = Criterion::new(11, "OSR price sweep 300-400 €/t");
    let t = Instant::now();
    let points = price_sweep(p, 300.0, 400.0, 11, cfg).unwrap();
    let elapsed = t.elapsed();
    let shares: Vec<f64> = points
        .iter()
        .map(|pt| pt.suite.as_ref().map_or(f64::NAN, |s| s.baseline().equilibrium.farmer.x_osr))
        .collect();
    c.check(shares[0] == 0.0, format!("BAU OSR share at 300 €/t is {}", shares[0]));
    let monotone = shares.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let listing: Vec<String> = shares.iter().map(|x| format!("{x:.3}")).collect();
    c.check(monotone, format!("BAU OSR share non-decreasing in price: [{}]", listing.join(", ")));
    c.within_time(elapsed, Duration::from_secs(60));
    c
}

fn main() -> ExitCode {
    let p = default_calibration();
    let cfg = SolverConfig::default();
    let suite = run_suite(&p, &cfg).expect("default suite solves");

    let criteria = [
        c1(&p, &cfg),
        c2(&suite),
        c3(&suite),
        c4(&suite),
        c5(&suite),
        c6(&suite),
        c7(&suite),
        c8(&suite),
        c9(&p, &cfg),
        c10(&p, &cfg, &suite),
        c11(&p, &cfg),
    ];
    println!();
    for c in &criteria {
        c.print();
    }
    let failed: Vec<String> = criteria.iter().filter(|c| !c.passed()).map(|c| c.id.to_string()).collect();
    println!(
        "\nacceptance: {}/{} criteria passed{}",
        criteria.len() - failed.len(),
        criteria.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
