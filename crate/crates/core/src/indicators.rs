//! Economic, ecosystem-service and biodiversity indicators, and the
//! marginal revenue/product cascade that explains how a policy propagates.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_against_baseline, solve_baseline, Equilibrium, Regime, SolverConfig};
use crate::error::Result;
use crate::model::{
    bee_abundance, beehive_marginal_product, damage_value, honey_production, osr_area_marginal_product,
    osr_production, pesticide_marginal_product, BeekeeperDecision, FarmerDecision, Policy, PolicyKind,
};
use crate::params::ParameterSet;
use crate::scenarios::landscape_aggregate;

/// Indicator values for one equilibrium. Wealth indicators are landscape
/// totals; the others are per hectare of farm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorBundle {
    /// Farmer plus beekeeper wealth (€), transfers included.
    pub e1_stakeholder_wealth: f64,
    /// Stakeholder wealth net of the public budget (€).
    pub e2_total_wealth: f64,
    /// Normalised bee abundance.
    pub es1_pollination: f64,
    /// Food energy of all productions.
    pub es2_food_provision: f64,
    /// Share of land free of pesticide pressure.
    pub es3_water_pesticide: f64,
    /// Unfertilised share (grassland).
    pub es4_water_nutrient: f64,
    /// Wild bees per hectare.
    pub bc1_wildbees: f64,
    /// Species-area proxy for grassland plant richness.
    pub bc2_plant_richness: f64,
}

/// Percent change of every indicator versus a baseline; `None` when the
/// baseline value is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeChanges {
    pub e1_stakeholder_wealth: Option<f64>,
    pub e2_total_wealth: Option<f64>,
    pub es1_pollination: Option<f64>,
    pub es2_food_provision: Option<f64>,
    pub es3_water_pesticide: Option<f64>,
    pub es4_water_nutrient: Option<f64>,
    pub bc1_wildbees: Option<f64>,
    pub bc2_plant_richness: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub values: IndicatorBundle,
    pub relative: RelativeChanges,
}

/// `(value - baseline) / baseline * 100`, undefined for a zero baseline.
pub fn percent_change(value: f64, baseline: f64) -> Option<f64> {
    if baseline == 0.0 {
        None
    } else {
        Some((value - baseline) / baseline * 100.0)
    }
}

impl IndicatorBundle {
    pub const NAMES: [&'static str; 8] = [
        "e1_stakeholder_wealth",
        "e2_total_wealth",
        "es1_pollination",
        "es2_food_provision",
        "es3_water_pesticide",
        "es4_water_nutrient",
        "bc1_wildbees",
        "bc2_plant_richness",
    ];

    pub fn of(eq: &Equilibrium, params: &ParameterSet) -> Self {
        let fd = &eq.farmer;
        let ledger = landscape_aggregate(eq, params);
        let e1 = ledger.agricultural_wealth + ledger.beekeeping_wealth;
        Self {
            e1_stakeholder_wealth: e1,
            e2_total_wealth: e1 + ledger.public_balance,
            es1_pollination: eq.bees.normalized,
            es2_food_provision: params.xi_w * params.y_w * fd.x_w
                + params.xi_g * params.y_g * fd.x_g
                + params.xi_osr * eq.osr_output
                + params.xi_h * eq.honey_output,
            es3_water_pesticide: 1.0 - fd.x_osr * fd.x_p - params.theta * fd.x_w,
            es4_water_nutrient: fd.x_g,
            bc1_wildbees: fd.x_g * params.k_w * damage_value(fd.x_osr, fd.x_p, params),
            bc2_plant_richness: fd.x_g.powf(params.s),
        }
    }

    /// Values in [`Self::NAMES`] order.
    pub fn values(&self) -> [f64; 8] {
        [
            self.e1_stakeholder_wealth,
            self.e2_total_wealth,
            self.es1_pollination,
            self.es2_food_provision,
            self.es3_water_pesticide,
            self.es4_water_nutrient,
            self.bc1_wildbees,
            self.bc2_plant_richness,
        ]
    }

    pub fn relative_to(&self, baseline: &IndicatorBundle) -> RelativeChanges {
        let c = |v: f64, b: f64| percent_change(v, b);
        RelativeChanges {
            e1_stakeholder_wealth: c(self.e1_stakeholder_wealth, baseline.e1_stakeholder_wealth),
            e2_total_wealth: c(self.e2_total_wealth, baseline.e2_total_wealth),
            es1_pollination: c(self.es1_pollination, baseline.es1_pollination),
            es2_food_provision: c(self.es2_food_provision, baseline.es2_food_provision),
            es3_water_pesticide: c(self.es3_water_pesticide, baseline.es3_water_pesticide),
            es4_water_nutrient: c(self.es4_water_nutrient, baseline.es4_water_nutrient),
            bc1_wildbees: c(self.bc1_wildbees, baseline.bc1_wildbees),
            bc2_plant_richness: c(self.bc2_plant_richness, baseline.bc2_plant_richness),
        }
    }
}

impl RelativeChanges {
    /// Values in [`IndicatorBundle::NAMES`] order.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            self.e1_stakeholder_wealth,
            self.e2_total_wealth,
            self.es1_pollination,
            self.es2_food_provision,
            self.es3_water_pesticide,
            self.es4_water_nutrient,
            self.bc1_wildbees,
            self.bc2_plant_richness,
        ]
    }
}

/// Indicators of `eq` and their change versus `baseline`.
pub fn compute_indicators(eq: &Equilibrium, baseline: &Equilibrium, params: &ParameterSet) -> IndicatorReport {
    let values = IndicatorBundle::of(eq, params);
    let relative = values.relative_to(&IndicatorBundle::of(baseline, params));
    IndicatorReport { values, relative }
}

/// A marginal quantity at BAU and in the scenario. `None` marks a quantity
/// that is undefined at that point (e.g. a revenue per unit of a zero
/// marginal product).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalEntry {
    pub bau: Option<f64>,
    pub scenario: Option<f64>,
    pub percent_change: Option<f64>,
}

impl MarginalEntry {
    fn new(bau: Option<f64>, scenario: Option<f64>) -> Self {
        let percent_change = match (bau, scenario) {
            (Some(b), Some(s)) => percent_change(s, b),
            _ => None,
        };
        Self {
            bau,
            scenario,
            percent_change,
        }
    }
}

/// Marginal revenues and products at BAU versus the scenario.
///
/// Scenario values are taken where the policy's spillover acts without
/// communication: for HS/PS the farmer stays at BAU and the beekeeper
/// responds; for PT the beekeeper stays at BAU and the farmer responds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub policy: Policy,
    /// `dR_k/dF_H`: beekeeper revenue per extra kg of honey (€/kg).
    pub honey_marginal_revenue: MarginalEntry,
    /// `dR_f/dF_OSR`: farmer revenue per extra t of OSR (€/t).
    pub osr_marginal_revenue: MarginalEntry,
    /// `dF_OSR/dx_osr` (t/ha).
    pub osr_area_marginal_product: MarginalEntry,
    /// `dF_OSR/dx_p` (t per unit rate).
    pub pesticide_marginal_product: MarginalEntry,
    /// `dF_H/dx_h` (kg per hive).
    pub beehive_marginal_product: MarginalEntry,
    /// Points where a one-sided difference replaced an unbounded derivative.
    pub diagnostics: Vec<String>,
}

impl MarginalReport {
    pub const NAMES: [&'static str; 5] = [
        "honey_marginal_revenue",
        "osr_marginal_revenue",
        "osr_area_marginal_product",
        "pesticide_marginal_product",
        "beehive_marginal_product",
    ];

    /// Entries in [`Self::NAMES`] order.
    pub fn entries(&self) -> [&MarginalEntry; 5] {
        [
            &self.honey_marginal_revenue,
            &self.osr_marginal_revenue,
            &self.osr_area_marginal_product,
            &self.pesticide_marginal_product,
            &self.beehive_marginal_product,
        ]
    }
}

// Step of the one-sided fallback differences.
const ONE_SIDED_STEP: f64 = 1e-6;

struct PointMarginals {
    honey_revenue: Option<f64>,
    osr_revenue: Option<f64>,
    osr_area: f64,
    pesticide: f64,
    beehive: f64,
}

fn marginals_at(
    fd: &FarmerDecision,
    bk: &BeekeeperDecision,
    policy: &Policy,
    params: &ParameterSet,
    label: &str,
    diagnostics: &mut Vec<String>,
) -> PointMarginals {
    let beehive = beehive_marginal_product(bk, fd, params).unwrap_or_else(|| {
        diagnostics.push(format!(
            "{label}: beehive_marginal_product unbounded at x_h = 0, using a one-sided difference"
        ));
        let up = BeekeeperDecision {
            x_h: (bk.x_h + ONE_SIDED_STEP).min(params.x_h_max),
        };
        (honey_production(&up, fd, params) - honey_production(bk, fd, params)) / (up.x_h - bk.x_h)
    });
    let pesticide = pesticide_marginal_product(fd, bk, params).unwrap_or_else(|| {
        diagnostics.push(format!(
            "{label}: pesticide_marginal_product unbounded at x_p = 0, using a one-sided difference"
        ));
        let up = FarmerDecision {
            x_p: fd.x_p + ONE_SIDED_STEP,
            ..*fd
        };
        let output = |f: &FarmerDecision| osr_production(f, &bee_abundance(bk, f, params), params);
        (output(&up) - output(fd)) / ONE_SIDED_STEP
    });
    let osr_area = osr_area_marginal_product(fd, bk, params);

    // Transfer per unit of own input, converted to per unit of output.
    let honey_revenue = match policy.kind {
        PolicyKind::HiveSubsidy => (beehive != 0.0).then(|| params.p_h + policy.level / beehive),
        PolicyKind::PriceSubsidy => Some(params.p_h + policy.level),
        _ => Some(params.p_h),
    };
    let osr_revenue = match policy.kind {
        PolicyKind::PesticideTax => (osr_area != 0.0).then(|| params.p_osr - policy.level * fd.x_p / osr_area),
        _ => Some(params.p_osr),
    };
    PointMarginals {
        honey_revenue,
        osr_revenue,
        osr_area,
        pesticide,
        beehive,
    }
}

/// Marginal report from already solved BAU and no-communication equilibria.
pub fn marginal_report(
    baseline: &Equilibrium,
    no_communication: &Equilibrium,
    policy: &Policy,
    params: &ParameterSet,
) -> MarginalReport {
    let mut diagnostics = Vec::new();
    let bau = marginals_at(
        &baseline.farmer,
        &baseline.beekeeper,
        &Policy::bau(),
        params,
        "BAU",
        &mut diagnostics,
    );
    let scn = marginals_at(
        &no_communication.farmer,
        &no_communication.beekeeper,
        policy,
        params,
        policy.kind.code(),
        &mut diagnostics,
    );
    MarginalReport {
        policy: *policy,
        honey_marginal_revenue: MarginalEntry::new(bau.honey_revenue, scn.honey_revenue),
        osr_marginal_revenue: MarginalEntry::new(bau.osr_revenue, scn.osr_revenue),
        osr_area_marginal_product: MarginalEntry::new(Some(bau.osr_area), Some(scn.osr_area)),
        pesticide_marginal_product: MarginalEntry::new(Some(bau.pesticide), Some(scn.pesticide)),
        beehive_marginal_product: MarginalEntry::new(Some(bau.beehive), Some(scn.beehive)),
        diagnostics,
    }
}

/// Solves BAU and the policy's no-communication cell, then reports the
/// marginal cascade.
pub fn marginal_cascade(policy: &Policy, params: &ParameterSet, cfg: &SolverConfig) -> Result<MarginalReport> {
    let baseline = solve_baseline(params, cfg)?;
    let scenario = solve_against_baseline(policy, Regime::NoCommunication, &baseline, params, cfg)?;
    Ok(marginal_report(&baseline, &scenario, policy, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::SolverReport;

    fn params() -> ParameterSet {
        ParameterSet::default_calibration()
    }

    fn eq_at(fd: FarmerDecision, x_h: f64, policy: &Policy) -> Equilibrium {
        Equilibrium::evaluate(
            fd,
            BeekeeperDecision { x_h },
            policy,
            &params(),
            true,
            SolverReport::default(),
        )
    }

    #[test]
    fn zero_baseline_gives_undefined_change() {
        assert_eq!(percent_change(3.0, 0.0), None);
        assert_eq!(percent_change(3.0, 2.0), Some(50.0));
    }

    #[test]
    fn identity_has_zero_changes() {
        let p = params();
        let eq = eq_at(FarmerDecision::new(0.45, 0.28, 0.27, 0.4).unwrap(), 0.3, &Policy::bau());
        let r = compute_indicators(&eq, &eq, &p);
        for c in r.relative.values() {
            assert_eq!(c, Some(0.0));
        }
    }

    #[test]
    fn bc1_matches_wildbees_and_es4_is_grassland() {
        let p = params();
        let eq = eq_at(FarmerDecision::new(0.3, 0.3, 0.4, 0.7).unwrap(), 0.2, &Policy::bau());
        let b = IndicatorBundle::of(&eq, &p);
        assert_eq!(b.bc1_wildbees, eq.bees.wildbees);
        assert_eq!(b.es4_water_nutrient, 0.3);
    }

    #[test]
    fn price_subsidy_revenue_is_exact() {
        let p = params();
        let fd = FarmerDecision::new(0.45, 0.28, 0.27, 0.4).unwrap();
        let ps = Policy::price_subsidy(p.z_ps).unwrap();
        let report = marginal_report(&eq_at(fd, 0.3, &Policy::bau()), &eq_at(fd, 0.35, &ps), &ps, &p);
        assert_eq!(report.honey_marginal_revenue.scenario, Some(p.p_h + p.z_ps));
        assert_eq!(report.honey_marginal_revenue.bau, Some(p.p_h));
    }

    #[test]
    fn corner_points_fall_back_with_diagnostics() {
        let p = params();
        let fd = FarmerDecision::new(0.45, 0.28, 0.27, 0.0).unwrap();
        let report = marginal_report(
            &eq_at(fd, 0.0, &Policy::bau()),
            &eq_at(fd, 0.0, &Policy::bau()),
            &Policy::bau(),
            &p,
        );
        assert_eq!(report.diagnostics.len(), 4);
        assert!(report.beehive_marginal_product.bau.unwrap() > 0.0);
        assert!(report.pesticide_marginal_product.bau.unwrap().is_finite());
    }
}
