//! Decisions, policies and the closed-form production and profit functions.
//!
//! Everything here is a pure evaluation per hectare of the representative
//! farm. Optimisation lives in [`crate::equilibrium`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;

/// Maximum allowed deviation of `x_w + x_g + x_osr` from 1.
pub const ACREAGE_TOLERANCE: f64 = 1e-9;

/// Land allocation of the representative farm and the pesticide rate on OSR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarmerDecision {
    pub x_w: f64,
    pub x_g: f64,
    pub x_osr: f64,
    pub x_p: f64,
}

impl FarmerDecision {
    pub fn new(x_w: f64, x_g: f64, x_osr: f64, x_p: f64) -> Result<Self> {
        let fd = Self { x_w, x_g, x_osr, x_p };
        fd.validate()?;
        Ok(fd)
    }

    /// Builds a decision from the grassland and OSR shares, wheat taking the
    /// remainder.
    pub fn from_shares(x_g: f64, x_osr: f64, x_p: f64) -> Result<Self> {
        let mut x_w = 1.0 - x_g - x_osr;
        if x_w < 0.0 && x_w > -ACREAGE_TOLERANCE {
            x_w = 0.0;
        }
        Self::new(x_w, x_g, x_osr, x_p)
    }

    /// All land in wheat, no pesticide.
    pub fn mono_wheat() -> Self {
        Self {
            x_w: 1.0,
            x_g: 0.0,
            x_osr: 0.0,
            x_p: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("x_w", self.x_w),
            ("x_g", self.x_g),
            ("x_osr", self.x_osr),
            ("x_p", self.x_p),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain {
                    field,
                    value: v,
                    expected: "[0, 1]",
                });
            }
        }
        let total = self.x_w + self.x_g + self.x_osr;
        if (total - 1.0).abs() > ACREAGE_TOLERANCE {
            return Err(Error::Domain {
                field: "x_w + x_g + x_osr",
                value: total,
                expected: "1 within 1e-9",
            });
        }
        Ok(())
    }
}

/// Hive density chosen by the representative beekeeper (hives/ha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeekeeperDecision {
    pub x_h: f64,
}

impl BeekeeperDecision {
    pub fn new(x_h: f64, params: &ParameterSet) -> Result<Self> {
        let bk = Self { x_h };
        bk.validate(params)?;
        Ok(bk)
    }

    pub fn validate(&self, params: &ParameterSet) -> Result<()> {
        if !(0.0..=params.x_h_max).contains(&self.x_h) {
            return Err(Error::Domain {
                field: "x_h",
                value: self.x_h,
                expected: "[0, x_h_max]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "BAU")]
    Bau,
    #[serde(rename = "HS")]
    HiveSubsidy,
    #[serde(rename = "PS")]
    PriceSubsidy,
    #[serde(rename = "PT")]
    PesticideTax,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Bau,
        PolicyKind::HiveSubsidy,
        PolicyKind::PriceSubsidy,
        PolicyKind::PesticideTax,
    ];
    pub const INCENTIVES: [PolicyKind; 3] = [
        PolicyKind::HiveSubsidy,
        PolicyKind::PriceSubsidy,
        PolicyKind::PesticideTax,
    ];

    pub fn code(self) -> &'static str {
        match self {
            PolicyKind::Bau => "BAU",
            PolicyKind::HiveSubsidy => "HS",
            PolicyKind::PriceSubsidy => "PS",
            PolicyKind::PesticideTax => "PT",
        }
    }

    /// True when the instrument pays or taxes the beekeeper.
    pub fn targets_beekeeper(self) -> bool {
        matches!(self, PolicyKind::HiveSubsidy | PolicyKind::PriceSubsidy)
    }

    pub fn targets_farmer(self) -> bool {
        self == PolicyKind::PesticideTax
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "BAU" => Ok(PolicyKind::Bau),
            "HS" => Ok(PolicyKind::HiveSubsidy),
            "PS" => Ok(PolicyKind::PriceSubsidy),
            "PT" => Ok(PolicyKind::PesticideTax),
            other => Err(Error::InvalidPolicy(format!("unknown policy `{other}`"))),
        }
    }
}

/// A policy instrument and its level: € per hive (HS), € per kg of honey
/// (PS) or € per hectare of OSR at full pesticide rate (PT).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub kind: PolicyKind,
    pub level: f64,
}

impl Policy {
    pub fn bau() -> Self {
        Self {
            kind: PolicyKind::Bau,
            level: 0.0,
        }
    }

    pub fn new(kind: PolicyKind, level: f64) -> Result<Self> {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::InvalidPolicy(format!(
                "{kind} level must be finite and non-negative, got {level}"
            )));
        }
        if kind == PolicyKind::Bau && level != 0.0 {
            return Err(Error::InvalidPolicy("BAU carries no incentive level".into()));
        }
        Ok(Self { kind, level })
    }

    pub fn hive_subsidy(level: f64) -> Result<Self> {
        Self::new(PolicyKind::HiveSubsidy, level)
    }

    pub fn price_subsidy(level: f64) -> Result<Self> {
        Self::new(PolicyKind::PriceSubsidy, level)
    }

    pub fn pesticide_tax(level: f64) -> Result<Self> {
        Self::new(PolicyKind::PesticideTax, level)
    }

    /// The policy at the level stored in the calibration.
    pub fn from_params(kind: PolicyKind, params: &ParameterSet) -> Self {
        let level = match kind {
            PolicyKind::Bau => 0.0,
            PolicyKind::HiveSubsidy => params.z_hs,
            PolicyKind::PriceSubsidy => params.z_ps,
            PolicyKind::PesticideTax => params.z_pt,
        };
        Self { kind, level }
    }

    /// Honey price seen by the beekeeper at the margin.
    pub fn effective_honey_price(&self, params: &ParameterSet) -> f64 {
        match self.kind {
            PolicyKind::PriceSubsidy => params.p_h + self.level,
            _ => params.p_h,
        }
    }

    /// Hive cost seen by the beekeeper at the margin.
    pub fn effective_hive_cost(&self, params: &ParameterSet) -> f64 {
        match self.kind {
            PolicyKind::HiveSubsidy => params.c_h - self.level,
            _ => params.c_h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.kind, self.level).map(|_| ())
    }
}

/// Bee abundance per hectare and its normalised value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeePopulations {
    pub honeybees: f64,
    pub wildbees: f64,
    pub total: f64,
    pub normalized: f64,
}

/// Cobb-Douglas benefit `margin * share^epsilon` of wheat or hay.
pub fn crop_benefit(share: f64, margin: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&share) {
        return Err(Error::Domain {
            field: "share",
            value: share,
            expected: "[0, 1]",
        });
    }
    Ok(margin * share.powf(epsilon))
}

/// Pesticide damage factor `D = 1 - delta * x_osr * x_p^nu`.
pub fn damage(x_osr: f64, x_p: f64, params: &ParameterSet) -> Result<f64> {
    for (field, v) in [("x_osr", x_osr), ("x_p", x_p)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain {
                field,
                value: v,
                expected: "[0, 1]",
            });
        }
    }
    Ok(damage_value(x_osr, x_p, params))
}

pub(crate) fn damage_value(x_osr: f64, x_p: f64, params: &ParameterSet) -> f64 {
    1.0 - params.delta * x_osr * x_p.powf(params.nu)
}

pub fn bee_abundance(
    bk: &BeekeeperDecision,
    fd: &FarmerDecision,
    params: &ParameterSet,
) -> BeePopulations {
    bees_at(bk.x_h, fd, params)
}

fn bees_at(x_h: f64, fd: &FarmerDecision, params: &ParameterSet) -> BeePopulations {
    let honeybees = x_h * params.k_h;
    let wildbees = fd.x_g * params.k_w * damage_value(fd.x_osr, fd.x_p, params);
    let total = honeybees + wildbees;
    BeePopulations {
        honeybees,
        wildbees,
        total,
        normalized: total / params.b_ref,
    }
}

/// Bee-dependent, pesticide-dependent and independent partial yields, summed.
fn osr_yield(normalized_bees: f64, x_p: f64, params: &ParameterSet) -> f64 {
    params.alpha1 * normalized_bees / (params.beta1 + normalized_bees)
        + params.alpha2 * x_p / (params.beta2 + x_p)
        + params.f_osr3
}

/// OSR output per hectare of farm (t/ha).
pub fn osr_production(fd: &FarmerDecision, bees: &BeePopulations, params: &ParameterSet) -> f64 {
    fd.x_osr * osr_yield(bees.normalized, fd.x_p, params)
}

/// Honey output per hectare (kg/ha); zero without OSR or without hives.
pub fn honey_production(bk: &BeekeeperDecision, fd: &FarmerDecision, params: &ParameterSet) -> f64 {
    honey_at(bk.x_h, fd, params)
}

pub(crate) fn honey_at(x_h: f64, fd: &FarmerDecision, params: &ParameterSet) -> f64 {
    if fd.x_osr == 0.0 || x_h == 0.0 {
        return 0.0;
    }
    params.f_h
        * fd.x_osr.powf(params.gamma_osr)
        * x_h.powf(params.gamma_hive)
        * damage_value(fd.x_osr, fd.x_p, params)
}

/// Transfer received by the farmer (negative under the pesticide tax).
pub fn farmer_transfer(fd: &FarmerDecision, policy: &Policy) -> f64 {
    match policy.kind {
        PolicyKind::PesticideTax => -policy.level * fd.x_osr * fd.x_p,
        _ => 0.0,
    }
}

/// Transfer received by the beekeeper.
pub fn beekeeper_transfer(
    bk: &BeekeeperDecision,
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> f64 {
    match policy.kind {
        PolicyKind::HiveSubsidy => policy.level * bk.x_h,
        PolicyKind::PriceSubsidy => policy.level * honey_at(bk.x_h, fd, params),
        _ => 0.0,
    }
}

pub fn farmer_profit(
    fd: &FarmerDecision,
    bk: &BeekeeperDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> Result<f64> {
    fd.validate()?;
    bk.validate(params)?;
    Ok(farmer_profit_at(fd, bk.x_h, policy, params))
}

/// Farmer profit without input validation; the solver hot path.
pub(crate) fn farmer_profit_at(
    fd: &FarmerDecision,
    x_h: f64,
    policy: &Policy,
    params: &ParameterSet,
) -> f64 {
    let bees = bees_at(x_h, fd, params);
    params.chi_w * fd.x_w.powf(params.epsilon) + params.chi_g * fd.x_g.powf(params.epsilon)
        + params.p_osr * osr_production(fd, &bees, params)
        - (params.c_osr * fd.x_osr + params.c_p * fd.x_osr * fd.x_p)
        + farmer_transfer(fd, policy)
}

pub fn beekeeper_profit(
    bk: &BeekeeperDecision,
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> Result<f64> {
    fd.validate()?;
    bk.validate(params)?;
    Ok(beekeeper_profit_at(bk.x_h, fd, policy, params))
}

pub(crate) fn beekeeper_profit_at(
    x_h: f64,
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> f64 {
    let honey = honey_at(x_h, fd, params);
    let transfer = match policy.kind {
        PolicyKind::HiveSubsidy => policy.level * x_h,
        PolicyKind::PriceSubsidy => policy.level * honey,
        _ => 0.0,
    };
    params.p_h * honey - params.c_h * x_h + transfer
}

/// Multiplicative effect of pesticides on the optimal hive count,
/// `1 / D^(1 / (1 - gamma_hive))`. Always at least `1 / D`, so honeybees
/// are hit harder than honey output.
pub fn honeybee_loss_rate(fd: &FarmerDecision, params: &ParameterSet) -> Result<f64> {
    fd.validate()?;
    let d = damage_value(fd.x_osr, fd.x_p, params);
    if d <= 0.0 {
        return Err(Error::Domain {
            field: "D",
            value: d,
            expected: "(0, 1]",
        });
    }
    Ok(d.powf(-1.0 / (1.0 - params.gamma_hive)))
}

// Analytic partial derivatives. Each returns `None` where the derivative is
// unbounded (a fractional power evaluated at zero).

/// `dF_H / dx_h` at fixed farmer decisions.
pub fn beehive_marginal_product(
    bk: &BeekeeperDecision,
    fd: &FarmerDecision,
    params: &ParameterSet,
) -> Option<f64> {
    if fd.x_osr == 0.0 {
        return Some(0.0);
    }
    if bk.x_h == 0.0 {
        return if damage_value(fd.x_osr, fd.x_p, params) == 0.0 {
            Some(0.0)
        } else {
            None
        };
    }
    Some(params.gamma_hive * honey_at(bk.x_h, fd, params) / bk.x_h)
}

/// `dF_OSR / dx_osr` with grassland share, pesticide rate and hives held
/// fixed (wheat absorbs the change).
pub fn osr_area_marginal_product(
    fd: &FarmerDecision,
    bk: &BeekeeperDecision,
    params: &ParameterSet,
) -> f64 {
    let bees = bees_at(bk.x_h, fd, params);
    let b = bees.normalized;
    let dy_db = params.alpha1 * params.beta1 / (params.beta1 + b).powi(2);
    let db_dxosr = -fd.x_g * params.k_w * params.delta * fd.x_p.powf(params.nu) / params.b_ref;
    osr_yield(b, fd.x_p, params) + fd.x_osr * dy_db * db_dxosr
}

/// `dF_OSR / dx_p` at fixed land use and hives.
pub fn pesticide_marginal_product(
    fd: &FarmerDecision,
    bk: &BeekeeperDecision,
    params: &ParameterSet,
) -> Option<f64> {
    let bees = bees_at(bk.x_h, fd, params);
    let b = bees.normalized;
    let dy_db = params.alpha1 * params.beta1 / (params.beta1 + b).powi(2);
    let exposure = fd.x_g * params.k_w * params.delta * fd.x_osr;
    let db_dxp = if exposure == 0.0 {
        0.0
    } else if fd.x_p == 0.0 {
        return None;
    } else {
        -exposure * params.nu * fd.x_p.powf(params.nu - 1.0) / params.b_ref
    };
    let dy_dxp = params.alpha2 * params.beta2 / (params.beta2 + fd.x_p).powi(2);
    Some(fd.x_osr * (dy_db * db_dxp + dy_dxp))
}

/// `dPi_k / dx_h` at fixed farmer decisions.
pub fn beekeeper_marginal_profit(
    bk: &BeekeeperDecision,
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> Option<f64> {
    let mp = beehive_marginal_product(bk, fd, params)?;
    let hive_transfer = if policy.kind == PolicyKind::HiveSubsidy {
        policy.level
    } else {
        0.0
    };
    Some(policy.effective_honey_price(params) * mp - params.c_h + hive_transfer)
}
