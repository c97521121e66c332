//! Experiment suite: BAU plus every incentive under both regimes, landscape
//! ledgers, parameter sweeps and subsidy budget matching.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_against_baseline, solve_baseline, Equilibrium, Regime, SolverConfig};
use crate::error::{Error, Result};
use crate::indicators::{marginal_report, IndicatorBundle, MarginalReport, RelativeChanges};
use crate::model::{Policy, PolicyKind};
use crate::params::ParameterSet;

/// The published calibration (see [`ParameterSet::default_calibration`]).
pub fn default_calibration() -> ParameterSet {
    ParameterSet::default_calibration()
}

/// Landscape totals in €: six 95 ha farms and one beekeeper over 570 ha.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LandscapeLedger {
    pub agricultural_wealth: f64,
    pub beekeeping_wealth: f64,
    /// Taxes collected minus subsidies paid.
    pub public_balance: f64,
    pub agricultural_delta: f64,
    pub beekeeping_delta: f64,
    pub public_delta: f64,
}

impl LandscapeLedger {
    pub fn total_wealth(&self) -> f64 {
        self.agricultural_wealth + self.beekeeping_wealth + self.public_balance
    }

    pub fn total_delta(&self) -> f64 {
        self.agricultural_delta + self.beekeeping_delta + self.public_delta
    }

    /// Same totals with deltas measured against `baseline`.
    pub fn with_baseline(self, baseline: &LandscapeLedger) -> Self {
        Self {
            agricultural_delta: self.agricultural_wealth - baseline.agricultural_wealth,
            beekeeping_delta: self.beekeeping_wealth - baseline.beekeeping_wealth,
            public_delta: self.public_balance - baseline.public_balance,
            ..self
        }
    }
}

/// Scales per-hectare profits and transfers to the landscape. Deltas are
/// zero until [`LandscapeLedger::with_baseline`] is applied.
pub fn landscape_aggregate(eq: &Equilibrium, params: &ParameterSet) -> LandscapeLedger {
    let farmland = params.farmland_area();
    LandscapeLedger {
        agricultural_wealth: farmland * eq.farmer_profit,
        beekeeping_wealth: params.landscape_area * eq.beekeeper_profit,
        public_balance: -params.landscape_area * eq.transfer_beekeeper - farmland * eq.transfer_farmer,
        ..LandscapeLedger::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCell {
    pub policy: Policy,
    pub regime: Regime,
    pub equilibrium: Equilibrium,
    pub indicators: IndicatorBundle,
    pub relative_changes: RelativeChanges,
    pub ledger: LandscapeLedger,
    /// Absent for BAU.
    pub marginals: Option<MarginalReport>,
}

/// Which incentive cells to solve; BAU is always included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSelection {
    pub policies: Vec<PolicyKind>,
    pub regimes: Vec<Regime>,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        Self {
            policies: PolicyKind::INCENTIVES.to_vec(),
            regimes: Regime::ALL.to_vec(),
        }
    }
}

impl SuiteSelection {
    /// Selected incentive cells in canonical order, deduplicated.
    pub fn cells(&self) -> Vec<(PolicyKind, Regime)> {
        let mut out = Vec::new();
        for kind in PolicyKind::INCENTIVES {
            if !self.policies.contains(&kind) {
                continue;
            }
            for regime in Regime::ALL {
                if self.regimes.contains(&regime) {
                    out.push((kind, regime));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub params: ParameterSet,
    pub solver: SolverConfig,
    /// BAU first, then HS, PS, PT, each Communication before NoCommunication.
    pub cells: Vec<ScenarioCell>,
}

impl SuiteResult {
    pub fn cell(&self, kind: PolicyKind, regime: Regime) -> Option<&ScenarioCell> {
        self.cells.iter().find(|c| {
            c.policy.kind == kind && (c.regime == regime || kind == PolicyKind::Bau)
        })
    }

    pub fn baseline(&self) -> &ScenarioCell {
        &self.cells[0]
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.equilibrium.converged)
    }
}

/// Solves the full suite at the calibrated incentive levels.
pub fn run_suite(params: &ParameterSet, cfg: &SolverConfig) -> Result<SuiteResult> {
    run_suite_with(params, cfg, &SuiteSelection::default())
}

/// Solves BAU once, then the selected cells in parallel on the current rayon
/// pool. Output order and values do not depend on the pool size.
pub fn run_suite_with(params: &ParameterSet, cfg: &SolverConfig, selection: &SuiteSelection) -> Result<SuiteResult> {
    params.validate()?;
    cfg.validate()?;
    let baseline = solve_baseline(params, cfg)?;
    let baseline_indicators = IndicatorBundle::of(&baseline, params);
    let baseline_ledger = landscape_aggregate(&baseline, params);

    let mut policies: Vec<PolicyKind> = PolicyKind::INCENTIVES
        .into_iter()
        .filter(|k| selection.policies.contains(k))
        .collect();
    policies.dedup();

    // Each policy's no-communication cell is needed for its marginals even
    // when that regime is not selected.
    let per_policy: Vec<Result<Vec<ScenarioCell>>> = policies
        .par_iter()
        .map(|&kind| {
            let policy = Policy::from_params(kind, params);
            let no_comm = solve_against_baseline(&policy, Regime::NoCommunication, &baseline, params, cfg)?;
            let marginals = marginal_report(&baseline, &no_comm, &policy, params);
            let mut cells = Vec::new();
            for regime in Regime::ALL {
                if !selection.regimes.contains(&regime) {
                    continue;
                }
                let eq = match regime {
                    Regime::NoCommunication => no_comm,
                    Regime::Communication => {
                        solve_against_baseline(&policy, regime, &baseline, params, cfg)?
                    }
                };
                cells.push(make_cell(
                    policy,
                    regime,
                    eq,
                    &baseline_indicators,
                    &baseline_ledger,
                    Some(marginals.clone()),
                    params,
                ));
            }
            Ok(cells)
        })
        .collect();

    let mut cells = vec![make_cell(
        Policy::bau(),
        Regime::Communication,
        baseline,
        &baseline_indicators,
        &baseline_ledger,
        None,
        params,
    )];
    for group in per_policy {
        cells.extend(group?);
    }
    Ok(SuiteResult {
        params: params.clone(),
        solver: *cfg,
        cells,
    })
}

fn make_cell(
    policy: Policy,
    regime: Regime,
    equilibrium: Equilibrium,
    baseline_indicators: &IndicatorBundle,
    baseline_ledger: &LandscapeLedger,
    marginals: Option<MarginalReport>,
    params: &ParameterSet,
) -> ScenarioCell {
    let indicators = IndicatorBundle::of(&equilibrium, params);
    ScenarioCell {
        policy,
        regime,
        equilibrium,
        relative_changes: indicators.relative_to(baseline_indicators),
        indicators,
        ledger: landscape_aggregate(&equilibrium, params).with_baseline(baseline_ledger),
        marginals,
    }
}

/// One sweep point; a failed point keeps its error and the sweep goes on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub parameter: String,
    pub value: f64,
    pub suite: Option<SuiteResult>,
    pub error: Option<String>,
}

/// Fields that cannot be swept: integer-valued or derived.
pub const UNSWEEPABLE: &[&str] = &["n_farmers"];

/// `steps` evenly spaced values from `min` to `max`, both included.
pub fn sweep_values(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(Error::InvalidSweep(format!("need min < max, got {min} and {max}")));
    }
    if steps < 2 {
        return Err(Error::InvalidSweep("steps must be at least 2".into()));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { max } else { min + i as f64 * (max - min) / n })
        .collect())
}

/// Runs the suite at each value of one scalar parameter, in parallel.
pub fn param_sweep(
    params: &ParameterSet,
    name: &str,
    values: &[f64],
    cfg: &SolverConfig,
    selection: &SuiteSelection,
) -> Result<Vec<SweepPoint>> {
    if UNSWEEPABLE.contains(&name) {
        return Err(Error::InvalidSweep(format!("`{name}` is not a real-valued parameter")));
    }
    params.get(name)?;
    cfg.validate()?;
    Ok(values
        .par_iter()
        .map(|&value| {
            let outcome = params
                .with_override(name, value)
                .and_then(|p| run_suite_with(&p, cfg, selection));
            let (suite, error) = match outcome {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepPoint {
                parameter: name.to_string(),
                value,
                suite,
                error,
            }
        })
        .collect())
}

/// OSR price sweep over `steps` evenly spaced prices.
pub fn price_sweep(
    params: &ParameterSet,
    p_min: f64,
    p_max: f64,
    steps: usize,
    cfg: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    if p_min <= 0.0 {
        return Err(Error::InvalidSweep("prices must be positive".into()));
    }
    let values = sweep_values(p_min, p_max, steps)?;
    param_sweep(params, "p_osr", &values, cfg, &SuiteSelection::default())
}

/// Subsidy level whose landscape transfer hits a budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetMatch {
    pub level: f64,
    pub total_transfer: f64,
    pub iterations: usize,
}

const BUDGET_TOLERANCE: f64 = 1.0;
const BUDGET_MAX_ITERATIONS: usize = 60;

/// Finds the HS or PS level whose total transfer to the beekeeper equals
/// `target` (€, within €1) in the given regime. Starts from the calibrated
/// level with the proportional update `z <- z * target / T(z)` and falls
/// back to bisection if that stalls.
pub fn match_budget(
    kind: PolicyKind,
    target: f64,
    regime: Regime,
    params: &ParameterSet,
    cfg: &SolverConfig,
) -> Result<BudgetMatch> {
    if !kind.targets_beekeeper() {
        return Err(Error::InvalidPolicy(format!("{kind} does not pay the beekeeper")));
    }
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidPolicy("budget target must be positive".into()));
    }
    let baseline = solve_baseline(params, cfg)?;
    let transfer = |level: f64| -> Result<f64> {
        let policy = Policy::new(kind, level)?;
        let eq = solve_against_baseline(&policy, regime, &baseline, params, cfg)?;
        Ok(params.landscape_area * eq.transfer_beekeeper)
    };

    let mut iterations = 0;
    let mut level = Policy::from_params(kind, params).level.max(f64::MIN_POSITIVE);
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    while iterations < BUDGET_MAX_ITERATIONS {
        iterations += 1;
        let t = transfer(level)?;
        if (t - target).abs() <= BUDGET_TOLERANCE {
            return Ok(BudgetMatch {
                level,
                total_transfer: t,
                iterations,
            });
        }
        if t < target {
            lo = level;
        } else {
            hi = level;
        }
        let proposal = if t > 0.0 { level * target / t } else { level * 2.0 };
        level = if proposal > lo && proposal < hi {
            proposal
        } else if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            level * 2.0
        };
    }
    Err(Error::InvalidPolicy(format!(
        "budget {target} not matched within {BUDGET_MAX_ITERATIONS} iterations"
    )))
}
