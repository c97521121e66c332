//! Decision protocols: the beekeeper's closed-form best response, the
//! farmer's constrained optimisation, the two information regimes, and an
//! exhaustive lattice oracle used to validate the optimiser.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bee_abundance, beekeeper_profit_at, beekeeper_transfer, damage_value, farmer_profit_at,
    farmer_transfer, honey_production, osr_production, BeePopulations, BeekeeperDecision,
    FarmerDecision, Policy, PolicyKind,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::params::ParameterSet;

/// How much each stakeholder knows about the other's intentions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Farmer leads, beekeeper follows; the farmer anticipates the response.
    Communication,
    /// The non-targeted stakeholder keeps its BAU decision.
    NoCommunication,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::Communication, Regime::NoCommunication];

    pub fn code(self) -> &'static str {
        match self {
            Regime::Communication => "communication",
            Regime::NoCommunication => "no_communication",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "communication" => Ok(Regime::Communication),
            "no_communication" => Ok(Regime::NoCommunication),
            other => Err(Error::InvalidPolicy(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Number of lattice starting points for the farmer optimisation.
    pub restarts: usize,
    /// Profit tolerance (€/ha) for convergence and tie-breaking.
    pub tolerance: f64,
    /// Iteration budget per local search.
    pub max_iterations: usize,
    /// Lattice divisions per axis for the grid oracle.
    pub grid_resolution: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 27,
            tolerance: 1e-10,
            max_iterations: 5_000,
            grid_resolution: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidSolverConfig("restarts must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidSolverConfig("tolerance must be positive".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidSolverConfig("max_iterations must be at least 1".into()));
        }
        if self.grid_resolution < MIN_GRID_RESOLUTION {
            return Err(Error::InvalidSolverConfig(format!(
                "grid_resolution must be at least {MIN_GRID_RESOLUTION}"
            )));
        }
        Ok(())
    }
}

pub const MIN_GRID_RESOLUTION: usize = 20;

/// Diagnostics attached to every equilibrium.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged_restarts: usize,
    /// Largest max-norm distance between the selected candidate and any
    /// other candidate whose profit is within tolerance of the best.
    pub best_candidate_spread: f64,
    /// The hive count was clipped to `x_h_max`.
    pub hive_cap_binding: bool,
    /// The hive subsidy covers the full hive cost.
    pub free_hives: bool,
}

/// Decisions and realised outcomes for one (policy, regime) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub farmer: FarmerDecision,
    pub beekeeper: BeekeeperDecision,
    pub farmer_profit: f64,
    pub beekeeper_profit: f64,
    pub transfer_farmer: f64,
    pub transfer_beekeeper: f64,
    pub osr_output: f64,
    pub honey_output: f64,
    pub bees: BeePopulations,
    pub converged: bool,
    pub solver_report: SolverReport,
}

impl Equilibrium {
    /// Evaluates realised payoffs and outputs at a pair of decisions.
    pub fn evaluate(
        farmer: FarmerDecision,
        beekeeper: BeekeeperDecision,
        policy: &Policy,
        params: &ParameterSet,
        converged: bool,
        solver_report: SolverReport,
    ) -> Self {
        let bees = bee_abundance(&beekeeper, &farmer, params);
        Self {
            farmer,
            beekeeper,
            farmer_profit: farmer_profit_at(&farmer, beekeeper.x_h, policy, params),
            beekeeper_profit: beekeeper_profit_at(beekeeper.x_h, &farmer, policy, params),
            transfer_farmer: farmer_transfer(&farmer, policy),
            transfer_beekeeper: beekeeper_transfer(&beekeeper, &farmer, policy, params),
            osr_output: osr_production(&farmer, &bees, params),
            honey_output: honey_production(&beekeeper, &farmer, params),
            bees,
            converged,
            solver_report,
        }
    }
}

/// Beekeeper's optimal hive density with clipping diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiveResponse {
    pub decision: BeekeeperDecision,
    pub cap_binding: bool,
    pub free_hives: bool,
}

/// Closed-form maximiser of the beekeeper profit at fixed farmer decisions.
pub fn beekeeper_best_response(
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
) -> BeekeeperDecision {
    hive_response(fd, policy, params).decision
}

pub fn hive_response(fd: &FarmerDecision, policy: &Policy, params: &ParameterSet) -> HiveResponse {
    let cost = policy.effective_hive_cost(params);
    if cost <= 0.0 {
        return HiveResponse {
            decision: BeekeeperDecision { x_h: params.x_h_max },
            cap_binding: true,
            free_hives: true,
        };
    }
    let d = damage_value(fd.x_osr, fd.x_p, params);
    if fd.x_osr == 0.0 || d <= 0.0 {
        return HiveResponse {
            decision: BeekeeperDecision { x_h: 0.0 },
            cap_binding: false,
            free_hives: false,
        };
    }
    // First-order condition: gamma_hive * p_eff * f_h * x_osr^gamma_osr * D * x_h^(gamma_hive - 1) = c_eff.
    let scale = params.gamma_hive
        * policy.effective_honey_price(params)
        * params.f_h
        * fd.x_osr.powf(params.gamma_osr)
        * d;
    let interior = (cost / scale).powf(1.0 / (params.gamma_hive - 1.0));
    let cap_binding = interior > params.x_h_max;
    HiveResponse {
        decision: BeekeeperDecision {
            x_h: interior.min(params.x_h_max),
        },
        cap_binding,
        free_hives: false,
    }
}

/// What the farmer assumes about hives while optimising.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Hives follow the beekeeper's best response (Stackelberg leader).
    BestResponse,
    /// Hives are held at a given density.
    FixedHives(f64),
}

impl Coupling {
    fn hives(&self, fd: &FarmerDecision, policy: &Policy, params: &ParameterSet) -> f64 {
        match *self {
            Coupling::BestResponse => hive_response(fd, policy, params).decision.x_h,
            Coupling::FixedHives(x_h) => x_h,
        }
    }

    /// Farmer profit under this coupling.
    pub fn farmer_objective(&self, fd: &FarmerDecision, policy: &Policy, params: &ParameterSet) -> f64 {
        farmer_profit_at(fd, self.hives(fd, policy, params), policy, params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarmerSolution {
    pub decision: FarmerDecision,
    pub profit: f64,
    pub converged: bool,
    pub report: SolverReport,
}

// Decisions within this distance of a bound are tried exactly on the bound.
const SNAP_DISTANCE: f64 = 1e-6;
const X_TOLERANCE: f64 = 1e-10;

/// Maximises the farmer profit over the acreage simplex and pesticide rate.
///
/// Local searches run from a deterministic interior lattice (plus the
/// optional warm start); the best candidate wins, ties going to the
/// lexicographically smallest `(x_osr, x_p, x_g)`.
pub fn solve_farmer(
    policy: &Policy,
    coupling: Coupling,
    params: &ParameterSet,
    cfg: &SolverConfig,
    warm_start: Option<&FarmerDecision>,
) -> Result<FarmerSolution> {
    params.validate()?;
    policy.validate()?;
    cfg.validate()?;
    if let Coupling::FixedHives(x_h) = coupling {
        BeekeeperDecision::new(x_h, params)?;
    }

    let profit_of = |fd: &FarmerDecision| coupling.farmer_objective(fd, policy, params);
    // Quadratic penalty on the distance to the feasible set, in money units.
    let penalty = 10.0 * (params.chi_w + params.chi_g + params.p_osr);
    let objective = |z: &[f64; 3]| {
        let (fd, dist2) = project(z);
        -profit_of(&fd) + penalty * dist2
    };
    let opts = NelderMeadOptions {
        initial_step: 0.05,
        f_tolerance: cfg.tolerance,
        x_tolerance: X_TOLERANCE,
        max_iterations: cfg.max_iterations,
    };

    let mut starts = start_lattice(cfg.restarts);
    if let Some(ws) = warm_start {
        starts.push([ws.x_g, ws.x_osr, ws.x_p]);
    }

    let mut report = SolverReport {
        restarts: starts.len(),
        ..SolverReport::default()
    };
    let mut candidates: Vec<(FarmerDecision, f64)> = Vec::with_capacity(starts.len());
    for start in &starts {
        let first = nelder_mead(objective, *start, &opts);
        let polished = nelder_mead(objective, first.x, &opts);
        report.iterations += first.iterations + polished.iterations;
        report.evaluations += first.evaluations + polished.evaluations;
        if polished.converged {
            report.converged_restarts += 1;
        }
        let (fd, _) = project(&polished.x);
        let fd = snap_to_bounds(fd, &profit_of);
        candidates.push((fd, profit_of(&fd)));
    }

    let best_profit = candidates
        .iter()
        .map(|c| c.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best_profit.is_finite() {
        return Err(Error::Infeasible);
    }
    let tied: Vec<&(FarmerDecision, f64)> = candidates
        .iter()
        .filter(|c| c.1 >= best_profit - cfg.tolerance)
        .collect();
    let chosen = tied
        .iter()
        .min_by(|a, b| lex_key(&a.0).partial_cmp(&lex_key(&b.0)).expect("finite decisions"))
        .expect("at least one candidate");
    report.best_candidate_spread = tied
        .iter()
        .map(|c| max_norm(&c.0, &chosen.0))
        .fold(0.0, f64::max);

    Ok(FarmerSolution {
        decision: chosen.0,
        profit: chosen.1,
        converged: report.converged_restarts > 0,
        report,
    })
}

fn lex_key(fd: &FarmerDecision) -> (f64, f64, f64) {
    (fd.x_osr, fd.x_p, fd.x_g)
}

fn max_norm(a: &FarmerDecision, b: &FarmerDecision) -> f64 {
    [
        a.x_w - b.x_w,
        a.x_g - b.x_g,
        a.x_osr - b.x_osr,
        a.x_p - b.x_p,
    ]
    .iter()
    .fold(0.0, |m, d| m.max(d.abs()))
}

/// Interior starting points `(x_g, x_osr, x_p)`; `n` per axis with
/// `n^3 >= restarts`, truncated to `restarts` points.
fn start_lattice(restarts: usize) -> Vec<[f64; 3]> {
    let mut n = 1;
    while n * n * n < restarts {
        n += 1;
    }
    let t = |i: usize| (i + 1) as f64 / (n + 1) as f64;
    let mut out = Vec::with_capacity(n * n * n);
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                let x_osr = t(j);
                out.push([t(i) * (1.0 - x_osr), x_osr, t(k)]);
            }
        }
    }
    out.truncate(restarts);
    out
}

/// Euclidean projection of `(x_g, x_osr, x_p)` onto the feasible set, with
/// the squared distance moved.
fn project(z: &[f64; 3]) -> (FarmerDecision, f64) {
    let (g, o) = project_triangle(z[0], z[1]);
    let p = z[2].clamp(0.0, 1.0);
    let dist2 = (z[0] - g).powi(2) + (z[1] - o).powi(2) + (z[2] - p).powi(2);
    (decision_from(g, o, p), dist2)
}

fn decision_from(x_g: f64, x_osr: f64, x_p: f64) -> FarmerDecision {
    let x_w = (1.0 - x_g - x_osr).max(0.0);
    canonical(FarmerDecision { x_w, x_g, x_osr, x_p })
}

/// Without OSR the pesticide rate has no effect; report it as zero.
fn canonical(mut fd: FarmerDecision) -> FarmerDecision {
    if fd.x_osr == 0.0 {
        fd.x_p = 0.0;
    }
    fd
}

/// Closest point of `{a >= 0, b >= 0, a + b <= 1}` to `(a, b)`.
fn project_triangle(a: f64, b: f64) -> (f64, f64) {
    if a >= 0.0 && b >= 0.0 && a + b <= 1.0 {
        return (a, b);
    }
    let on_b_axis = (0.0, b.clamp(0.0, 1.0));
    let on_a_axis = (a.clamp(0.0, 1.0), 0.0);
    let t = ((a - b + 1.0) / 2.0).clamp(0.0, 1.0);
    let on_hypotenuse = (t, 1.0 - t);
    let d2 = |p: (f64, f64)| (a - p.0).powi(2) + (b - p.1).powi(2);
    [on_b_axis, on_a_axis, on_hypotenuse]
        .into_iter()
        .min_by(|p, q| d2(*p).total_cmp(&d2(*q)))
        .expect("three edges")
}

/// Moves coordinates lying within `SNAP_DISTANCE` of a bound onto it when
/// that does not lower profit.
fn snap_to_bounds<F: Fn(&FarmerDecision) -> f64>(fd: FarmerDecision, profit_of: &F) -> FarmerDecision {
    let mut current = fd;
    let mut current_profit = profit_of(&current);
    let moves: [fn(&FarmerDecision) -> Option<FarmerDecision>; 5] = [
        |fd| (fd.x_osr > 0.0 && fd.x_osr < SNAP_DISTANCE).then(|| decision_from(fd.x_g, 0.0, fd.x_p)),
        |fd| (fd.x_g > 0.0 && fd.x_g < SNAP_DISTANCE).then(|| decision_from(0.0, fd.x_osr, fd.x_p)),
        |fd| {
            (fd.x_w > 0.0 && fd.x_w < SNAP_DISTANCE)
                .then(|| decision_from(fd.x_g, 1.0 - fd.x_g, fd.x_p))
        },
        |fd| (fd.x_p > 0.0 && fd.x_p < SNAP_DISTANCE).then(|| decision_from(fd.x_g, fd.x_osr, 0.0)),
        |fd| {
            (fd.x_p < 1.0 && fd.x_p > 1.0 - SNAP_DISTANCE)
                .then(|| decision_from(fd.x_g, fd.x_osr, 1.0))
        },
    ];
    for snap in moves {
        if let Some(candidate) = snap(&current) {
            let p = profit_of(&candidate);
            if p >= current_profit {
                current = candidate;
                current_profit = p;
            }
        }
    }
    current
}

/// Solves one cell from scratch (BAU first when the regime needs it).
pub fn solve_equilibrium(
    policy: &Policy,
    regime: Regime,
    params: &ParameterSet,
    cfg: &SolverConfig,
) -> Result<Equilibrium> {
    let baseline = solve_baseline(params, cfg)?;
    if policy.kind == PolicyKind::Bau {
        return Ok(baseline);
    }
    solve_against_baseline(policy, regime, &baseline, params, cfg)
}

/// The BAU equilibrium: Stackelberg play without transfers.
pub fn solve_baseline(params: &ParameterSet, cfg: &SolverConfig) -> Result<Equilibrium> {
    stackelberg(&Policy::bau(), params, cfg, None)
}

/// Solves an incentive cell given an already solved BAU equilibrium.
///
/// Under `NoCommunication` the non-targeted stakeholder keeps its BAU
/// decision (farmer for HS/PS, beekeeper for PT) and the targeted one
/// best-responds to it. BAU itself ignores the regime.
pub fn solve_against_baseline(
    policy: &Policy,
    regime: Regime,
    baseline: &Equilibrium,
    params: &ParameterSet,
    cfg: &SolverConfig,
) -> Result<Equilibrium> {
    if policy.kind == PolicyKind::Bau {
        return Ok(*baseline);
    }
    match regime {
        Regime::Communication => stackelberg(policy, params, cfg, Some(&baseline.farmer)),
        Regime::NoCommunication if policy.kind.targets_beekeeper() => {
            params.validate()?;
            policy.validate()?;
            let response = hive_response(&baseline.farmer, policy, params);
            let report = SolverReport {
                hive_cap_binding: response.cap_binding,
                free_hives: response.free_hives,
                ..SolverReport::default()
            };
            Ok(Equilibrium::evaluate(
                baseline.farmer,
                response.decision,
                policy,
                params,
                baseline.converged,
                report,
            ))
        }
        Regime::NoCommunication => {
            let frozen = baseline.beekeeper;
            let solution = solve_farmer(
                policy,
                Coupling::FixedHives(frozen.x_h),
                params,
                cfg,
                Some(&baseline.farmer),
            )?;
            Ok(Equilibrium::evaluate(
                solution.decision,
                frozen,
                policy,
                params,
                solution.converged,
                solution.report,
            ))
        }
    }
}

fn stackelberg(
    policy: &Policy,
    params: &ParameterSet,
    cfg: &SolverConfig,
    warm_start: Option<&FarmerDecision>,
) -> Result<Equilibrium> {
    let solution = solve_farmer(policy, Coupling::BestResponse, params, cfg, warm_start)?;
    let response = hive_response(&solution.decision, policy, params);
    let report = SolverReport {
        hive_cap_binding: response.cap_binding,
        free_hives: response.free_hives,
        ..solution.report
    };
    Ok(Equilibrium::evaluate(
        solution.decision,
        response.decision,
        policy,
        params,
        solution.converged,
        report,
    ))
}

/// Whose profit a cell's optimisation maximises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leader {
    Farmer,
    Beekeeper,
}

pub fn leader_of(policy: &Policy, regime: Regime) -> Leader {
    if regime == Regime::NoCommunication && policy.kind.targets_beekeeper() {
        Leader::Beekeeper
    } else {
        Leader::Farmer
    }
}

/// Lattice search result with its one-cell profit slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub equilibrium: Equilibrium,
    pub leader: Leader,
    pub leader_profit: f64,
    /// Sum over the searched axes of the largest profit change to an
    /// adjacent lattice point.
    pub slack: f64,
    /// Lattice spacing of the farmer shares and pesticide rate.
    pub spacing: f64,
    /// Lattice spacing of the hive density (beekeeper searches only).
    pub hive_spacing: f64,
}

/// Exhaustive lattice search for one cell, independent of the local
/// optimiser. Returns the lattice-best equilibrium.
pub fn grid_oracle(
    policy: &Policy,
    regime: Regime,
    params: &ParameterSet,
    resolution: usize,
) -> Result<Equilibrium> {
    grid_oracle_detailed(policy, regime, params, resolution).map(|o| o.equilibrium)
}

pub fn grid_oracle_detailed(
    policy: &Policy,
    regime: Regime,
    params: &ParameterSet,
    resolution: usize,
) -> Result<OracleOutcome> {
    params.validate()?;
    policy.validate()?;
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::InvalidSolverConfig(format!(
            "grid resolution must be at least {MIN_GRID_RESOLUTION}"
        )));
    }
    let spacing = 1.0 / resolution as f64;
    let hive_spacing = params.x_h_max / resolution as f64;
    let bau = Policy::bau();

    let stackelberg_lattice = |policy: &Policy| {
        let (fd, slack) = farmer_lattice(policy, Coupling::BestResponse, params, resolution);
        let bk = beekeeper_best_response(&fd, policy, params);
        (Equilibrium::evaluate(fd, bk, policy, params, true, SolverReport::default()), slack)
    };

    let (equilibrium, slack) = if policy.kind == PolicyKind::Bau || regime == Regime::Communication {
        stackelberg_lattice(policy)
    } else {
        let (baseline, _) = stackelberg_lattice(&bau);
        if policy.kind.targets_beekeeper() {
            let (bk, slack) = hive_lattice(&baseline.farmer, policy, params, resolution);
            (
                Equilibrium::evaluate(baseline.farmer, bk, policy, params, true, SolverReport::default()),
                slack,
            )
        } else {
            let frozen = baseline.beekeeper;
            let (fd, slack) = farmer_lattice(policy, Coupling::FixedHives(frozen.x_h), params, resolution);
            (
                Equilibrium::evaluate(fd, frozen, policy, params, true, SolverReport::default()),
                slack,
            )
        }
    };

    let leader = leader_of(policy, regime);
    let leader_profit = match leader {
        Leader::Farmer => equilibrium.farmer_profit,
        Leader::Beekeeper => equilibrium.beekeeper_profit,
    };
    Ok(OracleOutcome {
        equilibrium,
        leader,
        leader_profit,
        slack: slack + 1e-9,
        spacing,
        hive_spacing,
    })
}

/// Best farmer decision on the lattice `i/r, j/r, k/r`; scans `x_osr`, then
/// `x_p`, then `x_g` ascending and keeps the first maximum.
fn farmer_lattice(
    policy: &Policy,
    coupling: Coupling,
    params: &ParameterSet,
    r: usize,
) -> (FarmerDecision, f64) {
    let rf = r as f64;
    let at = |i: usize, j: usize, k: usize| FarmerDecision {
        x_w: (r - i - j) as f64 / rf,
        x_g: i as f64 / rf,
        x_osr: j as f64 / rf,
        x_p: k as f64 / rf,
    };
    let value = |i: usize, j: usize, k: usize| coupling.farmer_objective(&at(i, j, k), policy, params);

    let mut best = (0, 0, 0);
    let mut best_value = f64::NEG_INFINITY;
    for j in 0..=r {
        for k in 0..=r {
            for i in 0..=(r - j) {
                let v = value(i, j, k);
                if v > best_value {
                    best_value = v;
                    best = (i, j, k);
                }
            }
        }
    }

    let (i, j, k) = best;
    let variation = |neighbours: &[(usize, usize, usize)]| {
        neighbours
            .iter()
            .filter(|&&(a, b, c)| a + b <= r && c <= r)
            .map(|&(a, b, c)| (value(a, b, c) - best_value).abs())
            .fold(0.0, f64::max)
    };
    let mut slack = 0.0;
    let mut g_axis = vec![(i + 1, j, k)];
    let mut o_axis = vec![(i, j + 1, k)];
    let mut p_axis = vec![(i, j, k + 1)];
    if i > 0 {
        g_axis.push((i - 1, j, k));
    }
    if j > 0 {
        o_axis.push((i, j - 1, k));
    }
    if k > 0 {
        p_axis.push((i, j, k - 1));
    }
    slack += variation(&g_axis) + variation(&o_axis) + variation(&p_axis);
    (at(i, j, k), slack)
}

/// Best hive density on the lattice `m * x_h_max / r` at fixed farmer decisions.
fn hive_lattice(
    fd: &FarmerDecision,
    policy: &Policy,
    params: &ParameterSet,
    r: usize,
) -> (BeekeeperDecision, f64) {
    let x_h = |m: usize| m as f64 * params.x_h_max / r as f64;
    let value = |m: usize| beekeeper_profit_at(x_h(m), fd, policy, params);
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for m in 0..=r {
        let v = value(m);
        if v > best_value {
            best_value = v;
            best = m;
        }
    }
    let mut slack: f64 = 0.0;
    if best < r {
        slack = slack.max((value(best + 1) - best_value).abs());
    }
    if best > 0 {
        slack = slack.max((value(best - 1) - best_value).abs());
    }
    (BeekeeperDecision { x_h: x_h(best) }, slack)
}

/// Solver-versus-oracle comparison for one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub policy: Policy,
    pub regime: Regime,
    pub leader: Leader,
    pub solver_profit: f64,
    pub oracle_profit: f64,
    /// `oracle_profit - solver_profit`; non-positive when the solver wins.
    pub gap: f64,
    pub bound: f64,
    /// Largest coordinate distance between the argmaxes, in lattice cells.
    pub argmax_cells: f64,
    pub within_bound: bool,
}

/// Runs the oracle and the optimiser on the same cell. For
/// `NoCommunication` cells both optimise against the oracle's frozen BAU
/// decisions so the comparison isolates the optimisation itself.
pub fn compare_with_oracle(
    policy: &Policy,
    regime: Regime,
    params: &ParameterSet,
    cfg: &SolverConfig,
    resolution: usize,
) -> Result<OracleComparison> {
    let oracle = grid_oracle_detailed(policy, regime, params, resolution)?;
    let leader = oracle.leader;
    let cell = |a: f64, b: f64, spacing: f64| (a - b).abs() / spacing;

    let (solver_profit, argmax_cells) = match leader {
        Leader::Beekeeper => {
            let frozen = oracle.equilibrium.farmer;
            let bk = beekeeper_best_response(&frozen, policy, params);
            (
                beekeeper_profit_at(bk.x_h, &frozen, policy, params),
                cell(bk.x_h, oracle.equilibrium.beekeeper.x_h, oracle.hive_spacing),
            )
        }
        Leader::Farmer => {
            let coupling = if policy.kind == PolicyKind::Bau || regime == Regime::Communication {
                Coupling::BestResponse
            } else {
                Coupling::FixedHives(oracle.equilibrium.beekeeper.x_h)
            };
            let solution = solve_farmer(policy, coupling, params, cfg, None)?;
            let o = &oracle.equilibrium.farmer;
            let s = &solution.decision;
            let cells = [
                cell(s.x_w, o.x_w, oracle.spacing),
                cell(s.x_g, o.x_g, oracle.spacing),
                cell(s.x_osr, o.x_osr, oracle.spacing),
                cell(s.x_p, o.x_p, oracle.spacing),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            (solution.profit, cells)
        }
    };
    let gap = oracle.leader_profit - solver_profit;
    Ok(OracleComparison {
        policy: *policy,
        regime,
        leader,
        solver_profit,
        oracle_profit: oracle.leader_profit,
        gap,
        bound: oracle.slack,
        argmax_cells,
        within_bound: gap <= oracle.slack && argmax_cells <= 1.0 + 1e-9,
    })
}
