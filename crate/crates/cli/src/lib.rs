//! Library side of the `pollinate` command: configuration loading, the four
//! subcommands and result writers. All modelling lives in `pollinate-core`.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use pollinate_core::equilibrium::{compare_with_oracle, OracleComparison, MIN_GRID_RESOLUTION};
use pollinate_core::scenarios::{param_sweep, run_suite_with, sweep_values, SweepPoint};
use pollinate_core::{Policy, PolicyKind, Regime, SuiteResult, Violation};
use rayon::prelude::*;

use crate::config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", lines(.0))]
    Config(Vec<Violation>),
    #[error("{0}")]
    Io(String),
    #[error("solver did not converge for: {}", .0.join(", "))]
    NonConvergence(Vec<String>),
    #[error("oracle gap exceeds the lattice bound for: {}", .0.join(", "))]
    OracleGap(Vec<String>),
}

fn lines(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::OracleGap(_) => 4,
        }
    }
}

impl From<pollinate_core::Error> for CliError {
    fn from(e: pollinate_core::Error) -> Self {
        use pollinate_core::Error as E;
        match e {
            E::InvalidParameters(v) => CliError::Config(v),
            E::ThreadPool(msg) => CliError::Io(msg),
            E::Infeasible => CliError::NonConvergence(vec![e.to_string()]),
            other => CliError::Config(vec![Violation::new("", other.to_string())]),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = config::load(self.config.as_deref())?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        if self.threads == 0 {
            return Err(CliError::Config(vec![Violation::new("--threads", "must be at least 1")]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))
    }
}

/// Checks a config file; succeeds iff every invariant holds.
pub fn cmd_validate(common: &Common) -> Result<RunConfig, CliError> {
    common.load()
}

pub fn cmd_run(common: &Common) -> Result<SuiteResult, CliError> {
    let cfg = common.load()?;
    let pool = common.pool()?;
    let suite = pool.install(|| run_suite_with(&cfg.params, &cfg.solver, &cfg.selection))?;

    create_dir(&cfg.output_dir)?;
    if cfg.writes(Format::Json) {
        let json = output::to_json(&suite).map_err(|e| CliError::Io(e.to_string()))?;
        write_file(&cfg.output_dir.join("results.json"), json.as_bytes())?;
    }
    if cfg.writes(Format::Csv) {
        write_csv(&cfg.output_dir.join("cells.csv"), |w| output::write_cells(w, &suite))?;
        write_csv(&cfg.output_dir.join("marginals.csv"), |w| output::write_marginals(w, &suite))?;
    }

    let failed: Vec<String> = suite
        .cells
        .iter()
        .filter(|c| !c.equilibrium.converged)
        .map(|c| cell_name(&c.policy, c.regime))
        .collect();
    if failed.is_empty() {
        Ok(suite)
    } else {
        Err(CliError::NonConvergence(failed))
    }
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

pub fn cmd_sweep(common: &Common, args: &SweepArgs) -> Result<Vec<SweepPoint>, CliError> {
    let cfg = common.load()?;
    let pool = common.pool()?;
    let values = sweep_values(args.min, args.max, args.steps)?;
    let points = pool.install(|| param_sweep(&cfg.params, &args.param, &values, &cfg.solver, &cfg.selection))?;

    create_dir(&cfg.output_dir)?;
    write_csv(&cfg.output_dir.join("sweep.csv"), |w| output::write_sweep(w, &points))?;

    let mut failed = Vec::new();
    for p in &points {
        let at = format!("{}={}", p.parameter, output::fmt_sig(p.value));
        match &p.suite {
            None => failed.push(format!("{at} ({})", p.error.as_deref().unwrap_or("failed"))),
            Some(s) => failed.extend(
                s.cells
                    .iter()
                    .filter(|c| !c.equilibrium.converged)
                    .map(|c| format!("{at} {}", cell_name(&c.policy, c.regime))),
            ),
        }
    }
    if failed.is_empty() {
        Ok(points)
    } else {
        Err(CliError::NonConvergence(failed))
    }
}

/// Compares the optimiser with the lattice oracle on BAU and every selected
/// cell. Writes `oracle.csv`; fails with the offending cells when a gap or
/// argmax distance exceeds its bound.
pub fn cmd_oracle(common: &Common, resolution: Option<usize>) -> Result<Vec<OracleComparison>, CliError> {
    let cfg = common.load()?;
    let resolution = resolution.unwrap_or(cfg.solver.grid_resolution);
    if resolution < MIN_GRID_RESOLUTION {
        return Err(CliError::Config(vec![Violation::new(
            "--resolution",
            format!("must be at least {MIN_GRID_RESOLUTION}"),
        )]));
    }
    let pool = common.pool()?;
    let mut cells = vec![(Policy::bau(), Regime::Communication)];
    cells.extend(
        cfg.selection
            .cells()
            .into_iter()
            .map(|(kind, regime)| (Policy::from_params(kind, &cfg.params), regime)),
    );
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|(policy, regime)| compare_with_oracle(policy, *regime, &cfg.params, &cfg.solver, resolution))
            .collect::<Result<Vec<_>, _>>()
    })?;

    create_dir(&cfg.output_dir)?;
    write_csv(&cfg.output_dir.join("oracle.csv"), |w| output::write_oracle(w, &rows))?;

    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.within_bound)
        .map(|r| cell_name(&r.policy, r.regime))
        .collect();
    if failed.is_empty() {
        Ok(rows)
    } else {
        Err(CliError::OracleGap(failed))
    }
}

pub fn cell_name(policy: &Policy, regime: Regime) -> String {
    if policy.kind == PolicyKind::Bau {
        "BAU".into()
    } else {
        format!("{}/{}", policy.kind, regime)
    }
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:+.1}%"))
}

/// Human-readable digest of a suite, one line per cell.
pub fn summary(suite: &SuiteResult) -> String {
    let mut s = String::from(
        "cell                    wheat  grass    OSR  hives     ES1      E1      E2     BC1\n",
    );
    for c in &suite.cells {
        let eq = &c.equilibrium;
        let r = &c.relative_changes;
        s.push_str(&format!(
            "{:<22} {:>6.1}% {:>5.1}% {:>5.1}% {:>6.3} {:>7} {:>7} {:>7} {:>7}{}\n",
            cell_name(&c.policy, c.regime),
            eq.farmer.x_w * 100.0,
            eq.farmer.x_g * 100.0,
            eq.farmer.x_osr * 100.0,
            eq.beekeeper.x_h,
            pct(r.es1_pollination),
            pct(r.e1_stakeholder_wealth),
            pct(r.e2_total_wealth),
            pct(r.bc1_wildbees),
            if eq.converged { "" } else { "  (not converged)" },
        ));
    }
    s
}

pub fn oracle_summary(rows: &[OracleComparison]) -> String {
    let mut s = String::from("cell                       gap       bound  cells  ok\n");
    for r in rows {
        s.push_str(&format!(
            "{:<22} {:>10.3e} {:>10.3e} {:>6.3}  {}\n",
            cell_name(&r.policy, r.regime),
            r.gap,
            r.bound,
            r.argmax_cells,
            if r.within_bound { "yes" } else { "NO" },
        ));
    }
    s
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_csv(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    fill(&mut buf).map_err(|e| CliError::Io(format!("cannot format {}: {e}", path.display())))?;
    write_file(path, &buf)
}
