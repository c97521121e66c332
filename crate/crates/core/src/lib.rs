//! Bioeconomic equilibrium model of the farmer–beekeeper interdependency
//! through pollination.
//!
//! A representative farmer allocates a unit farm between wheat, hay
//! grassland and oilseed rape (OSR) and picks a pesticide rate on OSR; a
//! representative beekeeper picks a hive density. OSR yield depends on bee
//! abundance, honey depends on OSR area, and pesticides damage both honey
//! and wild bees. Policies (hive subsidy, honey price subsidy, pesticide
//! tax) are solved under two information regimes and summarised as
//! economic, ecosystem-service and biodiversity indicators.
//!
//! Module map:
//! - [`params`]: calibrated constants and their validation.
//! - [`model`]: decision types and every closed-form relationship.
//! - [`equilibrium`]: best response, leader optimisation, regimes, grid oracle.
//! - [`indicators`]: indicator bundles and the marginal cascade.
//! - [`scenarios`]: experiment suite, landscape ledgers, parameter sweeps.

pub mod equilibrium;
pub mod error;
pub mod indicators;
pub mod model;
pub mod optimize;
pub mod params;
pub mod scenarios;

pub use equilibrium::{
    beekeeper_best_response, grid_oracle, solve_equilibrium, solve_farmer, Coupling, Equilibrium,
    Regime, SolverConfig, SolverReport,
};
pub use error::{Error, Result, Violation};
pub use indicators::{compute_indicators, marginal_cascade, IndicatorBundle, MarginalReport};
pub use model::{BeePopulations, BeekeeperDecision, FarmerDecision, Policy, PolicyKind};
pub use params::ParameterSet;
pub use scenarios::{
    default_calibration, landscape_aggregate, param_sweep, price_sweep, run_suite, LandscapeLedger,
    ScenarioCell, SuiteResult, SweepPoint,
};
