//! Next preventive-maintenance planning for multi-component systems.
//!
//! Components have Weibull lifetimes. For a system observed at month `s`
//! with known last-maintenance times, [`costs`] estimates by Monte Carlo
//! the expected cost of planning the next PM of each component at each
//! month of a window, [`solver`] picks the cost-rate-minimising plan, and
//! [`scheduler`] runs the rescheduling loop (plan, fail or maintain,
//! re-plan) over the system lifespan. [`pmspic`] holds the full-horizon
//! interval-cost model used for comparison.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod calendar;
pub mod config;
pub mod costs;
pub mod error;
pub mod lifetime;
pub mod pmspic;
pub mod rng;
pub mod scheduler;
pub mod solver;

pub use calendar::{CalendarSpec, SetupCostCalendar};
pub use config::{load_config, ConfigFile, SystemConfig};
pub use costs::{build_cost_tables, cm_only_rate, renewal_function, CostModel, CostTables, Estimate, McSettings};
pub use error::{Error, Result};
pub use lifetime::{ComponentSpec, LifetimeMoments};
pub use scheduler::{MaintenanceEvent, MaintenanceKind, Planner, SystemState};
pub use solver::{solve_next_om, solve_next_pm, NextOmProblem, NextPmProblem, OmPlan, PmPlan};
