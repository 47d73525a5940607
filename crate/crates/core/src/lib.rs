//! Staff dimensioning for home health care.
//!
//! For each profession and each sampled day, the least number of caregivers
//! able to visit every patient within the daily working time is found; the
//! staffing plan is then the cheapest vector covering a target share of the
//! sampled days.

// NaN must fail the range checks, hence `!(x >= 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod master;
pub mod model;
pub mod report;
pub mod routing;
pub mod scengen;
pub mod slave;

pub use error::{Error, Result};
pub use master::{
    calibrate_alpha, compute_requirements, pareto_front, solve_master, RequirementMatrix,
    RequirementOptions, StaffSolution,
};
pub use model::{Care, Instance, Profession, Scenario, Territory};
pub use routing::{enumerate_routes, Route, RouteSet};
pub use scengen::{generate_series, generate_territory, sample_scenarios, Series, Sparsity};
pub use slave::{solve_slave, SlaveResult, SlaveStatus, SlaveTask};
