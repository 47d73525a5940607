//! Solves a small instance with plans kept and prints every report table.
//!
//! cargo run --release --example reports -- [seconds per cell]

use std::time::Duration;

use staffdim::master::{master_lower_bound, solve_master};
use staffdim::report::{report_tables, run_report, SolveRecord};
use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::{calibrate_alpha, compute_requirements, RequirementOptions, Series, Sparsity};

fn main() -> staffdim::Result<()> {
    let seconds: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let territory = generate_territory(&TerritorySpec {
        sparsity: Sparsity::Urban,
        divisions: 6,
        seed: 9,
    });
    let instance = generate_series(Series::S1_1, territory, 9);
    let scenarios = sample_scenarios(&instance, 9, 30);
    let alpha = calibrate_alpha(0.8, scenarios.len())?;
    let options = RequirementOptions {
        time_limit: Some(Duration::from_secs(seconds)),
        keep_assignments: true,
        ..RequirementOptions::default()
    };
    let req = compute_requirements(&instance, &scenarios, alpha, &options)?;
    let costs = instance.costs();
    let sol = solve_master(&req, &costs, alpha)?;
    let record = SolveRecord {
        label: instance.label.clone(),
        alpha_star: Some(0.8),
        alpha,
        professions: req.professions.clone(),
        n: sol.n.clone(),
        cost: sol.cost,
        coverage: sol.coverage,
        confidence_lb: sol.confidence_lb,
        covered: sol.covered.clone(),
        master_lower_bound: master_lower_bound(&req, &costs, alpha)?,
        matrix: Some(req),
    };
    let report = run_report(&instance, &scenarios, &record)?;
    for (name, table) in report_tables(&report) {
        println!("== {name}\n{table}");
    }
    Ok(())
}
