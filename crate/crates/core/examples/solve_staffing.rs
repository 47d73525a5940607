//! End to end: territory, scenarios, requirement matrix, staffing.
//!
//! cargo run --release --example solve_staffing -- [sectors] [scenarios] [seconds per cell]

use std::time::Duration;

use staffdim::master::{calibrate_alpha, compute_requirements, master_lower_bound, solve_master};
use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::{RequirementOptions, Series, SlaveStatus, Sparsity};

fn main() -> staffdim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sectors = args.first().and_then(|a| a.parse().ok()).unwrap_or(10);
    let omega = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(30);
    let seconds: u64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(10);

    let territory = generate_territory(&TerritorySpec {
        sparsity: Sparsity::Rural,
        divisions: sectors,
        seed: 42,
    });
    let instance = generate_series(Series::S1_1, territory, 42);
    let scenarios = sample_scenarios(&instance, 7, omega);
    let alpha = calibrate_alpha(0.8, omega)?;

    let options = RequirementOptions {
        time_limit: Some(Duration::from_secs(seconds)),
        ..RequirementOptions::default()
    };
    let req = compute_requirements(&instance, &scenarios, alpha, &options)?;
    let costs = instance.costs();
    let sol = solve_master(&req, &costs, alpha)?;
    let bound = master_lower_bound(&req, &costs, alpha)?;

    println!("{}  alpha = {alpha:.3}", instance.label);
    for (p, id) in req.professions.iter().enumerate() {
        let solved = req.status[p].iter().filter(|s| **s != SlaveStatus::LbShortcut).count();
        let proven = req.status[p].iter().filter(|s| **s == SlaveStatus::Optimal).count();
        println!(
            "{id:>10}: n = {:>2}  LB = {:>2}  solved {solved}/{omega}, proven {proven}  before truncation {:?}",
            sol.n[p], req.lb_p[p], req.raw[p]
        );
    }
    println!(
        "cost {}  coverage {:.3}  confidence bound {:.4}  master gap {:.2}%",
        sol.cost,
        sol.coverage,
        sol.confidence_lb,
        100.0 * (sol.cost - bound) as f64 / sol.cost.max(1) as f64
    );
    println!("matrix computed in {:.1}s", req.wall_time);
    Ok(())
}
