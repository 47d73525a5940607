//! Minimum caregivers for one profession on one day, with the plan.
//!
//! cargo run --release --example solve_slave -- [profession] [seconds]

use std::time::Duration;

use staffdim::routing::{enumerate_routes, sectors_of};
use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::slave::{heuristic_upper_bound, CoverBound};
use staffdim::{solve_slave, Series, SlaveTask, Sparsity};

fn main() -> staffdim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id = args.first().cloned().unwrap_or_else(|| "nurse".into());
    let seconds: u64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10);

    let territory = generate_territory(&TerritorySpec {
        sparsity: Sparsity::SemiUrban,
        divisions: 8,
        seed: 5,
    });
    let instance = generate_series(Series::S1_1, territory, 5);
    let scenario = &sample_scenarios(&instance, 5, 1)[0];
    let p = instance.profession_index(&id)?;
    let routes = enumerate_routes(&instance, &id)?;
    let cover = CoverBound::new(&routes);
    let mut task = SlaveTask::new(&instance, p, scenario, &routes)?.with_time_limit(Some(Duration::from_secs(seconds)));
    if let Some(c) = &cover {
        task = task.with_cover_bound(c);
    }

    let upper = heuristic_upper_bound(&task)?;
    let result = solve_slave(&task)?;
    println!(
        "{id}: workload bound {}, greedy {}, solved {} ({:?}, lower bound {}, {:.2}s)",
        task.workload_bound(),
        upper.n,
        result.n,
        result.status,
        result.lower_bound,
        result.elapsed
    );
    for (k, plan) in result.assignment.unwrap_or_default().iter().enumerate() {
        let route: Vec<usize> = sectors_of(plan.route).collect();
        println!("  caregiver {k}: sectors {route:?}, {} min on the road, {} units", plan.duration, plan.units());
    }
    Ok(())
}
