//! Cost against coverage: every staffing that no other beats on both.
//!
//! cargo run --release --example pareto_front -- [series] [sparsity] [scenarios] [seconds per cell]

use std::time::Duration;

use staffdim::master::{compute_requirements, pareto_front, RequirementOptions};
use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::{Series, Sparsity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let series: Series = args.first().map_or("S2.2", String::as_str).parse()?;
    let sparsity: Sparsity = args.get(1).map_or("semi-urban", String::as_str).parse()?;
    let omega = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(30);
    let seconds: f64 = args.get(3).and_then(|a| a.parse().ok()).unwrap_or(2.0);

    let territory = generate_territory(&TerritorySpec {
        sparsity,
        divisions: 10,
        seed: 11,
    });
    let instance = generate_series(series, territory, 11);
    let scenarios = sample_scenarios(&instance, 5, omega);

    // Every scenario must be solved, so nothing is skipped at full coverage.
    let options = RequirementOptions {
        time_limit: Some(Duration::from_secs_f64(seconds)),
        ..RequirementOptions::default()
    };
    let req = compute_requirements(&instance, &scenarios, 1.0, &options)?;
    let front = pareto_front(&req, &instance.costs())?;

    println!("{}: {} nondominated staffings", instance.label, front.len());
    println!("coverage   cost  {}", req.professions.join(" "));
    for point in &front {
        let n: Vec<String> = point.n.iter().map(u32::to_string).collect();
        println!(
            "{:>7.1}% {:>6}  {}{}",
            100.0 * point.coverage,
            point.cost,
            n.join(" "),
            if point.approximate { "  (approximate)" } else { "" }
        );
    }
    Ok(())
}
