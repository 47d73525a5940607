//! Builds a benchmark instance and draws demand scenarios from it.
//!
//! cargo run --example sample_scenarios -- [series] [count]

use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::{Series, Sparsity};

fn main() -> staffdim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let series = match args.first() {
        Some(name) => *Series::ALL
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| staffdim::Error::Invalid(format!("unknown series {name}")))?,
        None => Series::S2_1,
    };
    let count = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10);

    let territory = generate_territory(&TerritorySpec {
        sparsity: Sparsity::SemiUrban,
        divisions: 8,
        seed: 3,
    });
    let instance = generate_series(series, territory, 3);
    let scenarios = sample_scenarios(&instance, 3, count);

    println!("{}: {} cares, {} sectors", instance.label, instance.cares.len(), instance.sector_count());
    for (w, sc) in scenarios.iter().enumerate() {
        let per_care: Vec<u32> = (0..instance.cares.len())
            .map(|a| (1..=instance.sector_count()).map(|s| sc.get(s, a)).sum())
            .collect();
        println!("day {w:>3}: {:>3} units  by care {per_care:?}", sc.total());
    }
    Ok(())
}
