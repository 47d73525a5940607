//! Route enumeration per profession and how the daily limit prunes it.
//!
//! cargo run --release --example enumerate_routes -- [divisions]

use staffdim::routing::enumerate_routes;
use staffdim::scengen::{generate_series, generate_territory, TerritorySpec};
use staffdim::{Series, Sparsity};

fn main() -> staffdim::Result<()> {
    let divisions = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let territory = generate_territory(&TerritorySpec {
        sparsity: Sparsity::Rural,
        divisions,
        seed: 1,
    });
    let mut instance = generate_series(Series::S1_1, territory, 1);

    for limit in [480, 420, 360, 300] {
        instance.daily_limit = limit;
        println!("L = {limit}");
        for id in instance.profession_ids() {
            let routes = enumerate_routes(&instance, &id)?;
            // Index i of the histogram counts routes through i sectors.
            println!("  {id:>10}: {:>5} routes  by size {:?}", routes.len(), routes.histogram());
        }
    }
    Ok(())
}
