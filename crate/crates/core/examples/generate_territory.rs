//! Generates a territory of each density and prints its travel times.
//!
//! cargo run --example generate_territory -- [divisions] [seed]

use staffdim::scengen::{generate_territory, TerritorySpec};
use staffdim::Sparsity;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let divisions = args.first().and_then(|a| a.parse().ok()).unwrap_or(8);
    let seed = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(42);

    for sparsity in [Sparsity::Rural, Sparsity::Urban, Sparsity::SemiUrban] {
        let t = generate_territory(&TerritorySpec { sparsity, divisions, seed });
        let legs: Vec<u32> = (1..=t.sector_count()).map(|s| t.depot_leg(s)).collect();
        println!("{} {} sectors", sparsity.code(), t.sector_count());
        println!("  depot legs  {legs:?}");
        println!("  intra       {:?}", &t.intra[1..]);
        println!("  longest leg {}", t.inter.iter().flatten().max().unwrap_or(&0));
    }
}
