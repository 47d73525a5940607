//! Coverage level to impose on the sample so the true coverage reaches the
//! target with high confidence.
//!
//! cargo run --example calibrate_alpha -- [target]

use staffdim::master::{confidence_lower_bound, required_count};
use staffdim::calibrate_alpha;

fn main() -> staffdim::Result<()> {
    let target: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.8);
    println!("target {target}");
    for omega in [30, 50, 100, 200, 500] {
        match calibrate_alpha(target, omega) {
            Ok(alpha) => println!(
                "  {omega:>4} scenarios: alpha {alpha:.3}, cover {} of them, bound {:.4}",
                required_count(alpha, omega)?,
                confidence_lower_bound(alpha, omega)
            ),
            Err(e) => println!("  {omega:>4} scenarios: {e}"),
        }
    }
    Ok(())
}
