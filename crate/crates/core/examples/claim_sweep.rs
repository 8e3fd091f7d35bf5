//! Sweeps all claims over seeded instances and prints the tally, then the
//! per-row CSV.
//!
//! cargo run --release --example claim_sweep -- 12

use collab_hub::claims::{run_sweep, ClaimId};
use collab_hub::formulation::ModelOptions;

fn main() -> collab_hub::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let summary = run_sweep(&ClaimId::ALL, 1, trials, &ModelOptions::default())?;
    for (claim, t) in &summary.tally {
        println!(
            "{claim:>18}: confirmed {:>3}  counterexample {:>3}  inconclusive {:>3}  errors {}  zero-objective {}",
            t.confirmed, t.counterexample, t.inconclusive, t.errors, t.zero_objective
        );
    }
    println!();
    print!("{}", summary.to_csv()?);
    Ok(())
}
