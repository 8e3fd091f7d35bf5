//! Runs every claim check on one generated instance and prints the reports.
//!
//! cargo run --release --example claim_checks -- 4

use collab_hub::claims::{check_claim, ClaimId};
use collab_hub::formulation::ModelOptions;
use collab_hub::instance::{generate_instance, GeneratorConfig};

fn main() -> collab_hub::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let inst = generate_instance(&GeneratorConfig { seed, n: 4, overlap_fraction: 0.5, ..GeneratorConfig::default() })?;
    for claim in ClaimId::ALL {
        let mut r = check_claim(claim, &inst, &ModelOptions::default())?;
        // Witness points are long; the evidence is enough here.
        let witness = r.witness.take();
        println!("{} -> {:?}", claim.as_str(), r.verdict);
        println!("  {}", serde_json::to_string(&r.evidence)?);
        if let Some(w) = witness {
            println!("  witness violates {:?}", w.violated_rows);
        }
    }
    Ok(())
}
