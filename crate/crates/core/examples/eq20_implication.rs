//! Implication search for the eq20 rows on disjoint and overlapping chains,
//! showing which transfer carries the witness and whether it only
//! circulates between hubs.

use collab_hub::claims::{check_eq20_redundancy, Verdict};
use collab_hub::formulation::ModelOptions;
use collab_hub::instance::{generate_instance, GeneratorConfig};

fn main() -> collab_hub::Result<()> {
    for overlap in [0.0, 0.5] {
        let inst = generate_instance(&GeneratorConfig { seed: 8, n: 4, overlap_fraction: overlap, ..GeneratorConfig::default() })?;
        let r = check_eq20_redundancy(&inst, &ModelOptions::default())?;
        println!("chains {:?}: {:?}", inst.chains(), r.verdict);
        println!("  optima omit/linearized: {} / {}", r.evidence["obj_omit"], r.evidence["obj_linearized"]);
        if r.verdict == Verdict::Counterexample {
            println!(
                "  row {} with T pattern {}, flow {} against M = {}",
                r.evidence["row"], r.evidence["t_pattern"], r.evidence["max_flow"], r.evidence["big_m"]
            );
            println!("  self-loop {}, two-cycle {}", r.evidence["self_loop"], r.evidence["two_cycle"]);
        }
    }
    Ok(())
}
