//! Compares the regret of the collaborative model with the plain regret
//! model on a generated instance with two overlapping supply chains, under
//! both readings of the collaborative objective.

use collab_hub::formulation::{ModelOptions, OcuObjective};
use collab_hub::instance::{generate_instance, GeneratorConfig};
use collab_hub::regret::{solve_ccu, solve_ocu};

fn main() -> collab_hub::Result<()> {
    let cfg = GeneratorConfig { seed: 21, n: 5, overlap_fraction: 0.4, scenario_count: 3, ..GeneratorConfig::default() };
    let inst = generate_instance(&cfg)?;
    println!("chains {:?}", inst.chains());
    for objective in [OcuObjective::AsWritten, OcuObjective::CollaborativeSplit] {
        let opts = ModelOptions { ocu_objective: objective, ..ModelOptions::default() };
        let ccu = solve_ccu(&inst, &opts)?;
        let ocu = solve_ocu(&inst, &opts)?;
        println!("{objective:?}");
        println!("  CCU R* = {:.4}, hubs {:?}", ccu.max_regret, ccu.solution.open_hubs);
        println!(
            "  OCU R* = {:.4}, collaborative {:?}, non-collaborative {:?}",
            ocu.max_regret, ocu.solution.collaborative_hubs, ocu.solution.noncollaborative_hubs
        );
    }
    Ok(())
}
