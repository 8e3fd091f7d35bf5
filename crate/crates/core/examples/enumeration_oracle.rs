//! Solves every formulation twice, by branch-and-bound and by exhaustive
//! enumeration of the binaries, and prints both optima.

use collab_hub::formulation::{build_model, ModelKind, ModelOptions};
use collab_hub::instance::{generate_instance, GeneratorConfig};
use collab_hub::milp::{solve_by_enumeration, solve_milp, DEFAULT_BINARY_CAP};
use collab_hub::regret::compute_baselines;

fn main() -> collab_hub::Result<()> {
    let inst = generate_instance(&GeneratorConfig { seed: 11, n: 4, scenario_count: 3, ..GeneratorConfig::default() })?;
    let opts = ModelOptions::default();
    let baselines = compute_baselines(&inst, &opts)?;
    for kind in ModelKind::ALL {
        let model = build_model(&inst, kind, Some(baselines.values()), &opts)?;
        let bb = solve_milp(&model)?;
        let en = solve_by_enumeration(&model, DEFAULT_BINARY_CAP)?;
        println!(
            "{kind:?}: b&b {:.6} ({} nodes), enumeration {:.6} ({} LPs over {} binaries)",
            bb.objective,
            bb.stats.nodes,
            en.objective,
            en.stats.lp_solves,
            model.num_binaries()
        );
    }
    Ok(())
}
