//! Prints the OCU model of a small generated instance in LP text form.
//! Row labels name the constraint family and index tuple.

use collab_hub::formulation::{build_ocu, Eq20Mode, ModelOptions};
use collab_hub::instance::{generate_instance, GeneratorConfig};
use collab_hub::regret::compute_baselines;

fn main() -> collab_hub::Result<()> {
    let inst = generate_instance(&GeneratorConfig { seed: 3, n: 3, ..GeneratorConfig::default() })?;
    let opts = ModelOptions { eq20_mode: Eq20Mode::Linearized, ..ModelOptions::default() };
    let baselines = compute_baselines(&inst, &opts)?;
    print!("{}", build_ocu(&inst, baselines.values(), &opts)?.dump());
    Ok(())
}
