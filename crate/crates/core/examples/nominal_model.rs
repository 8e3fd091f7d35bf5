//! Builds and solves the nominal model on a three-node instance, then
//! prints the open hubs and the flows.

use collab_hub::formulation::{build_nc, ModelOptions};
use collab_hub::instance::{Instance, InstanceData, Scenario};
use collab_hub::milp::solve_milp;

fn main() -> collab_hub::Result<()> {
    let inst = Instance::new(InstanceData {
        n: 3,
        demand: vec![vec![0.0, 0.0, 10.0], vec![0.0; 3], vec![0.0; 3]],
        cost: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
        setup: vec![100.0, 5.0, 100.0],
        capacity: vec![20.0; 3],
        chi: 1.0,
        alpha: 0.5,
        delta: 1.0,
        scenarios: vec![Scenario { supplement: vec![0.0; 3] }],
        chains: vec![vec![0, 1], vec![1, 2]],
    })?;
    let model = build_nc(&inst, &ModelOptions::default());
    println!("{} columns, {} rows", model.num_vars(), model.num_constraints());
    let sol = solve_milp(&model)?;
    println!("cost {} with hubs {:?}", sol.objective, sol.open_hubs);
    for (name, v) in sol.names.iter().zip(&sol.values) {
        if *v > 1e-9 {
            println!("  {name} = {v}");
        }
    }
    Ok(())
}
