//! Min-max regret on three nodes. Hub 1 is cheap unless scenario 1 adds a
//! large supplement to it, so the robust design hedges with another hub.

use collab_hub::formulation::ModelOptions;
use collab_hub::instance::{Instance, InstanceData, Scenario};
use collab_hub::regret::{solve_ccu, RegretReport};

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
        scenarios: vec![
            Scenario { supplement: vec![0.0; 3] },
            Scenario { supplement: vec![0.0, 200.0, 0.0] },
        ],
        chains: vec![vec![0, 1], vec![1, 2]],
    })?;
    let r = solve_ccu(&inst, &ModelOptions::default())?;
    println!("{}", serde_json::to_string_pretty(&RegretReport::new(&r))?);
    Ok(())
}
