//! Solves an LP relaxation, replays its optimality certificate, and shows
//! the report after a primal value is nudged.

use collab_hub::formulation::{build_nc, ModelOptions};
use collab_hub::instance::{generate_instance, GeneratorConfig};
use collab_hub::lp::{solve_lp, verify_certificate};

fn main() -> collab_hub::Result<()> {
    let inst = generate_instance(&GeneratorConfig { seed: 5, n: 4, ..GeneratorConfig::default() })?;
    let model = build_nc(&inst, &ModelOptions::default());
    let lp = solve_lp(&model, true, &[])?;
    println!("relaxation {:?}, objective {:.4}, {} pivots", lp.status, lp.objective, lp.iterations);

    let cert = verify_certificate(&model, &lp);
    println!(
        "certificate pass={} row residual {:.1e}, objective gap {:.1e}",
        cert.pass, cert.max_row_residual, cert.objective_gap
    );

    let mut nudged = lp.clone();
    let j = nudged.values.iter().position(|&v| v > 1e-6).unwrap_or(0);
    nudged.values[j] += 0.01;
    let cert = verify_certificate(&model, &nudged);
    println!("after nudging {}: pass={}", model.variables()[j].name, cert.pass);
    for f in cert.failures.iter().take(5) {
        println!("  {f}");
    }
    Ok(())
}
