//! Draws a seeded instance and prints it in the instance file format.
//!
//! cargo run --example generate_instance -- 42 5

use collab_hub::instance::{generate_instance, load_instance, save_instance, GeneratorConfig};

fn main() -> collab_hub::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let cfg = GeneratorConfig { seed, n, overlap_fraction: 0.4, ..GeneratorConfig::default() };
    let inst = generate_instance(&cfg)?;
    let text = save_instance(&inst);
    assert_eq!(load_instance(&text)?, inst);
    print!("{text}");
    eprintln!(
        "n={} total demand={} chains={:?} scenarios={}",
        inst.n(),
        inst.total_demand(),
        inst.chains(),
        inst.scenario_count()
    );
    Ok(())
}
