//! Reading and writing the CSV interchange formats.
//!
//! Networks, demand, line pools, and line concepts all have a CSV form so
//! plans can move between this library, spreadsheets, and other tools. This
//! example writes a complete instance to disk, reads it back, solves it,
//! and round-trips the resulting concept.
//!
//! Run with: cargo run --example saving_and_loading

use std::fs;
use std::path::Path;

use lineplan::formulations::{build_cost_model, traffic_lower_bounds, FrequencyBounds};
use lineplan::milp::SolveOptions;
use lineplan::network::{
    load_concept, load_instance, load_pool, save_concept, save_instance, save_pool, Instance,
    InstanceConfig, LineDef, LinePool,
};
use lineplan::routing::{shortest_paths_ptn, traffic_loads};

fn main() -> lineplan::Result<()> {
    let dir = std::env::temp_dir().join("lineplan_csv_example");
    fs::create_dir_all(&dir)?;

    // Build an instance in code, then persist it.
    let mut b = Instance::builder();
    b.link("a1", "s1", "s2", 20.0, 2, Some(4))?;
    b.link("a2", "s2", "s3", 20.0, 2, Some(4))?;
    b.od("s1", "s3", 120.0);
    let instance = b.build()?;
    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("l1", &["a1"], 1.0),
            LineDef::new("l2", &["a2"], 1.0).capacity(30),
            LineDef::new("l3", &["a1", "a2"], 1.8),
        ],
    )?;

    let network_csv = dir.join("network.csv");
    let od_csv = dir.join("od.csv");
    let pool_csv = dir.join("pool.csv");
    let concept_csv = dir.join("concept.csv");
    save_instance(&instance, &network_csv, &od_csv)?;
    save_pool(&pool, &instance, &pool_csv)?;

    println!("--- {} ---", network_csv.display());
    print!("{}", fs::read_to_string(&network_csv)?);
    println!("--- {} ---", od_csv.display());
    print!("{}", fs::read_to_string(&od_csv)?);
    println!("--- {} ---", pool_csv.display());
    print!("{}", fs::read_to_string(&pool_csv)?);

    // Read everything back and solve as usual.
    let loaded = load_instance(
        &network_csv,
        &od_csv,
        InstanceConfig {
            period: 60.0,
            default_capacity: 60,
        },
    )?;
    let loaded_pool = load_pool(&pool_csv, &loaded)?;
    let loads = traffic_loads(&loaded, &shortest_paths_ptn(&loaded));
    let mut bounds = FrequencyBounds::from_instance(&loaded);
    bounds.raise_lower(&traffic_lower_bounds(&loads, loaded.default_capacity()));
    let artifacts = build_cost_model(&loaded, &loaded_pool, &bounds);
    let solution = artifacts.solve(&SolveOptions::default())?;
    let concept = artifacts.decode_concept(&solution)?;

    save_concept(&concept, &loaded_pool, &concept_csv)?;
    println!("--- {} ---", concept_csv.display());
    print!("{}", fs::read_to_string(&concept_csv)?);

    // The concept round-trips exactly.
    let reloaded = load_concept(&concept_csv, &loaded_pool)?;
    for (l, _) in loaded_pool.lines() {
        assert_eq!(reloaded.frequency(l), concept.frequency(l));
    }
    println!("\nround-trip successful; solved objective {:.1}", solution.objective_value);

    cleanup(&dir);
    Ok(())
}

fn cleanup(dir: &Path) {
    let _ = fs::remove_dir_all(dir);
}
