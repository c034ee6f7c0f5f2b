//! Generating a candidate line pool from terminal pairs.
//!
//! Instead of hand-writing candidate lines, enumerate short paths between
//! terminal stations: for each terminal pair, the k shortest simple paths
//! within a detour factor of the shortest become candidate lines.
//!
//! Run with: cargo run --example pool_generation

use lineplan::formulations::{build_cost_model, traffic_lower_bounds, FrequencyBounds};
use lineplan::milp::SolveOptions;
use lineplan::network::{generate_pool, Instance, PoolGenConfig};
use lineplan::routing::{shortest_paths_ptn, traffic_loads};

fn main() -> lineplan::Result<()> {
    // A small grid with two route choices between the corners:
    //   nw - ne
    //    |    |
    //   sw - se      plus a slow diagonal sw - ne.
    let mut b = Instance::builder();
    b.link("top", "nw", "ne", 10.0, 0, None)?;
    b.link("right", "ne", "se", 10.0, 0, None)?;
    b.link("bottom", "sw", "se", 10.0, 0, None)?;
    b.link("left", "nw", "sw", 10.0, 0, None)?;
    b.link("diag", "sw", "ne", 18.0, 0, None)?;
    b.od("nw", "se", 90.0).od("sw", "ne", 60.0);
    let instance = b.build()?;

    let terminals = vec![
        ("nw".to_string(), "se".to_string()),
        ("sw".to_string(), "ne".to_string()),
    ];

    // Up to 3 candidate paths per pair, allowing 60% detour over the optimum.
    let config = PoolGenConfig {
        k: 3,
        detour_factor: 1.6,
    };
    let pool = generate_pool(&instance, &terminals, config)?;
    println!("generated {} candidate lines:", pool.len());
    for (_, line) in pool.lines() {
        let stops: Vec<&str> = (0..instance.station_count())
            .map(|i| lineplan::network::StationId(i))
            .filter(|s| line.station_position(*s).is_some())
            .map(|s| instance.station_name(s))
            .collect();
        println!(
            "  {}: {} links, driving time {:.0}, cost/trip {:.0}, serves {}",
            line.id(),
            line.links().len(),
            line.driving_time(&instance),
            line.cost_per_trip(),
            stops.join(", ")
        );
    }

    // The generated pool feeds straight into the optimization models.
    let loads = traffic_loads(&instance, &shortest_paths_ptn(&instance));
    let mut bounds = FrequencyBounds::from_instance(&instance);
    bounds.raise_lower(&traffic_lower_bounds(&loads, instance.default_capacity()));
    let artifacts = build_cost_model(&instance, &pool, &bounds);
    let solution = artifacts.solve(&SolveOptions::default())?;
    let concept = artifacts.decode_concept(&solution)?;
    println!(
        "\ncheapest concept over the generated pool (cost {:.1}):",
        solution.objective_value
    );
    for (l, line) in pool.lines() {
        if concept.is_selected(l) {
            println!("  {} at frequency {}", line.id(), concept.frequency(l));
        }
    }
    Ok(())
}
