//! Minimal-cost frequency setting on a three-station corridor.
//!
//! The corridor s1 - s2 - s3 carries 120 passengers from s1 to s3 per
//! 60-minute period. Three candidate lines exist: two short shuttles (one
//! per link) and one through line. Shortest-path traffic loads turn into
//! per-link minimum frequencies, and a small integer program picks the
//! cheapest frequencies that meet them.
//!
//! Run with: cargo run --example cost_model

use lineplan::formulations::{build_cost_model, traffic_lower_bounds, FrequencyBounds};
use lineplan::milp::SolveOptions;
use lineplan::network::{Instance, LineDef, LinePool};
use lineplan::routing::{shortest_paths_ptn, traffic_loads};

fn main() -> lineplan::Result<()> {
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

    // Passengers take shortest paths; each link must offer enough trips to
    // carry its load at the default vehicle capacity.
    let paths = shortest_paths_ptn(&instance);
    let loads = traffic_loads(&instance, &paths);
    println!("traffic loads per link:");
    for (a, load) in &loads {
        println!("  {}: {load} passengers", instance.link(*a).id);
    }

    let mut bounds = FrequencyBounds::from_instance(&instance);
    bounds.raise_lower(&traffic_lower_bounds(&loads, instance.default_capacity()));
    for (a, _) in instance.links() {
        println!(
            "  {}: frequency in [{}, {}]",
            instance.link(a).id,
            bounds.lower(a),
            bounds.upper(a).map_or("inf".into(), |u| u.to_string()),
        );
    }

    let artifacts = build_cost_model(&instance, &pool, &bounds);
    let solution = artifacts.solve(&SolveOptions::default())?;
    println!(
        "\nstatus: {}, operating cost {:.2}, {} branch-and-bound nodes",
        solution.status.as_str(),
        solution.objective_value,
        solution.nodes
    );

    let concept = artifacts.decode_concept(&solution)?;
    for (l, line) in pool.lines() {
        println!("  {}: frequency {}", line.id(), concept.frequency(l));
    }
    // Two through trips cover both links at once: cheaper than four shuttle
    // trips even though the through line costs 1.8 per trip.
    assert_eq!(concept.frequency(lineplan::network::LineId(2)), 2);
    assert!((solution.objective_value - 3.6).abs() < 1e-9);
    Ok(())
}
