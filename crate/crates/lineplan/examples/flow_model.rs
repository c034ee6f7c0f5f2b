//! Passenger-aware optimization: cost vs travel time vs a blend.
//!
//! The plain cost model fixes passenger routes up front. The flow model
//! instead routes passengers inside the optimization, so the chosen lines
//! can trade operating cost against passenger travel time. This example
//! solves the same instance under three objectives and compares concepts.
//!
//! Run with: cargo run --example flow_model

use lineplan::formulations::{build_flow_model, FlowLevel, FlowModelConfig, FlowObjective};
use lineplan::milp::SolveOptions;
use lineplan::network::{Instance, LineDef, LinePool};

fn main() -> lineplan::Result<()> {
    // A corridor with a shortcut: x - y - z takes 30 minutes via y, but a
    // direct express link x - z needs only 18. The express line is pricier.
    let mut b = Instance::builder();
    b.link("xy", "x", "y", 15.0, 0, Some(6))?;
    b.link("yz", "y", "z", 15.0, 0, Some(6))?;
    b.link("xz", "x", "z", 18.0, 0, Some(6))?;
    b.od("x", "z", 90.0).od("x", "y", 30.0);
    let instance = b.build()?;

    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("local", &["xy", "yz"], 2.0),
            LineDef::new("express", &["xz"], 3.5),
        ],
    )?;

    let objectives = [
        ("pure cost", FlowObjective::Cost),
        ("pure travel time", FlowObjective::TravelTime),
        ("cost + 0.02 * time", FlowObjective::Weighted(0.02)),
    ];

    for (name, objective) in objectives {
        let mut config = FlowModelConfig::new(FlowLevel::Line);
        config.objective = objective;
        let artifacts = build_flow_model(&instance, &pool, &config)?;
        let solution = artifacts.solve(&SolveOptions::default())?;
        let concept = artifacts.decode_concept(&solution)?;

        print!("{name:<22} objective {:8.2} | ", solution.objective_value);
        let parts: Vec<String> = pool
            .lines()
            .filter(|(l, _)| concept.is_selected(*l))
            .map(|(l, line)| format!("{}@{}", line.id(), concept.frequency(l)))
            .collect();
        println!("{}", parts.join(", "));
    }

    println!();
    println!("cost-only planning is happy to send everyone the slow way;");
    println!("the time-weighted objectives pay for the express shortcut.");
    Ok(())
}
