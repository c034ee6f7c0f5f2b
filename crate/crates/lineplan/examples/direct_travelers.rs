//! Maximizing passengers who never have to change lines.
//!
//! The direct-traveler model picks lines and frequencies so that as many
//! passengers as possible ride a single line from origin to destination,
//! subject to an operating budget. Sweeping the budget shows the trade-off
//! between spending and comfort.
//!
//! Run with: cargo run --example direct_travelers

use lineplan::formulations::{build_direct_traveler_model, DirectBudget};
use lineplan::milp::SolveOptions;
use lineplan::network::{Instance, LineDef, LinePool};

fn main() -> lineplan::Result<()> {
    // Corridor p - q - r - s with demand between all consecutive and
    // end-to-end pairs. Short lines are cheap; the full-length line lets
    // everyone travel direct but costs the most per trip.
    let mut b = Instance::builder();
    b.link("pq", "p", "q", 10.0, 0, Some(8))?;
    b.link("qr", "q", "r", 10.0, 0, Some(8))?;
    b.link("rs", "r", "s", 10.0, 0, Some(8))?;
    b.od("p", "q", 40.0)
        .od("q", "r", 40.0)
        .od("r", "s", 40.0)
        .od("p", "s", 50.0);
    let instance = b.build()?;

    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("west", &["pq"], 1.0),
            LineDef::new("middle", &["qr"], 1.0),
            LineDef::new("east", &["rs"], 1.0),
            LineDef::new("full", &["pq", "qr", "rs"], 2.5),
        ],
    )?;

    // Passengers count as direct when a selected line covers their path
    // within a 25% detour allowance.
    let detour_factor = 1.25;

    println!("budget | direct travelers | concept");
    for budget in [1.0, 2.0, 3.0, 5.0, 8.0] {
        let artifacts = build_direct_traveler_model(
            &instance,
            &pool,
            detour_factor,
            &DirectBudget::Cost(budget),
        )?;
        let solution = artifacts.solve(&SolveOptions::default())?;
        let direct = solution.objective_value;
        let concept = artifacts.decode_concept(&solution)?;
        let parts: Vec<String> = pool
            .lines()
            .filter(|(l, _)| concept.is_selected(*l))
            .map(|(l, line)| format!("{}@{}", line.id(), concept.frequency(l)))
            .collect();
        println!("{budget:6.1} | {direct:16.0} | {}", parts.join(", "));
    }

    println!();
    println!("a higher budget buys the long line and with it more one-seat rides;");
    println!("total demand is {} passengers.", instance.total_demand());
    Ok(())
}
