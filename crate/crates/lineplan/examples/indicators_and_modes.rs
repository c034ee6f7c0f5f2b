//! Evaluating a finished concept: costs, times, fares, and ridership rules.
//!
//! Once a line concept exists, the evaluation side answers the planner's
//! questions: what does it cost to run, how long do passengers travel, does
//! it pay for itself under a fare schedule, how many travellers does transit
//! win against the car, and how should frequency react to demand growth?
//!
//! Run with: cargo run --example indicators_and_modes

use lineplan::evaluate::{indicators, mode_split, sqrt_frequency, FareSchedule, ModeModel};
use lineplan::network::{Instance, LineConcept, LineDef, LineId, LinePool};
use lineplan::routing::{route_at_level, Level};

fn main() -> lineplan::Result<()> {
    let mut b = Instance::builder();
    b.link("ab", "a", "b", 12.0, 0, None)?;
    b.link("bc", "b", "c", 8.0, 0, None)?;
    b.od("a", "b", 60.0).od("a", "c", 90.0).od("b", "c", 30.0);
    let instance = b.build()?;

    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("through", &["ab", "bc"], 3.0)
                .fixed_cost(50.0)
                .round_trip_time(50.0),
            LineDef::new("feeder", &["bc"], 1.0).round_trip_time(20.0),
        ],
    )?;
    let concept = LineConcept::from_frequencies([(LineId(0), 3), (LineId(1), 2)]);

    let routing = route_at_level(&instance, &pool, &concept, Level::Line)?;
    let fares = FareSchedule {
        fare_per_length: 0.05,      // money per ridden minute of link length
        subsidy_per_passenger: 0.3, // flat public contribution
    };
    let report = indicators(&instance, &pool, &concept, &routing, Some(&fares));

    println!("operating cost per period: {:.1} variable + {:.1} fixed", report.variable_cost, report.fixed_cost);
    println!(
        "fleet: {:.2} vehicles fractional, {} rounded per line",
        report.vehicle_estimate, report.vehicles_required
    );
    let t = report.time_components;
    println!(
        "passenger-minutes: driving {:.0}, transfer {:.0}, total {:.0}",
        t.driving,
        t.transfer,
        t.total()
    );
    println!(
        "coverage {:.0}%, direct travelers {:.0} of {:.0}",
        100.0 * report.coverage,
        report.direct_travelers,
        instance.total_demand()
    );
    println!(
        "revenue {:.1}, profit {:.1}",
        report.revenue.unwrap(),
        report.profit.unwrap()
    );

    // --- Mode choice: transit vs a 25-minute car trip. ------------------
    println!("\nmode share for a trip that takes 25 min by car:");
    for transit in [18.0, 25.0, 32.0] {
        let aon = mode_split(transit, 25.0, &ModeModel::AllOrNothing)?;
        let logit = mode_split(transit, 25.0, &ModeModel::Logit { theta: 0.25 })?;
        println!(
            "  transit {transit:4.0} min: all-or-nothing {:.0}%, logit {:4.1}%",
            100.0 * aon,
            100.0 * logit
        );
    }

    // --- Square-root rule: frequency should follow sqrt(demand). -------
    println!("\nfrequency minimizing operating cost + passenger waiting cost:");
    for demand in [100.0, 400.0, 1600.0] {
        let f = sqrt_frequency(demand, 0.1, 30.0, instance.period())?;
        println!("  demand {demand:6.0}/period -> optimal frequency {f:.2}");
    }
    println!("quadrupling demand doubles the optimal frequency.");
    Ok(())
}
