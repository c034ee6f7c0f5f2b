//! Routing the same demand at link, line, and trip granularity.
//!
//! A small Y-shaped network with two lines shows what each level adds:
//! the link level only knows the infrastructure, the line level works in
//! the Change&Go network and prices transfers, and the trip level pins
//! passengers to timetabled departures and measures actual waits.
//!
//! Run with: cargo run --example passenger_routing

use lineplan::network::{Instance, LineConcept, LineDef, LineId, LinePool};
use lineplan::routing::{route_at_level, Level, RoutePath};

fn main() -> lineplan::Result<()> {
    // Stations: a - b - c plus a branch b - d. Line "east" runs a-b-c,
    // line "north" runs d-b-c, so a -> d requires a transfer at b.
    let mut builder = Instance::builder();
    builder.link("ab", "a", "b", 10.0, 0, None)?;
    builder.link("bc", "b", "c", 15.0, 0, None)?;
    builder.link("bd", "b", "d", 5.0, 0, None)?;
    builder.od("a", "c", 100.0).od("a", "d", 40.0).od("d", "c", 25.0);
    let instance = builder.build()?;

    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("east", &["ab", "bc"], 2.0),
            LineDef::new("north", &["bd", "bc"], 1.5),
        ],
    )?;
    let concept = LineConcept::from_frequencies([(LineId(0), 4), (LineId(1), 2)]);

    for level in [Level::Link, Level::Line, Level::Trip] {
        let result = route_at_level(&instance, &pool, &concept, level)?;
        let t = result.time_components;
        println!("--- {} level ---", result.level.as_str());
        println!(
            "  routed {} passengers, {} unreachable pairs",
            result.routed_passengers(),
            result.unrouted.len()
        );
        println!(
            "  passenger-minutes: driving {:.0}, transfer {:.0}, adaption {:.0} (total {:.0})",
            t.driving,
            t.transfer,
            t.adaption,
            t.total()
        );
        println!("  direct travelers: {}", result.direct_travelers(&pool));
        for (a, load) in result.loads_per_link() {
            println!("  link {} carries {load}", instance.link(a).id);
        }
        // The finest result still answers coarser questions.
        if let Some(per_line) = result.loads_per_line_link() {
            for ((a, l), v) in per_line {
                println!("    {} on line {}: {v}", instance.link(a).id, pool.line(l).id());
            }
        }
        // Show one concrete route of the a -> d passengers.
        if let Some(routes) = result.routes.get(&(instance.station("a").unwrap(), instance.station("d").unwrap())) {
            for route in routes {
                match &route.path {
                    RoutePath::Link(p) => println!(
                        "  a->d path: {} links, length {}",
                        p.links.len(),
                        p.length
                    ),
                    RoutePath::Line { legs } => println!(
                        "  a->d rides {} leg(s): {}",
                        legs.len(),
                        legs.iter()
                            .map(|leg| pool.line(leg.line).id().to_string())
                            .collect::<Vec<_>>()
                            .join(" -> ")
                    ),
                    RoutePath::Trip { legs } => {
                        for leg in legs {
                            println!(
                                "  a->d boards {} trip {} at minute {:.1}, alights {:.1}",
                                pool.line(leg.leg.line).id(),
                                leg.trip,
                                leg.board_time,
                                leg.alight_time
                            );
                        }
                    }
                }
            }
        }
        println!();
    }

    Ok(())
}
