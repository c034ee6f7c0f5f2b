//! One concept, three verdicts: why the aggregation level matters.
//!
//! Capacity feasibility can be asked at three granularities. Pooling all
//! lines per link (link level) is the most forgiving; splitting loads per
//! line (line level) is stricter; pinning passengers to individual vehicle
//! trips (trip level) is strictest. This example builds a concept that is
//! feasible at the link and line levels but overloads a single vehicle trip.
//!
//! Run with: cargo run --example aggregation_levels

use lineplan::evaluate::check_capacity;
use lineplan::network::{Instance, LineConcept, LineDef, LineId, LinePool};
use lineplan::routing::{
    assign_trips, build_cgn, route_line_level, route_link_level, AdaptionModel, CapacityMode,
    Level, Timetable, TransferModel,
};

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
            LineDef::new("l2", &["a2"], 1.0).capacity(30), // small vehicles
            LineDef::new("l3", &["a1", "a2"], 1.8),
        ],
    )?;

    // One trip on each of l1 and l3, two trips on the small-vehicle line l2.
    let concept = LineConcept::from_frequencies([
        (LineId(0), 1),
        (LineId(1), 2),
        (LineId(2), 1),
    ]);

    // --- Link level: pool every line's capacity per link. --------------
    let link_routing = route_link_level(&instance);
    let link_report = check_capacity(&pool, &concept, &link_routing, Level::Link)?;
    println!("link level: feasible = {}", link_report.feasible);
    println!("  a1 pooled capacity 1*60 (l1) + 1*60 (l3) = 120 >= load 120");
    println!("  a2 pooled capacity 2*30 (l2) + 1*60 (l3) = 120 >= load 120");

    // --- Line level: each line must carry its own share. ---------------
    // Routing with capacities enforced finds the only workable split:
    // 60 passengers ride the through line l3, 60 take l1 and change to l2.
    let cgn = build_cgn(
        &instance,
        &pool,
        &TransferModel::Fixed(5.0),
        &AdaptionModel::None,
    )?;
    let line_routing = route_line_level(&instance, &pool, &cgn, CapacityMode::Enforce(&concept))?;
    let line_report = check_capacity(&pool, &concept, &line_routing, Level::Line)?;
    println!("\nline level: feasible = {}", line_report.feasible);
    if let Some(loads) = line_routing.loads_per_line_link() {
        for ((a, l), v) in &loads {
            println!(
                "  load on {}:{} = {v} (capacity {})",
                instance.link(*a).id,
                pool.line(*l).id(),
                f64::from(concept.frequency(*l) * pool.line(*l).capacity()),
            );
        }
    }

    // --- Trip level: the same flows pinned to concrete departures. -----
    // l1's single trip reaches s2 at minute 20; the next l2 departure takes
    // all 60 transferring passengers at once, but one vehicle seats 30.
    let timetable = Timetable::regular(&pool, &concept, instance.period());
    let trip_routing = assign_trips(&instance, &pool, &timetable, &line_routing)?;
    let trip_report = check_capacity(&pool, &concept, &trip_routing, Level::Trip)?;
    println!("\ntrip level: feasible = {}", trip_report.feasible);
    for v in &trip_report.violations {
        println!(
            "  overloaded trip {}: load {} > capacity {} (deficit {})",
            v.arc.describe(&instance, &pool),
            v.load,
            v.capacity,
            v.deficit
        );
    }

    assert!(link_report.feasible && line_report.feasible && !trip_report.feasible);
    assert_eq!(trip_report.violations.len(), 1);
    assert_eq!(trip_report.total_deficit(), 30.0);
    println!("\nfeasibility is hierarchical: trip-feasible => line-feasible => link-feasible,");
    println!("and this concept shows the implications are strict.");
    Ok(())
}
