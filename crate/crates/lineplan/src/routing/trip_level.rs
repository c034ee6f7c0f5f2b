//! Trip-level routing: pins line-level routes to concrete timetable trips.
//!
//! Lines run a regular timetable: frequency f means f evenly spaced trips
//! per period and direction. Passenger groups keep their line-level route,
//! board the earliest trip departing at or after they reach the boarding
//! station (wrapping into the next period if needed), and stay together.

use std::collections::BTreeMap;

use super::{
    ArcLoads, Direction, Level, Route, RoutePath, RoutingResult, TimeComponents, TripLeg, TripRef,
};
use crate::error::{Error, Result};
use crate::network::{Instance, LineConcept, LineId, LinePool};

/// Departure offsets per line for one planning period.
#[derive(Debug, Clone)]
pub struct Timetable {
    offsets: BTreeMap<LineId, Vec<f64>>,
    period: f64,
}

impl Timetable {
    /// Evenly spaced departures j * T/f for each operating line, rounded to
    /// a tenth of a minute. Both directions use the same offsets, each
    /// anchored at its own terminal.
    pub fn regular(pool: &LinePool, concept: &LineConcept, period: f64) -> Timetable {
        let mut offsets = BTreeMap::new();
        for (l, _) in pool.lines() {
            let f = concept.frequency(l);
            if f == 0 {
                continue;
            }
            let spacing = period / f as f64;
            let deps: Vec<f64> = (0..f)
                .map(|j| round_tenth(j as f64 * spacing))
                .collect();
            offsets.insert(l, deps);
        }
        Timetable { offsets, period }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Departure offsets of a line (empty when the line does not operate).
    pub fn offsets(&self, line: LineId) -> &[f64] {
        self.offsets.get(&line).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn trip_count(&self, line: LineId) -> usize {
        self.offsets(line).len()
    }
}

fn round_tenth(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

const TIME_EPS: f64 = 1e-9;

/// Departure time of trip `j` of `line` at station position `pos`, for the
/// given direction. Offsets anchor trips at the direction's terminal.
fn departure_at(
    cumulative: &[f64],
    offsets: &[f64],
    j: usize,
    pos: usize,
    direction: Direction,
) -> f64 {
    let total = *cumulative.last().unwrap();
    match direction {
        Direction::Forward => offsets[j] + cumulative[pos],
        Direction::Backward => offsets[j] + (total - cumulative[pos]),
    }
}

/// Assigns every line-level route to concrete trips.
///
/// Each passenger group desires to depart at the period start, boards the
/// earliest trip at or after its arrival at each boarding station, and is
/// never split across trips. Returns trip-level routes and per
/// (link, line, trip) loads.
pub fn assign_trips(
    instance: &Instance,
    pool: &LinePool,
    timetable: &Timetable,
    line_routes: &RoutingResult,
) -> Result<RoutingResult> {
    if line_routes.level != Level::Line {
        return Err(Error::LevelMismatch {
            have: line_routes.level.as_str().into(),
            want: "line".into(),
        });
    }
    let period = timetable.period();
    let mut routes = BTreeMap::new();
    let mut loads: BTreeMap<(crate::network::LinkId, LineId, TripRef), f64> = BTreeMap::new();
    let mut time = TimeComponents::default();

    for (&(s, t), od_routes) in &line_routes.routes {
        let mut out_routes = Vec::with_capacity(od_routes.len());
        for route in od_routes {
            let RoutePath::Line { legs } = &route.path else {
                return Err(Error::LevelMismatch {
                    have: "mixed".into(),
                    want: "line".into(),
                });
            };
            let group = route.passengers;
            let mut now = 0.0;
            let mut trip_legs = Vec::with_capacity(legs.len());
            for (leg_index, leg) in legs.iter().enumerate() {
                let line = pool.line(leg.line);
                let offsets = timetable.offsets(leg.line);
                if offsets.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "route for {}->{} uses line {} which has no trips in \
                         the timetable",
                        instance.station_name(s),
                        instance.station_name(t),
                        line.id()
                    )));
                }
                let pos_from = line.station_position(leg.from).ok_or_else(|| {
                    Error::PoolMismatch(format!(
                        "leg boards line {} at {} which it does not serve",
                        line.id(),
                        instance.station_name(leg.from)
                    ))
                })?;
                let pos_to = line.station_position(leg.to).ok_or_else(|| {
                    Error::PoolMismatch(format!(
                        "leg leaves line {} at {} which it does not serve",
                        line.id(),
                        instance.station_name(leg.to)
                    ))
                })?;
                let direction = if pos_from < pos_to {
                    Direction::Forward
                } else {
                    Direction::Backward
                };
                let cumulative = line.cumulative_times(instance);

                // Earliest trip departing at or after `now`, wrapping into
                // later periods; ties cannot occur since offsets differ.
                let mut best: Option<(f64, usize)> = None;
                for j in 0..offsets.len() {
                    let dep = departure_at(&cumulative, offsets, j, pos_from, direction);
                    let wraps = ((now - dep - TIME_EPS) / period).ceil().max(0.0);
                    let cand = dep + wraps * period;
                    if best.map_or(true, |(bt, _)| cand < bt - TIME_EPS) {
                        best = Some((cand, j));
                    }
                }
                let (board, j) = best.unwrap();
                let wait = (board - now).max(0.0);
                if leg_index == 0 {
                    time.adaption += wait * group;
                } else {
                    time.transfer += wait * group;
                }

                let ride: f64 = leg
                    .links
                    .iter()
                    .map(|&a| instance.link(a).length_time)
                    .sum();
                time.driving += ride * group;
                let trip = TripRef {
                    direction,
                    index: j as u32,
                };
                for &a in &leg.links {
                    *loads.entry((a, leg.line, trip)).or_insert(0.0) += group;
                }
                trip_legs.push(TripLeg {
                    leg: leg.clone(),
                    trip,
                    board_time: board,
                    alight_time: board + ride,
                });
                now = board + ride;
            }
            out_routes.push(Route {
                path: RoutePath::Trip { legs: trip_legs },
                passengers: group,
            });
        }
        routes.insert((s, t), out_routes);
    }

    Ok(RoutingResult {
        level: Level::Trip,
        routes,
        arc_loads: ArcLoads::Trip(loads),
        time_components: time,
        unrouted: line_routes.unrouted.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::fixture;
    use crate::routing::{
        build_cgn, route_line_level, AdaptionModel, CapacityMode, TransferModel,
    };

    fn fixture_trip_result() -> (Instance, LinePool, LineConcept, RoutingResult) {
        let (instance, pool) = fixture();
        let concept = LineConcept::from_frequencies([
            (LineId(0), 1),
            (LineId(1), 2),
            (LineId(2), 1),
        ]);
        let cgn = build_cgn(
            &instance,
            &pool,
            &TransferModel::Fixed(5.0),
            &AdaptionModel::None,
        )
        .unwrap();
        let line_result =
            route_line_level(&instance, &pool, &cgn, CapacityMode::Enforce(&concept)).unwrap();
        let timetable = Timetable::regular(&pool, &concept, instance.period());
        let trip_result = assign_trips(&instance, &pool, &timetable, &line_result).unwrap();
        (instance, pool, concept, trip_result)
    }

    #[test]
    fn regular_timetable_spaces_departures() {
        let (instance, pool) = fixture();
        let concept = LineConcept::from_frequencies([(LineId(1), 2), (LineId(2), 3)]);
        let tt = Timetable::regular(&pool, &concept, instance.period());
        assert_eq!(tt.offsets(LineId(1)), &[0.0, 30.0]);
        assert_eq!(tt.offsets(LineId(2)), &[0.0, 20.0, 40.0]);
        assert!(tt.offsets(LineId(0)).is_empty());
        assert_eq!(tt.trip_count(LineId(2)), 3);
    }

    #[test]
    fn offsets_round_to_tenth_minutes() {
        let (instance, pool) = fixture();
        let concept = LineConcept::from_frequencies([(LineId(2), 7)]);
        let tt = Timetable::regular(&pool, &concept, instance.period());
        // 60/7 = 8.571... rounds to 8.6.
        assert_eq!(tt.offsets(LineId(2))[1], 8.6);
        assert_eq!(tt.offsets(LineId(2))[6], 51.4);
    }

    #[test]
    fn transferring_group_boards_first_feasible_trip_together() {
        let (instance, _, _, result) = fixture_trip_result();
        let a1 = instance.link_by_id("a1").unwrap();
        let a2 = instance.link_by_id("a2").unwrap();
        let ArcLoads::Trip(loads) = &result.arc_loads else {
            panic!("expected trip loads");
        };
        let f0 = TripRef {
            direction: Direction::Forward,
            index: 0,
        };
        let f1 = TripRef {
            direction: Direction::Forward,
            index: 1,
        };
        // Direct 60 ride l3's only trip; the transferring 60 reach s2 at
        // minute 20 and board l2's second trip (offset 30) together.
        assert_eq!(loads[&(a1, LineId(2), f0)], 60.0);
        assert_eq!(loads[&(a2, LineId(2), f0)], 60.0);
        assert_eq!(loads[&(a1, LineId(0), f0)], 60.0);
        assert_eq!(loads[&(a2, LineId(1), f1)], 60.0);
        // l2's first trip carries nobody.
        assert!(!loads.contains_key(&(a2, LineId(1), f0)));
        assert_eq!(loads.len(), 4);
    }

    #[test]
    fn trip_times_follow_the_timetable() {
        let (instance, _, _, result) = fixture_trip_result();
        let s1 = instance.station("s1").unwrap();
        let s3 = instance.station("s3").unwrap();
        let routes = &result.routes[&(s1, s3)];
        let transfer_route = routes
            .iter()
            .find_map(|r| match &r.path {
                RoutePath::Trip { legs } if legs.len() == 2 => Some(legs),
                _ => None,
            })
            .expect("one route transfers at s2");
        assert_eq!(transfer_route[0].board_time, 0.0);
        assert_eq!(transfer_route[0].alight_time, 20.0);
        assert_eq!(transfer_route[1].board_time, 30.0);
        assert_eq!(transfer_route[1].alight_time, 50.0);
        assert_eq!(transfer_route[1].trip.index, 1);

        // 10 minutes of transfer wait for the group of 60.
        assert_eq!(result.time_components.transfer, 600.0);
        assert_eq!(result.time_components.adaption, 0.0);
        assert_eq!(result.time_components.driving, 4800.0);
    }

    #[test]
    fn aggregating_trip_loads_reproduces_line_and_link_loads() {
        let (instance, _, _, result) = fixture_trip_result();
        let a1 = instance.link_by_id("a1").unwrap();
        let a2 = instance.link_by_id("a2").unwrap();
        let line_loads = result.loads_per_line_link().unwrap();
        assert_eq!(line_loads[&(a1, LineId(2))], 60.0);
        assert_eq!(line_loads[&(a1, LineId(0))], 60.0);
        let link_loads = result.loads_per_link();
        assert_eq!(link_loads[&a1], 120.0);
        assert_eq!(link_loads[&a2], 120.0);
    }

    #[test]
    fn wrapped_boarding_uses_next_period() {
        // One line, frequency 1, its only trip leaves before the group
        // arrives at the transfer stop, so boarding wraps into the next
        // period.
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 50.0, 0, None).unwrap();
        b.link("a2", "s2", "s3", 10.0, 0, None).unwrap();
        b.od("s1", "s3", 10.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(
            &instance,
            vec![
                crate::network::LineDef::new("p", &["a1"], 1.0),
                crate::network::LineDef::new("q", &["a2"], 1.0),
            ],
        )
        .unwrap();
        let concept = LineConcept::from_frequencies([(LineId(0), 1), (LineId(1), 1)]);
        let cgn = build_cgn(
            &instance,
            &pool,
            &TransferModel::Fixed(5.0),
            &AdaptionModel::None,
        )
        .unwrap();
        let line_result = route_line_level(&instance, &pool, &cgn, CapacityMode::Ignore).unwrap();
        let timetable = Timetable::regular(&pool, &concept, instance.period());
        let result = assign_trips(&instance, &pool, &timetable, &line_result).unwrap();
        let s1 = instance.station("s1").unwrap();
        let s3 = instance.station("s3").unwrap();
        let RoutePath::Trip { legs } = &result.routes[&(s1, s3)][0].path else {
            panic!();
        };
        // Arrive s2 at 50; q's only trip left at 0, next at 60.
        assert_eq!(legs[1].board_time, 60.0);
        assert_eq!(legs[1].alight_time, 70.0);
        assert_eq!(result.time_components.transfer, 100.0);
    }

    #[test]
    fn link_level_input_is_rejected() {
        let (instance, pool) = fixture();
        let concept = LineConcept::from_frequencies([(LineId(2), 1)]);
        let timetable = Timetable::regular(&pool, &concept, instance.period());
        let link_result = crate::routing::route_link_level(&instance);
        let err = assign_trips(&instance, &pool, &timetable, &link_result).unwrap_err();
        assert!(matches!(err, Error::LevelMismatch { .. }));
    }
}
