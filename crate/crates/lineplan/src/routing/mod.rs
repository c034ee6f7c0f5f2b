//! Passenger routing at three aggregation levels.
//!
//! * link level: passengers follow shortest paths in the infrastructure
//!   network, producing one load per link;
//! * line level: passengers are routed through the Change&Go network
//!   ([`Cgn`]), producing one load per (link, line) pair;
//! * trip level: line-level routes are pinned to concrete timetable trips,
//!   producing one load per (link, line, trip).
//!
//! Aggregating a finer level always reproduces the coarser one.

mod cgn;
mod line_level;
mod shortest;
mod trip_level;

pub use cgn::{
    build_cgn, expected_wait, AdaptionModel, Cgn, CgnArc, CgnArcKind, CgnNode, TransferModel,
};
pub use line_level::{route_line_level, CapacityMode};
pub use shortest::{route_link_level, shortest_paths_ptn, traffic_loads, ShortestPaths};
pub use trip_level::{assign_trips, Timetable};

pub(crate) use line_level::{cgn_digraph, decompose_cgn_flows, OdFlows};
pub(crate) use shortest::{network_diameter, od_paths_with};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{Instance, LineId, LinkId, StationId};

/// Aggregation level of a routing result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Link,
    Line,
    Trip,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Link => "link",
            Level::Line => "line",
            Level::Trip => "trip",
        }
    }
}

/// Passenger-minutes spent per activity over all routed passengers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimeComponents {
    pub driving: f64,
    /// Dwell time at intermediate stops (zero unless a dwell model is used).
    pub waiting: f64,
    pub transfer: f64,
    /// Schedule adaption before the first boarding.
    pub adaption: f64,
}

impl TimeComponents {
    pub fn total(&self) -> f64 {
        self.driving + self.waiting + self.transfer + self.adaption
    }
}

/// A path in the infrastructure network.
#[derive(Debug, Clone, PartialEq)]
pub struct PtnPath {
    pub stations: Vec<StationId>,
    pub links: Vec<LinkId>,
    pub length: f64,
}

/// Travel direction of a leg relative to the line's stored station order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// One trip of a line within the planning period, counted per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripRef {
    pub direction: Direction,
    pub index: u32,
}

impl std::fmt::Display for TripRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = match self.direction {
            Direction::Forward => 'f',
            Direction::Backward => 'r',
        };
        write!(f, "{d}{}", self.index)
    }
}

/// A contiguous ride on one line.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub line: LineId,
    pub from: StationId,
    pub to: StationId,
    /// Links traversed, in travel order.
    pub links: Vec<LinkId>,
}

/// A leg bound to a concrete trip with absolute times (minutes from the
/// period start; may exceed the period when wrapping).
#[derive(Debug, Clone, PartialEq)]
pub struct TripLeg {
    pub leg: Leg,
    pub trip: TripRef,
    pub board_time: f64,
    pub alight_time: f64,
}

/// The level-specific shape of one route.
#[derive(Debug, Clone, PartialEq)]
pub enum RoutePath {
    Link(PtnPath),
    Line { legs: Vec<Leg> },
    Trip { legs: Vec<TripLeg> },
}

/// A group of passengers on a common route.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub path: RoutePath,
    pub passengers: f64,
}

/// Loads keyed by the level's arc identity.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcLoads {
    Link(BTreeMap<LinkId, f64>),
    Line(BTreeMap<(LinkId, LineId), f64>),
    Trip(BTreeMap<(LinkId, LineId, TripRef), f64>),
}

impl ArcLoads {
    pub fn level(&self) -> Level {
        match self {
            ArcLoads::Link(_) => Level::Link,
            ArcLoads::Line(_) => Level::Line,
            ArcLoads::Trip(_) => Level::Trip,
        }
    }
}

/// Result of routing all demand at one aggregation level.
#[derive(Debug, Clone)]
pub struct RoutingResult {
    pub level: Level,
    /// Routes per OD pair; flows over a pair's routes sum to its demand.
    pub routes: BTreeMap<(StationId, StationId), Vec<Route>>,
    pub arc_loads: ArcLoads,
    pub time_components: TimeComponents,
    /// OD pairs that could not be routed (disconnected); their demand is
    /// excluded from loads and time components.
    pub unrouted: Vec<(StationId, StationId)>,
}

impl RoutingResult {
    /// Total passengers that received a route.
    pub fn routed_passengers(&self) -> f64 {
        self.routes
            .values()
            .flat_map(|rs| rs.iter().map(|r| r.passengers))
            .sum()
    }

    /// Loads aggregated down to link level.
    pub fn loads_per_link(&self) -> BTreeMap<LinkId, f64> {
        match &self.arc_loads {
            ArcLoads::Link(m) => m.clone(),
            ArcLoads::Line(m) => {
                let mut out = BTreeMap::new();
                for (&(a, _), &v) in m {
                    *out.entry(a).or_insert(0.0) += v;
                }
                out
            }
            ArcLoads::Trip(m) => {
                let mut out = BTreeMap::new();
                for (&(a, _, _), &v) in m {
                    *out.entry(a).or_insert(0.0) += v;
                }
                out
            }
        }
    }

    /// Loads aggregated to (link, line) level; `None` when the result is
    /// link-level and the per-line split is unknown.
    pub fn loads_per_line_link(&self) -> Option<BTreeMap<(LinkId, LineId), f64>> {
        match &self.arc_loads {
            ArcLoads::Link(_) => None,
            ArcLoads::Line(m) => Some(m.clone()),
            ArcLoads::Trip(m) => {
                let mut out = BTreeMap::new();
                for (&(a, l, _), &v) in m {
                    *out.entry((a, l)).or_insert(0.0) += v;
                }
                Some(out)
            }
        }
    }

    /// Passengers whose route needs no transfer. At link level this counts
    /// passengers whose whole path is covered by a single pool line.
    pub fn direct_travelers(&self, pool: &crate::network::LinePool) -> f64 {
        let mut total = 0.0;
        for routes in self.routes.values() {
            for route in routes {
                let direct = match &route.path {
                    RoutePath::Line { legs } => legs.len() <= 1,
                    RoutePath::Trip { legs } => legs.len() <= 1,
                    RoutePath::Link(path) => pool
                        .lines()
                        .any(|(_, line)| path_on_line(path, line.links())),
                };
                if direct {
                    total += route.passengers;
                }
            }
        }
        total
    }
}

/// True if the path's links appear contiguously on the given line.
fn path_on_line(path: &PtnPath, line_links: &[LinkId]) -> bool {
    if path.links.is_empty() {
        return true;
    }
    let forward = line_links
        .windows(path.links.len())
        .any(|w| w == path.links.as_slice());
    if forward {
        return true;
    }
    let reversed: Vec<LinkId> = path.links.iter().rev().copied().collect();
    line_links
        .windows(reversed.len())
        .any(|w| w == reversed.as_slice())
}

/// Expected wait for the next of `k` periodically scheduled but mutually
/// unsynchronized departures within a period of length `period`: T/(k+1).
pub fn expected_wait_unsynchronized(k: u32, period: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParameter(
            "expected wait needs at least one departure per period".into(),
        ));
    }
    if !(period > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {period}"
        )));
    }
    Ok(period / (k as f64 + 1.0))
}

/// Builds routes for an instance at the requested level with default models
/// (fixed 5-minute transfer penalty, no adaption, capacities ignored).
///
/// Convenience wrapper used by the evaluation pipeline and CLI.
pub fn route_at_level(
    instance: &Instance,
    pool: &crate::network::LinePool,
    concept: &crate::network::LineConcept,
    level: Level,
) -> Result<RoutingResult> {
    match level {
        Level::Link => Ok(route_link_level(instance)),
        Level::Line => {
            let selected = pool.restrict_to(instance, concept)?;
            let cgn = build_cgn(
                instance,
                &selected,
                &TransferModel::Fixed(5.0),
                &AdaptionModel::None,
            )?;
            let result = route_line_level(instance, &selected, &cgn, CapacityMode::Ignore)?;
            remap_lines(result, &selected, pool)
        }
        Level::Trip => {
            let selected = pool.restrict_to(instance, concept)?;
            let cgn = build_cgn(
                instance,
                &selected,
                &TransferModel::Fixed(5.0),
                &AdaptionModel::None,
            )?;
            let line_result = route_line_level(instance, &selected, &cgn, CapacityMode::Ignore)?;
            let restricted = remap_concept(concept, pool, &selected);
            let timetable = Timetable::regular(&selected, &restricted, instance.period());
            let trip_result = assign_trips(instance, &selected, &timetable, &line_result)?;
            remap_lines(trip_result, &selected, pool)
        }
    }
}

/// Translates line ids of a result computed on a restricted pool back to
/// the full pool's indices.
fn remap_lines(
    mut result: RoutingResult,
    sub: &crate::network::LinePool,
    full: &crate::network::LinePool,
) -> Result<RoutingResult> {
    let map: Vec<LineId> = sub
        .lines()
        .map(|(_, line)| {
            full.line_by_id(line.id()).ok_or_else(|| {
                Error::PoolMismatch(format!("line {} missing from full pool", line.id()))
            })
        })
        .collect::<Result<_>>()?;
    let fix = |l: LineId| map[l.0];
    for routes in result.routes.values_mut() {
        for route in routes {
            match &mut route.path {
                RoutePath::Link(_) => {}
                RoutePath::Line { legs } => {
                    for leg in legs {
                        leg.line = fix(leg.line);
                    }
                }
                RoutePath::Trip { legs } => {
                    for tl in legs {
                        tl.leg.line = fix(tl.leg.line);
                    }
                }
            }
        }
    }
    result.arc_loads = match result.arc_loads {
        ArcLoads::Link(m) => ArcLoads::Link(m),
        ArcLoads::Line(m) => {
            ArcLoads::Line(m.into_iter().map(|((a, l), v)| ((a, fix(l)), v)).collect())
        }
        ArcLoads::Trip(m) => ArcLoads::Trip(
            m.into_iter()
                .map(|((a, l, t), v)| ((a, fix(l), t), v))
                .collect(),
        ),
    };
    Ok(result)
}

/// Projects a full-pool concept onto a restricted pool's indices.
fn remap_concept(
    concept: &crate::network::LineConcept,
    full: &crate::network::LinePool,
    sub: &crate::network::LinePool,
) -> crate::network::LineConcept {
    let mut out = crate::network::LineConcept::new();
    for (l, line) in sub.lines() {
        if let Some(fl) = full.line_by_id(line.id()) {
            out.set_frequency(l, concept.frequency(fl));
        }
    }
    out
}
