//! Capacity feasibility checks at the three aggregation levels.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{Instance, LineConcept, LineId, LinePool, LinkId};
use crate::routing::{ArcLoads, Level, RoutingResult, TripRef};

/// Loads above capacity by less than this are treated as rounding noise.
const CAPACITY_TOL: f64 = 1e-6;

/// The capacitated entity a violation refers to, at increasing granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CapacityArc {
    /// An infrastructure link, pooling all lines that serve it.
    Link(LinkId),
    /// One line on one link.
    LineLink { link: LinkId, line: LineId },
    /// One vehicle trip of a line on one link.
    TripSlot {
        link: LinkId,
        line: LineId,
        trip: TripRef,
    },
}

impl CapacityArc {
    /// Human-readable name using the instance's and pool's string ids.
    pub fn describe(&self, instance: &Instance, pool: &LinePool) -> String {
        match self {
            CapacityArc::Link(a) => instance.link(*a).id.clone(),
            CapacityArc::LineLink { link, line } => {
                format!("{}:{}", instance.link(*link).id, pool.line(*line).id())
            }
            CapacityArc::TripSlot { link, line, trip } => format!(
                "{}:{}:{}",
                instance.link(*link).id,
                pool.line(*line).id(),
                trip
            ),
        }
    }
}

/// One overloaded arc: `deficit = load - capacity > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityViolation {
    pub arc: CapacityArc,
    pub load: f64,
    pub capacity: f64,
    pub deficit: f64,
}

/// Outcome of a capacity check; `feasible` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub level: Level,
    /// Overloaded arcs in ascending arc order.
    pub violations: Vec<CapacityViolation>,
    pub feasible: bool,
}

impl CapacityReport {
    fn new(level: Level, violations: Vec<CapacityViolation>) -> Self {
        let feasible = violations.is_empty();
        CapacityReport {
            level,
            violations,
            feasible,
        }
    }

    /// Sum of all deficits; zero iff feasible.
    pub fn total_deficit(&self) -> f64 {
        // + 0.0 turns the empty sum's negative zero into plain zero.
        self.violations.iter().map(|v| v.deficit).sum::<f64>() + 0.0
    }
}

/// Checks whether the concept's capacities carry the routed loads at `level`.
///
/// * link level: pooled capacity `Σ_{l ∋ a} f_l·Q_l` must cover the total
///   load on every link,
/// * line level: `f_l·Q_l` must cover each line's load per link,
/// * trip level: each single vehicle trip must stay within `Q_l`.
///
/// The routing may be finer than the requested level (finer loads are
/// aggregated) but not coarser; a link-level routing carries no per-line
/// information, so asking it a line-level question is a [`Error::LevelMismatch`].
pub fn check_capacity(
    pool: &LinePool,
    concept: &LineConcept,
    routing: &RoutingResult,
    level: Level,
) -> Result<CapacityReport> {
    concept.validate_against(pool)?;
    match level {
        Level::Link => Ok(check_link_level(pool, concept, routing)),
        Level::Line => {
            let loads = routing.loads_per_line_link().ok_or_else(|| mismatch(routing, level))?;
            Ok(check_line_level(pool, concept, &loads))
        }
        Level::Trip => match &routing.arc_loads {
            ArcLoads::Trip(loads) => Ok(check_trip_level(pool, loads)),
            _ => Err(mismatch(routing, level)),
        },
    }
}

fn mismatch(routing: &RoutingResult, want: Level) -> Error {
    Error::LevelMismatch {
        have: routing.level.as_str().to_string(),
        want: want.as_str().to_string(),
    }
}

fn check_link_level(pool: &LinePool, concept: &LineConcept, routing: &RoutingResult) -> CapacityReport {
    let mut violations = Vec::new();
    for (a, load) in routing.loads_per_link() {
        let capacity: f64 = pool
            .through_link(a)
            .iter()
            .map(|&l| f64::from(concept.frequency(l)) * f64::from(pool.line(l).capacity()))
            .sum();
        push_if_overloaded(&mut violations, CapacityArc::Link(a), load, capacity);
    }
    CapacityReport::new(Level::Link, violations)
}

fn check_line_level(
    pool: &LinePool,
    concept: &LineConcept,
    loads: &BTreeMap<(LinkId, LineId), f64>,
) -> CapacityReport {
    let mut violations = Vec::new();
    for (&(a, l), &load) in loads {
        let capacity = f64::from(concept.frequency(l)) * f64::from(pool.line(l).capacity());
        push_if_overloaded(
            &mut violations,
            CapacityArc::LineLink { link: a, line: l },
            load,
            capacity,
        );
    }
    CapacityReport::new(Level::Line, violations)
}

fn check_trip_level(pool: &LinePool, loads: &BTreeMap<(LinkId, LineId, TripRef), f64>) -> CapacityReport {
    let mut violations = Vec::new();
    for (&(a, l, trip), &load) in loads {
        let capacity = f64::from(pool.line(l).capacity());
        push_if_overloaded(
            &mut violations,
            CapacityArc::TripSlot { link: a, line: l, trip },
            load,
            capacity,
        );
    }
    CapacityReport::new(Level::Trip, violations)
}

fn push_if_overloaded(out: &mut Vec<CapacityViolation>, arc: CapacityArc, load: f64, capacity: f64) {
    if load > capacity + CAPACITY_TOL {
        out.push(CapacityViolation {
            arc,
            load,
            capacity,
            deficit: load - capacity,
        });
    }
}
