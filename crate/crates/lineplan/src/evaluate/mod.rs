//! Evaluation of line concepts: performance indicators, capacity feasibility
//! at all three aggregation levels, link-failure robustness scans, mode
//! split, concept dissimilarity, and the analytic square-root frequency rule.

mod capacity;
mod dissimilarity;
mod failure;

pub use capacity::{check_capacity, CapacityArc, CapacityReport, CapacityViolation};
pub use dissimilarity::{concept_dissimilarity, DissimilarityMeasure};
pub use failure::{
    link_failure_scan, FailurePolicy, FailureScan, FailureScanConfig, LinkFailureRecord,
};

use crate::error::{Error, Result};
use crate::network::{Instance, LineConcept, LinePool};
use crate::routing::{RoutingResult, TimeComponents};

/// Optional ticketing parameters for revenue and profit reporting.
///
/// The network carries a single length attribute per link (minutes), which
/// doubles as the distance proxy: fares are charged per unit of in-vehicle
/// length travelled, plus a flat subsidy per transported passenger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FareSchedule {
    /// Money per passenger per unit of ridden link length.
    pub fare_per_length: f64,
    /// Money received per transported passenger (e.g. a public subsidy).
    pub subsidy_per_passenger: f64,
}

/// Summary indicators of a line concept and its passenger routing.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorReport {
    /// Frequency-proportional operating cost `Σ c_l·f_l`.
    pub variable_cost: f64,
    /// One-off cost of the selected lines `Σ fixed_l`.
    pub fixed_cost: f64,
    /// Fractional fleet size estimate `Σ time_l·f_l / T`.
    pub vehicle_estimate: f64,
    /// Fleet size with each line's share rounded up to whole vehicles.
    pub vehicles_required: u32,
    /// Passenger-minutes by component, from the routing labels.
    pub time_components: TimeComponents,
    /// Fraction of total demand that received a route, in `[0, 1]`.
    pub coverage: f64,
    /// Passengers travelling without any transfer.
    pub direct_travelers: f64,
    /// Ticket income; present iff a fare schedule was supplied.
    pub revenue: Option<f64>,
    /// `revenue − variable_cost − fixed_cost`; present iff revenue is.
    pub profit: Option<f64>,
}

/// Computes the indicator report for a concept and the routing produced for
/// it. `fares` enables the optional revenue and profit figures.
pub fn indicators(
    instance: &Instance,
    pool: &LinePool,
    concept: &LineConcept,
    routing: &RoutingResult,
    fares: Option<&FareSchedule>,
) -> IndicatorReport {
    let mut variable_cost = 0.0;
    let mut fixed_cost = 0.0;
    let mut vehicle_estimate = 0.0;
    let mut vehicles_required = 0u32;
    for (l, f) in concept.selected() {
        let line = pool.line(l);
        let f = f64::from(f);
        variable_cost += line.cost_per_trip() * f;
        fixed_cost += line.fixed_cost();
        let share = line.round_trip_time() * f / instance.period();
        vehicle_estimate += share;
        vehicles_required += share.ceil() as u32;
    }

    let total = instance.total_demand();
    let routed = routing.routed_passengers();
    let coverage = if total > 0.0 {
        (routed / total).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let revenue = fares.map(|f| {
        f.fare_per_length * routing.time_components.driving + f.subsidy_per_passenger * routed
    });
    let profit = revenue.map(|r| r - variable_cost - fixed_cost);

    IndicatorReport {
        variable_cost,
        fixed_cost,
        vehicle_estimate,
        vehicles_required,
        time_components: routing.time_components,
        coverage,
        direct_travelers: routing.direct_travelers(pool),
        revenue,
        profit,
    }
}

/// Share of travellers choosing transit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeModel {
    /// Everyone takes the strictly faster mode; ties count as not covered.
    AllOrNothing,
    /// Binary logit on travel times with sensitivity `theta > 0`.
    Logit { theta: f64 },
}

/// Fraction of an OD pair's travellers that choose transit over the
/// alternative mode, given door-to-door travel times in minutes.
pub fn mode_split(transit_time: f64, alternative_time: f64, model: &ModeModel) -> Result<f64> {
    for (name, t) in [("transit", transit_time), ("alternative", alternative_time)] {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} travel time must be positive, got {t}"
            )));
        }
    }
    match *model {
        ModeModel::AllOrNothing => Ok(if transit_time < alternative_time {
            1.0
        } else {
            0.0
        }),
        ModeModel::Logit { theta } => {
            if !(theta.is_finite() && theta > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "logit sensitivity must be positive, got {theta}"
                )));
            }
            // exp(−θ·t_t) / (exp(−θ·t_t) + exp(−θ·t_a)), written in the
            // overflow-safe single-exponential form.
            Ok(1.0 / (1.0 + (theta * (transit_time - alternative_time)).exp()))
        }
    }
}

/// Frequency minimizing `c·f + w·d·T/(2f)`: operating cost against the
/// expected passenger waiting cost under evenly spread departures.
///
/// Returns `f* = sqrt(w·d·T / (2c))`, the stationary point of that
/// objective; the optimal frequency grows with the square root of demand.
pub fn sqrt_frequency(demand_rate: f64, wait_value: f64, trip_cost: f64, period: f64) -> Result<f64> {
    for (name, v) in [
        ("demand rate", demand_rate),
        ("wait value", wait_value),
        ("trip cost", trip_cost),
        ("period", period),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok((wait_value * demand_rate * period / (2.0 * trip_cost)).sqrt())
}
