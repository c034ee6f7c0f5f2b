//! The Change&Go network: a routing graph whose nodes are (station, line)
//! pairs, with driving arcs along each line and transfer arcs between lines
//! meeting at a station.
//!
//! Waiting costs attached to boarding and transferring can either be fixed
//! penalties or derived from line frequencies (expected wait T/(2f) for a
//! regular timetable with frequency f in a period of length T).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{Instance, LineConcept, LineId, LinePool, LinkId, StationId};

/// How transfer waiting time is charged.
#[derive(Debug, Clone, Copy)]
pub enum TransferModel<'a> {
    /// A flat penalty in minutes per transfer.
    Fixed(f64),
    /// Expected wait for the next trip of the target line: T/(2 f).
    ///
    /// With `hybrid`, lines running more than 6 trips per hour use T/(2 f)
    /// while less frequent lines get a flat 5 minutes, modelling passengers
    /// who time their transfer to a published schedule.
    Frequency {
        concept: &'a LineConcept,
        hybrid: bool,
    },
}

/// How the initial schedule adaption (wait before first boarding) is charged.
#[derive(Debug, Clone, Copy)]
pub enum AdaptionModel<'a> {
    /// Passengers are assumed to arrive exactly at departure; no cost.
    None,
    /// Same expected-wait rule as [`TransferModel::Frequency`].
    Frequency {
        concept: &'a LineConcept,
        hybrid: bool,
    },
}

/// A (station, line) node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CgnNode {
    pub station: StationId,
    pub line: LineId,
}

/// What a Change&Go arc represents.
#[derive(Debug, Clone, PartialEq)]
pub enum CgnArcKind {
    /// Riding one link on a line (either direction).
    Drive { link: LinkId, line: LineId },
    /// Changing lines at a station.
    Transfer {
        station: StationId,
        from_line: LineId,
        to_line: LineId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgnArc {
    pub from: usize,
    pub to: usize,
    pub kind: CgnArcKind,
    /// Time cost in minutes.
    pub label: f64,
}

/// The assembled Change&Go network.
#[derive(Debug, Clone)]
pub struct Cgn {
    nodes: Vec<CgnNode>,
    node_of: BTreeMap<(StationId, LineId), usize>,
    arcs: Vec<CgnArc>,
    out: Vec<Vec<usize>>,
    /// Per node: waiting cost charged when a journey starts by boarding here.
    boarding: Vec<f64>,
    /// Node rank for deterministic tie-breaking (station rank, then line).
    rank: Vec<usize>,
}

impl Cgn {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, v: usize) -> CgnNode {
        self.nodes[v]
    }

    pub fn nodes(&self) -> &[CgnNode] {
        &self.nodes
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, a: usize) -> &CgnArc {
        &self.arcs[a]
    }

    pub fn arcs(&self) -> &[CgnArc] {
        &self.arcs
    }

    /// Index of the (station, line) node, if the line serves the station.
    pub fn node_index(&self, station: StationId, line: LineId) -> Option<usize> {
        self.node_of.get(&(station, line)).copied()
    }

    /// All node indices at a station, ascending.
    pub fn nodes_at(&self, station: StationId) -> Vec<usize> {
        self.node_of
            .range((station, LineId(0))..=(station, LineId(usize::MAX)))
            .map(|(_, &v)| v)
            .collect()
    }

    /// Waiting cost charged when a journey starts at this node.
    pub fn boarding_label(&self, v: usize) -> f64 {
        self.boarding[v]
    }

    pub(crate) fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub(crate) fn ranks(&self) -> &[usize] {
        &self.rank
    }
}

/// Expected wait before the next of `frequency` evenly spaced trips in a
/// period of `period` minutes: `period / (2 · frequency)`.
///
/// This is the half-headway rule behind [`TransferModel::Frequency`] and
/// [`AdaptionModel::Frequency`]. A zero frequency yields infinity.
pub fn expected_wait(frequency: u32, period: f64) -> f64 {
    period / (2.0 * f64::from(frequency))
}

/// [`expected_wait`], optionally switching to a flat 5 minutes for lines
/// running at most 6 trips per hour.
fn frequency_wait(f: u32, period: f64, hybrid: bool) -> f64 {
    let expected = expected_wait(f, period);
    if hybrid {
        let trips_per_hour = f as f64 * 60.0 / period;
        if trips_per_hour > 6.0 {
            expected
        } else {
            5.0
        }
    } else {
        expected
    }
}

fn wait_label(
    line: LineId,
    pool: &LinePool,
    concept: &LineConcept,
    period: f64,
    hybrid: bool,
) -> Result<f64> {
    let f = concept.frequency(line);
    if f == 0 {
        return Err(Error::InvalidParameter(format!(
            "line {} has frequency 0; frequency-based waits need every pool \
             line operating (restrict the pool to the concept first)",
            pool.line(line).id()
        )));
    }
    Ok(frequency_wait(f, period, hybrid))
}

/// Builds the Change&Go network over all lines of the pool.
///
/// When using frequency-based waits, the pool must contain only operating
/// lines (see [`LinePool::restrict_to`]); a zero-frequency line is an error.
pub fn build_cgn(
    instance: &Instance,
    pool: &LinePool,
    transfer: &TransferModel<'_>,
    adaption: &AdaptionModel<'_>,
) -> Result<Cgn> {
    if let TransferModel::Fixed(p) = transfer {
        if !p.is_finite() || *p < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transfer penalty must be a nonnegative number, got {p}"
            )));
        }
    }
    let period = instance.period();
    let station_rank = crate::network::generate::station_ranks(instance);

    // Nodes: lines in pool order, stations in line order.
    let mut nodes = Vec::new();
    let mut node_of = BTreeMap::new();
    for (l, line) in pool.lines() {
        for &s in line.stations() {
            let v = nodes.len();
            nodes.push(CgnNode {
                station: s,
                line: l,
            });
            node_of.insert((s, l), v);
        }
    }

    let rank: Vec<usize> = nodes
        .iter()
        .map(|n| station_rank[n.station.0] * pool.len() + n.line.0)
        .collect();

    let mut arcs: Vec<CgnArc> = Vec::new();
    let mut out = vec![Vec::new(); nodes.len()];
    let push = |arcs: &mut Vec<CgnArc>, out: &mut Vec<Vec<usize>>, arc: CgnArc| {
        out[arc.from].push(arcs.len());
        arcs.push(arc);
    };

    // Driving arcs, both directions per link of each line.
    for (l, line) in pool.lines() {
        let stations = line.stations();
        for (i, &a) in line.links().iter().enumerate() {
            let w = instance.link(a).length_time;
            let u = node_of[&(stations[i], l)];
            let v = node_of[&(stations[i + 1], l)];
            push(
                &mut arcs,
                &mut out,
                CgnArc {
                    from: u,
                    to: v,
                    kind: CgnArcKind::Drive { link: a, line: l },
                    label: w,
                },
            );
            push(
                &mut arcs,
                &mut out,
                CgnArc {
                    from: v,
                    to: u,
                    kind: CgnArcKind::Drive { link: a, line: l },
                    label: w,
                },
            );
        }
    }

    // Transfer arcs between distinct lines meeting at a station.
    for s in instance.stations() {
        let here = pool.at_station(s);
        for &l_from in here {
            for &l_to in here {
                if l_from == l_to {
                    continue;
                }
                let label = match transfer {
                    TransferModel::Fixed(p) => *p,
                    TransferModel::Frequency { concept, hybrid } => {
                        wait_label(l_to, pool, concept, period, *hybrid)?
                    }
                };
                push(
                    &mut arcs,
                    &mut out,
                    CgnArc {
                        from: node_of[&(s, l_from)],
                        to: node_of[&(s, l_to)],
                        kind: CgnArcKind::Transfer {
                            station: s,
                            from_line: l_from,
                            to_line: l_to,
                        },
                        label,
                    },
                );
            }
        }
    }

    // Boarding labels per node (adaption charged on journey start).
    let mut boarding = vec![0.0; nodes.len()];
    if let AdaptionModel::Frequency { concept, hybrid } = adaption {
        for (v, n) in nodes.iter().enumerate() {
            boarding[v] = wait_label(n.line, pool, concept, period, *hybrid)?;
        }
    }

    Ok(Cgn {
        nodes,
        node_of,
        arcs,
        out,
        boarding,
        rank,
    })
}
