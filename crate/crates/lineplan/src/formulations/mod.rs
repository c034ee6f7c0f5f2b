//! Optimization model builders.
//!
//! Each builder translates a planning question into a [`MilpModel`] plus an
//! index that maps semantic keys (frequency of line l, flow of an OD pair on
//! an arc, ...) to model variables, so solutions can be decoded back into
//! [`LineConcept`]s and [`RoutingResult`]s without string parsing.

mod cost;
mod direct;
mod flow;

pub use cost::{apply_frequency_indicators, apply_system_frequency, build_cost_model};
pub use direct::{build_direct_traveler_model, DirectBudget};
pub use flow::{build_flow_model, FlowLevel, FlowModelConfig, FlowObjective};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpModel, MilpSolution, SolveOptions, VarId};
use crate::network::{Instance, LineConcept, LineId, LinePool, LinkId, StationId};
use crate::routing::{Cgn, RoutingResult};

/// Semantic identity of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    /// Frequency f_l of a line.
    Freq(LineId),
    /// System-frequency multiple: f_l = i * SystemMultiple(l).
    SystemMultiple(LineId),
    /// Binary indicator that line l runs exactly at the given frequency.
    FreqIndicator(LineId, u32),
    /// Flow of an OD pair on a directed arc of the routing graph
    /// (infrastructure arcs at link level, Change&Go arcs at line level).
    Flow {
        od: (StationId, StationId),
        arc: usize,
    },
    /// Flow of an OD pair entering the network at a Change&Go node.
    Board {
        od: (StationId, StationId),
        node: usize,
    },
    /// Flow of an OD pair leaving the network at a Change&Go node.
    Alight {
        od: (StationId, StationId),
        node: usize,
    },
    /// Direct travelers of an OD pair assigned to a line.
    Direct {
        od: (StationId, StationId),
        line: LineId,
    },
    /// Binary selection of a line.
    Select(LineId),
    /// Frequency of a line in one season of a multi-period model.
    SeasonFreq { season: usize, line: LineId },
    /// Binary selection of a line in one season of a multi-period model.
    SeasonSelect { season: usize, line: LineId },
}

/// What a flow formulation needs to decode routings later.
#[derive(Debug, Clone)]
pub(crate) enum Context {
    /// No routing attached (cost and direct-traveler models).
    Plain,
    /// Link-level flows on the directed infrastructure graph.
    FlowLink {
        pairs: Vec<(StationId, StationId, f64)>,
    },
    /// Line-level flows on a Change&Go network.
    FlowLine {
        pairs: Vec<(StationId, StationId, f64)>,
        cgn: Cgn,
    },
}

/// A built optimization model plus the key-to-variable index.
#[derive(Debug, Clone)]
pub struct FormulationArtifacts {
    pub model: MilpModel,
    index: BTreeMap<VarKey, VarId>,
    pub(crate) context: Context,
}

impl FormulationArtifacts {
    pub(crate) fn new(model: MilpModel, index: BTreeMap<VarKey, VarId>, context: Context) -> Self {
        FormulationArtifacts {
            model,
            index,
            context,
        }
    }

    /// The model variable behind a semantic key.
    pub fn var(&self, key: &VarKey) -> Option<VarId> {
        self.index.get(key).copied()
    }

    /// All keys, ascending.
    pub fn keys(&self) -> impl Iterator<Item = &VarKey> {
        self.index.keys()
    }

    pub(crate) fn index_mut(&mut self) -> &mut BTreeMap<VarKey, VarId> {
        &mut self.index
    }

    /// Validates and solves the model with the given options.
    pub fn solve(&self, opts: &SolveOptions) -> Result<MilpSolution> {
        solve_milp(&self.model, opts)
    }

    /// Pins a line's frequency to an exact value (both bounds).
    pub fn fix_frequency(&mut self, line: LineId, f: u32) -> Result<()> {
        let var = self.var(&VarKey::Freq(line)).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "formulation has no frequency variable for line index {}",
                line.0
            ))
        })?;
        self.model.set_bounds(var, f as f64, f as f64);
        Ok(())
    }

    /// Reads the line frequencies out of a solved model.
    ///
    /// Only meaningful for [`crate::milp::SolveStatus::Optimal`] solutions;
    /// frequencies are snapped to the nearest integer (branch-and-bound
    /// already reports integer variables at integral values).
    pub fn decode_concept(&self, solution: &MilpSolution) -> Result<LineConcept> {
        if solution.status != crate::milp::SolveStatus::Optimal {
            return Err(Error::InvalidParameter(format!(
                "cannot decode a line concept from a {} solution",
                solution.status.as_str()
            )));
        }
        let mut concept = LineConcept::new();
        for (key, &var) in &self.index {
            if let VarKey::Freq(l) = key {
                let raw = solution.value(var);
                let f = raw.round();
                if (raw - f).abs() > 1e-4 || f < 0.0 {
                    return Err(Error::Numerical(format!(
                        "frequency variable for line index {} is not integral: {raw}",
                        l.0
                    )));
                }
                concept.set_frequency(*l, f as u32);
            }
            if let VarKey::Select(l) = key {
                // Selection-only models (direct travelers under a budget)
                // decode chosen lines as frequency 1.
                if self.var(&VarKey::Freq(*l)).is_none() && solution.value(var) > 0.5 {
                    concept.set_frequency(*l, 1);
                }
            }
        }
        Ok(concept)
    }

    /// Reconstructs the passenger routing of a solved flow model.
    ///
    /// Errors with [`Error::InvalidParameter`] when the formulation carries
    /// no flow variables (cost or direct-traveler models).
    pub fn decode_routing(
        &self,
        instance: &Instance,
        solution: &MilpSolution,
    ) -> Result<RoutingResult> {
        if solution.status != crate::milp::SolveStatus::Optimal {
            return Err(Error::InvalidParameter(format!(
                "cannot decode a routing from a {} solution",
                solution.status.as_str()
            )));
        }
        match &self.context {
            Context::Plain => Err(Error::InvalidParameter(
                "formulation has no flow variables to decode a routing from".into(),
            )),
            Context::FlowLink { pairs } => flow::decode_link_routing(self, instance, pairs, solution),
            Context::FlowLine { pairs, cgn } => {
                flow::decode_line_routing(self, instance, pairs, cgn, solution)
            }
        }
    }
}

/// Minimum vehicles per link: L_a = ceil(d_a / capacity).
///
/// `capacity` must be positive. A small slack (1e-9) guards against loads
/// that are integral up to floating-point noise being rounded up too far.
pub fn traffic_lower_bounds(
    loads: &BTreeMap<LinkId, f64>,
    capacity: u32,
) -> BTreeMap<LinkId, u32> {
    assert!(capacity > 0, "vehicle capacity must be positive");
    let mut out = BTreeMap::new();
    for (&a, &d) in loads {
        let needed = ((d - 1e-9) / capacity as f64).ceil().max(0.0) as u32;
        out.insert(a, needed);
    }
    out
}

/// Per-link bounds on the cumulative frequency of the lines covering it.
#[derive(Debug, Clone, Default)]
pub struct FrequencyBounds {
    lower: BTreeMap<LinkId, u32>,
    upper: BTreeMap<LinkId, u32>,
}

impl FrequencyBounds {
    pub fn new() -> Self {
        FrequencyBounds::default()
    }

    /// Bounds as recorded on the instance's links.
    pub fn from_instance(instance: &Instance) -> Self {
        let mut b = FrequencyBounds::new();
        for (a, link) in instance.links() {
            if link.lower_freq > 0 {
                b.lower.insert(a, link.lower_freq);
            }
            if let Some(u) = link.upper_freq {
                b.upper.insert(a, u);
            }
        }
        b
    }

    pub fn set_lower(&mut self, a: LinkId, v: u32) {
        if v == 0 {
            self.lower.remove(&a);
        } else {
            self.lower.insert(a, v);
        }
    }

    pub fn set_upper(&mut self, a: LinkId, v: Option<u32>) {
        match v {
            Some(u) => self.upper.insert(a, u),
            None => self.upper.remove(&a),
        };
    }

    /// Raises lower bounds to at least the given values (e.g. derived from
    /// traffic loads via [`traffic_lower_bounds`]).
    pub fn raise_lower(&mut self, minimums: &BTreeMap<LinkId, u32>) {
        for (&a, &v) in minimums {
            if v > 0 {
                let cur = self.lower.entry(a).or_insert(0);
                *cur = (*cur).max(v);
            }
        }
    }

    pub fn lower(&self, a: LinkId) -> u32 {
        self.lower.get(&a).copied().unwrap_or(0)
    }

    pub fn upper(&self, a: LinkId) -> Option<u32> {
        self.upper.get(&a).copied()
    }

    /// Links carrying a positive lower bound.
    pub fn bounded_below(&self) -> impl Iterator<Item = (LinkId, u32)> + '_ {
        self.lower.iter().map(|(&a, &v)| (a, v))
    }
}

/// A finite upper bound for one line's frequency variable.
///
/// Uses the largest finite per-link upper bound along the line (anything
/// higher is cut off by the cumulative-frequency constraints). Lines whose
/// links are all unbounded get a demand-based cap: enough trips to carry the
/// whole OD matrix alone, but at least the largest per-link lower bound.
pub(crate) fn line_frequency_cap(
    instance: &Instance,
    pool: &LinePool,
    line: LineId,
    bounds: &FrequencyBounds,
) -> u32 {
    let l = pool.line(line);
    let mut cap: Option<u32> = None;
    let mut floor = 1u32;
    for &a in l.links() {
        if let Some(u) = bounds.upper(a) {
            cap = Some(cap.map_or(u, |c| c.max(u)));
        }
        floor = floor.max(bounds.lower(a));
    }
    cap.unwrap_or_else(|| {
        let q = l.capacity().max(1) as f64;
        let service = ((instance.total_demand() - 1e-9) / q).ceil().max(0.0) as u32;
        floor.max(service).max(1)
    })
}

/// Re-checks the cumulative-frequency constraints with integer arithmetic.
pub fn check_frequency_bounds(
    instance: &Instance,
    pool: &LinePool,
    concept: &LineConcept,
    bounds: &FrequencyBounds,
) -> Result<()> {
    for (a, link) in instance.links() {
        let total: u64 = pool
            .through_link(a)
            .iter()
            .map(|&l| concept.frequency(l) as u64)
            .sum();
        let lo = bounds.lower(a) as u64;
        if total < lo {
            return Err(Error::Infeasible(format!(
                "link {} runs {total} trips, below its minimum {lo}",
                link.id
            )));
        }
        if let Some(hi) = bounds.upper(a) {
            if total > hi as u64 {
                return Err(Error::Infeasible(format!(
                    "link {} runs {total} trips, above its maximum {hi}",
                    link.id
                )));
            }
        }
    }
    Ok(())
}
