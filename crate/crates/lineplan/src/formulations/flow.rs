//! Flow-based line planning: frequencies and passenger routes are chosen
//! together, coupled by capacity constraints.
//!
//! At link level passengers move on the infrastructure network and each
//! link's pooled capacity (sum of frequency times vehicle capacity over its
//! lines) must cover its total flow. At line level passengers move on the
//! Change&Go network and every (link, line) flow must fit that single
//! line's capacity.

use std::collections::BTreeMap;

use super::{line_frequency_cap, Context, FormulationArtifacts, FrequencyBounds, VarKey};
use crate::error::{Error, Result};
use crate::graph::lex_shortest;
use crate::milp::{MilpModel, MilpSolution, Relation, Sense, VarId};
use crate::network::generate::ptn_digraph;
use crate::network::{Instance, LineId, LinePool, LinkId, StationId};
use crate::routing::{
    build_cgn, cgn_digraph, decompose_cgn_flows, shortest_paths_ptn, AdaptionModel, ArcLoads, Cgn,
    Level, OdFlows, PtnPath, Route, RoutePath, RoutingResult, TimeComponents, TransferModel,
};

/// Aggregation level of the flow model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowLevel {
    Link,
    Line,
}

/// Objective of the flow model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowObjective {
    /// Minimize operating cost Σ c_l f_l.
    Cost,
    /// Minimize total passenger travel time.
    TravelTime,
    /// Minimize cost + λ · travel time.
    Weighted(f64),
}

/// Configuration of [`build_flow_model`].
#[derive(Debug, Clone)]
pub struct FlowModelConfig {
    pub level: FlowLevel,
    pub objective: FlowObjective,
    /// Minutes charged per transfer (line level only). Fixed rather than
    /// frequency-based because frequencies are decision variables here.
    pub transfer_penalty: f64,
    /// Cumulative-frequency constraints per link (may be empty).
    pub bounds: FrequencyBounds,
    /// Per-line (lower, upper) frequency overrides; lines not listed get
    /// [0, default cap].
    pub line_bounds: BTreeMap<LineId, (u32, u32)>,
    /// Caps each pair's average route time at factor × its shortest
    /// possible travel time in the infrastructure network.
    pub max_detour_factor: Option<f64>,
}

impl FlowModelConfig {
    pub fn new(level: FlowLevel) -> Self {
        FlowModelConfig {
            level,
            objective: FlowObjective::TravelTime,
            transfer_penalty: 5.0,
            bounds: FrequencyBounds::new(),
            line_bounds: BTreeMap::new(),
            max_detour_factor: None,
        }
    }

    fn validate(&self, pool: &LinePool) -> Result<()> {
        if !self.transfer_penalty.is_finite() || self.transfer_penalty < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transfer penalty must be nonnegative, got {}",
                self.transfer_penalty
            )));
        }
        if let FlowObjective::Weighted(lambda) = self.objective {
            if !lambda.is_finite() || lambda < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "travel-time weight must be nonnegative, got {lambda}"
                )));
            }
        }
        if let Some(beta) = self.max_detour_factor {
            if !beta.is_finite() || beta < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "detour factor must be at least 1, got {beta}"
                )));
            }
        }
        for (&l, &(lo, hi)) in &self.line_bounds {
            if l.0 >= pool.len() {
                return Err(Error::PoolMismatch(format!(
                    "frequency override references line index {} outside the pool",
                    l.0
                )));
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "line index {} has frequency range [{lo}, {hi}]",
                    l.0
                )));
            }
        }
        Ok(())
    }
}

/// (cost weight, travel-time weight) of the objective.
fn objective_weights(objective: FlowObjective) -> (f64, f64) {
    match objective {
        FlowObjective::Cost => (1.0, 0.0),
        FlowObjective::TravelTime => (0.0, 1.0),
        FlowObjective::Weighted(lambda) => (1.0, lambda),
    }
}

/// Builds the combined frequency-setting and passenger-routing model.
///
/// Errors with [`Error::Validation`] when an OD pair cannot reach its
/// destination in the routing graph; capacity shortfalls are reported by
/// the solver as infeasible, not here.
pub fn build_flow_model(
    instance: &Instance,
    pool: &LinePool,
    config: &FlowModelConfig,
) -> Result<FormulationArtifacts> {
    if pool.is_empty() {
        return Err(Error::InvalidParameter(
            "flow models need a non-empty line pool".into(),
        ));
    }
    config.validate(pool)?;
    match config.level {
        FlowLevel::Link => build_link_level(instance, pool, config),
        FlowLevel::Line => build_line_level(instance, pool, config),
    }
}

/// Adds one frequency variable per line and returns their ids.
fn add_frequency_vars(
    model: &mut MilpModel,
    index: &mut BTreeMap<VarKey, VarId>,
    instance: &Instance,
    pool: &LinePool,
    config: &FlowModelConfig,
    cost_weight: f64,
) -> Vec<VarId> {
    let mut out = Vec::with_capacity(pool.len());
    for (l, line) in pool.lines() {
        let (lo, hi) = match config.line_bounds.get(&l) {
            Some(&(lo, hi)) => (lo, hi),
            None => (0, line_frequency_cap(instance, pool, l, &config.bounds)),
        };
        let var = model.add_var(format!("f_{}", line.id()), lo as f64, hi as f64, true);
        model.set_objective(var, cost_weight * line.cost_per_trip());
        index.insert(VarKey::Freq(l), var);
        out.push(var);
    }
    out
}

/// Adds the per-link cumulative frequency rows.
fn add_link_bound_rows(
    model: &mut MilpModel,
    instance: &Instance,
    pool: &LinePool,
    bounds: &FrequencyBounds,
    f_vars: &[VarId],
) {
    for (a, _) in instance.links() {
        let terms: Vec<_> = pool
            .through_link(a)
            .iter()
            .map(|&l| (f_vars[l.0], 1.0))
            .collect();
        let lo = bounds.lower(a);
        if lo > 0 {
            model.add_constraint(terms.clone(), Relation::Ge, lo as f64);
        }
        if let Some(hi) = bounds.upper(a) {
            model.add_constraint(terms, Relation::Le, hi as f64);
        }
    }
}

fn build_link_level(
    instance: &Instance,
    pool: &LinePool,
    config: &FlowModelConfig,
) -> Result<FormulationArtifacts> {
    let sp = shortest_paths_ptn(instance);
    if let Some(&(s, t)) = sp.unreachable.first() {
        return Err(Error::Validation(format!(
            "OD pair {} -> {} has no path in the network",
            instance.station_name(s),
            instance.station_name(t)
        )));
    }
    let pairs: Vec<(StationId, StationId, f64)> = instance.od_pairs().collect();
    let (cost_w, time_w) = objective_weights(config.objective);

    let mut model = MilpModel::new(Sense::Minimize);
    let mut index = BTreeMap::new();
    let f_vars = add_frequency_vars(&mut model, &mut index, instance, pool, config, cost_w);

    // Directed arcs 2i (forward) and 2i+1 (backward) per link.
    let n_arcs = 2 * instance.link_count();
    let arc_len = |a: usize| instance.link(LinkId(a / 2)).length_time;
    let arc_ends = |a: usize| {
        let link = instance.link(LinkId(a / 2));
        if a % 2 == 0 {
            (link.from.0, link.to.0)
        } else {
            (link.to.0, link.from.0)
        }
    };

    let mut flow_vars: Vec<Vec<VarId>> = Vec::with_capacity(pairs.len());
    for (o, &(s, t, _)) in pairs.iter().enumerate() {
        let xs: Vec<VarId> = (0..n_arcs)
            .map(|a| {
                let v = model.add_var(format!("x_{o}_{a}"), 0.0, f64::INFINITY, false);
                model.set_objective(v, time_w * arc_len(a));
                index.insert(VarKey::Flow { od: (s, t), arc: a }, v);
                v
            })
            .collect();
        flow_vars.push(xs);
    }

    // Flow conservation per pair and station.
    for (o, &(s, t, demand)) in pairs.iter().enumerate() {
        for v in 0..instance.station_count() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for a in 0..n_arcs {
                let (from, to) = arc_ends(a);
                if to == v {
                    terms.push((flow_vars[o][a], 1.0));
                }
                if from == v {
                    terms.push((flow_vars[o][a], -1.0));
                }
            }
            let rhs = if v == t.0 {
                demand
            } else if v == s.0 {
                -demand
            } else {
                0.0
            };
            model.add_constraint(terms, Relation::Eq, rhs);
        }
    }

    // Pooled capacity per link: Σ_{l ∋ a} Q_l f_l ≥ total flow on a.
    for (a, _) in instance.links() {
        let mut terms: Vec<(VarId, f64)> = pool
            .through_link(a)
            .iter()
            .map(|&l| (f_vars[l.0], pool.line(l).capacity() as f64))
            .collect();
        for xs in &flow_vars {
            terms.push((xs[2 * a.0], -1.0));
            terms.push((xs[2 * a.0 + 1], -1.0));
        }
        model.add_constraint(terms, Relation::Ge, 0.0);
    }

    add_link_bound_rows(&mut model, instance, pool, &config.bounds, &f_vars);

    if let Some(beta) = config.max_detour_factor {
        for (o, &(s, t, demand)) in pairs.iter().enumerate() {
            let terms: Vec<(VarId, f64)> = (0..n_arcs)
                .map(|a| (flow_vars[o][a], arc_len(a)))
                .collect();
            let budget = beta * sp.paths[&(s, t)].length * demand;
            model.add_constraint(terms, Relation::Le, budget);
        }
    }

    Ok(FormulationArtifacts::new(
        model,
        index,
        Context::FlowLink { pairs },
    ))
}

fn build_line_level(
    instance: &Instance,
    pool: &LinePool,
    config: &FlowModelConfig,
) -> Result<FormulationArtifacts> {
    let cgn = build_cgn(
        instance,
        pool,
        &TransferModel::Fixed(config.transfer_penalty),
        &AdaptionModel::None,
    )?;
    let pairs: Vec<(StationId, StationId, f64)> = instance.od_pairs().collect();

    // Reachability check in the Change&Go network.
    let graph = cgn_digraph(&cgn);
    for &(s, t, _) in &pairs {
        let sources: Vec<(usize, f64)> =
            cgn.nodes_at(s).into_iter().map(|v| (v, 0.0)).collect();
        let reachable = if sources.is_empty() {
            false
        } else {
            let settled = lex_shortest(&graph, &sources, cgn.ranks(), None);
            cgn.nodes_at(t).into_iter().any(|v| settled[v].is_some())
        };
        if !reachable {
            return Err(Error::Validation(format!(
                "OD pair {} -> {} cannot be routed over the line pool",
                instance.station_name(s),
                instance.station_name(t)
            )));
        }
    }

    let (cost_w, time_w) = objective_weights(config.objective);
    let mut model = MilpModel::new(Sense::Minimize);
    let mut index = BTreeMap::new();
    let f_vars = add_frequency_vars(&mut model, &mut index, instance, pool, config, cost_w);

    let n_arcs = cgn.arc_count();
    let mut arc_vars: Vec<Vec<VarId>> = Vec::with_capacity(pairs.len());
    let mut board_vars: Vec<Vec<(usize, VarId)>> = Vec::with_capacity(pairs.len());
    let mut alight_vars: Vec<Vec<(usize, VarId)>> = Vec::with_capacity(pairs.len());
    for (o, &(s, t, _)) in pairs.iter().enumerate() {
        let xs: Vec<VarId> = (0..n_arcs)
            .map(|a| {
                let v = model.add_var(format!("x_{o}_{a}"), 0.0, f64::INFINITY, false);
                model.set_objective(v, time_w * cgn.arc(a).label);
                index.insert(VarKey::Flow { od: (s, t), arc: a }, v);
                v
            })
            .collect();
        arc_vars.push(xs);
        board_vars.push(
            cgn.nodes_at(s)
                .into_iter()
                .map(|node| {
                    let v = model.add_var(format!("b_{o}_{node}"), 0.0, f64::INFINITY, false);
                    model.set_objective(v, time_w * cgn.boarding_label(node));
                    index.insert(VarKey::Board { od: (s, t), node }, v);
                    (node, v)
                })
                .collect(),
        );
        alight_vars.push(
            cgn.nodes_at(t)
                .into_iter()
                .map(|node| {
                    let v = model.add_var(format!("e_{o}_{node}"), 0.0, f64::INFINITY, false);
                    index.insert(VarKey::Alight { od: (s, t), node }, v);
                    (node, v)
                })
                .collect(),
        );
    }

    // Incoming arcs per node, computed once.
    let mut in_arcs: Vec<Vec<usize>> = vec![Vec::new(); cgn.node_count()];
    for (a, arc) in cgn.arcs().iter().enumerate() {
        in_arcs[arc.to].push(a);
    }

    for (o, &(_, _, demand)) in pairs.iter().enumerate() {
        let total: Vec<(VarId, f64)> = board_vars[o].iter().map(|&(_, b)| (b, 1.0)).collect();
        model.add_constraint(total, Relation::Eq, demand);
        for v in 0..cgn.node_count() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for &a in &in_arcs[v] {
                terms.push((arc_vars[o][a], 1.0));
            }
            for &a in cgn.out_arcs(v) {
                terms.push((arc_vars[o][a], -1.0));
            }
            if let Some(&(_, b)) = board_vars[o].iter().find(|&&(node, _)| node == v) {
                terms.push((b, 1.0));
            }
            if let Some(&(_, e)) = alight_vars[o].iter().find(|&&(node, _)| node == v) {
                terms.push((e, -1.0));
            }
            if !terms.is_empty() {
                model.add_constraint(terms, Relation::Eq, 0.0);
            }
        }
    }

    // Per-line capacity: Q_l f_l ≥ flow on each of the line's links.
    for (l, line) in pool.lines() {
        let q = line.capacity() as f64;
        for &link in line.links() {
            let mut terms: Vec<(VarId, f64)> = vec![(f_vars[l.0], q)];
            for (a, arc) in cgn.arcs().iter().enumerate() {
                if let crate::routing::CgnArcKind::Drive { link: al, line: ll } = &arc.kind {
                    if *al == link && *ll == l {
                        for xs in &arc_vars {
                            terms.push((xs[a], -1.0));
                        }
                    }
                }
            }
            model.add_constraint(terms, Relation::Ge, 0.0);
        }
    }

    add_link_bound_rows(&mut model, instance, pool, &config.bounds, &f_vars);

    if let Some(beta) = config.max_detour_factor {
        let sp = shortest_paths_ptn(instance);
        for (o, &(s, t, demand)) in pairs.iter().enumerate() {
            let mut terms: Vec<(VarId, f64)> = (0..n_arcs)
                .map(|a| (arc_vars[o][a], cgn.arc(a).label))
                .collect();
            for &(node, b) in &board_vars[o] {
                terms.push((b, cgn.boarding_label(node)));
            }
            let shortest = sp
                .paths
                .get(&(s, t))
                .map(|p| p.length)
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "OD pair {} -> {} has no path in the network",
                        instance.station_name(s),
                        instance.station_name(t)
                    ))
                })?;
            model.add_constraint(terms, Relation::Le, beta * shortest * demand);
        }
    }

    Ok(FormulationArtifacts::new(
        model,
        index,
        Context::FlowLine { pairs, cgn },
    ))
}

/// Reconstructs link-level routes from a solved flow model.
pub(super) fn decode_link_routing(
    art: &FormulationArtifacts,
    instance: &Instance,
    pairs: &[(StationId, StationId, f64)],
    solution: &MilpSolution,
) -> Result<RoutingResult> {
    let n_arcs = 2 * instance.link_count();
    let arc_len = |a: usize| instance.link(LinkId(a / 2)).length_time;
    let (graph, _) = ptn_digraph(instance);

    // Outgoing arcs per station, ascending arc index.
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); instance.station_count()];
    for a in 0..n_arcs {
        let (from, _, _) = graph.arc(a);
        out[from].push(a);
    }

    let mut routes = BTreeMap::new();
    let mut loads: BTreeMap<LinkId, f64> = BTreeMap::new();
    let mut time = TimeComponents::default();
    for &(s, t, demand) in pairs {
        let mut x: Vec<f64> = (0..n_arcs)
            .map(|a| {
                let var = art.var(&VarKey::Flow { od: (s, t), arc: a }).expect(
                    "flow formulation must index every arc variable",
                );
                solution.value(var)
            })
            .collect();
        let tol = 1e-7 * demand.max(1.0);
        let mut sink_res = demand;
        let mut od_routes = Vec::new();
        let step_cap = 4 * (instance.station_count() + n_arcs.max(1));

        while sink_res > tol {
            let mut v = s.0;
            let mut walk = Vec::new();
            let mut flow = sink_res;
            let mut steps = 0;
            loop {
                steps += 1;
                if steps > step_cap {
                    return Err(Error::Numerical(
                        "flow decomposition did not terminate (cyclic flow)".into(),
                    ));
                }
                if v == t.0 {
                    break;
                }
                let next = out[v].iter().copied().find(|&a| x[a] > tol).ok_or_else(|| {
                    Error::Numerical("flow decomposition stranded (conservation violated)".into())
                })?;
                flow = flow.min(x[next]);
                walk.push(next);
                v = arc_head(&graph, next);
            }
            sink_res -= flow;
            let mut stations = vec![s];
            let mut links = Vec::new();
            let mut length = 0.0;
            for &a in &walk {
                stations.push(StationId(arc_head(&graph, a)));
                links.push(LinkId(a / 2));
                length += arc_len(a);
                *loads.entry(LinkId(a / 2)).or_insert(0.0) += flow;
                x[a] -= flow;
            }
            time.driving += length * flow;
            od_routes.push(Route {
                path: RoutePath::Link(PtnPath {
                    stations,
                    links,
                    length,
                }),
                passengers: flow,
            });
        }
        routes.insert((s, t), od_routes);
    }

    Ok(RoutingResult {
        level: Level::Link,
        routes,
        arc_loads: ArcLoads::Link(loads),
        time_components: time,
        unrouted: Vec::new(),
    })
}

fn arc_head(graph: &crate::graph::Digraph, arc: usize) -> usize {
    graph.arc(arc).1
}

/// Reconstructs line-level routes from a solved flow model.
pub(super) fn decode_line_routing(
    art: &FormulationArtifacts,
    instance: &Instance,
    pairs: &[(StationId, StationId, f64)],
    cgn: &Cgn,
    solution: &MilpSolution,
) -> Result<RoutingResult> {
    let flows: Vec<OdFlows> = pairs
        .iter()
        .map(|&(s, t, _)| OdFlows {
            x: (0..cgn.arc_count())
                .map(|a| {
                    solution.value(
                        art.var(&VarKey::Flow { od: (s, t), arc: a })
                            .expect("flow formulation must index every arc variable"),
                    )
                })
                .collect(),
            board: cgn
                .nodes_at(s)
                .into_iter()
                .map(|node| {
                    (
                        node,
                        solution.value(
                            art.var(&VarKey::Board { od: (s, t), node })
                                .expect("flow formulation must index every boarding variable"),
                        ),
                    )
                })
                .collect(),
            alight: cgn
                .nodes_at(t)
                .into_iter()
                .map(|node| {
                    (
                        node,
                        solution.value(
                            art.var(&VarKey::Alight { od: (s, t), node })
                                .expect("flow formulation must index every alighting variable"),
                        ),
                    )
                })
                .collect(),
        })
        .collect();
    let (routes, loads, time) = decompose_cgn_flows(instance, cgn, pairs, flows)?;
    Ok(RoutingResult {
        level: Level::Line,
        routes,
        arc_loads: ArcLoads::Line(loads),
        time_components: time,
        unrouted: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{SolveOptions, SolveStatus};
    use crate::network::tests::fixture;
    use crate::network::LineDef;

    fn fixture_line_config() -> FlowModelConfig {
        let mut config = FlowModelConfig::new(FlowLevel::Line);
        config.line_bounds.insert(LineId(0), (0, 1));
        config.line_bounds.insert(LineId(1), (0, 2));
        config.line_bounds.insert(LineId(2), (0, 1));
        config
    }

    #[test]
    fn line_level_splits_flow_when_capacity_binds() {
        let (instance, pool) = fixture();
        let art = build_flow_model(&instance, &pool, &fixture_line_config()).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // 60 passengers ride direct (40 min), 60 transfer (45 min).
        assert!((sol.objective_value - (60.0 * 40.0 + 60.0 * 45.0)).abs() < 1e-6);

        let concept = art.decode_concept(&sol).unwrap();
        assert_eq!(concept.frequency(LineId(0)), 1);
        assert_eq!(concept.frequency(LineId(1)), 2);
        assert_eq!(concept.frequency(LineId(2)), 1);

        let routing = art.decode_routing(&instance, &sol).unwrap();
        let s1 = instance.station("s1").unwrap();
        let s3 = instance.station("s3").unwrap();
        assert_eq!(routing.routes[&(s1, s3)].len(), 2);
        let loads = routing.loads_per_line_link().unwrap();
        let a1 = instance.link_by_id("a1").unwrap();
        let a2 = instance.link_by_id("a2").unwrap();
        assert!((loads[&(a1, LineId(2))] - 60.0).abs() < 1e-9);
        assert!((loads[&(a1, LineId(0))] - 60.0).abs() < 1e-9);
        assert!((loads[&(a2, LineId(1))] - 60.0).abs() < 1e-9);
    }

    #[test]
    fn line_level_solution_is_link_level_feasible() {
        let (instance, pool) = fixture();
        let art = build_flow_model(&instance, &pool, &fixture_line_config()).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        let concept = art.decode_concept(&sol).unwrap();
        let routing = art.decode_routing(&instance, &sol).unwrap();
        // Aggregated to links, pooled capacities must cover the loads.
        for (a, load) in routing.loads_per_link() {
            let cap: f64 = pool
                .through_link(a)
                .iter()
                .map(|&l| concept.frequency(l) as f64 * pool.line(l).capacity() as f64)
                .sum();
            assert!(
                cap + 1e-9 >= load,
                "link {:?}: capacity {cap} below load {load}",
                a
            );
        }
    }

    #[test]
    fn switching_off_the_feeders_makes_line_level_infeasible() {
        let (instance, pool) = fixture();
        let mut config = fixture_line_config();
        config.line_bounds.insert(LineId(0), (0, 0));
        config.line_bounds.insert(LineId(1), (0, 0));
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn link_level_pools_capacity_across_lines() {
        let (instance, pool) = fixture();
        let mut config = fixture_line_config();
        config.level = FlowLevel::Link;
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // Nothing forces a transfer at link level: everyone rides the
        // shortest path at 40 minutes.
        assert!((sol.objective_value - 120.0 * 40.0).abs() < 1e-6);
        let routing = art.decode_routing(&instance, &sol).unwrap();
        let loads = routing.loads_per_link();
        let a1 = instance.link_by_id("a1").unwrap();
        let a2 = instance.link_by_id("a2").unwrap();
        assert!((loads[&a1] - 120.0).abs() < 1e-9);
        assert!((loads[&a2] - 120.0).abs() < 1e-9);
    }

    #[test]
    fn travel_time_objective_reproduces_shortest_paths_without_capacity_pressure() {
        // Triangle with a slow two-hop side and a fast direct side.
        let mut b = Instance::builder();
        b.link("uv", "u", "v", 10.0, 0, None).unwrap();
        b.link("vw", "v", "w", 10.0, 0, None).unwrap();
        b.link("uw", "u", "w", 15.0, 0, None).unwrap();
        b.od("u", "w", 10.0);
        b.od("u", "v", 4.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(
            &instance,
            vec![
                LineDef::new("bent", &["uv", "vw"], 1.0),
                LineDef::new("direct", &["uw"], 1.0),
            ],
        )
        .unwrap();
        let mut config = FlowModelConfig::new(FlowLevel::Link);
        config.objective = FlowObjective::TravelTime;
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let reference = crate::routing::route_link_level(&instance);
        assert!((sol.objective_value - reference.time_components.driving).abs() < 1e-6);
    }

    #[test]
    fn weighted_objective_trades_cost_for_time() {
        let (instance, pool) = fixture();
        let mut config = FlowModelConfig::new(FlowLevel::Line);
        config.objective = FlowObjective::Weighted(0.01);
        config.line_bounds.insert(LineId(0), (0, 1));
        config.line_bounds.insert(LineId(1), (0, 2));
        config.line_bounds.insert(LineId(2), (0, 2));
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // Running the through line twice (cost 3.6) carries everyone
        // directly: 3.6 + 0.01 * 4800 beats any mix involving transfers.
        let concept = art.decode_concept(&sol).unwrap();
        assert_eq!(concept.frequency(LineId(2)), 2);
        assert_eq!(concept.frequency(LineId(0)), 0);
        assert_eq!(concept.frequency(LineId(1)), 0);
        assert!((sol.objective_value - (3.6 + 0.01 * 4800.0)).abs() < 1e-6);
    }

    #[test]
    fn detour_bound_can_force_infeasibility() {
        let (instance, pool) = fixture();
        let mut config = fixture_line_config();
        // Nobody may travel longer than the 40-minute shortest time, so the
        // transfer route (45 min) is banned and the through line (60 seats)
        // cannot carry 120 alone.
        config.max_detour_factor = Some(1.0);
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);

        let mut relaxed = fixture_line_config();
        relaxed.max_detour_factor = Some(1.2);
        let art = build_flow_model(&instance, &pool, &relaxed).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
    }

    #[test]
    fn disconnected_pair_is_rejected_at_build_time() {
        let mut b = Instance::builder();
        b.link("a", "u", "v", 5.0, 0, None).unwrap();
        b.link("b", "w", "z", 5.0, 0, None).unwrap();
        b.od("u", "z", 3.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(&instance, vec![LineDef::new("l", &["a"], 1.0)]).unwrap();
        for level in [FlowLevel::Link, FlowLevel::Line] {
            let config = FlowModelConfig::new(level);
            let err = build_flow_model(&instance, &pool, &config).unwrap_err();
            assert!(matches!(err, Error::Validation(_)), "{level:?}: {err:?}");
        }
    }

    #[test]
    fn line_level_respects_cumulative_frequency_bounds() {
        let (instance, pool) = fixture();
        let mut config = fixture_line_config();
        config.bounds = FrequencyBounds::from_instance(&instance);
        let art = build_flow_model(&instance, &pool, &config).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let concept = art.decode_concept(&sol).unwrap();
        crate::formulations::check_frequency_bounds(&instance, &pool, &concept, &config.bounds)
            .unwrap();
    }

    #[test]
    fn decoding_a_routing_from_a_cost_model_fails() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = crate::formulations::build_cost_model(&instance, &pool, &bounds);
        let sol = art.solve(&SolveOptions::default()).unwrap();
        let err = art.decode_routing(&instance, &sol).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
