//! Line-level routing through the Change&Go network.
//!
//! Two modes: ignore capacities (every pair takes its fastest route) or
//! enforce them (a multicommodity flow LP splits passengers so that no
//! (link, line) pair exceeds frequency times vehicle capacity, minimizing
//! total travel time).

use std::collections::BTreeMap;

use super::cgn::{Cgn, CgnArcKind};
use super::{ArcLoads, Leg, Level, Route, RoutePath, RoutingResult, TimeComponents};
use crate::error::{Error, Result};
use crate::graph::{lex_shortest, Digraph, NodePath};
use crate::milp::{solve_lp_relaxation, MilpModel, Relation, Sense, SolveOptions, VarId};
use crate::network::{Instance, LineConcept, LineId, LinePool, StationId};

/// Whether line-level routing respects vehicle capacities.
#[derive(Debug, Clone, Copy)]
pub enum CapacityMode<'a> {
    /// Every OD pair follows its fastest Change&Go route.
    Ignore,
    /// Flows are split so each (link, line) load stays within frequency
    /// times capacity of the given concept. Solves a multicommodity flow
    /// LP sized (OD pairs) x (network); intended for planning-sized
    /// instances, not city-scale ones.
    Enforce(&'a LineConcept),
}

/// Routes all demand through the Change&Go network.
///
/// Returns one or more routes per OD pair (capacity enforcement may split
/// a pair over several routes). Pairs with no connecting route are listed
/// in `unrouted`; under [`CapacityMode::Enforce`] insufficient capacity is
/// an [`Error::Infeasible`] instead.
pub fn route_line_level(
    instance: &Instance,
    pool: &LinePool,
    cgn: &Cgn,
    capacities: CapacityMode<'_>,
) -> Result<RoutingResult> {
    match capacities {
        CapacityMode::Ignore => route_uncapacitated(instance, cgn),
        CapacityMode::Enforce(concept) => route_capacitated(instance, pool, cgn, concept),
    }
}

pub(crate) fn cgn_digraph(cgn: &Cgn) -> Digraph {
    let mut g = Digraph::new(cgn.node_count());
    for arc in cgn.arcs() {
        g.add_arc(arc.from, arc.to, arc.label);
    }
    g
}

/// Deterministic comparison of equal-purpose candidate paths: cheapest
/// first, then smallest node-rank sequence, then smallest arc indices.
fn better(a: &NodePath, b: &NodePath, rank: &[usize]) -> std::cmp::Ordering {
    a.dist.total_cmp(&b.dist).then_with(|| {
        let ra: Vec<usize> = a.nodes.iter().map(|&v| rank[v]).collect();
        let rb: Vec<usize> = b.nodes.iter().map(|&v| rank[v]).collect();
        ra.cmp(&rb).then_with(|| a.arcs.cmp(&b.arcs))
    })
}

fn route_uncapacitated(instance: &Instance, cgn: &Cgn) -> Result<RoutingResult> {
    let graph = cgn_digraph(cgn);
    let rank = cgn.ranks();
    let mut routes = BTreeMap::new();
    let mut loads = BTreeMap::new();
    let mut time = TimeComponents::default();
    let mut unrouted = Vec::new();

    for (s, t, demand) in instance.od_pairs() {
        let sources: Vec<(usize, f64)> = cgn
            .nodes_at(s)
            .into_iter()
            .map(|v| (v, cgn.boarding_label(v)))
            .collect();
        if sources.is_empty() {
            unrouted.push((s, t));
            continue;
        }
        let settled = lex_shortest(&graph, &sources, rank, None);
        let best = cgn
            .nodes_at(t)
            .into_iter()
            .filter_map(|v| settled[v].as_ref())
            .min_by(|a, b| better(a, b, rank));
        let Some(path) = best else {
            unrouted.push((s, t));
            continue;
        };

        let start = path.nodes[0];
        let (legs, per_pax) = legs_from_arcs(cgn, start, &path.arcs);
        time.driving += per_pax.driving * demand;
        time.transfer += per_pax.transfer * demand;
        time.adaption += cgn.boarding_label(start) * demand;
        for leg in &legs {
            for &a in &leg.links {
                *loads.entry((a, leg.line)).or_insert(0.0) += demand;
            }
        }
        routes.insert(
            (s, t),
            vec![Route {
                path: RoutePath::Line { legs },
                passengers: demand,
            }],
        );
    }

    Ok(RoutingResult {
        level: Level::Line,
        routes,
        arc_loads: ArcLoads::Line(loads),
        time_components: time,
        unrouted,
    })
}

/// Per-passenger time cost of a route, split by activity.
struct PerPassenger {
    driving: f64,
    transfer: f64,
}

/// Converts a Change&Go arc walk starting at `start` into line legs.
/// Returns the legs plus per-passenger driving and transfer minutes.
fn legs_from_arcs(cgn: &Cgn, start: usize, arcs: &[usize]) -> (Vec<Leg>, PerPassenger) {
    let mut legs = Vec::new();
    let mut per = PerPassenger {
        driving: 0.0,
        transfer: 0.0,
    };
    let mut line = cgn.node(start).line;
    let mut from = cgn.node(start).station;
    let mut cursor = from;
    let mut links = Vec::new();
    let close = |legs: &mut Vec<Leg>, line: LineId, from: StationId, to: StationId, links: &mut Vec<_>| {
        if !links.is_empty() {
            legs.push(Leg {
                line,
                from,
                to,
                links: std::mem::take(links),
            });
        } else {
            links.clear();
        }
    };
    for &aid in arcs {
        let arc = cgn.arc(aid);
        match &arc.kind {
            CgnArcKind::Drive { link, line: l } => {
                debug_assert_eq!(*l, line);
                links.push(*link);
                cursor = cgn.node(arc.to).station;
                per.driving += arc.label;
            }
            CgnArcKind::Transfer {
                station, to_line, ..
            } => {
                close(&mut legs, line, from, *station, &mut links);
                per.transfer += arc.label;
                line = *to_line;
                from = *station;
                cursor = *station;
            }
        }
    }
    close(&mut legs, line, from, cursor, &mut links);
    (legs, per)
}

fn route_capacitated(
    instance: &Instance,
    pool: &LinePool,
    cgn: &Cgn,
    concept: &LineConcept,
) -> Result<RoutingResult> {
    concept.validate_against(pool)?;
    let pairs: Vec<(StationId, StationId, f64)> = instance.od_pairs().collect();
    let n_arcs = cgn.arc_count();

    // Variable layout per OD pair: all arc flows, then boarding flows at the
    // origin's nodes, then alighting flows at the destination's nodes.
    let mut model = MilpModel::new(Sense::Minimize);
    let mut arc_vars: Vec<Vec<VarId>> = Vec::with_capacity(pairs.len());
    let mut board_vars: Vec<Vec<(usize, VarId)>> = Vec::with_capacity(pairs.len());
    let mut alight_vars: Vec<Vec<(usize, VarId)>> = Vec::with_capacity(pairs.len());
    for (o, (s, t, _)) in pairs.iter().enumerate() {
        let xs: Vec<VarId> = (0..n_arcs)
            .map(|a| {
                let v = model.add_var(format!("x_{o}_{a}"), 0.0, f64::INFINITY, false);
                model.set_objective(v, cgn.arc(a).label);
                v
            })
            .collect();
        arc_vars.push(xs);
        let bs: Vec<(usize, VarId)> = cgn
            .nodes_at(*s)
            .into_iter()
            .map(|v| {
                let b = model.add_var(format!("b_{o}_{v}"), 0.0, f64::INFINITY, false);
                model.set_objective(b, cgn.boarding_label(v));
                (v, b)
            })
            .collect();
        board_vars.push(bs);
        let es: Vec<(usize, VarId)> = cgn
            .nodes_at(*t)
            .into_iter()
            .map(|v| {
                let e = model.add_var(format!("e_{o}_{v}"), 0.0, f64::INFINITY, false);
                (v, e)
            })
            .collect();
        alight_vars.push(es);
    }

    // Demand satisfaction and flow conservation per OD pair.
    for (o, (s, t, demand)) in pairs.iter().enumerate() {
        if board_vars[o].is_empty() || alight_vars[o].is_empty() {
            return Err(Error::Infeasible(format!(
                "no line serves {} or {}",
                instance.station_name(*s),
                instance.station_name(*t)
            )));
        }
        let total: Vec<(VarId, f64)> = board_vars[o].iter().map(|&(_, b)| (b, 1.0)).collect();
        model.add_constraint(total, Relation::Eq, *demand);
        for v in 0..cgn.node_count() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for (a, arc) in cgn.arcs().iter().enumerate() {
                if arc.to == v {
                    terms.push((arc_vars[o][a], 1.0));
                }
                if arc.from == v {
                    terms.push((arc_vars[o][a], -1.0));
                }
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

    // Shared capacity per (line, link): both directions pool into f * Q.
    for (l, line) in pool.lines() {
        let f = concept.frequency(l);
        let cap = f as f64 * line.capacity() as f64;
        for &link in line.links() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for (a, arc) in cgn.arcs().iter().enumerate() {
                if let CgnArcKind::Drive { link: al, line: ll } = &arc.kind {
                    if *al == link && *ll == l {
                        for xs in &arc_vars {
                            terms.push((xs[a], 1.0));
                        }
                    }
                }
            }
            if !terms.is_empty() {
                model.add_constraint(terms, Relation::Le, cap);
            }
        }
    }

    let solution = solve_lp_relaxation(&model, &SolveOptions::default())?;
    match solution.status {
        crate::milp::SolveStatus::Optimal => {}
        crate::milp::SolveStatus::Infeasible => {
            return Err(Error::Infeasible(
                "line capacities cannot carry the demand at line level".into(),
            ));
        }
        crate::milp::SolveStatus::Unbounded => {
            return Err(Error::Numerical(
                "capacitated routing LP reported unbounded".into(),
            ));
        }
    }

    let flows: Vec<OdFlows> = (0..pairs.len())
        .map(|o| OdFlows {
            x: arc_vars[o].iter().map(|&v| solution.value(v)).collect(),
            board: board_vars[o]
                .iter()
                .map(|&(node, v)| (node, solution.value(v)))
                .collect(),
            alight: alight_vars[o]
                .iter()
                .map(|&(node, v)| (node, solution.value(v)))
                .collect(),
        })
        .collect();
    let (routes, loads, time) = decompose_cgn_flows(instance, cgn, &pairs, flows)?;
    Ok(RoutingResult {
        level: Level::Line,
        routes,
        arc_loads: ArcLoads::Line(loads),
        time_components: time,
        unrouted: Vec::new(),
    })
}

/// One OD pair's raw flow values on a Change&Go network.
pub(crate) struct OdFlows {
    /// Flow per Change&Go arc.
    pub x: Vec<f64>,
    /// (node, flow) entering the network at the pair's origin.
    pub board: Vec<(usize, f64)>,
    /// (node, flow) leaving the network at the pair's destination.
    pub alight: Vec<(usize, f64)>,
}

/// Strips raw per-pair flows into concrete routes, (link, line) loads, and
/// time components. The stripping is deterministic: start from the
/// smallest boarding node with remaining flow, prefer alighting when
/// possible, otherwise follow the smallest-index arc carrying flow.
pub(crate) fn decompose_cgn_flows(
    instance: &Instance,
    cgn: &Cgn,
    pairs: &[(StationId, StationId, f64)],
    flows: Vec<OdFlows>,
) -> Result<(
    BTreeMap<(StationId, StationId), Vec<Route>>,
    BTreeMap<(crate::network::LinkId, LineId), f64>,
    TimeComponents,
)> {
    let mut routes = BTreeMap::new();
    let mut loads = BTreeMap::new();
    let mut time = TimeComponents::default();
    for ((s, t, demand), od_flows) in pairs.iter().zip(flows) {
        let OdFlows {
            mut x,
            mut board,
            alight,
        } = od_flows;
        let mut e: BTreeMap<usize, f64> = alight.into_iter().collect();
        let tol = 1e-7 * demand.max(1.0);
        let mut od_routes = Vec::new();
        let step_cap = 4 * (cgn.node_count() + cgn.arc_count().max(1));

        loop {
            let Some(&mut (start, ref mut b_res)) =
                board.iter_mut().find(|(_, res)| *res > tol)
            else {
                break;
            };
            // Walk from the boarding node, preferring to alight when
            // possible, otherwise taking the smallest-index flow arc.
            let mut walk: Vec<usize> = Vec::new();
            let mut v = start;
            let mut flow = *b_res;
            let mut steps = 0;
            loop {
                steps += 1;
                if steps > step_cap {
                    return Err(Error::Numerical(
                        "flow decomposition did not terminate (cyclic flow)".into(),
                    ));
                }
                if let Some(&res) = e.get(&v) {
                    if res > tol {
                        flow = flow.min(res);
                        break;
                    }
                }
                let next = cgn
                    .out_arcs(v)
                    .iter()
                    .copied()
                    .find(|&a| x[a] > tol)
                    .ok_or_else(|| {
                        Error::Numerical(
                            "flow decomposition stranded (conservation violated)".into(),
                        )
                    })?;
                flow = flow.min(x[next]);
                walk.push(next);
                v = cgn.arc(next).to;
            }

            *b_res -= flow;
            *e.get_mut(&v).unwrap() -= flow;
            for &a in &walk {
                x[a] -= flow;
            }

            let (legs, per) = legs_from_arcs(cgn, start, &walk);
            time.driving += per.driving * flow;
            time.transfer += per.transfer * flow;
            time.adaption += cgn.boarding_label(start) * flow;
            for leg in &legs {
                for &a in &leg.links {
                    *loads.entry((a, leg.line)).or_insert(0.0) += flow;
                }
            }
            od_routes.push(Route {
                path: RoutePath::Line { legs },
                passengers: flow,
            });
        }
        debug_assert!(
            (od_routes.iter().map(|r| r.passengers).sum::<f64>() - demand).abs()
                <= 1e-5 * demand.max(1.0),
            "decomposed flow does not match demand for {}->{}",
            instance.station_name(*s),
            instance.station_name(*t)
        );
        routes.insert((*s, *t), od_routes);
    }
    Ok((routes, loads, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::fixture;
    use crate::routing::{build_cgn, AdaptionModel, TransferModel};

    fn fixture_cgn() -> (Instance, LinePool, Cgn) {
        let (instance, pool) = fixture();
        let cgn = build_cgn(
            &instance,
            &pool,
            &TransferModel::Fixed(5.0),
            &AdaptionModel::None,
        )
        .unwrap();
        (instance, pool, cgn)
    }

    #[test]
    fn uncapacitated_takes_the_direct_line() {
        let (instance, _, cgn) = fixture_cgn();
        let result = route_line_level(&instance, &fixture().1, &cgn, CapacityMode::Ignore).unwrap();
        let s1 = instance.station("s1").unwrap();
        let s3 = instance.station("s3").unwrap();
        let routes = &result.routes[&(s1, s3)];
        assert_eq!(routes.len(), 1);
        assert_eq!(routes[0].passengers, 120.0);
        let RoutePath::Line { legs } = &routes[0].path else {
            panic!("expected line-level path");
        };
        // The through line l3 avoids the 5-minute transfer.
        assert_eq!(legs.len(), 1);
        assert_eq!(legs[0].line, LineId(2));
        assert_eq!(result.time_components.driving, 120.0 * 40.0);
        assert_eq!(result.time_components.transfer, 0.0);
        let loads = result.loads_per_line_link().unwrap();
        let a1 = instance.link_by_id("a1").unwrap();
        assert_eq!(loads[&(a1, LineId(2))], 120.0);
    }

    #[test]
    fn capacity_splits_demand_between_direct_and_transfer() {
        let (instance, pool, cgn) = fixture_cgn();
        // 60 seats on the through line, 60 on each feeder: the 120
        // passengers must split 60 direct / 60 with a transfer.
        let concept = LineConcept::from_frequencies([(LineId(0), 1), (LineId(1), 2), (LineId(2), 1)]);
        let result =
            route_line_level(&instance, &pool, &cgn, CapacityMode::Enforce(&concept)).unwrap();
        let s1 = instance.station("s1").unwrap();
        let s3 = instance.station("s3").unwrap();
        let routes = &result.routes[&(s1, s3)];
        assert_eq!(routes.len(), 2, "demand must split over two routes");

        let a1 = instance.link_by_id("a1").unwrap();
        let a2 = instance.link_by_id("a2").unwrap();
        let loads = result.loads_per_line_link().unwrap();
        assert!((loads[&(a1, LineId(2))] - 60.0).abs() < 1e-9);
        assert!((loads[&(a2, LineId(2))] - 60.0).abs() < 1e-9);
        assert!((loads[&(a1, LineId(0))] - 60.0).abs() < 1e-9);
        assert!((loads[&(a2, LineId(1))] - 60.0).abs() < 1e-9);

        // Every used (link, line) runs exactly at capacity.
        for (&(a, l), &load) in &loads {
            let cap = concept.frequency(l) as f64 * pool.line(l).capacity() as f64;
            assert!(load <= cap + 1e-9, "load {load} over cap {cap} on {a:?} {l:?}");
            assert!((cap - load).abs() < 1e-9, "expected tight load on {a:?} {l:?}");
        }

        // 60 passengers ride 40 min; 60 ride 40 min + 5 transfer.
        assert!((result.time_components.driving - 120.0 * 40.0).abs() < 1e-9);
        assert!((result.time_components.transfer - 60.0 * 5.0).abs() < 1e-9);
        assert_eq!(result.time_components.adaption, 0.0);
    }

    #[test]
    fn insufficient_capacity_is_infeasible() {
        let (instance, pool, cgn) = fixture_cgn();
        // Only the through line at frequency 1: 60 seats for 120 passengers.
        let concept = LineConcept::from_frequencies([(LineId(2), 1)]);
        let err = route_line_level(&instance, &pool, &cgn, CapacityMode::Enforce(&concept))
            .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "got {err:?}");
    }

    #[test]
    fn unserved_station_is_unrouted_when_ignoring_capacity() {
        // A demand pair whose origin has no line.
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 10.0, 0, None).unwrap();
        b.link("a2", "s2", "s3", 10.0, 0, None).unwrap();
        b.od("s1", "s3", 7.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(
            &instance,
            vec![crate::network::LineDef::new("l2", &["a2"], 1.0)],
        )
        .unwrap();
        let cgn = build_cgn(
            &instance,
            &pool,
            &TransferModel::Fixed(5.0),
            &AdaptionModel::None,
        )
        .unwrap();
        let result = route_line_level(&instance, &pool, &cgn, CapacityMode::Ignore).unwrap();
        assert_eq!(result.unrouted.len(), 1);
        assert!(result.routes.is_empty());
    }
}
