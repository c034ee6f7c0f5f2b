//! Link-level routing: shortest paths in the infrastructure network and the
//! traffic loads they induce.

use std::collections::BTreeMap;

use super::{ArcLoads, Level, PtnPath, Route, RoutePath, RoutingResult, TimeComponents};
use crate::graph::{lex_shortest, Digraph};
use crate::network::generate::station_ranks;
use crate::network::{Instance, LinkId, StationId};

/// Shortest paths for every OD pair with positive demand.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    /// One path per routable OD pair.
    pub paths: BTreeMap<(StationId, StationId), PtnPath>,
    /// Demand pairs with no connecting path.
    pub unreachable: Vec<(StationId, StationId)>,
}

/// Computes a shortest path for each OD pair of the instance.
///
/// Equal-length alternatives are broken deterministically (smallest station
/// id sequence), so repeated runs produce identical paths.
pub fn shortest_paths_ptn(instance: &Instance) -> ShortestPaths {
    od_paths_with(instance, &|a| Some(instance.link(a).length_time))
}

/// Shortest paths under a per-link weight override; `None` removes a link.
/// Used for link-failure analysis.
pub(crate) fn od_paths_with(
    instance: &Instance,
    link_weight: &dyn Fn(LinkId) -> Option<f64>,
) -> ShortestPaths {
    let (graph, rank) = weighted_digraph(instance, link_weight);
    let mut origins: Vec<StationId> = Vec::new();
    for (s, _, _) in instance.od_pairs() {
        if origins.last() != Some(&s) {
            origins.push(s);
        }
    }
    origins.dedup();

    let mut paths = BTreeMap::new();
    let mut unreachable = Vec::new();
    for origin in origins {
        let settled = lex_shortest(&graph, &[(origin.0, 0.0)], &rank, None);
        for (s, t, _) in instance.od_pairs() {
            if s != origin {
                continue;
            }
            match &settled[t.0] {
                Some(node_path) => {
                    paths.insert(
                        (s, t),
                        PtnPath {
                            stations: node_path.nodes.iter().map(|&n| StationId(n)).collect(),
                            links: node_path.arcs.iter().map(|&a| LinkId(a / 2)).collect(),
                            length: node_path.dist,
                        },
                    );
                }
                None => unreachable.push((s, t)),
            }
        }
    }
    ShortestPaths { paths, unreachable }
}

/// PTN digraph with two arcs per link (`2i` forward, `2i + 1` backward) and
/// per-link weights; `None` omits the link entirely.
fn weighted_digraph(
    instance: &Instance,
    link_weight: &dyn Fn(LinkId) -> Option<f64>,
) -> (Digraph, Vec<usize>) {
    let mut g = Digraph::new(instance.station_count());
    for (a, link) in instance.links() {
        // Arc ids must stay aligned to 2i/2i+1, so removed links keep their
        // slots as self-loops, which Dijkstra never uses.
        match link_weight(a) {
            Some(w) => {
                g.add_arc(link.from.0, link.to.0, w);
                g.add_arc(link.to.0, link.from.0, w);
            }
            None => {
                g.add_arc(link.from.0, link.from.0, 0.0);
                g.add_arc(link.to.0, link.to.0, 0.0);
            }
        }
    }
    (g, station_ranks(instance))
}

/// Sums OD demand onto the links of each pair's shortest path.
pub fn traffic_loads(instance: &Instance, paths: &ShortestPaths) -> BTreeMap<LinkId, f64> {
    let mut loads = BTreeMap::new();
    for ((s, t), path) in &paths.paths {
        let demand = instance.od_value(*s, *t);
        for &a in &path.links {
            *loads.entry(a).or_insert(0.0) += demand;
        }
    }
    loads
}

/// Routes all demand at link level: every pair follows its shortest path.
pub fn route_link_level(instance: &Instance) -> RoutingResult {
    let sp = shortest_paths_ptn(instance);
    let loads = traffic_loads(instance, &sp);
    let mut routes = BTreeMap::new();
    let mut driving = 0.0;
    for ((s, t), path) in &sp.paths {
        let demand = instance.od_value(*s, *t);
        driving += demand * path.length;
        routes.insert(
            (*s, *t),
            vec![Route {
                path: RoutePath::Link(path.clone()),
                passengers: demand,
            }],
        );
    }
    RoutingResult {
        level: Level::Link,
        routes,
        arc_loads: ArcLoads::Link(loads),
        time_components: TimeComponents {
            driving,
            ..TimeComponents::default()
        },
        unrouted: sp.unreachable,
    }
}

/// Longest shortest-path length between any two connected stations.
pub(crate) fn network_diameter(instance: &Instance) -> f64 {
    let (graph, rank) = weighted_digraph(instance, &|a| Some(instance.link(a).length_time));
    let mut diameter: f64 = 0.0;
    for s in instance.stations() {
        let settled = lex_shortest(&graph, &[(s.0, 0.0)], &rank, None);
        for path in settled.iter().flatten() {
            diameter = diameter.max(path.dist);
        }
    }
    diameter
}
