//! Link-failure scan: how badly does losing (or slowing down) each single
//! link hurt the passengers?

use crate::error::{Error, Result};
use crate::network::{Instance, LinkId};
use crate::routing::{network_diameter, od_paths_with, shortest_paths_ptn};

/// Travel-time increases below this are treated as unchanged.
const DETOUR_TOL: f64 = 1e-9;

/// What happens to a failed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailurePolicy {
    /// The link disappears; passengers re-route or go unserved.
    Reroute,
    /// A replacement service keeps the link usable, slowed down by the given
    /// factor (>= 1).
    Bridge(f64),
}

/// Scan parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureScanConfig {
    pub policy: FailurePolicy,
    /// Minutes charged per unserved passenger when aggregating a link's
    /// impact. Defaults to three times the network diameter.
    pub unserved_penalty: Option<f64>,
}

impl FailureScanConfig {
    pub fn new(policy: FailurePolicy) -> Self {
        FailureScanConfig {
            policy,
            unserved_penalty: None,
        }
    }
}

/// Impact of failing one specific link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkFailureRecord {
    pub link: LinkId,
    /// Passengers left without any path.
    pub unserved: f64,
    /// Passengers whose shortest path became strictly longer.
    pub detoured: f64,
    /// Extra passenger-minutes of the detoured passengers.
    pub added_minutes: f64,
    /// `added_minutes + penalty * unserved`: the link's robustness impact.
    pub impact: f64,
}

/// Full scan over all links, reduced in link-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureScan {
    /// One record per link, ascending by link id.
    pub records: Vec<LinkFailureRecord>,
    /// The unserved-passenger penalty that was applied (minutes).
    pub penalty: f64,
    /// Largest per-link impact; the default robustness index.
    pub worst_impact: f64,
    /// The first link attaining `worst_impact`.
    pub worst_link: Option<LinkId>,
    /// Mean per-link impact, for planners who prefer an average view.
    pub mean_impact: f64,
}

/// Fails every link in turn and measures the passenger impact.
///
/// Passengers follow planner-assigned shortest paths in the infrastructure
/// network, so the scan is independent of any particular line concept: it
/// rates the network itself. OD pairs that are unreachable even without a
/// failure are excluded. Ties for the worst link break towards the smaller
/// link id.
pub fn link_failure_scan(instance: &Instance, config: &FailureScanConfig) -> Result<FailureScan> {
    if let FailurePolicy::Bridge(factor) = config.policy {
        if !(factor.is_finite() && factor >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "bridge slowdown factor must be >= 1, got {factor}"
            )));
        }
    }
    let penalty = match config.unserved_penalty {
        Some(p) => {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "unserved-passenger penalty must be non-negative, got {p}"
                )));
            }
            p
        }
        None => 3.0 * network_diameter(instance),
    };

    let baseline = shortest_paths_ptn(instance);
    let mut records = Vec::new();
    for (failed, link) in instance.links() {
        let length = link.length_time;
        let weight = |a: LinkId| -> Option<f64> {
            if a == failed {
                match config.policy {
                    FailurePolicy::Reroute => None,
                    FailurePolicy::Bridge(factor) => Some(length * factor),
                }
            } else {
                Some(instance.link(a).length_time)
            }
        };
        let degraded = od_paths_with(instance, &weight);

        let mut unserved = 0.0;
        let mut detoured = 0.0;
        let mut added_minutes = 0.0;
        for ((s, t), before) in &baseline.paths {
            let demand = instance.od_value(*s, *t);
            match degraded.paths.get(&(*s, *t)) {
                None => unserved += demand,
                Some(after) => {
                    let delta = after.length - before.length;
                    if delta > DETOUR_TOL {
                        detoured += demand;
                        added_minutes += demand * delta;
                    }
                }
            }
        }
        records.push(LinkFailureRecord {
            link: failed,
            unserved,
            detoured,
            added_minutes,
            impact: added_minutes + penalty * unserved,
        });
    }

    let mut worst_impact = 0.0;
    let mut worst_link = None;
    for r in &records {
        if worst_link.is_none() || r.impact > worst_impact {
            worst_impact = r.impact;
            worst_link = Some(r.link);
        }
    }
    let mean_impact = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.impact).sum::<f64>() / records.len() as f64
    };
    Ok(FailureScan {
        records,
        penalty,
        worst_impact,
        worst_link,
        mean_impact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::fixture;

    /// Four stations on a cycle so that every link has an alternative route.
    fn cycle_instance() -> Instance {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 10.0, 0, None).unwrap();
        b.link("a2", "s2", "s3", 10.0, 0, None).unwrap();
        b.link("a3", "s3", "s4", 10.0, 0, None).unwrap();
        b.link("a4", "s4", "s1", 10.0, 0, None).unwrap();
        b.od("s1", "s2", 40.0);
        b.od("s2", "s3", 25.0);
        b.build().unwrap()
    }

    #[test]
    fn removing_a_bridge_link_strands_its_passengers() {
        let (instance, _) = fixture();
        let scan =
            link_failure_scan(&instance, &FailureScanConfig::new(FailurePolicy::Reroute)).unwrap();
        // Path network: either link cut disconnects s1 from s3.
        assert_eq!(scan.records.len(), 2);
        for r in &scan.records {
            assert_eq!(r.unserved, 120.0);
            assert_eq!(r.detoured, 0.0);
            assert_eq!(r.added_minutes, 0.0);
        }
        // Default penalty: three times the 40-minute diameter.
        assert_eq!(scan.penalty, 120.0);
        assert_eq!(scan.worst_impact, 120.0 * 120.0);
        assert_eq!(scan.worst_link, Some(instance.link_by_id("a1").unwrap()));
        assert_eq!(scan.mean_impact, scan.worst_impact);
    }

    #[test]
    fn cycle_detours_everyone_but_strands_nobody() {
        let instance = cycle_instance();
        let scan =
            link_failure_scan(&instance, &FailureScanConfig::new(FailurePolicy::Reroute)).unwrap();
        let a1 = instance.link_by_id("a1").unwrap();
        let a3 = instance.link_by_id("a3").unwrap();
        for r in &scan.records {
            assert_eq!(r.unserved, 0.0, "link {:?}", r.link);
        }
        // Failing a1 sends the s1-s2 passengers the long way round (+20 min);
        // the s2-s3 pair is unaffected.
        let r1 = &scan.records[a1.0];
        assert_eq!(r1.detoured, 40.0);
        assert_eq!(r1.added_minutes, 40.0 * 20.0);
        // a3 is on nobody's shortest path: zero impact under reroute.
        let r3 = &scan.records[a3.0];
        assert_eq!(r3.detoured, 0.0);
        assert_eq!(r3.added_minutes, 0.0);
        assert_eq!(r3.impact, 0.0);
        assert_eq!(scan.worst_link, Some(a1));
        assert_eq!(scan.worst_impact, 800.0);
    }

    #[test]
    fn bridging_doubles_travel_time_instead_of_stranding() {
        let (instance, _) = fixture();
        let scan = link_failure_scan(
            &instance,
            &FailureScanConfig::new(FailurePolicy::Bridge(2.0)),
        )
        .unwrap();
        for r in &scan.records {
            assert_eq!(r.unserved, 0.0);
            assert_eq!(r.detoured, 120.0);
            // 120 passengers each lose (2 - 1) * 20 minutes.
            assert_eq!(r.added_minutes, 120.0 * 20.0);
            assert_eq!(r.impact, 2400.0);
        }
        assert_eq!(scan.worst_impact, 2400.0);
        assert_eq!(scan.mean_impact, 2400.0);
    }

    #[test]
    fn explicit_penalty_overrides_the_default() {
        let (instance, _) = fixture();
        let config = FailureScanConfig {
            policy: FailurePolicy::Reroute,
            unserved_penalty: Some(1.0),
        };
        let scan = link_failure_scan(&instance, &config).unwrap();
        assert_eq!(scan.penalty, 1.0);
        assert_eq!(scan.worst_impact, 120.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let (instance, _) = fixture();
        let err = link_failure_scan(
            &instance,
            &FailureScanConfig::new(FailurePolicy::Bridge(0.5)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
        let config = FailureScanConfig {
            policy: FailurePolicy::Reroute,
            unserved_penalty: Some(-3.0),
        };
        let err = link_failure_scan(&instance, &config).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
