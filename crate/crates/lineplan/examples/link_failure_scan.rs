//! Which link hurts most when it fails?
//!
//! The failure scan removes each infrastructure link in turn, reroutes (or
//! bridges) the affected passengers, and scores the damage in passenger-
//! minutes. A path network and a ring built over the same stations show how
//! much redundancy a single extra link buys.
//!
//! Run with: cargo run --example link_failure_scan

use lineplan::evaluate::{link_failure_scan, FailurePolicy, FailureScanConfig};
use lineplan::network::Instance;

fn demand(b: &mut lineplan::network::InstanceBuilder) {
    b.od("n1", "n2", 30.0)
        .od("n2", "n3", 30.0)
        .od("n3", "n4", 30.0)
        .od("n1", "n4", 20.0);
}

fn main() -> lineplan::Result<()> {
    // A path n1 - n2 - n3 - n4: every link is a bridge in the graph sense.
    let mut b = Instance::builder();
    b.link("e12", "n1", "n2", 10.0, 0, None)?;
    b.link("e23", "n2", "n3", 10.0, 0, None)?;
    b.link("e34", "n3", "n4", 10.0, 0, None)?;
    demand(&mut b);
    let path_net = b.build()?;

    // The same stations closed into a ring by one extra link n4 - n1.
    let mut b = Instance::builder();
    b.link("e12", "n1", "n2", 10.0, 0, None)?;
    b.link("e23", "n2", "n3", 10.0, 0, None)?;
    b.link("e34", "n3", "n4", 10.0, 0, None)?;
    b.link("e41", "n4", "n1", 10.0, 0, None)?;
    demand(&mut b);
    let ring_net = b.build()?;

    let reroute = FailureScanConfig::new(FailurePolicy::Reroute);
    for (name, net) in [("path", &path_net), ("ring", &ring_net)] {
        let scan = link_failure_scan(net, &reroute)?;
        println!("--- {name} network, links simply removed ---");
        println!("(unserved passengers charged {:.0} minutes each)", scan.penalty);
        for r in &scan.records {
            println!(
                "  fail {}: {:>3.0} unserved, {:>3.0} detoured (+{:>4.0} min), impact {:>6.0}",
                net.link(r.link).id,
                r.unserved,
                r.detoured,
                r.added_minutes,
                r.impact
            );
        }
        let worst = scan.worst_link.map(|a| net.link(a).id.clone());
        println!(
            "  worst link: {} (impact {:.0}), mean impact {:.0}\n",
            worst.as_deref().unwrap_or("none"),
            scan.worst_impact,
            scan.mean_impact
        );
    }

    // On the path, a failed link strands everyone who crosses it; the ring
    // always offers a way around, so nobody is unserved.
    let path_scan = link_failure_scan(&path_net, &reroute)?;
    let ring_scan = link_failure_scan(&ring_net, &reroute)?;
    assert!(path_scan.records.iter().all(|r| r.unserved > 0.0));
    assert!(ring_scan.records.iter().all(|r| r.unserved == 0.0));

    // A bridge policy keeps the link usable at twice the travel time:
    // useful to model a rail replacement bus.
    let bridged = FailureScanConfig::new(FailurePolicy::Bridge(2.0));
    let scan = link_failure_scan(&path_net, &bridged)?;
    println!("--- path network, failures bridged at 2x travel time ---");
    for r in &scan.records {
        println!(
            "  fail {}: {:.0} unserved, {:.0} detoured, impact {:.0}",
            path_net.link(r.link).id,
            r.unserved,
            r.detoured,
            r.impact
        );
    }
    assert!(scan.records.iter().all(|r| r.unserved == 0.0));
    println!("a replacement service turns stranded passengers into delayed ones.");
    Ok(())
}
