//! Shared fixtures for the integration tests: the worked three-station
//! corridor in code and on disk.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use lineplan::network::{Instance, LineConcept, LineDef, LineId, LinePool};

/// The corridor s1 - s2 - s3: two 20-minute links, frequency bounds [2, 4],
/// planning period 60 minutes, default vehicle capacity 60.
pub fn corridor_instance() -> Instance {
    let mut b = Instance::builder();
    b.link("a1", "s1", "s2", 20.0, 2, Some(4)).unwrap();
    b.link("a2", "s2", "s3", 20.0, 2, Some(4)).unwrap();
    b.od("s1", "s3", 120.0);
    b.build().unwrap()
}

/// Three candidate lines: one shuttle per link (l2 with 30-seat vehicles)
/// and a through line over both links.
pub fn corridor_pool(instance: &Instance) -> LinePool {
    LinePool::build(
        instance,
        vec![
            LineDef::new("l1", &["a1"], 1.0),
            LineDef::new("l2", &["a2"], 1.0).capacity(30),
            LineDef::new("l3", &["a1", "a2"], 1.8),
        ],
    )
    .unwrap()
}

/// The hand-analyzed concept: l1 once, l2 twice, l3 once.
pub fn corridor_concept() -> LineConcept {
    LineConcept::from_frequencies([(LineId(0), 1), (LineId(1), 2), (LineId(2), 1)])
}

/// File names of the corridor written as CSV into `dir`.
pub struct CorridorFiles {
    pub network: PathBuf,
    pub od: PathBuf,
    pub pool: PathBuf,
    pub concept: PathBuf,
}

/// Writes the corridor instance, pool, and worked concept into `dir`.
pub fn write_corridor_csvs(dir: &Path) -> CorridorFiles {
    let files = CorridorFiles {
        network: dir.join("network.csv"),
        od: dir.join("od.csv"),
        pool: dir.join("pool.csv"),
        concept: dir.join("concept.csv"),
    };
    fs::write(
        &files.network,
        "link_id,from,to,length_time,lower_freq,upper_freq\n\
         a1,s1,s2,20,2,4\n\
         a2,s2,s3,20,2,4\n",
    )
    .unwrap();
    fs::write(
        &files.od,
        "origin,destination,passengers\n\
         s1,s3,120\n",
    )
    .unwrap();
    fs::write(
        &files.pool,
        "line_id,link_ids,cost_per_trip,fixed_cost,capacity,round_trip_time\n\
         l1,a1,1,,,\n\
         l2,a2,1,,30,\n\
         l3,a1;a2,1.8,,,\n",
    )
    .unwrap();
    fs::write(&files.concept, "line_id,frequency\nl1,1\nl2,2\nl3,1\n").unwrap();
    files
}
