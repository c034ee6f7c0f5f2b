//! Core domain model: stations, links, OD demand, lines, line pools and
//! line concepts.
//!
//! An [`Instance`] is the immutable description of one planning problem:
//! the public transport network (an undirected graph of stations and
//! links), the origin-destination demand matrix and the planning period.
//! A [`LinePool`] is a set of candidate [`Line`]s on that network, and a
//! [`LineConcept`] assigns an integer frequency to each pool line.

mod io;
pub(crate) mod generate;

pub use generate::{generate_pool, PoolGenConfig};
pub use io::{
    load_concept, load_instance, load_od, load_pool, save_concept, save_instance, save_pool,
};

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

/// Index of a station within its [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StationId(pub usize);

/// Index of a link within its [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

/// Index of a line within its [`LinePool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineId(pub usize);

/// An undirected infrastructure edge between two stations.
///
/// Links are stored once; both traversal directions use the same record.
/// `lower_freq`/`upper_freq` bound the cumulative frequency of all lines
/// using the link within one planning period (`upper_freq = None` means
/// unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: String,
    pub from: StationId,
    pub to: StationId,
    /// Driving time across the link, in minutes (> 0).
    pub length_time: f64,
    pub lower_freq: u32,
    pub upper_freq: Option<u32>,
}

impl Link {
    /// The station on the other side of the link, if `s` is an endpoint.
    pub fn other_end(&self, s: StationId) -> Option<StationId> {
        if s == self.from {
            Some(self.to)
        } else if s == self.to {
            Some(self.from)
        } else {
            None
        }
    }
}

/// Global instance parameters not encoded in the network files.
#[derive(Debug, Clone, Copy)]
pub struct InstanceConfig {
    /// Planning period T in minutes.
    pub period: f64,
    /// Default vehicle capacity C (passengers per vehicle).
    pub default_capacity: u32,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            period: 60.0,
            default_capacity: 60,
        }
    }
}

/// One planning problem: network, demand and period. Immutable once built.
#[derive(Debug, Clone)]
pub struct Instance {
    stations: Vec<String>,
    links: Vec<Link>,
    /// Strictly positive demand per ordered station pair; absent pairs mean zero.
    od: BTreeMap<(StationId, StationId), f64>,
    period: f64,
    default_capacity: u32,
    /// Per station: (link, neighbour) pairs sorted by link index.
    adjacency: Vec<Vec<(LinkId, StationId)>>,
    station_index: HashMap<String, StationId>,
}

impl Instance {
    pub fn builder() -> InstanceBuilder {
        InstanceBuilder::default()
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn station_name(&self, s: StationId) -> &str {
        &self.stations[s.0]
    }

    pub fn station(&self, name: &str) -> Option<StationId> {
        self.station_index.get(name).copied()
    }

    pub fn stations(&self) -> impl Iterator<Item = StationId> {
        (0..self.stations.len()).map(StationId)
    }

    pub fn link(&self, a: LinkId) -> &Link {
        &self.links[a.0]
    }

    pub fn links(&self) -> impl Iterator<Item = (LinkId, &Link)> {
        self.links.iter().enumerate().map(|(i, l)| (LinkId(i), l))
    }

    pub fn link_by_id(&self, id: &str) -> Option<LinkId> {
        self.links
            .iter()
            .position(|l| l.id == id)
            .map(LinkId)
    }

    /// Demand matrix entries (all strictly positive).
    pub fn od_pairs(&self) -> impl Iterator<Item = (StationId, StationId, f64)> + '_ {
        self.od.iter().map(|(&(s, t), &v)| (s, t, v))
    }

    pub fn od_value(&self, s: StationId, t: StationId) -> f64 {
        self.od.get(&(s, t)).copied().unwrap_or(0.0)
    }

    pub fn od_pair_count(&self) -> usize {
        self.od.len()
    }

    pub fn total_demand(&self) -> f64 {
        self.od.values().sum()
    }

    /// Links incident to `s` as (link, neighbour) pairs, sorted by link index.
    pub fn adjacent(&self, s: StationId) -> &[(LinkId, StationId)] {
        &self.adjacency[s.0]
    }

    /// Planning period T in minutes.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Default vehicle capacity C.
    pub fn default_capacity(&self) -> u32 {
        self.default_capacity
    }

    /// Returns a copy with the OD matrix replaced (network unchanged).
    ///
    /// Pairs with non-positive demand are dropped; unknown stations and
    /// self-loops are rejected.
    pub fn with_od(&self, od: &BTreeMap<(StationId, StationId), f64>) -> Result<Instance> {
        let mut clean = BTreeMap::new();
        for (&(s, t), &v) in od {
            if s.0 >= self.stations.len() || t.0 >= self.stations.len() {
                return Err(Error::Validation(format!(
                    "OD pair references unknown station index ({}, {})",
                    s.0, t.0
                )));
            }
            if s == t {
                return Err(Error::Validation(format!(
                    "OD pair with identical origin and destination {}",
                    self.station_name(s)
                )));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "negative demand {} for pair ({}, {})",
                    v,
                    self.station_name(s),
                    self.station_name(t)
                )));
            }
            if v > 0.0 {
                clean.insert((s, t), v);
            }
        }
        let mut out = self.clone();
        out.od = clean;
        Ok(out)
    }
}

/// Incremental construction of an [`Instance`].
///
/// Stations can be declared explicitly or are registered on first use by a
/// link; order of first appearance is preserved.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    stations: Vec<String>,
    station_index: HashMap<String, StationId>,
    links: Vec<(String, StationId, StationId, f64, u32, Option<u32>)>,
    link_ids: HashSet<String>,
    od: Vec<(StationId, StationId, f64)>,
    config: Option<InstanceConfig>,
}

impl InstanceBuilder {
    pub fn station(&mut self, name: &str) -> StationId {
        if let Some(&s) = self.station_index.get(name) {
            return s;
        }
        let s = StationId(self.stations.len());
        self.stations.push(name.to_string());
        self.station_index.insert(name.to_string(), s);
        s
    }

    pub fn link(
        &mut self,
        id: &str,
        from: &str,
        to: &str,
        length_time: f64,
        lower_freq: u32,
        upper_freq: Option<u32>,
    ) -> Result<LinkId> {
        if !self.link_ids.insert(id.to_string()) {
            return Err(Error::Validation(format!("duplicate link id {id}")));
        }
        if from == to {
            return Err(Error::Validation(format!(
                "link {id} is a self-loop at {from}"
            )));
        }
        if !(length_time > 0.0) || !length_time.is_finite() {
            return Err(Error::Validation(format!(
                "link {id} has non-positive length_time {length_time}"
            )));
        }
        if let Some(u) = upper_freq {
            if lower_freq > u {
                return Err(Error::Validation(format!(
                    "link {id}: lower_freq {lower_freq} exceeds upper_freq {u}"
                )));
            }
        }
        let from = self.station(from);
        let to = self.station(to);
        self.links
            .push((id.to_string(), from, to, length_time, lower_freq, upper_freq));
        Ok(LinkId(self.links.len() - 1))
    }

    /// Adds a demand entry. Zero-demand entries are dropped, negative demand
    /// and self-loop pairs are rejected at `build`.
    pub fn od(&mut self, from: &str, to: &str, passengers: f64) -> &mut Self {
        let from = self.station(from);
        let to = self.station(to);
        self.od.push((from, to, passengers));
        self
    }

    pub fn config(&mut self, config: InstanceConfig) -> &mut Self {
        self.config = Some(config);
        self
    }

    pub fn period(&mut self, minutes: f64) -> &mut Self {
        let mut c = self.config.unwrap_or_default();
        c.period = minutes;
        self.config = Some(c);
        self
    }

    pub fn capacity(&mut self, c: u32) -> &mut Self {
        let mut cfg = self.config.unwrap_or_default();
        cfg.default_capacity = c;
        self.config = Some(cfg);
        self
    }

    pub fn build(self) -> Result<Instance> {
        let config = self.config.unwrap_or_default();
        if !(config.period > 0.0) || !config.period.is_finite() {
            return Err(Error::Validation(format!(
                "planning period must be positive, got {}",
                config.period
            )));
        }
        if config.default_capacity == 0 {
            return Err(Error::Validation(
                "default vehicle capacity must be positive".into(),
            ));
        }
        let links: Vec<Link> = self
            .links
            .into_iter()
            .map(|(id, from, to, length_time, lower_freq, upper_freq)| Link {
                id,
                from,
                to,
                length_time,
                lower_freq,
                upper_freq,
            })
            .collect();

        let mut od = BTreeMap::new();
        for (s, t, v) in self.od {
            if s == t {
                return Err(Error::Validation(format!(
                    "OD pair with identical origin and destination {}",
                    self.stations[s.0]
                )));
            }
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "invalid demand {} for pair ({}, {})",
                    v, self.stations[s.0], self.stations[t.0]
                )));
            }
            if v > 0.0 {
                *od.entry((s, t)).or_insert(0.0) += v;
            }
        }

        let mut adjacency = vec![Vec::new(); self.stations.len()];
        for (i, l) in links.iter().enumerate() {
            adjacency[l.from.0].push((LinkId(i), l.to));
            adjacency[l.to.0].push((LinkId(i), l.from));
        }

        Ok(Instance {
            stations: self.stations,
            links,
            od,
            period: config.period,
            default_capacity: config.default_capacity,
            adjacency,
            station_index: self.station_index,
        })
    }
}

/// A candidate line: a simple path of links in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    id: String,
    links: Vec<LinkId>,
    /// Station sequence along the path; `stations.len() == links.len() + 1`.
    stations: Vec<StationId>,
    cost_per_trip: f64,
    fixed_cost: f64,
    capacity: u32,
    round_trip_time: f64,
}

impl Line {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn stations(&self) -> &[StationId] {
        &self.stations
    }

    /// Operating cost per trip (c_l).
    pub fn cost_per_trip(&self) -> f64 {
        self.cost_per_trip
    }

    /// One-off cost when the line is selected at all.
    pub fn fixed_cost(&self) -> f64 {
        self.fixed_cost
    }

    /// Vehicle capacity on this line (Q_l).
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    /// Full round-trip duration in minutes (time_l), used for fleet estimates.
    pub fn round_trip_time(&self) -> f64 {
        self.round_trip_time
    }

    pub fn contains_link(&self, a: LinkId) -> bool {
        self.links.contains(&a)
    }

    pub fn contains_station(&self, s: StationId) -> bool {
        self.stations.contains(&s)
    }

    /// Position of `s` along the line's station sequence.
    pub fn station_position(&self, s: StationId) -> Option<usize> {
        self.stations.iter().position(|&x| x == s)
    }

    /// Driving time from the line's first terminal to each station.
    pub fn cumulative_times(&self, instance: &Instance) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.stations.len());
        let mut t = 0.0;
        cum.push(0.0);
        for &a in &self.links {
            t += instance.link(a).length_time;
            cum.push(t);
        }
        cum
    }

    /// Total one-way driving time along the line.
    pub fn driving_time(&self, instance: &Instance) -> f64 {
        self.links.iter().map(|&a| instance.link(a).length_time).sum()
    }
}

/// Unvalidated description of a line, as accepted by [`LinePool::build`].
#[derive(Debug, Clone)]
pub struct LineDef {
    pub id: String,
    /// Link ids in path order.
    pub links: Vec<String>,
    pub cost_per_trip: f64,
    /// Defaults to 0.
    pub fixed_cost: f64,
    /// Defaults to the instance's default vehicle capacity.
    pub capacity: Option<u32>,
    /// Defaults to twice the one-way driving time.
    pub round_trip_time: Option<f64>,
}

impl LineDef {
    pub fn new(id: &str, links: &[&str], cost_per_trip: f64) -> Self {
        LineDef {
            id: id.to_string(),
            links: links.iter().map(|s| s.to_string()).collect(),
            cost_per_trip,
            fixed_cost: 0.0,
            capacity: None,
            round_trip_time: None,
        }
    }

    pub fn fixed_cost(mut self, c: f64) -> Self {
        self.fixed_cost = c;
        self
    }

    pub fn capacity(mut self, q: u32) -> Self {
        self.capacity = Some(q);
        self
    }

    pub fn round_trip_time(mut self, t: f64) -> Self {
        self.round_trip_time = Some(t);
        self
    }
}

/// An immutable set of candidate lines with unique ids.
#[derive(Debug, Clone)]
pub struct LinePool {
    lines: Vec<Line>,
    by_id: HashMap<String, LineId>,
    /// Per link index: lines whose path uses the link, ascending.
    through_link: Vec<Vec<LineId>>,
    /// Per station index: lines whose path visits the station, ascending.
    at_station: Vec<Vec<LineId>>,
}

impl LinePool {
    /// Validates the given definitions against `instance` and builds the pool.
    pub fn build(instance: &Instance, defs: Vec<LineDef>) -> Result<LinePool> {
        let mut lines = Vec::with_capacity(defs.len());
        let mut by_id = HashMap::new();
        for def in defs {
            let line = validate_line(instance, &def)?;
            let lid = LineId(lines.len());
            if by_id.insert(line.id.clone(), lid).is_some() {
                return Err(Error::Validation(format!("duplicate line id {}", line.id)));
            }
            lines.push(line);
        }
        let mut through_link = vec![Vec::new(); instance.link_count()];
        let mut at_station = vec![Vec::new(); instance.station_count()];
        for (i, line) in lines.iter().enumerate() {
            for &a in &line.links {
                through_link[a.0].push(LineId(i));
            }
            for &s in &line.stations {
                at_station[s.0].push(LineId(i));
            }
        }
        Ok(LinePool {
            lines,
            by_id,
            through_link,
            at_station,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn line(&self, l: LineId) -> &Line {
        &self.lines[l.0]
    }

    pub fn lines(&self) -> impl Iterator<Item = (LineId, &Line)> {
        self.lines.iter().enumerate().map(|(i, l)| (LineId(i), l))
    }

    pub fn line_by_id(&self, id: &str) -> Option<LineId> {
        self.by_id.get(id).copied()
    }

    /// Lines whose path uses link `a`, in ascending line order.
    pub fn through_link(&self, a: LinkId) -> &[LineId] {
        &self.through_link[a.0]
    }

    /// Lines whose path visits station `s`, in ascending line order.
    pub fn at_station(&self, s: StationId) -> &[LineId] {
        &self.at_station[s.0]
    }

    /// The sub-pool containing only the lines selected by `concept`
    /// (frequency at least 1). Line ids are preserved.
    pub fn restrict_to(&self, instance: &Instance, concept: &LineConcept) -> Result<LinePool> {
        let defs: Vec<LineDef> = self
            .lines()
            .filter(|&(l, _)| concept.frequency(l) > 0)
            .map(|(_, line)| LineDef {
                id: line.id.clone(),
                links: line.links.iter().map(|&a| instance.link(a).id.clone()).collect(),
                cost_per_trip: line.cost_per_trip,
                fixed_cost: line.fixed_cost,
                capacity: Some(line.capacity),
                round_trip_time: Some(line.round_trip_time),
            })
            .collect();
        LinePool::build(instance, defs)
    }
}

fn validate_line(instance: &Instance, def: &LineDef) -> Result<Line> {
    if def.links.is_empty() {
        return Err(Error::Validation(format!("line {} has no links", def.id)));
    }
    let links: Vec<LinkId> = def
        .links
        .iter()
        .map(|id| {
            instance
                .link_by_id(id)
                .ok_or_else(|| Error::Validation(format!("line {}: unknown link {id}", def.id)))
        })
        .collect::<Result<_>>()?;

    // Orient the path: derive the station sequence and check connectivity.
    let stations = chain_links(instance, &links)
        .ok_or_else(|| Error::Validation(format!("line {}: links do not form a path", def.id)))?;
    let mut seen = HashSet::new();
    for &s in &stations {
        if !seen.insert(s) {
            return Err(Error::Validation(format!(
                "line {}: station {} repeats (path must be simple)",
                def.id,
                instance.station_name(s)
            )));
        }
    }
    if !(def.cost_per_trip >= 0.0) {
        return Err(Error::Validation(format!(
            "line {}: cost_per_trip must be nonnegative",
            def.id
        )));
    }
    if !(def.fixed_cost >= 0.0) {
        return Err(Error::Validation(format!(
            "line {}: fixed_cost must be nonnegative",
            def.id
        )));
    }
    let capacity = def.capacity.unwrap_or_else(|| instance.default_capacity());
    if capacity == 0 {
        return Err(Error::Validation(format!(
            "line {}: capacity must be positive",
            def.id
        )));
    }
    let one_way: f64 = links.iter().map(|&a| instance.link(a).length_time).sum();
    let round_trip_time = def.round_trip_time.unwrap_or(2.0 * one_way);
    if !(round_trip_time > 0.0) {
        return Err(Error::Validation(format!(
            "line {}: round_trip_time must be positive",
            def.id
        )));
    }
    Ok(Line {
        id: def.id.clone(),
        links,
        stations,
        cost_per_trip: def.cost_per_trip,
        fixed_cost: def.fixed_cost,
        capacity,
        round_trip_time,
    })
}

/// Station sequence induced by a list of links, or `None` if consecutive
/// links do not share an endpoint.
fn chain_links(instance: &Instance, links: &[LinkId]) -> Option<Vec<StationId>> {
    let first = instance.link(links[0]);
    let (mut stations, mut at) = if links.len() == 1 {
        (vec![first.from, first.to], first.to)
    } else {
        // Orientation of the first link is fixed by where the second attaches.
        let second = instance.link(links[1]);
        let start = if first.to == second.from || first.to == second.to {
            first.from
        } else if first.from == second.from || first.from == second.to {
            first.to
        } else {
            return None;
        };
        let next = first.other_end(start)?;
        (vec![start, next], next)
    };
    for &a in &links[1..] {
        let link = instance.link(a);
        let next = link.other_end(at)?;
        stations.push(next);
        at = next;
    }
    Some(stations)
}

/// Frequencies assigned to pool lines. Absent lines have frequency 0;
/// a line is selected iff its frequency is at least 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineConcept {
    freq: BTreeMap<LineId, u32>,
}

impl LineConcept {
    pub fn new() -> Self {
        LineConcept::default()
    }

    pub fn from_frequencies(pairs: impl IntoIterator<Item = (LineId, u32)>) -> Self {
        let mut c = LineConcept::new();
        for (l, f) in pairs {
            c.set_frequency(l, f);
        }
        c
    }

    pub fn set_frequency(&mut self, l: LineId, f: u32) {
        if f == 0 {
            self.freq.remove(&l);
        } else {
            self.freq.insert(l, f);
        }
    }

    pub fn frequency(&self, l: LineId) -> u32 {
        self.freq.get(&l).copied().unwrap_or(0)
    }

    pub fn is_selected(&self, l: LineId) -> bool {
        self.frequency(l) > 0
    }

    /// Selected lines with their frequencies, ascending by line index.
    pub fn selected(&self) -> impl Iterator<Item = (LineId, u32)> + '_ {
        self.freq.iter().map(|(&l, &f)| (l, f))
    }

    pub fn selected_count(&self) -> usize {
        self.freq.len()
    }

    /// Checks that every referenced line exists in `pool`.
    pub fn validate_against(&self, pool: &LinePool) -> Result<()> {
        for (&l, _) in &self.freq {
            if l.0 >= pool.len() {
                return Err(Error::PoolMismatch(format!(
                    "concept references line index {} but the pool has {} lines",
                    l.0,
                    pool.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Three stations in a row, two links, the worked three-line pool.
    pub(crate) fn fixture() -> (Instance, LinePool) {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 20.0, 2, Some(4)).unwrap();
        b.link("a2", "s2", "s3", 20.0, 2, Some(4)).unwrap();
        b.od("s1", "s3", 120.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(
            &instance,
            vec![
                LineDef::new("l1", &["a1"], 1.0),
                LineDef::new("l2", &["a2"], 1.0).capacity(30),
                LineDef::new("l3", &["a1", "a2"], 1.8),
            ],
        )
        .unwrap();
        (instance, pool)
    }

    #[test]
    fn builder_registers_stations_in_order_of_appearance() {
        let (instance, _) = fixture();
        let names: Vec<_> = instance.stations().map(|s| instance.station_name(s).to_string()).collect();
        assert_eq!(names, ["s1", "s2", "s3"]);
        assert_eq!(instance.link_count(), 2);
        assert_eq!(instance.total_demand(), 120.0);
    }

    #[test]
    fn duplicate_link_id_rejected() {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 1.0, 0, None).unwrap();
        assert!(b.link("a1", "s2", "s3", 1.0, 0, None).is_err());
    }

    #[test]
    fn self_loop_od_rejected() {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 1.0, 0, None).unwrap();
        b.od("s1", "s1", 5.0);
        assert!(b.build().is_err());
    }

    #[test]
    fn zero_demand_entries_are_omitted() {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 1.0, 0, None).unwrap();
        b.od("s1", "s2", 0.0);
        let instance = b.build().unwrap();
        assert_eq!(instance.od_pair_count(), 0);
    }

    #[test]
    fn bad_frequency_bounds_rejected() {
        let mut b = Instance::builder();
        assert!(b.link("a1", "s1", "s2", 1.0, 3, Some(2)).is_err());
    }

    #[test]
    fn line_path_must_be_connected_and_simple() {
        let mut b = Instance::builder();
        b.link("a1", "s1", "s2", 1.0, 0, None).unwrap();
        b.link("a2", "s2", "s3", 1.0, 0, None).unwrap();
        b.link("a3", "s3", "s1", 1.0, 0, None).unwrap();
        b.link("a4", "s3", "s4", 1.0, 0, None).unwrap();
        let instance = b.build().unwrap();

        // a1 then a4 do not share a station.
        assert!(LinePool::build(&instance, vec![LineDef::new("x", &["a1", "a4"], 1.0)]).is_err());
        // The full triangle revisits s1.
        assert!(
            LinePool::build(&instance, vec![LineDef::new("x", &["a1", "a2", "a3"], 1.0)]).is_err()
        );
        // A proper two-link path is fine and oriented s1-s2-s3.
        let pool =
            LinePool::build(&instance, vec![LineDef::new("x", &["a1", "a2"], 1.0)]).unwrap();
        let line = pool.line(LineId(0));
        let names: Vec<_> = line
            .stations()
            .iter()
            .map(|&s| instance.station_name(s))
            .collect();
        assert_eq!(names, ["s1", "s2", "s3"]);
    }

    #[test]
    fn line_defaults_follow_instance() {
        let (_, pool) = fixture();
        let l1 = pool.line(LineId(0));
        assert_eq!(l1.capacity(), 60); // instance default
        assert_eq!(l1.round_trip_time(), 40.0); // 2 * 20
        let l2 = pool.line(LineId(1));
        assert_eq!(l2.capacity(), 30); // explicit override
        let l3 = pool.line(LineId(2));
        assert_eq!(l3.round_trip_time(), 80.0);
    }

    #[test]
    fn pool_lookup_tables() {
        let (instance, pool) = fixture();
        let a1 = instance.link_by_id("a1").unwrap();
        assert_eq!(pool.through_link(a1), &[LineId(0), LineId(2)]);
        let s2 = instance.station("s2").unwrap();
        assert_eq!(pool.at_station(s2), &[LineId(0), LineId(1), LineId(2)]);
    }

    #[test]
    fn concept_roundtrip_and_selection() {
        let mut c = LineConcept::new();
        c.set_frequency(LineId(0), 2);
        c.set_frequency(LineId(1), 0);
        assert_eq!(c.frequency(LineId(0)), 2);
        assert_eq!(c.frequency(LineId(1)), 0);
        assert!(c.is_selected(LineId(0)));
        assert!(!c.is_selected(LineId(1)));
        assert_eq!(c.selected_count(), 1);
    }

    #[test]
    fn restrict_to_keeps_selected_lines_only() {
        let (instance, pool) = fixture();
        let concept =
            LineConcept::from_frequencies([(LineId(0), 1), (LineId(2), 2)]);
        let sub = pool.restrict_to(&instance, &concept).unwrap();
        assert_eq!(sub.len(), 2);
        assert!(sub.line_by_id("l1").is_some());
        assert!(sub.line_by_id("l2").is_none());
        assert!(sub.line_by_id("l3").is_some());
    }
}
