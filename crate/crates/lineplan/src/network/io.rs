//! CSV readers and writers for networks, demand matrices, line pools and
//! line concepts.
//!
//! All files carry a header row and use `.` as the decimal separator.
//! Formats:
//!
//! * network:  `link_id,from,to,length_time,lower_freq,upper_freq`
//!   (empty `upper_freq` means unbounded)
//! * OD:       `origin,destination,passengers`
//! * pool:     `line_id,link_ids,cost_per_trip,fixed_cost,capacity,round_trip_time`
//!   (`link_ids` is `;`-separated; the last three columns are optional)
//! * concept:  `line_id,frequency`

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{
    Instance, InstanceBuilder, InstanceConfig, LineConcept, LineDef, LinePool, StationId,
};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a CSV file into (header, rows) with 1-based line numbers.
fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<(usize, Vec<String>)>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut rows = Vec::new();
    let mut header = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, i + 1, e.to_string()))?;
        let fields: Vec<String> = record.iter().map(|f| f.to_string()).collect();
        if i == 0 {
            header = fields;
        } else if !fields.iter().all(|f| f.is_empty()) {
            rows.push((i + 1, fields));
        }
    }
    if header.is_empty() {
        return Err(parse_err(path, 1, "missing header row"));
    }
    Ok((header, rows))
}

fn expect_header(path: &Path, header: &[String], want: &[&str]) -> Result<()> {
    if header.len() < want.len() || header[..want.len()].iter().zip(want).any(|(h, w)| h != w) {
        return Err(parse_err(
            path,
            1,
            format!("expected header starting with `{}`", want.join(",")),
        ));
    }
    Ok(())
}

/// A header whose first `required` columns are fixed and whose tail must be a
/// prefix of `optional`.
fn expect_header_optional(
    path: &Path,
    header: &[String],
    required: &[&str],
    optional: &[&str],
) -> Result<()> {
    expect_header(path, header, required)?;
    let tail = &header[required.len()..];
    if tail.len() > optional.len() || tail.iter().zip(optional).any(|(h, w)| h != w) {
        return Err(parse_err(
            path,
            1,
            format!(
                "header tail must be a prefix of `{}`",
                optional.join(",")
            ),
        ));
    }
    Ok(())
}

fn parse_f64(path: &Path, line: usize, field: &str, what: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what} `{field}`")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite {what} `{field}`")));
    }
    Ok(v)
}

fn parse_u32(path: &Path, line: usize, field: &str, what: &str) -> Result<u32> {
    field
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what} `{field}`")))
}

/// Loads a network file and an OD file into an [`Instance`].
///
/// Stations are registered in order of first appearance in the network file.
pub fn load_instance(
    network_path: &Path,
    od_path: &Path,
    config: InstanceConfig,
) -> Result<Instance> {
    let (header, rows) = read_rows(network_path)?;
    expect_header(
        network_path,
        &header,
        &["link_id", "from", "to", "length_time", "lower_freq", "upper_freq"],
    )?;
    let mut builder = InstanceBuilder::default();
    builder.config(config);
    for (line_no, fields) in rows {
        if fields.len() < 5 {
            return Err(parse_err(network_path, line_no, "expected at least 5 fields"));
        }
        let length = parse_f64(network_path, line_no, &fields[3], "length_time")?;
        let lower = parse_u32(network_path, line_no, &fields[4], "lower_freq")?;
        let upper = match fields.get(5).map(String::as_str) {
            None | Some("") => None,
            Some(s) => Some(parse_u32(network_path, line_no, s, "upper_freq")?),
        };
        builder
            .link(&fields[0], &fields[1], &fields[2], length, lower, upper)
            .map_err(|e| parse_err(network_path, line_no, e.to_string()))?;
    }

    let (od_header, od_rows) = read_rows(od_path)?;
    expect_header(od_path, &od_header, &["origin", "destination", "passengers"])?;
    for (line_no, fields) in od_rows {
        if fields.len() < 3 {
            return Err(parse_err(od_path, line_no, "expected 3 fields"));
        }
        let passengers = parse_f64(od_path, line_no, &fields[2], "passengers")?;
        builder.od(&fields[0], &fields[1], passengers);
    }
    builder.build()
}

/// Loads an OD file against an existing instance's stations.
///
/// Used for scenario and season demand matrices that share one network.
pub fn load_od(path: &Path, instance: &Instance) -> Result<BTreeMap<(StationId, StationId), f64>> {
    let (header, rows) = read_rows(path)?;
    expect_header(path, &header, &["origin", "destination", "passengers"])?;
    let mut od = BTreeMap::new();
    for (line_no, fields) in rows {
        if fields.len() < 3 {
            return Err(parse_err(path, line_no, "expected 3 fields"));
        }
        let s = instance
            .station(&fields[0])
            .ok_or_else(|| parse_err(path, line_no, format!("unknown station `{}`", fields[0])))?;
        let t = instance
            .station(&fields[1])
            .ok_or_else(|| parse_err(path, line_no, format!("unknown station `{}`", fields[1])))?;
        if s == t {
            return Err(parse_err(path, line_no, "origin equals destination"));
        }
        let passengers = parse_f64(path, line_no, &fields[2], "passengers")?;
        if passengers < 0.0 {
            return Err(parse_err(path, line_no, "negative passengers"));
        }
        if passengers > 0.0 {
            *od.entry((s, t)).or_insert(0.0) += passengers;
        }
    }
    Ok(od)
}

/// Loads a line pool file against an instance.
pub fn load_pool(path: &Path, instance: &Instance) -> Result<LinePool> {
    let (header, rows) = read_rows(path)?;
    expect_header_optional(
        path,
        &header,
        &["line_id", "link_ids", "cost_per_trip"],
        &["fixed_cost", "capacity", "round_trip_time"],
    )?;
    let mut defs = Vec::new();
    for (line_no, fields) in rows {
        if fields.len() < 3 {
            return Err(parse_err(path, line_no, "expected at least 3 fields"));
        }
        let links: Vec<String> = fields[1]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| s.to_string())
            .collect();
        let mut def = LineDef {
            id: fields[0].clone(),
            links,
            cost_per_trip: parse_f64(path, line_no, &fields[2], "cost_per_trip")?,
            fixed_cost: 0.0,
            capacity: None,
            round_trip_time: None,
        };
        if let Some(s) = fields.get(3).filter(|s| !s.is_empty()) {
            def.fixed_cost = parse_f64(path, line_no, s, "fixed_cost")?;
        }
        if let Some(s) = fields.get(4).filter(|s| !s.is_empty()) {
            def.capacity = Some(parse_u32(path, line_no, s, "capacity")?);
        }
        if let Some(s) = fields.get(5).filter(|s| !s.is_empty()) {
            def.round_trip_time = Some(parse_f64(path, line_no, s, "round_trip_time")?);
        }
        defs.push(def);
    }
    LinePool::build(instance, defs).map_err(|e| match e {
        Error::Validation(m) => parse_err(path, 0, m),
        other => other,
    })
}

/// Loads a line concept (frequencies) against a pool.
pub fn load_concept(path: &Path, pool: &LinePool) -> Result<LineConcept> {
    let (header, rows) = read_rows(path)?;
    expect_header(path, &header, &["line_id", "frequency"])?;
    let mut concept = LineConcept::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, fields) in rows {
        if fields.len() < 2 {
            return Err(parse_err(path, line_no, "expected 2 fields"));
        }
        let line = pool.line_by_id(&fields[0]).ok_or_else(|| {
            Error::PoolMismatch(format!(
                "{}:{line_no}: line `{}` is not in the pool",
                path.display(),
                fields[0]
            ))
        })?;
        if !seen.insert(line) {
            return Err(parse_err(path, line_no, format!("duplicate line `{}`", fields[0])));
        }
        let f = parse_u32(path, line_no, &fields[1], "frequency")?;
        concept.set_frequency(line, f);
    }
    Ok(concept)
}

/// Formats a float in shortest form that parses back to the same value.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes the network and OD files for `instance`.
pub fn save_instance(instance: &Instance, network_path: &Path, od_path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(network_path)?);
    writeln!(w, "link_id,from,to,length_time,lower_freq,upper_freq")?;
    for (_, link) in instance.links() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            link.id,
            instance.station_name(link.from),
            instance.station_name(link.to),
            fmt_f64(link.length_time),
            link.lower_freq,
            link.upper_freq.map(|u| u.to_string()).unwrap_or_default()
        )?;
    }
    w.flush()?;

    let mut w = std::io::BufWriter::new(std::fs::File::create(od_path)?);
    writeln!(w, "origin,destination,passengers")?;
    for (s, t, v) in instance.od_pairs() {
        writeln!(
            w,
            "{},{},{}",
            instance.station_name(s),
            instance.station_name(t),
            fmt_f64(v)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a pool file with all six columns.
pub fn save_pool(pool: &LinePool, instance: &Instance, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "line_id,link_ids,cost_per_trip,fixed_cost,capacity,round_trip_time")?;
    for (_, line) in pool.lines() {
        let links: Vec<&str> = line
            .links()
            .iter()
            .map(|&a| instance.link(a).id.as_str())
            .collect();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            line.id(),
            links.join(";"),
            fmt_f64(line.cost_per_trip()),
            fmt_f64(line.fixed_cost()),
            line.capacity(),
            fmt_f64(line.round_trip_time())
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a concept file listing every pool line with its frequency.
pub fn save_concept(concept: &LineConcept, pool: &LinePool, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "line_id,frequency")?;
    for (l, line) in pool.lines() {
        writeln!(w, "{},{}", line.id(), concept.frequency(l))?;
    }
    w.flush()?;
    Ok(())
}
