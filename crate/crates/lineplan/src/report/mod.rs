//! Deterministic run artifacts: JSON with fixed six-decimal floats, CSV
//! tables, and a manifest that pins inputs and options for reproducibility.
//!
//! Identical inputs and options must produce byte-identical files, so JSON
//! objects come from structs with fixed field order (or sorted maps) and
//! every float is printed with exactly six decimals, correctly rounded with
//! ties to even. Nothing here records timestamps or absolute environments.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use crate::error::Result;

/// Formats a float with exactly six decimals, round-half-even, never `-0`.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    // A tiny negative rounds to "-0.000000"; strip the sign so equal values
    // always print identically.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Pretty JSON formatter whose floats go through [`fmt6`].
struct SixDecimalPretty {
    indent: usize,
    has_value: bool,
}

impl SixDecimalPretty {
    fn new() -> Self {
        SixDecimalPretty {
            indent: 0,
            has_value: false,
        }
    }

    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl serde_json::ser::Formatter for SixDecimalPretty {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt6(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(fmt6(f64::from(value)).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes a value to deterministic pretty JSON (trailing newline).
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SixDecimalPretty::new());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes a value as deterministic pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_bytes(value)?)?;
    Ok(())
}

/// Writes a CSV file with a header row; fields are quoted only when needed.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| crate::Error::Csv(e.to_string()))?;
    w.write_record(header)
        .map_err(|e| crate::Error::Csv(e.to_string()))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| crate::Error::Csv(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// SHA-256 of a file's bytes, lowercase hex.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write as _;
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

/// One hashed input file in a [`Manifest`].
#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run: command, crate version, hashed
/// inputs, stringified options, and the random seed if one was set.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, InputRecord>,
    pub options: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            options: BTreeMap::new(),
            seed: None,
        }
    }

    /// Hashes an input file and records it under a role name.
    pub fn record_input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.insert(
            role.to_string(),
            InputRecord {
                path: path.display().to_string(),
                sha256: file_sha256(path)?,
            },
        );
        Ok(())
    }

    pub fn set_option(&mut self, key: &str, value: impl ToString) {
        self.options.insert(key.to_string(), value.to_string());
    }

    /// Writes `manifest.json` into the output directory.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        write_json(&out_dir.join("manifest.json"), self)
    }
}
