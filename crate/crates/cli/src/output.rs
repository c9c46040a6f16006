use serde::Serialize;
use serde_json::{json, Value};
use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use g2hyp::ff::FieldDesc;
use g2hyp::Result;

use crate::config::{RunConfig, TOOL_VERSION};

/// Header echoed into every output: field, additive character, tool version
/// and config hash.
pub fn header(field: Option<&FieldDesc>, psi_scale: u32, config: &RunConfig, command: &impl Serialize) -> Value {
    let mut h = json!({
        "tool_version": TOOL_VERSION,
        "config_hash": config.hash(command),
        "config": config,
    });
    if let Some(f) = field {
        h["p"] = json!(f.p());
        h["n"] = json!(f.n());
        h["modulus"] = json!(f.modulus());
        h["generator"] = json!(f.generator_code());
        h["psi_scale"] = json!(psi_scale);
    }
    h
}

/// A CSV sink, a file when `path` is given and stdout otherwise.
pub fn csv_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_csv_header(w: &mut dyn Write, header: &Value, columns: &str) -> io::Result<()> {
    writeln!(w, "# {header}")?;
    writeln!(w, "{columns}")
}

/// Shortest round-trip representation, `.` decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn print_json(v: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Appends one JSON line per report to the results ledger.
pub fn append_ledger(config: &RunConfig, kind: &str, header: &Value, report: &impl Serialize) -> Result<()> {
    let Some(path) = &config.ledger else {
        return Ok(());
    };
    let line = json!({ "kind": kind, "header": header, "report": report });
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{line}")?;
    Ok(())
}
