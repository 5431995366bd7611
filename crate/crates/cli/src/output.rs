//! Artifact writers: CSV with 17-significant-digit floats, JSON reports and
//! the `.meta.json` sidecar that records provenance next to every file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::CliError;

pub const TOOL: &str = "ergocast";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `v` with 17 significant digits; empty for `None` and NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Provenance block shared by every artifact.
pub fn meta(command: &str, config: Value, seed: u64, wall_seconds: f64) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "seed": seed,
        "wall_seconds": wall_seconds,
        "config": config,
    })
}

/// A file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Validation(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `meta` next to `path`; does nothing for stdout output.
pub fn write_sidecar(path: Option<&Path>, meta: &Value) -> Result<(), CliError> {
    if let Some(p) = path {
        let side = sidecar_path(p);
        let mut w = sink(Some(&side))?;
        serde_json::to_writer_pretty(&mut w, meta).map_err(|e| CliError::Validation(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn write_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Validation(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
