//! Report and grid files. Everything is written to a temporary file in the
//! target directory and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use fitzcalc_core::{CheckReport, Error, ExtReal, PairPoint, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

fn io_err(p: &Path, e: std::io::Error) -> Error {
    Error::Input(format!("{}: {e}", p.display()))
}

pub fn report_json(r: &CheckReport) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize") + "\n"
}

/// Writes `<dir>/<check>.json`, or prints to stdout without a directory.
pub fn emit_report(r: &CheckReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) => write_atomic(&dir.join(format!("{}.json", r.check)), report_json(r).as_bytes()),
        None => {
            print!("{}", report_json(r));
            Ok(())
        }
    }
}

/// CSV rows `x1..xn, xs1..xsn, value`.
pub fn grid_csv(rows: &[(PairPoint, ExtReal)]) -> String {
    let n = rows.first().map_or(1, |(z, _)| z.dim());
    let mut s = String::new();
    let head: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("xs{i}"))).collect();
    s.push_str(&head.join(","));
    s.push_str(",value\n");
    for (z, v) in rows {
        for c in z.flat() {
            s.push_str(&format!("{c},"));
        }
        s.push_str(&format!("{v}\n"));
    }
    s
}

pub fn grid_path(out: Option<&Path>, name: &str) -> PathBuf {
    out.unwrap_or(Path::new(".")).join(format!("{name}.csv"))
}
