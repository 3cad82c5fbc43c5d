//! Atomic output: every file goes to a temporary sibling first and is
//! renamed into place.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{HarnessError, HarnessResult};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> HarnessResult<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> HarnessResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> HarnessResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Python stub that plots the named columns of a CSV written next to it.
pub fn plot_stub(csv_name: &str, x: &str, ys: &[&str], log: bool) -> String {
    let cols: Vec<String> = ys.iter().map(|y| format!("\"{y}\"")).collect();
    let scale = if log { "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\n" } else { "" };
    format!(
        "# Generated plot stub; edit freely.\n\
         import csv, pathlib\n\
         import matplotlib.pyplot as plt\n\n\
         rows = list(csv.DictReader(open(pathlib.Path(__file__).with_name(\"{csv_name}\"))))\n\
         x = [float(r[\"{x}\"]) for r in rows]\n\
         fig, ax = plt.subplots()\n\
         for col in [{}]:\n    ax.plot(x, [float(r[col]) for r in rows], marker=\"o\", label=col)\n\
         {scale}ax.set_xlabel(\"{x}\")\nax.legend()\n\
         fig.savefig(pathlib.Path(__file__).with_suffix(\".png\"))\n",
        cols.join(", ")
    )
}
