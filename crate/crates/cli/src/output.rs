use std::fs;
use std::io::Write;
use std::path::Path;

use bcregions::region::RateRegion;
use bcregions::Result;
use serde::Serialize;

use crate::Format;

fn write(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, bytes)?;
        }
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Pretty JSON.
pub fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(out, text.as_bytes())
}

pub fn emit_region(out: Option<&Path>, region: &RateRegion, format: Format) -> Result<()> {
    region.validate()?;
    match format {
        Format::Csv => write(out, region.to_csv_string()?.as_bytes()),
        Format::Json => {
            let mut text = region.to_json()?;
            text.push('\n');
            write(out, text.as_bytes())
        }
    }
}

/// Rows of any serializable record type as CSV with a header.
pub fn emit_table<T: Serialize>(out: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    write(Some(out), &bytes)
}
