//! CSV plumbing for two-column radial series.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Reads `(x, y)` rows. A non-numeric first row is taken as a header.
pub fn read_pairs_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::invalid(format!(
                "{}: row {} has {} columns, expected 2",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => out.push((v[0], v[1])),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::invalid(format!("{}: row {}: {e}", path.display(), i + 1)));
            }
        }
    }
    Ok(out)
}

/// Writes a header row then one `(x, y)` row per pair, using shortest
/// round-trip float formatting.
pub fn write_pairs_csv<W: Write>(out: W, header: [&str; 2], rows: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for (x, y) in rows {
        writer.write_record([x.to_string(), y.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
