use std::path::Path;

use super::{Dataset, Transform};
use crate::error::{Error, Result};

/// Reads a headed, comma-separated file. Every column other than
/// `target_column` becomes a feature, in file order. Rows holding NaN or
/// infinite values are dropped and counted in the provenance entry.
pub fn load_csv(path: &Path, target_column: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let target = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingColumn(target_column.to_string()))?;
    let feature_names: Vec<String> =
        headers.iter().enumerate().filter(|(j, _)| *j != target).map(|(_, h)| h.clone()).collect();

    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut rows_read = 0;
    let mut rows_dropped = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        rows_read += 1;
        let mut values = Vec::with_capacity(headers.len());
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: headers.get(j).cloned().unwrap_or_else(|| format!("#{j}")),
                value: cell.to_string(),
            })?;
            values.push(v);
        }
        if values.iter().any(|v| !v.is_finite()) {
            rows_dropped += 1;
            continue;
        }
        y.push(values[target]);
        values.remove(target);
        x.push(values);
    }
    if rows_dropped > 0 {
        tracing::warn!(rows_dropped, path = %path.display(), "dropped rows with non-finite values");
    }
    let mut ds = Dataset::new(feature_names, target_column.to_string(), x, y)?;
    ds.provenance.push(Transform::LoadCsv {
        path: path.display().to_string(),
        target_column: target_column.to_string(),
        rows_read,
        rows_dropped,
    });
    Ok(ds)
}

/// Writes features then the target column.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = ds.feature_names.clone();
    header.push(ds.target_name.clone());
    writer.write_record(&header)?;
    for (row, y) in ds.x.iter().zip(&ds.y) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.push(y.to_string());
        writer.write_record(&cells)?;
    }
    writer.flush()?;
    Ok(())
}
