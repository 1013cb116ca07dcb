//! Result persistence: sweep tables as CSV and JSON, plot-data triples,
//! and residual tables for the regression subcommand.
//!
//! CSV columns are stable: `value, mean_epoch, mean_time, std_dev,
//! censored, n_replicas`. Absent aggregates (all-censored rows) serialize
//! as empty fields. The JSON mirror carries the full base configuration
//! and the master seed for provenance.

use std::fs;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::regression::RegressionFit;
use crate::sweep::{SweepRow, SweepTable};

/// Write the rows as CSV (header always present, even for empty tables).
pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    // manual header so empty tables still carry one; serialize() must not
    // add its own
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(["value", "mean_epoch", "mean_time", "std_dev", "censored", "n_replicas"])
        .map_err(|e| csv_err(path, e))?;
    for row in &table.rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))?;
    Ok(())
}

/// Read rows back from a sweep CSV.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows = Vec::new();
    for record in r.deserialize() {
        rows.push(record.map_err(|e| csv_err(path, e))?);
    }
    Ok(rows)
}

/// Write the full table (rows + provenance) as pretty JSON.
pub fn write_sweep_json(path: &Path, table: &SweepTable) -> Result<()> {
    let text = serde_json::to_string_pretty(table).expect("table serializes");
    fs::write(path, text).map_err(|e| SimError::io(path, e))
}

/// Write `(x, y, y_err)` triples for plotting: the grid value, the mean
/// formation epoch, and its standard deviation. Censored rows are skipped.
pub fn write_plotdata(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["x", "y", "y_err"]).map_err(|e| csv_err(path, e))?;
    for row in rows {
        if let (Some(mean), Some(std)) = (row.mean_epoch, row.std_dev) {
            w.write_record([
                row.value.to_string(),
                mean.to_string(),
                std.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| SimError::io(path, e))?;
    Ok(())
}

/// Residuals of the dual-target fits, one row per data point.
pub fn write_residuals_csv(
    path: &Path,
    x: &[f64],
    fit_time: &RegressionFit,
    fit_inverse: &RegressionFit,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["value", "residual_time_target", "residual_inverse_target"])
        .map_err(|e| csv_err(path, e))?;
    for (i, &xi) in x.iter().enumerate() {
        w.write_record([
            xi.to_string(),
            fit_time.residuals[i].to_string(),
            fit_inverse.residuals[i].to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| SimError::io(path, e))?;
    Ok(())
}

fn csv_err(path: &Path, e: csv::Error) -> SimError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SimError::io(path, io),
        other => SimError::Config(format!("csv error on {}: {other:?}", path.display())),
    }
}
