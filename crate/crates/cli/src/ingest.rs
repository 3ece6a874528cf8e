//! Station CSV files: `date,h00,...,h23`, one row per day, empty cell = missing.

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use hfts_core::curves::{repair_missing, MAX_MISSING_FRACTION};
use hfts_core::{Curve, Finding, FunctionalSeries, Grid, ValidationReport};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// Decimal places written for every value; round trips stay within 1e-9.
pub const DECIMALS: usize = 9;

pub fn column_names(n_points: usize) -> Vec<String> {
    let width = (n_points.saturating_sub(1).to_string().len()).max(2);
    (0..n_points).map(|i| format!("h{i:0width$}")).collect()
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").ok()
}

/// Reads one station file. Days with too many gaps are dropped and listed in
/// the report; smaller gaps are interpolated.
pub fn load_station_csv(
    path: &Path,
    node_id: &str,
    grid: Grid<f64>,
) -> Result<(FunctionalSeries<f64>, ValidationReport)> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let ctx = |line: Option<u64>| match line {
        Some(l) => format!("{}:{l} (node `{node_id}`)", path.display()),
        None => format!("{} (node `{node_id}`)", path.display()),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(ctx(Some(1)), e))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(CliError::data(ctx(None), "empty file, expected a header row"));
    }
    let expected = grid.n_points() + 1;
    if headers.len() != expected {
        return Err(CliError::data(
            ctx(Some(1)),
            format!(
                "header has {} columns, expected `date` plus {} value columns",
                headers.len(),
                grid.n_points()
            ),
        ));
    }
    if headers.get(0).map(str::trim) != Some("date") {
        return Err(CliError::data(ctx(Some(1)), "first column must be `date`"));
    }

    let mut report = ValidationReport::default();
    let mut curves = Vec::new();
    let mut dates = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            CliError::data(ctx(line), e)
        })?;
        let line = record.position().map(|p| p.line());
        if record.len() != expected {
            return Err(CliError::data(
                ctx(line),
                format!("{} columns, expected {expected}", record.len()),
            ));
        }
        let date = parse_date(&record[0]).ok_or_else(|| {
            CliError::data(ctx(line), format!("unparseable date `{}`", &record[0]))
        })?;
        let raw = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, cell)| {
                let cell = cell.trim();
                if cell.is_empty() {
                    return Ok(None);
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => Err(CliError::data(
                        ctx(line),
                        format!("column {}: `{cell}` is not a number", j + 1),
                    )),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        match repair_missing(&raw, MAX_MISSING_FRACTION) {
            Ok((values, filled)) => {
                if filled > 0 {
                    report.findings.push(Finding::Repaired {
                        date,
                        count: filled,
                    });
                }
                let curve = Curve::new(grid, values).map_err(|e| CliError::data(ctx(line), e))?;
                curves.push(curve);
                dates.push(date);
            }
            Err(hfts_core::Error::TooManyMissing { missing, total }) => {
                report.findings.push(Finding::Rejected {
                    date,
                    missing,
                    total,
                });
            }
            Err(e) => return Err(CliError::data(ctx(line), e)),
        }
    }
    if curves.is_empty() && report.findings.is_empty() {
        return Err(CliError::data(ctx(None), "no data rows"));
    }
    let series = FunctionalSeries::new(node_id, grid, curves, dates)
        .map_err(|e| CliError::data(ctx(None), e))?;
    Ok((series, report))
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn series_to_csv(dates: &[NaiveDate], curves: &[Curve<f64>]) -> Result<Vec<u8>> {
    let n_points = curves.first().map_or(0, Curve::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["date".to_string()];
    header.extend(column_names(n_points));
    let to_err = |e: csv::Error| CliError::data("csv encoding", e);
    w.write_record(&header).map_err(to_err)?;
    for (d, c) in dates.iter().zip(curves) {
        let mut row = vec![d.format("%Y-%m-%d").to_string()];
        row.extend(c.values().iter().map(|v| format!("{v:.DECIMALS$}")));
        w.write_record(&row).map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::data("csv encoding", e.error()))
}

pub fn write_series_csv(path: &Path, dates: &[NaiveDate], curves: &[Curve<f64>]) -> Result<()> {
    write_atomic(path, &series_to_csv(dates, curves)?)
}
