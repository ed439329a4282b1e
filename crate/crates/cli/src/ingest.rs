//! CSV input: point sets and explicit weight matrices.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use hcut::{PointSet, WeightMatrix};

use crate::error::{CliError, CliResult};

/// Tolerance for the symmetry check of explicit weight matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Skip the first row.
    pub header: bool,
    /// Column holding a label rather than a coordinate.
    pub label_col: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub points: PointSet,
    /// Row labels, when a label column was given.
    pub labels: Option<Vec<String>>,
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn read_points(path: &Path, opts: CsvOptions) -> CliResult<Table> {
    parse_points(open(path)?, opts, &path.display().to_string())
}

/// Reads only the first `rows` data rows; fails if the file has fewer.
pub fn read_points_prefix(path: &Path, opts: CsvOptions, rows: usize) -> CliResult<Table> {
    let source = path.display().to_string();
    let table = parse_rows(open(path)?, opts, &source, Some(rows))?;
    if table.points.len() < rows {
        return Err(CliError::invalid(format!(
            "{source}: {rows} rows requested but only {} available",
            table.points.len()
        )));
    }
    Ok(table)
}

/// Parses rows of numbers; every row must have the same number of columns.
pub fn parse_points<R: Read>(reader: R, opts: CsvOptions, source: &str) -> CliResult<Table> {
    parse_rows(reader, opts, source, None)
}

fn parse_rows<R: Read>(reader: R, opts: CsvOptions, source: &str, limit: Option<usize>) -> CliResult<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut labels = opts.label_col.map(|_| Vec::new());
    let mut width = None;
    let mut count = 0;
    for record in rdr.records() {
        if limit.is_some_and(|l| count >= l) {
            break;
        }
        let record = record.map_err(|e| csv_error(source, e))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(CliError::invalid(format!(
                    "{source}: row {row} has {} columns, expected {w}",
                    record.len()
                )))
            }
            _ => {}
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == opts.label_col {
                if let Some(l) = labels.as_mut() {
                    l.push(cell.to_string());
                }
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                CliError::invalid(format!("{source}: row {row}, column {}: '{cell}' is not a number", col + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::invalid(format!(
                    "{source}: row {row}, column {}: value must be finite",
                    col + 1
                )));
            }
            data.push(v);
        }
        count += 1;
    }
    let Some(width) = width else {
        return Err(CliError::invalid(format!("{source}: no data rows")));
    };
    if let Some(c) = opts.label_col {
        if c >= width {
            return Err(CliError::invalid(format!(
                "{source}: label column {c} does not exist (rows have {width} columns)"
            )));
        }
    }
    let d = width - usize::from(opts.label_col.is_some());
    if d == 0 {
        return Err(CliError::invalid(format!("{source}: no coordinate columns")));
    }
    Ok(Table {
        points: PointSet::from_flat(data, d)?,
        labels,
    })
}

/// Reads an `n × n` symmetric weight matrix.
pub fn read_weights(path: &Path, header: bool) -> CliResult<WeightMatrix> {
    parse_weights(open(path)?, header, &path.display().to_string())
}

pub fn parse_weights<R: Read>(reader: R, header: bool, source: &str) -> CliResult<WeightMatrix> {
    let table = parse_points(reader, CsvOptions { header, label_col: None }, source)?;
    let rows: Vec<&[f64]> = table.points.rows().collect();
    Ok(WeightMatrix::from_square(&rows, SYMMETRY_TOLERANCE)?)
}

fn csv_error(source: &str, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Io {
            path: source.into(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => CliError::invalid(format!("{source}: {e}")),
    }
}
