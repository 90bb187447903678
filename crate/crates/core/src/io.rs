//! One-column CSV files of sample or depth values.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Values from the first column of a CSV file. A non-numeric first row is
/// taken as a header.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let Some(field) = record.get(0) else { continue };
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    detail: format!("row {}: non-finite value {v}", row + 1),
                })
            }
            Err(_) if row == 0 => {}
            Err(e) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    detail: format!("row {}: {e}", row + 1),
                })
            }
        }
    }
    Ok(values)
}

pub fn write_values(path: &Path, header: &str, values: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    writer.write_record([header]).map_err(csv_err)?;
    for v in values {
        writer.write_record([v.to_string()]).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = File::create(path).map_err(io_err(path))?;
    file.write_all(text.as_bytes()).map_err(io_err(path))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}
