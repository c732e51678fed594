//! Single-column CSV series files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub header: Option<String>,
    pub values: Vec<f64>,
}

/// Reads the first column of a CSV file. A first row whose first field is not
/// a number is taken as the header.
pub fn read_series(path: &Path) -> Result<SeriesFile, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_series(file).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_series<R: Read>(input: R) -> Result<SeriesFile, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut header = None;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        let field = record.get(0).unwrap_or("");
        if field.is_empty() && record.len() <= 1 {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::Data(format!(
                    "row {}: non-finite value {v}",
                    i + 1
                )))
            }
            Err(_) if i == 0 => header = Some(field.to_string()),
            Err(_) => {
                return Err(CliError::Data(format!(
                    "row {}: cannot parse {field:?} as a number",
                    i + 1
                )))
            }
        }
    }
    if values.len() < 2 {
        return Err(CliError::Data(format!(
            "expected at least 2 numeric rows, found {}",
            values.len()
        )));
    }
    Ok(SeriesFile { header, values })
}

/// Writes `y` (and optionally the innovations) as CSV with shortest
/// round-trip number formatting.
pub fn write_series<W: Write>(
    out: W,
    values: &[f64],
    innovations: Option<&[f64]>,
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    match innovations {
        Some(eps) => {
            writer.write_record(["y", "innovation"]).map_err(io)?;
            for (y, e) in values.iter().zip(eps) {
                writer
                    .write_record([y.to_string(), e.to_string()])
                    .map_err(io)?;
            }
        }
        None => {
            writer.write_record(["y"]).map_err(io)?;
            for y in values {
                writer.write_record([y.to_string()]).map_err(io)?;
            }
        }
    }
    writer.flush().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_header() {
        let s = parse_series("gdp\n1.5\n2\n".as_bytes()).unwrap();
        assert_eq!(s.header.as_deref(), Some("gdp"));
        assert_eq!(s.values, vec![1.5, 2.0]);
        let s = parse_series("1.5,9\n2,9\n".as_bytes()).unwrap();
        assert_eq!(s.header, None);
        assert_eq!(s.values, vec![1.5, 2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_series("".as_bytes()),
            Err(CliError::Data(_))
        ));
        assert!(matches!(
            parse_series("y\n1\nx\n".as_bytes()),
            Err(CliError::Data(_))
        ));
        assert!(matches!(
            parse_series("1\nNaN\n".as_bytes()),
            Err(CliError::Data(_))
        ));
        assert!(matches!(
            parse_series("1\n".as_bytes()),
            Err(CliError::Data(_))
        ));
    }

    #[test]
    fn round_trips_losslessly() {
        let values = vec![0.1 + 0.2, -1.0 / 3.0, 1e-300, 123456789.12345679];
        let mut buf = Vec::new();
        write_series(&mut buf, &values, None).unwrap();
        let back = parse_series(buf.as_slice()).unwrap();
        assert_eq!(back.values, values);
    }
}
