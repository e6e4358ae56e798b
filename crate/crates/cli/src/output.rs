use serde::Serialize;

use crate::args::Format;

/// Text for stdout and the exit code of a completed run.
pub struct Rendered {
    pub body: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn param(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<dropkit::Error> for CliError {
    fn from(e: dropkit::Error) -> Self {
        use dropkit::Error::*;
        let code = match e {
            Parameter(_) | Io(_) => 2,
            Unsupported(_) => 3,
            Numeric(_) | Internal(_) => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::param(format!("i/o error: {e}"))
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// CSV with a header row; fields are already formatted.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::internal(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::internal(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Shortest representation that parses back to the same double, with an
/// exponent for very large or small magnitudes.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite floats serialize")
}

pub fn pick(format: Option<Format>, default: Format) -> Format {
    format.unwrap_or(default)
}
