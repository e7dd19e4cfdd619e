//! Telemetry log format: line-delimited CSV with a mandatory header
//! `timestamp,capability,kind,value`. `kind` is `err` (signed error sample)
//! or `ok` (outcome, value 0 or 1).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use autonomy_core::{TelemetryEvent, TelemetryPayload};

pub const HEADER: [&str; 4] = ["timestamp", "capability", "kind", "value"];

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error("cannot open `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Record { line: u64, message: String },
    #[error("missing or wrong header; expected `timestamp,capability,kind,value`")]
    Header,
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub fn read_telemetry_file(path: &Path) -> Result<Vec<TelemetryEvent>, TelemetryError> {
    let file = File::open(path)
        .map_err(|source| TelemetryError::Io { path: path.display().to_string(), source })?;
    read_telemetry(file)
}

pub fn read_telemetry(reader: impl Read) -> Result<Vec<TelemetryEvent>, TelemetryError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv.headers().map_err(|_| TelemetryError::Header)?;
        if headers.iter().ne(HEADER) {
            return Err(TelemetryError::Header);
        }
    }
    let mut out = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| TelemetryError::Record {
            line: e.position().map_or(0, csv::Position::line),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        let fail = |message: String| TelemetryError::Record { line, message };
        if record.len() != 4 {
            return Err(fail(format!("expected 4 fields, got {}", record.len())));
        }
        let timestamp: f64 = record[0]
            .parse()
            .map_err(|_| fail(format!("bad timestamp `{}`", &record[0])))?;
        if !timestamp.is_finite() {
            return Err(fail(format!("non-finite timestamp `{}`", &record[0])));
        }
        let capability = record[1].to_string();
        let payload = match &record[2] {
            "err" => {
                let value: f64 = record[3]
                    .parse()
                    .map_err(|_| fail(format!("bad error sample `{}`", &record[3])))?;
                if !value.is_finite() {
                    return Err(fail(format!("non-finite error sample `{}`", &record[3])));
                }
                TelemetryPayload::ErrorSample(value)
            }
            "ok" => match &record[3] {
                "0" => TelemetryPayload::Outcome(false),
                "1" => TelemetryPayload::Outcome(true),
                other => return Err(fail(format!("outcome value must be 0 or 1, got `{other}`"))),
            },
            other => return Err(fail(format!("kind must be `err` or `ok`, got `{other}`"))),
        };
        out.push(TelemetryEvent { timestamp, capability, payload });
    }
    Ok(out)
}

pub fn write_telemetry(
    writer: impl Write,
    events: &[TelemetryEvent],
) -> Result<(), TelemetryError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(HEADER)?;
    for event in events {
        let (kind, value) = match event.payload {
            TelemetryPayload::ErrorSample(v) => ("err", format!("{v}")),
            TelemetryPayload::Outcome(ok) => ("ok", if ok { "1" } else { "0" }.to_string()),
        };
        csv.write_record([
            format!("{}", event.timestamp).as_str(),
            &event.capability,
            kind,
            &value,
        ])?;
    }
    csv.flush()?;
    Ok(())
}
