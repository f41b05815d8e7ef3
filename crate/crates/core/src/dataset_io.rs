//! CSV and JSON dataset files.
//!
//! CSV: header `label,distance_cm,ambient_on,sample_rate_hz,n_samples,s0,..,s{n-1}`,
//! one trace per row, `ambient_on` written as `0`/`1`.
//!
//! JSON: an array of `{label, distance_cm, ambient_on, sample_rate_hz, samples}`.
//!
//! Samples are written with the shortest representation that parses back to
//! the same `f64`, so a save/load cycle is exact.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{Dataset, GestureLabel, Trace};

const META_COLUMNS: [&str; 5] = [
    "label",
    "distance_cm",
    "ambient_on",
    "sample_rate_hz",
    "n_samples",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(Error::Config(format!("unknown data format {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<GestureLabel>,
    distance_cm: f64,
    ambient_on: bool,
    sample_rate_hz: f64,
    samples: Vec<f64>,
}

fn invalid(index: usize) -> impl Fn(String) -> Error {
    move |message| Error::Invalid { index, message }
}

fn parse_err(index: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        index,
        message: message.into(),
    }
}

/// Parses CSV text into traces. Labels may be empty.
pub fn parse_csv(text: &str) -> Result<Vec<Trace>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::EmptyDataset),
        Some(h) => h.map_err(|e| parse_err(0, format!("header: {e}")))?,
    };
    if header.len() < META_COLUMNS.len() || header.iter().zip(META_COLUMNS).any(|(a, b)| a != b) {
        return Err(parse_err(
            0,
            format!("header must start with {}", META_COLUMNS.join(",")),
        ));
    }
    let n_samples = header.len() - META_COLUMNS.len();
    for (i, name) in header.iter().skip(META_COLUMNS.len()).enumerate() {
        if name != format!("s{i}") {
            return Err(parse_err(
                0,
                format!("header column {name:?} should be s{i}"),
            ));
        }
    }

    let mut traces = Vec::new();
    for (index, row) in records.enumerate() {
        let row = row.map_err(|e| parse_err(index, e.to_string()))?;
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != header.len() {
            return Err(parse_err(
                index,
                format!(
                    "expected {} columns ({} samples), found {} ({} samples)",
                    header.len(),
                    n_samples,
                    row.len(),
                    row.len().saturating_sub(META_COLUMNS.len())
                ),
            ));
        }
        let label = match &row[0] {
            "" => None,
            s => Some(s.parse::<GestureLabel>().map_err(|_| Error::Invalid {
                index,
                message: format!("unknown label {s:?}"),
            })?),
        };
        let num = |col: usize| -> Result<f64> {
            row[col].parse::<f64>().map_err(|_| {
                parse_err(
                    index,
                    format!("column {} is not a number: {:?}", col, &row[col]),
                )
            })
        };
        let distance_cm = num(1)?;
        let ambient_on = match &row[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(
                    index,
                    format!("ambient_on must be 0 or 1, got {other:?}"),
                ))
            }
        };
        let sample_rate_hz = num(3)?;
        let declared: usize = row[4]
            .parse()
            .map_err(|_| parse_err(index, format!("bad n_samples {:?}", &row[4])))?;
        if declared != n_samples {
            return Err(parse_err(
                index,
                format!("n_samples is {declared} but header declares {n_samples}"),
            ));
        }
        let samples = (META_COLUMNS.len()..row.len())
            .map(num)
            .collect::<Result<Vec<_>>>()?;
        let trace = Trace::from_samples(samples, distance_cm, ambient_on, sample_rate_hz, label)
            .map_err(invalid(index))?;
        traces.push(trace);
    }
    if traces.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(traces)
}

/// Renders traces as CSV. All traces must share one length.
pub fn to_csv(traces: &[Trace]) -> Result<String> {
    let n = traces.first().map_or(0, Trace::len);
    let mut out = String::new();
    out.push_str(&META_COLUMNS.join(","));
    for i in 0..n {
        write!(out, ",s{i}").unwrap();
    }
    out.push('\n');
    for (index, t) in traces.iter().enumerate() {
        if t.len() != n {
            return Err(Error::Invalid {
                index,
                message: format!("length {} differs from first trace length {n}", t.len()),
            });
        }
        let m = t.meta();
        if let Some(l) = t.label() {
            write!(out, "{l}").unwrap();
        }
        write!(
            out,
            ",{},{},{},{}",
            m.distance_cm,
            u8::from(m.ambient_on),
            m.sample_rate_hz,
            n
        )
        .unwrap();
        for s in t.samples() {
            write!(out, ",{s}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_json(text: &str) -> Result<Vec<Trace>> {
    let records: Vec<TraceRecord> = serde_json::from_str(text)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    records
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            Trace::from_samples(
                r.samples,
                r.distance_cm,
                r.ambient_on,
                r.sample_rate_hz,
                r.label,
            )
            .map_err(invalid(index))
        })
        .collect()
}

pub fn to_json(traces: &[Trace]) -> Result<String> {
    let records: Vec<TraceRecord> = traces
        .iter()
        .map(|t| TraceRecord {
            label: t.label(),
            distance_cm: t.meta().distance_cm,
            ambient_on: t.meta().ambient_on,
            sample_rate_hz: t.meta().sample_rate_hz,
            samples: t.samples().to_vec(),
        })
        .collect();
    Ok(serde_json::to_string(&records)?)
}

/// Reads traces whose labels may be missing.
pub fn read_traces(path: impl AsRef<Path>, format: DataFormat) -> Result<Vec<Trace>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Json => parse_json(&text),
    }
}

/// Reads a fully labeled dataset, preserving row order.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    Dataset::new(read_traces(path, format)?)
}

pub fn write_traces(traces: &[Trace], path: impl AsRef<Path>, format: DataFormat) -> Result<()> {
    let text = match format {
        DataFormat::Csv => to_csv(traces)?,
        DataFormat::Json => to_json(traces)?,
    };
    write_atomic(path.as_ref(), text.as_bytes())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>, format: DataFormat) -> Result<()> {
    write_traces(ds.traces(), path, format)
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
