//! CSV ingestion.
//!
//! The loader consumes a header row plus one sample per line and cuts
//! contiguous, non-overlapping windows of the configured length. A window
//! never spans a change of activity, subject or attribute values; partial
//! runs are dropped and counted.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Dataset, Provenance, SensorWindow};
use crate::error::{Error, Result};

/// Maps the loader onto the file's column names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub timestamp: String,
    pub channels: Vec<String>,
    pub activity: String,
    pub subject: String,
    /// attribute name -> column name
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvLoadReport {
    pub n_windows: usize,
    pub dropped_rows: usize,
}

struct Row {
    values: Vec<f64>,
    activity: String,
    subject: String,
    attributes: BTreeMap<String, String>,
    timestamp: f64,
}

/// Load a CSV file into windows of length `window_len`.
pub fn load_csv(path: &Path, schema: &CsvSchema, window_len: usize) -> Result<(Dataset, CsvLoadReport)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers().map_err(|e| Error::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;

    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let ts_col = col(&schema.timestamp)?;
    let chan_cols: Vec<usize> = schema.channels.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let act_col = col(&schema.activity)?;
    let subj_col = col(&schema.subject)?;
    let attr_cols: Vec<(String, usize)> = schema
        .attributes
        .iter()
        .map(|(name, column)| Ok((name.clone(), col(column)?)))
        .collect::<Result<_>>()?;

    let mut rows: Vec<Row> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let data_row = i + 1; // 1-based, excluding the header
        let record = record.map_err(|e| Error::Parse { row: data_row, msg: e.to_string() })?;
        let parse_num = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse {
                    row: data_row,
                    msg: format!("non-numeric value {:?} in column {:?}", record.get(idx).unwrap_or(""), headers.get(idx).unwrap_or("")),
                })
        };
        let values: Vec<f64> = chan_cols.iter().map(|&c| parse_num(c)).collect::<Result<_>>()?;
        let timestamp = parse_num(ts_col)?;
        rows.push(Row {
            values,
            activity: record.get(act_col).unwrap_or("").to_string(),
            subject: record.get(subj_col).unwrap_or("").to_string(),
            attributes: attr_cols
                .iter()
                .map(|(name, idx)| (name.clone(), record.get(*idx).unwrap_or("").to_string()))
                .collect(),
            timestamp,
        });
    }

    let sample_rate = estimate_sample_rate(&rows);
    let c = schema.channels.len();
    let mut windows = Vec::new();
    let mut dropped = 0usize;

    let mut run_start = 0usize;
    let mut i = 0usize;
    while i <= rows.len() {
        let run_ended = i == rows.len()
            || rows[i].activity != rows[run_start].activity
            || rows[i].subject != rows[run_start].subject
            || rows[i].attributes != rows[run_start].attributes;
        if run_ended {
            let run = &rows[run_start..i];
            let full = run.len() / window_len;
            dropped += run.len() - full * window_len;
            for w in 0..full {
                let mut samples = Array2::zeros((c, window_len));
                for (j, row) in run[w * window_len..(w + 1) * window_len].iter().enumerate() {
                    for ch in 0..c {
                        samples[[ch, j]] = row.values[ch];
                    }
                }
                windows.push(SensorWindow {
                    samples,
                    activity_label: run[0].activity.clone(),
                    attribute_labels: run[0].attributes.clone(),
                    subject_id: run[0].subject.clone(),
                    sample_rate_hz: sample_rate,
                });
            }
            run_start = i;
        }
        i += 1;
    }

    if windows.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "{}: fewer than one full window of {window_len} rows",
            path.display()
        )));
    }
    let report = CsvLoadReport { n_windows: windows.len(), dropped_rows: dropped };
    let mut ds = Dataset::new(windows, schema.channels.clone(), Provenance::Csv);
    ds.normalization_stats = None;
    Ok((ds, report))
}

/// Median timestamp delta, interpreted in seconds.
fn estimate_sample_rate(rows: &[Row]) -> f64 {
    let mut deltas: Vec<f64> = rows.windows(2).map(|p| p[1].timestamp - p[0].timestamp).filter(|d| *d > 0.0).collect();
    if deltas.is_empty() {
        return 50.0;
    }
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    1.0 / deltas[deltas.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(rows: usize, with_activity_col: bool) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        let chan_headers: Vec<String> = (0..9).map(|i| format!("c{i}")).collect();
        if with_activity_col {
            writeln!(f, "ts,{},activity,subject", chan_headers.join(",")).unwrap();
        } else {
            writeln!(f, "ts,{},subject", chan_headers.join(",")).unwrap();
        }
        for i in 0..rows {
            let vals: Vec<String> = (0..9).map(|c| format!("{}", (i * 9 + c) as f64 * 0.01)).collect();
            if with_activity_col {
                writeln!(f, "{},{},walk,s1", i as f64 * 0.02, vals.join(",")).unwrap();
            } else {
                writeln!(f, "{},{},s1", i as f64 * 0.02, vals.join(",")).unwrap();
            }
        }
        (dir, path)
    }

    fn schema() -> CsvSchema {
        CsvSchema {
            timestamp: "ts".into(),
            channels: (0..9).map(|i| format!("c{i}")).collect(),
            activity: "activity".into(),
            subject: "subject".into(),
            attributes: BTreeMap::new(),
        }
    }

    #[test]
    fn windows_and_drop_count() {
        let (_dir, path) = write_csv(1050, true);
        let (ds, report) = load_csv(&path, &schema(), 100).unwrap();
        assert_eq!(ds.len(), 10);
        assert_eq!(report.n_windows, 10);
        assert_eq!(report.dropped_rows, 50);
        assert!((ds.sample_rate_hz() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn missing_activity_column_is_a_schema_error() {
        let (_dir, path) = write_csv(200, false);
        match load_csv(&path, &schema(), 100) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "activity"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "ts,{},activity,subject", (0..9).map(|i| format!("c{i}")).collect::<Vec<_>>().join(",")).unwrap();
        writeln!(f, "0.0,1,1,1,1,1,1,1,1,1,walk,s1").unwrap();
        writeln!(f, "0.02,1,1,oops,1,1,1,1,1,1,walk,s1").unwrap();
        match load_csv(&path, &schema(), 1) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows_is_empty_dataset() {
        let (_dir, path) = write_csv(40, true);
        assert!(matches!(load_csv(&path, &schema(), 100), Err(Error::EmptyDataset(_))));
    }

    #[test]
    fn attribute_columns_are_carried() {
        // a MotionSense-style file with a gender column
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ms.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "ts,{},act,subject,gender", (0..9).map(|i| format!("c{i}")).collect::<Vec<_>>().join(",")).unwrap();
        for i in 0..120 {
            let vals: Vec<String> = (0..9).map(|c| format!("{}", (i + c) as f64)).collect();
            writeln!(f, "{},{},jog,sub1,f", i as f64 * 0.02, vals.join(",")).unwrap();
        }
        let mut schema = schema();
        schema.activity = "act".into();
        schema.attributes.insert("gender".into(), "gender".into());
        let (ds, _) = load_csv(&path, &schema, 100).unwrap();
        assert_eq!(ds.windows[0].attribute_labels.get("gender").map(String::as_str), Some("f"));
    }

    #[test]
    fn windows_never_span_label_changes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mix.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "ts,{},activity,subject", (0..9).map(|i| format!("c{i}")).collect::<Vec<_>>().join(",")).unwrap();
        for i in 0..250 {
            let act = if i < 130 { "walk" } else { "jog" };
            let vals: Vec<String> = (0..9).map(|c| format!("{}", (i + c) as f64)).collect();
            writeln!(f, "{},{},{act},s1", i as f64 * 0.02, vals.join(",")).unwrap();
        }
        let (ds, report) = load_csv(&path, &schema(), 100).unwrap();
        assert_eq!(ds.len(), 2); // 130 walk -> 1 window + 30 dropped; 120 jog -> 1 + 20
        assert_eq!(report.dropped_rows, 50);
        assert_eq!(ds.windows[0].activity_label, "walk");
        assert_eq!(ds.windows[1].activity_label, "jog");
    }
}
