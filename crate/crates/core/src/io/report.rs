//! Plot-ready degree-spectrum CSV and the JSON run report.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::chaostats::{
    DecayFit, DegreeProfileEstimate, Estimator, StationarityReport, XebEstimate, WEIGHT_FLOOR,
};
use crate::error::{Error, Result};
use crate::walsh::DegreeProfile;

/// One line of a spectrum CSV: `degree,weight[,stderr][,ratio]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub degree: usize,
    pub weight: f64,
    #[serde(default)]
    pub stderr: Option<f64>,
    /// Weight divided by a reference weight.
    #[serde(default)]
    pub ratio: Option<f64>,
}

pub fn spectrum_rows(profile: &DegreeProfile) -> Vec<SpectrumRow> {
    profile
        .weights
        .iter()
        .enumerate()
        .map(|(degree, &weight)| SpectrumRow {
            degree,
            weight,
            stderr: None,
            ratio: None,
        })
        .collect()
}

/// Rows for an estimate, with `weight / reference` ratios when given. The
/// ratio is left empty where the reference weight is below the fit floor.
pub fn estimate_rows(
    estimate: &DegreeProfileEstimate,
    reference: Option<&DegreeProfile>,
) -> Vec<SpectrumRow> {
    estimate
        .weights
        .iter()
        .zip(&estimate.stderr)
        .enumerate()
        .map(|(degree, (&weight, &stderr))| SpectrumRow {
            degree,
            weight,
            stderr: Some(stderr),
            ratio: reference
                .map(|r| r.weights[degree])
                .filter(|&w| w > WEIGHT_FLOOR)
                .map(|w| weight / w),
        })
        .collect()
}

/// Reads rows back as an estimate over degrees `0..=last`; missing errors
/// count as zero. The bit count is taken to be the last degree listed.
pub fn rows_to_estimate(rows: &[SpectrumRow]) -> Result<DegreeProfileEstimate> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((i, _)) = rows.iter().enumerate().find(|(i, r)| r.degree != *i) {
        return Err(Error::param(
            "spectrum",
            format!("row {} should hold degree {i}", i + 1),
        ));
    }
    Ok(DegreeProfileEstimate {
        n: rows.len() - 1,
        weights: rows.iter().map(|r| r.weight).collect(),
        stderr: rows.iter().map(|r| r.stderr.unwrap_or(0.0)).collect(),
        estimator: if rows.iter().all(|r| r.stderr.is_none()) {
            Estimator::Exact
        } else {
            Estimator::default()
        },
        sample_count: 0,
        seed: None,
    })
}

pub fn format_spectrum_csv(rows: &[SpectrumRow]) -> String {
    let with_stderr = rows.iter().any(|r| r.stderr.is_some());
    let with_ratio = rows.iter().any(|r| r.ratio.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["degree", "weight"];
    if with_stderr {
        header.push("stderr");
    }
    if with_ratio {
        header.push("ratio");
    }
    w.write_record(&header).expect("in-memory write");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for r in rows {
        let mut record = vec![r.degree.to_string(), r.weight.to_string()];
        if with_stderr {
            record.push(opt(r.stderr));
        }
        if with_ratio {
            record.push(opt(r.ratio));
        }
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

pub fn emit_spectrum_csv(rows: &[SpectrumRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_spectrum_csv(rows)).map_err(|e| Error::io(path, e))
}

pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<Vec<SpectrumRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|e: csv::Error| Error::Parse {
                path: path.to_path_buf(),
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub circuit_seed: Option<u64>,
    pub simulation_seed: u64,
    pub analysis_seed: u64,
}

/// File names written next to the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFiles {
    pub circuit: String,
    pub samples: String,
    pub spectrum: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub config: RunConfig,
    pub n: usize,
    pub sample_count: usize,
    pub stationarity: StationarityReport,
    pub spectrum: DegreeProfileEstimate,
    pub ideal_spectrum: DegreeProfile,
    pub decay: Option<DecayFit>,
    /// Why no decay fit was produced, if none was.
    pub decay_error: Option<String>,
    pub xeb: XebEstimate,
    pub outputs: OutputFiles,
}

/// Pretty JSON with a trailing newline. No timestamps or host details, so
/// equal inputs give equal bytes.
pub fn format_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

pub fn emit_report<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_json(report)).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<RunReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}
