//! File formats and the end-to-end pipeline.

mod circuit;
mod config;
mod pipeline;
mod report;
mod samples;

pub use circuit::{format_circuit, parse_circuit, parse_circuit_str, write_circuit};
pub use config::{AnalysisConfig, Backend, CircuitSource, RunConfig, SimulationConfig};
pub use pipeline::{
    load_circuit, run_pipeline, simulate, CIRCUIT_FILE, REPORT_FILE, SAMPLES_FILE, SPECTRUM_FILE,
};
pub use report::{
    emit_report, emit_spectrum_csv, estimate_rows, format_json, format_spectrum_csv, read_report,
    read_spectrum_csv, rows_to_estimate, spectrum_rows, OutputFiles, Provenance, RunReport,
    SpectrumRow,
};
pub use samples::{
    convert_with_mapping, format_samples, parse_samples, parse_samples_str, write_samples,
    ColumnMapping,
};
