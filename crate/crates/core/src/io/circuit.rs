//! JSON circuit documents.
//!
//! ```json
//! {
//!   "n": 2, "rows": 1, "cols": 2,
//!   "layers": [
//!     {"kind": "single", "gates": [{"qubit": 0, "gate": "sqrt_x"},
//!                                  {"qubit": 1, "gate": [[[0,0],[1,0]],[[1,0],[0,0]]]}]},
//!     {"kind": "two", "gates": [{"qubits": [0, 1], "gate": "cz"}]}
//!   ]
//! }
//! ```
//!
//! Gates are names or explicit matrices of `[re, im]` entries; matrices are
//! checked for unitarity when read.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{GeneratorInfo, Layer, QuantumCircuit};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDocument {
    n: usize,
    rows: usize,
    cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorInfo>,
    layers: Vec<Layer>,
}

/// Pretty JSON with a trailing newline.
pub fn format_circuit(c: &QuantumCircuit) -> String {
    let doc = CircuitDocument {
        n: c.n(),
        rows: c.rows(),
        cols: c.cols(),
        generator: c.generator().cloned(),
        layers: c.layers().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("circuit serializes");
    text.push('\n');
    text
}

pub fn parse_circuit_str(text: &str, path: &Path) -> Result<QuantumCircuit> {
    let doc: CircuitDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if doc.n != doc.rows * doc.cols {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("n={} but the grid is {}×{}", doc.n, doc.rows, doc.cols),
        });
    }
    let c = QuantumCircuit::new(doc.rows, doc.cols, doc.layers)?;
    Ok(match doc.generator {
        Some(info) => c.with_generator(info),
        None => c,
    })
}

pub fn parse_circuit(path: impl AsRef<Path>) -> Result<QuantumCircuit> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_circuit_str(&text, path)
}

pub fn write_circuit(c: &QuantumCircuit, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_circuit(c)).map_err(|e| Error::io(path, e))
}
