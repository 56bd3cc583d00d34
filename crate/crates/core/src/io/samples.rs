//! Plain-text sample files.
//!
//! ```text
//! # n=3
//! # source=trajectories
//! # seed=7
//! # ordered=true
//! # batches=0,5000
//! # circuit=circuit.json
//! 010
//! 110
//! ```
//!
//! Header lines start with `#`. A `key=value` header must use one of the keys
//! above; `#` lines without `=` are comments. Data lines hold exactly `n`
//! characters of `0`/`1`, bit 0 first, in acquisition order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::outcome::{SampleMeta, SampleSet};
use crate::MAX_BITS;

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses one data line of `n` bit characters, bit 0 first.
fn parse_bits(field: &str, n: usize) -> std::result::Result<u32, String> {
    let len = field.chars().count();
    if len != n {
        return Err(format!("expected {n} bits, found {len} characters"));
    }
    let mut index = 0u32;
    for (i, ch) in field.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => index |= 1 << i,
            other => return Err(format!("invalid character {other:?} at column {}", i + 1)),
        }
    }
    Ok(index)
}

/// Parses sample-file text; `path` only labels diagnostics.
pub fn parse_samples_str(text: &str, path: &Path) -> Result<SampleSet> {
    let mut n: Option<usize> = None;
    let mut meta = SampleMeta::default();
    let mut outcomes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('#') {
            let Some((key, value)) = header.split_once('=') else {
                continue;
            };
            if !outcomes.is_empty() {
                return Err(parse_error(path, lineno, "header after data lines"));
            }
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| parse_error(path, lineno, format!("invalid {what} {value:?}"));
            match key {
                "n" => {
                    let v: usize = value.parse().map_err(|_| bad("n"))?;
                    if v == 0 || v > MAX_BITS {
                        return Err(parse_error(
                            path,
                            lineno,
                            format!("n={v} outside 1..={MAX_BITS}"),
                        ));
                    }
                    n = Some(v);
                }
                "source" => meta.source = Some(value.to_string()),
                "seed" => meta.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "ordered" => {
                    meta.unordered = match value {
                        "true" => false,
                        "false" => true,
                        _ => return Err(bad("ordered flag")),
                    }
                }
                "batches" => {
                    meta.batches = value
                        .split(',')
                        .map(|v| v.trim().parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("batch list"))?;
                }
                "circuit" => meta.circuit = Some(value.to_string()),
                other => {
                    return Err(parse_error(
                        path,
                        lineno,
                        format!("unknown header key {other:?}"),
                    ))
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some(n) = n else {
            return Err(parse_error(
                path,
                lineno,
                "data line before the `# n=` header",
            ));
        };
        outcomes.push(parse_bits(line.trim(), n).map_err(|m| parse_error(path, lineno, m))?);
    }
    let n = n.ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        message: "missing `# n=` header".into(),
    })?;
    if outcomes.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no data lines".into(),
        });
    }
    if let Some(&b) = meta.batches.iter().find(|&&b| b >= outcomes.len()) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("batch start {b} beyond {} samples", outcomes.len()),
        });
    }
    Ok(SampleSet::new(n, outcomes)?.with_meta(meta))
}

pub fn parse_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples_str(&text, path)
}

/// Renders the file text. Identical sets give identical bytes.
pub fn format_samples(s: &SampleSet) -> Result<String> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = s.n();
    let mut out = String::with_capacity(s.len() * (n + 1) + 64);
    writeln!(out, "# n={n}").unwrap();
    for (key, value) in [("source", &s.meta.source), ("circuit", &s.meta.circuit)] {
        if let Some(v) = value {
            if v.contains('\n') {
                return Err(Error::param(key, "must be a single line"));
            }
        }
    }
    if let Some(source) = &s.meta.source {
        writeln!(out, "# source={source}").unwrap();
    }
    if let Some(seed) = s.meta.seed {
        writeln!(out, "# seed={seed}").unwrap();
    }
    writeln!(out, "# ordered={}", !s.meta.unordered).unwrap();
    if !s.meta.batches.is_empty() {
        let list: Vec<String> = s.meta.batches.iter().map(usize::to_string).collect();
        writeln!(out, "# batches={}", list.join(",")).unwrap();
    }
    if let Some(circuit) = &s.meta.circuit {
        writeln!(out, "# circuit={circuit}").unwrap();
    }
    let mut line = vec![b'0'; n + 1];
    line[n] = b'\n';
    for &x in s.outcomes() {
        for (i, byte) in line[..n].iter_mut().enumerate() {
            *byte = if x >> i & 1 == 1 { b'1' } else { b'0' };
        }
        out.push_str(std::str::from_utf8(&line).expect("ascii"));
    }
    Ok(out)
}

/// Writes a non-empty sample set.
pub fn write_samples(s: &SampleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = format_samples(s)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Where to find bitstrings in a third-party text dump.
///
/// Each non-blank line after `skip_lines` is split on `delimiter` (or on
/// whitespace when `None`) and field `column` (0-based) must hold the `n`
/// bits. `msb_first` declares that the file writes bit `n − 1` first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMapping {
    pub delimiter: Option<char>,
    pub column: usize,
    pub skip_lines: usize,
    pub msb_first: bool,
}

/// Converts a foreign dump into a sample set, keeping file order.
pub fn convert_with_mapping(
    text: &str,
    n: usize,
    mapping: &ColumnMapping,
    path: &Path,
) -> Result<SampleSet> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::BitCount(n));
    }
    let mut outcomes = Vec::new();
    for (i, raw) in text.lines().enumerate().skip(mapping.skip_lines) {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let field = match mapping.delimiter {
            Some(d) => line.split(d).nth(mapping.column),
            None => line.split_whitespace().nth(mapping.column),
        }
        .ok_or_else(|| parse_error(path, lineno, format!("no column {}", mapping.column)))?
        .trim();
        let bits: String = if mapping.msb_first {
            field.chars().rev().collect()
        } else {
            field.to_string()
        };
        outcomes.push(parse_bits(&bits, n).map_err(|m| parse_error(path, lineno, m))?);
    }
    if outcomes.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no data lines".into(),
        });
    }
    Ok(SampleSet::new(n, outcomes)?.with_meta(SampleMeta {
        source: Some(format!("converted:{}", path.display())),
        ..SampleMeta::default()
    }))
}
