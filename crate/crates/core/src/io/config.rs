//! Run configuration read from TOML.
//!
//! ```toml
//! [circuit]            # or: file = "circuit.json"
//! rows = 3
//! cols = 4
//! depth = 14
//! seed = 1
//!
//! [simulation]
//! backend = "trajectories"   # ideal | density | trajectories
//! samples = 100000
//! seed = 7
//!
//! [noise]
//! r1 = 0.01
//! r2 = 0.01
//! eps_readout = 0.0
//!
//! [schedule]           # optional
//! kind = "linear"
//! start = 0.01
//! end = 0.05
//! target = "bit_flip"
//!
//! [analysis]
//! seed = 11
//! metric = "l2"
//! splits = 999
//! max_degree = 8
//! estimator = "cross-split"
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chaostats::{Estimator, Metric, MIN_ESTIMATE_SAMPLES, MIN_SPLITS, MIN_TEST_SAMPLES};
use crate::error::{Error, Result};
use crate::noise::{GateNoise, NoiseSchedule, ScheduleTarget};
use crate::qsim::{GatesetConfig, MAX_DENSITY_QUBITS, MAX_TRAJECTORY_QUBITS};
use crate::MAX_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Ideal,
    Density,
    Trajectories,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Backend::Ideal),
            "density" => Ok(Backend::Density),
            "trajectories" => Ok(Backend::Trajectories),
            other => Err(Error::Unknown {
                kind: "backend",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Ideal => "ideal",
            Backend::Density => "density",
            Backend::Trajectories => "trajectories",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum CircuitSource {
    File {
        file: PathBuf,
    },
    Generate {
        rows: usize,
        cols: usize,
        depth: usize,
        seed: u64,
        #[serde(default)]
        gateset: GatesetConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub backend: Backend,
    pub samples: usize,
    pub seed: u64,
}

fn default_splits() -> usize {
    crate::chaostats::DEFAULT_SPLITS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub seed: u64,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_splits")]
    pub splits: usize,
    /// Defaults to the bit count.
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default)]
    pub estimator: Estimator,
    /// Inclusive `[low, high]` degree range for the decay fit; defaults to
    /// `[1, max_degree]`.
    #[serde(default)]
    pub decay_degrees: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitSource,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub noise: GateNoise,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<NoiseSchedule>,
    pub analysis: AnalysisConfig,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form, so formatting and key order in
    /// the TOML file do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Circuit file path resolved against `base_dir`.
    pub fn circuit_path(&self, base_dir: &Path) -> Option<PathBuf> {
        match &self.circuit {
            CircuitSource::File { file } => Some(base_dir.join(file)),
            CircuitSource::Generate { .. } => None,
        }
    }

    /// Checks every parameter against its legal range, given the bit count
    /// of the circuit. Referenced files must exist.
    pub fn validate(&self, base_dir: &Path, n: usize) -> Result<()> {
        if let Some(path) = self.circuit_path(base_dir) {
            if !path.is_file() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "circuit file not found"),
                ));
            }
        }
        if n == 0 || n > MAX_BITS {
            return Err(Error::BitCount(n));
        }
        self.noise.validate()?;
        let sim = &self.simulation;
        let min_samples = MIN_TEST_SAMPLES.max(MIN_ESTIMATE_SAMPLES);
        if sim.samples < min_samples {
            return Err(Error::param(
                "simulation.samples",
                format!(
                    "{} is below the {min_samples} the analyses need",
                    sim.samples
                ),
            ));
        }
        match sim.backend {
            Backend::Ideal if self.noise.r1 != 0.0 || self.noise.r2 != 0.0 => {
                return Err(Error::param(
                    "noise",
                    "the ideal backend has no gate noise; use density or trajectories",
                ))
            }
            Backend::Density if n > MAX_DENSITY_QUBITS => {
                return Err(Error::TooLarge {
                    what: "density-matrix simulation",
                    max: MAX_DENSITY_QUBITS,
                    actual: n,
                    hint: "use the trajectory backend",
                })
            }
            Backend::Trajectories if n > MAX_TRAJECTORY_QUBITS => {
                return Err(Error::TooLarge {
                    what: "trajectory simulation",
                    max: MAX_TRAJECTORY_QUBITS,
                    actual: n,
                    hint: "reduce the grid",
                })
            }
            _ => {}
        }
        if let Some(schedule) = &self.schedule {
            let per_shot_gate_rates = !matches!(
                schedule.target(),
                ScheduleTarget::BitFlip | ScheduleTarget::Readout
            );
            if per_shot_gate_rates && sim.backend != Backend::Trajectories {
                return Err(Error::param(
                    "schedule.target",
                    "gate-rate schedules need the trajectory backend",
                ));
            }
        }
        let a = &self.analysis;
        if a.splits < MIN_SPLITS {
            return Err(Error::param(
                "analysis.splits",
                format!("{} is below {MIN_SPLITS}", a.splits),
            ));
        }
        if a.estimator == Estimator::Exact {
            return Err(Error::param("analysis.estimator", "must be sample-based"));
        }
        let max_degree = self.max_degree(n);
        if max_degree > n {
            return Err(Error::param(
                "analysis.max_degree",
                format!("{max_degree} exceeds bit count {n}"),
            ));
        }
        let [low, high] = self.decay_degrees(n);
        if low > high || high > max_degree {
            return Err(Error::param(
                "analysis.decay_degrees",
                format!("[{low}, {high}] not within 0..={max_degree}"),
            ));
        }
        Ok(())
    }

    pub fn max_degree(&self, n: usize) -> usize {
        self.analysis.max_degree.unwrap_or(n)
    }

    pub fn decay_degrees(&self, n: usize) -> [usize; 2] {
        self.analysis
            .decay_degrees
            .unwrap_or([1, self.max_degree(n)])
    }
}
