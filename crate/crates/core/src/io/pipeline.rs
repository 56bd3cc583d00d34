//! simulate → spectrum → stationarity → report, driven by a [`RunConfig`].

use std::fs;
use std::path::Path;

use super::circuit::{parse_circuit, write_circuit};
use super::config::{Backend, CircuitSource, RunConfig};
use super::report::{
    emit_report, emit_spectrum_csv, estimate_rows, OutputFiles, Provenance, RunReport,
};
use super::samples::write_samples;
use crate::chaostats::{decay_fit, estimate_degree_profile, stationarity_test, xeb_estimate};
use crate::error::{Error, Result};
use crate::noise::{corrupt_samples, corrupt_samples_scheduled, DistributionNoise, ScheduleTarget};
use crate::outcome::SampleSet;
use crate::qsim::{
    generate_random_circuit, ideal_distribution, run_density_matrix, sample_trajectories,
    QuantumCircuit,
};
use crate::walsh::{degree_profile, spectrum_of};

pub const CIRCUIT_FILE: &str = "circuit.json";
pub const SAMPLES_FILE: &str = "samples.txt";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const REPORT_FILE: &str = "report.json";

/// The circuit a config names, generated or read relative to `base_dir`.
pub fn load_circuit(config: &RunConfig, base_dir: &Path) -> Result<QuantumCircuit> {
    match &config.circuit {
        CircuitSource::File { file } => parse_circuit(base_dir.join(file)),
        CircuitSource::Generate {
            rows,
            cols,
            depth,
            seed,
            gateset,
        } => generate_random_circuit(*rows, *cols, *depth, gateset, *seed),
    }
}

/// Samples for `c` under the config's backend, noise and schedule.
///
/// The trajectory backend applies any schedule per shot. The ideal and
/// density backends accept only bit-flip schedules, applied to the drawn
/// samples.
pub fn simulate(config: &RunConfig, c: &QuantumCircuit) -> Result<SampleSet> {
    let sim = &config.simulation;
    let noise = &config.noise;
    let schedule = config.schedule.as_ref();
    let mut s = match sim.backend {
        Backend::Trajectories => {
            return sample_trajectories(c, noise, schedule, sim.samples, sim.seed);
        }
        Backend::Ideal => {
            let mut s = ideal_distribution(c)?.sample(sim.samples, sim.seed);
            if noise.eps_readout > 0.0 {
                s = corrupt_samples(&s, DistributionNoise::new(noise.eps_readout)?, sim.seed);
            }
            s
        }
        Backend::Density => run_density_matrix(c, noise)?.sample(sim.samples, sim.seed),
    };
    s.meta.source = Some(sim.backend.to_string());
    if let Some(schedule) = schedule {
        if !matches!(
            schedule.target(),
            ScheduleTarget::BitFlip | ScheduleTarget::Readout
        ) {
            return Err(Error::param(
                "schedule.target",
                "gate-rate schedules need the trajectory backend",
            ));
        }
        s = corrupt_samples_scheduled(&s, schedule, sim.seed)?;
    }
    Ok(s)
}

/// Runs every stage, writing the circuit, samples, spectrum CSV and report
/// into `out_dir`. The same config always produces the same bytes.
pub fn run_pipeline(config: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<RunReport> {
    let circuit = load_circuit(config, base_dir)?;
    let n = circuit.n();
    config.validate(base_dir, n)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut samples = simulate(config, &circuit)?;
    samples.meta.circuit = Some(CIRCUIT_FILE.into());
    write_circuit(&circuit, out_dir.join(CIRCUIT_FILE))?;
    write_samples(&samples, out_dir.join(SAMPLES_FILE))?;

    let analysis = &config.analysis;
    let ideal = ideal_distribution(&circuit)?;
    let ideal_spectrum = degree_profile(&spectrum_of(&ideal));
    let spectrum = estimate_degree_profile(
        &samples,
        config.max_degree(n),
        analysis.estimator,
        analysis.seed,
    )?;
    emit_spectrum_csv(
        &estimate_rows(&spectrum, Some(&ideal_spectrum)),
        out_dir.join(SPECTRUM_FILE),
    )?;
    let [low, high] = config.decay_degrees(n);
    let (decay, decay_error) = match decay_fit(&spectrum, &ideal_spectrum, low..=high) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let stationarity =
        stationarity_test(&samples, analysis.splits, analysis.metric, analysis.seed)?;
    let xeb = xeb_estimate(&samples, &ideal)?;

    let report = RunReport {
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            circuit_seed: match &config.circuit {
                CircuitSource::Generate { seed, .. } => Some(*seed),
                CircuitSource::File { .. } => circuit.generator().map(|g| g.seed),
            },
            simulation_seed: config.simulation.seed,
            analysis_seed: analysis.seed,
        },
        config: config.clone(),
        n,
        sample_count: samples.len(),
        stationarity,
        spectrum,
        ideal_spectrum,
        decay,
        decay_error,
        xeb,
        outputs: OutputFiles {
            circuit: CIRCUIT_FILE.into(),
            samples: SAMPLES_FILE.into(),
            spectrum: SPECTRUM_FILE.into(),
        },
    };
    emit_report(&report, out_dir.join(REPORT_FILE))?;
    Ok(report)
}
