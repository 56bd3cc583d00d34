//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its PASS/FAIL line whether or not output is captured.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nisqlab::board::{
    complete_from_seed, count_valid, count_valid_brute_force, reconstruct_from, validate, Board,
    Color,
};
use nisqlab::boolsim::{evaluate, output_distribution, BitSource, BooleanCircuit, Gate, InputBit};
use nisqlab::chaostats::{
    decay_fit, estimate_degree_profile, ks_uniformity, stationarity_test, Estimator, Metric,
};
use nisqlab::io::{
    run_pipeline, RunConfig, CIRCUIT_FILE, REPORT_FILE, SAMPLES_FILE, SPECTRUM_FILE,
};
use nisqlab::noise::{
    apply_bitflip_noise, corrupt_samples_scheduled, DistributionNoise, GateNoise, NoiseSchedule,
    ScheduleTarget,
};
use nisqlab::qsim::{
    generate_random_circuit, ideal_distribution, run_density_matrix, sample_ideal,
    sample_trajectories, GatesetConfig, StateVector,
};
use nisqlab::walsh::{degree_profile, fwht, spectrum_of};
use nisqlab::{empirical_distribution, tv_distance, BitString, OutcomeDistribution};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs as f64, || {
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> OutcomeDistribution {
    let w = (0..1usize << n).map(|_| rng.gen::<f64>().powi(3)).collect();
    OutcomeDistribution::from_weights(n, w).unwrap()
}

/// `E_p[χ_S]` straight from the definition.
fn naive_coefficient(p: &[f64], subset: usize) -> f64 {
    p.iter()
        .enumerate()
        .map(|(x, v)| {
            if (x & subset).count_ones() % 2 == 0 {
                *v
            } else {
                -*v
            }
        })
        .sum()
}

fn spectral_noise_theorem() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        let p = random_distribution(&mut rng, n);
        let before: Vec<f64> = (0..1 << n)
            .map(|s| naive_coefficient(p.probabilities(), s))
            .collect();
        for eps in [0.01, 0.1, 0.3] {
            let noisy = apply_bitflip_noise(&p, DistributionNoise::new(eps).unwrap());
            for (s, &c) in before.iter().enumerate() {
                let expected = (1.0 - 2.0 * eps).powi(s.count_ones() as i32) * c;
                let got = naive_coefficient(noisy.probabilities(), s);
                worst = worst.max((got - expected).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("coefficient error {worst:e}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!("max coefficient error {worst:.1e}"))
}

fn transform_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = 1 + trial % 8;
        let p = random_distribution(&mut rng, n);
        let density: Vec<f64> = p
            .probabilities()
            .iter()
            .map(|v| v * (1 << n) as f64)
            .collect();
        let spectrum = fwht(&density).unwrap();
        for s in 0..1 << n {
            worst = worst
                .max((spectrum.coefficient(s) - naive_coefficient(p.probabilities(), s)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("fwht error {worst:e}"))?;
    let mut parseval: f64 = 0.0;
    for trial in 0..1000 {
        let n = 1 + trial % 12;
        let p = random_distribution(&mut rng, n);
        let collision: f64 = p.probabilities().iter().map(|v| v * v).sum();
        let mass = spectrum_of(&p).parseval_mass();
        parseval = parseval.max((mass - (1 << n) as f64 * collision).abs());
    }
    ensure(parseval <= 1e-9, || format!("Parseval error {parseval:e}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "fwht error {worst:.1e}, Parseval error {parseval:.1e}"
    ))
}

fn degree_decay() -> Outcome {
    let start = Instant::now();
    let c = generate_random_circuit(3, 4, 12, &GatesetConfig::default(), 1)
        .map_err(|e| e.to_string())?;
    let noise = GateNoise::depolarizing(0.01).unwrap();
    let samples = sample_trajectories(&c, &noise, None, 1_000_000, 1).map_err(|e| e.to_string())?;
    let noisy = estimate_degree_profile(&samples, 8, Estimator::CrossSplit, 1)
        .map_err(|e| e.to_string())?;
    let ideal = degree_profile(&spectrum_of(&ideal_distribution(&c).unwrap()));
    let fit = decay_fit(&noisy, &ideal, 1..=8).map_err(|e| e.to_string())?;
    let detail = format!(
        "degrees {:?} (excluded {:?}), r² {:.3}, rho {:.3}",
        fit.degrees, fit.excluded, fit.r_squared, fit.effective_rho
    );
    ensure(fit.is_monotone_nonincreasing(3.0), || {
        format!("not monotone: {:?}", fit.log_ratios)
    })?;
    ensure(fit.r_squared >= 0.9, || detail.clone())?;
    ensure(fit.effective_rho > 0.0 && fit.effective_rho < 1.0, || {
        detail.clone()
    })?;
    within(start.elapsed(), 15 * 60)?;
    Ok(detail)
}

fn stationarity_calibration() -> Outcome {
    let start = Instant::now();
    let c = generate_random_circuit(2, 3, 12, &GatesetConfig::default(), 2).unwrap();
    let schedule = NoiseSchedule::constant(0.02, ScheduleTarget::GateRates).unwrap();
    let base = GateNoise::noiseless();
    let p_values = (0..200u64)
        .map(|trial| {
            let s = sample_trajectories(&c, &base, Some(&schedule), 2_000, 10_000 + trial)?;
            Ok(stationarity_test(&s, 999, Metric::L2, trial)?.p_value)
        })
        .collect::<nisqlab::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let ks = ks_uniformity(&p_values).map_err(|e| e.to_string())?;
    let detail = format!("KS D {:.4}, p {:.3}", ks.statistic, ks.p_value);
    ensure(ks.p_value > 0.01, || detail.clone())?;
    within(start.elapsed(), 10 * 60)?;
    Ok(detail)
}

fn stationarity_power() -> Outcome {
    let start = Instant::now();
    let c = generate_random_circuit(3, 4, 12, &GatesetConfig::default(), 3).unwrap();
    let p = ideal_distribution(&c).unwrap();
    let drift = NoiseSchedule::linear(0.01, 0.05, ScheduleTarget::BitFlip).unwrap();
    let trials = 100u64;
    let mut detected = 0;
    for trial in 0..trials {
        let s = corrupt_samples_scheduled(&p.sample(100_000, trial), &drift, trial).unwrap();
        let r = stationarity_test(&s, 999, Metric::L2, trial).map_err(|e| e.to_string())?;
        detected += u64::from(r.p_value < 0.01);
    }
    let detail = format!("{detected}/{trials} trials with p < 0.01");
    ensure(detected * 100 >= 95 * trials, || detail.clone())?;
    within(start.elapsed(), 10 * 60)?;
    Ok(detail)
}

fn backend_cross_validation() -> Outcome {
    let c = generate_random_circuit(1, 3, 12, &GatesetConfig::default(), 4).unwrap();
    let noise = GateNoise::depolarizing(0.05).unwrap();
    let exact = run_density_matrix(&c, &noise).map_err(|e| e.to_string())?;
    let shots = sample_trajectories(&c, &noise, None, 100_000, 4).map_err(|e| e.to_string())?;
    let tv = tv_distance(&empirical_distribution(&shots).unwrap(), &exact).unwrap();
    ensure(tv < 0.01, || format!("density vs trajectories TV {tv}"))?;

    let mut worst: f64 = 0.0;
    for (rows, cols, seed) in [(1, 3, 4), (2, 3, 5), (2, 5, 6)] {
        let c = generate_random_circuit(rows, cols, 14, &GatesetConfig::default(), seed).unwrap();
        let dm = run_density_matrix(&c, &GateNoise::noiseless()).unwrap();
        let ideal = ideal_distribution(&c).unwrap();
        for (a, b) in dm.probabilities().iter().zip(ideal.probabilities()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-9, || {
        format!("zero-noise density vs ideal {worst:e}")
    })?;
    Ok(format!("TV {tv:.4}, zero-noise deviation {worst:.1e}"))
}

fn measurement_rule() -> Outcome {
    let psi =
        StateVector::from_amplitudes(1, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
            .map_err(|e| e.to_string())?;
    let p = psi.measurement_distribution();
    let (p0, p1) = (p.probabilities()[0], p.probabilities()[1]);
    // 0.6² and 0.8² are not representable; allow one rounding step.
    ensure(
        (p0 - 0.36).abs() <= f64::EPSILON && (p1 - 0.64).abs() <= f64::EPSILON,
        || format!("p(0) = {p0}, p(1) = {p1}"),
    )?;
    Ok(format!("p(0) = {p0}, p(1) = {p1}"))
}

fn board_from_index(rows: usize, cols: usize, bits: u32) -> Board {
    let cells = (0..rows * cols)
        .map(|k| {
            if bits >> k & 1 == 1 {
                Color::Red
            } else {
                Color::Blue
            }
        })
        .collect();
    Board::new(rows, cols, cells).unwrap()
}

fn all_valid(rows: usize, cols: usize) -> Vec<Board> {
    (0..1u32 << (rows * cols))
        .map(|bits| board_from_index(rows, cols, bits))
        .filter(validate)
        .collect()
}

fn board_demo() -> Outcome {
    let start = Instant::now();
    let valid_3x3 = all_valid(3, 3);
    for seed in 0..32u32 {
        let color = |k: u32| {
            if seed >> k & 1 == 1 {
                Color::Red
            } else {
                Color::Blue
            }
        };
        let bottom = [color(0), color(1), color(2)];
        let left = [color(0), color(3), color(4)];
        let board = complete_from_seed(&bottom, &left).map_err(|e| e.to_string())?;
        ensure(validate(&board), || {
            format!("seed {seed}: invalid completion")
        })?;
        let matching = valid_3x3
            .iter()
            .filter(|b| b.row(0) == bottom && b.column(0) == left)
            .count();
        ensure(matching == 1, || {
            format!("seed {seed}: {matching} valid completions")
        })?;
    }
    for (rows, cols, expected) in [(2, 2, 8), (3, 3, 32)] {
        let brute = count_valid_brute_force(rows, cols).map_err(|e| e.to_string())?;
        ensure(
            brute == expected && count_valid(rows, cols).unwrap() == expected,
            || format!("{rows}×{cols}: {brute} valid boards"),
        )?;
    }
    let mut round_trips = 0;
    for (rows, cols) in [(3, 3), (3, 4)] {
        for b in all_valid(rows, cols) {
            for r in 0..rows {
                for c in 0..cols {
                    let back = reconstruct_from((r, &b.row(r)), (c, &b.column(c)), rows, cols)
                        .map_err(|e| e.to_string())?;
                    ensure(back == b, || format!("round trip failed from ({r}, {c})"))?;
                    round_trips += 1;
                }
            }
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!(
        "32 unique completions, {round_trips} reconstructions"
    ))
}

fn boolean_baseline() -> Outcome {
    let and = BooleanCircuit::new(2, vec![Gate::And(0, 1)], vec![2]).unwrap();
    let not = BooleanCircuit::new(1, vec![Gate::Not(0)], vec![1]).unwrap();
    for x in 0..4u32 {
        let out = evaluate(&and, BitString::new(2, x).unwrap()).unwrap();
        ensure(out.bit(0) == (x == 3), || {
            format!("AND({x:02b}) = {}", out.bit(0))
        })?;
    }
    for x in 0..2u32 {
        let out = evaluate(&not, BitString::new(1, x).unwrap()).unwrap();
        ensure(out.bit(0) == (x == 0), || {
            format!("NOT({x}) = {}", out.bit(0))
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inputs = rng.gen_range(1..=10);
        let gates: Vec<Gate> = (0..rng.gen_range(1..=20))
            .map(|k| {
                let wires = inputs + k;
                if rng.gen_bool(0.3) {
                    Gate::Not(rng.gen_range(0..wires))
                } else {
                    Gate::And(rng.gen_range(0..wires), rng.gen_range(0..wires))
                }
            })
            .collect();
        let wires = inputs + gates.len();
        let outputs: Vec<usize> = (0..rng.gen_range(1..=4))
            .map(|_| rng.gen_range(0..wires))
            .collect();
        let bits: Vec<InputBit> = (0..inputs)
            .map(|_| match rng.gen_range(0..3) {
                0 => InputBit::Fixed(rng.gen()),
                _ => InputBit::bernoulli(rng.gen()).unwrap(),
            })
            .collect();
        let c = BooleanCircuit::new(inputs, gates.clone(), outputs.clone()).unwrap();
        let got = output_distribution(&c, &BitSource::new(bits.clone()).unwrap())
            .map_err(|e| e.to_string())?;

        // Truth table: every input assignment, weighted by its probability.
        let mut table = vec![0.0; 1 << outputs.len()];
        for x in 0..1usize << inputs {
            let mut weight = 1.0;
            for (i, b) in bits.iter().enumerate() {
                let one = x >> i & 1 == 1;
                weight *= match *b {
                    InputBit::Fixed(v) => f64::from(u8::from(v == one)),
                    InputBit::Bernoulli { p_one } => {
                        if one {
                            p_one
                        } else {
                            1.0 - p_one
                        }
                    }
                };
            }
            let mut w: Vec<bool> = (0..inputs).map(|i| x >> i & 1 == 1).collect();
            for g in &gates {
                w.push(match *g {
                    Gate::Not(a) => !w[a],
                    Gate::And(a, b) => w[a] && w[b],
                });
            }
            let y: usize = outputs
                .iter()
                .enumerate()
                .map(|(j, &o)| usize::from(w[o]) << j)
                .sum();
            table[y] += weight;
        }
        for (a, b) in got.probabilities().iter().zip(&table) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("truth-table deviation {worst:e}")
    })?;
    Ok(format!("100 circuits, max deviation {worst:.1e}"))
}

const REPLAY_CONFIG: &str = r#"
[circuit]
rows = 3
cols = 4
depth = 12
seed = 1

[simulation]
backend = "trajectories"
samples = 50000
seed = 2

[noise]
r1 = 0.005
r2 = 0.01

[schedule]
kind = "linear"
start = 0.0
end = 0.03
target = "bit_flip"

[analysis]
seed = 3
"#;

fn performance_and_replay() -> Outcome {
    let c = generate_random_circuit(3, 4, 14, &GatesetConfig::default(), 10).unwrap();
    let start = Instant::now();
    let s = sample_ideal(&c, 500_000, 10).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(s.len() == 500_000, || "short sample".into())?;
    within(elapsed, 60)?;

    let config = RunConfig::from_toml_str(REPLAY_CONFIG, Path::new("replay.toml"))
        .map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let dir = tmp.path().join(run);
        run_pipeline(&config, tmp.path(), &dir).map_err(|e| e.to_string())?;
        let bytes: Vec<Vec<u8>> = [CIRCUIT_FILE, SAMPLES_FILE, SPECTRUM_FILE, REPORT_FILE]
            .iter()
            .map(|f| fs::read(dir.join(f)).unwrap())
            .collect();
        outputs.push(bytes);
    }
    ensure(outputs[0] == outputs[1], || {
        "pipeline outputs differ between runs".into()
    })?;
    Ok(format!(
        "5·10^5 ideal samples in {:.2}s, pipeline replay identical",
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("spectral noise theorem", spectral_noise_theorem),
        ("transform correctness", transform_correctness),
        ("degree-weight decay under gate noise", degree_decay),
        ("stationarity calibration", stationarity_calibration),
        ("stationarity power under drift", stationarity_power),
        ("backend cross-validation", backend_cross_validation),
        ("measurement rule", measurement_rule),
        ("board demo", board_demo),
        ("boolean baseline", boolean_baseline),
        ("performance and replay", performance_and_replay),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
