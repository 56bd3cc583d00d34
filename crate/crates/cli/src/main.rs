//! `nisqlab`: one subcommand per pipeline stage. Stages exchange data only
//! through files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use nisqlab::board::{self, Color};
use nisqlab::chaostats::{
    decay_fit_estimates, estimate_degree_profile, stationarity_test, xeb_estimate, Estimator,
    Metric,
};
use nisqlab::io::{self as nio, Backend, ColumnMapping, RunConfig};
use nisqlab::noise::{
    corrupt_samples, corrupt_samples_scheduled, DistributionNoise, GateNoise, NoiseSchedule,
};
use nisqlab::qsim::{
    generate_random_circuit, ideal_distribution, run_density_matrix, sample_trajectories,
    GatesetConfig, SingleQubitGate, TwoQubitGate,
};
use nisqlab::walsh::{degree_profile, spectrum_of};

#[derive(Parser)]
#[command(
    name = "nisqlab",
    version,
    about = "Noisy random-circuit sampling and spectral statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random layered circuit on a qubit grid.
    GenCircuit(GenCircuit),
    /// Sample a circuit with the ideal, density-matrix or trajectory backend.
    Simulate(Simulate),
    /// Flip sample bits at a constant or scheduled rate.
    Corrupt(Corrupt),
    /// Degree weights, estimated from samples or exact from a circuit.
    Spectrum(Spectrum),
    /// Compare the two halves of a sample stream against random splits.
    Stationarity(Stationarity),
    /// Fit the log ratio of two spectra against degree.
    Decay(Decay),
    /// Linear cross-entropy fidelity of samples against a circuit.
    Xeb(Xeb),
    /// Complete, print and reconstruct a parity board.
    BoardDemo(BoardDemo),
    /// Run a full pipeline from a TOML config.
    Report(Report),
    /// Convert a third-party bitstring dump into a sample file.
    Convert(Convert),
}

#[derive(Args)]
struct GenCircuit {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Total layer count; layers alternate single-qubit and two-qubit.
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    seed: u64,
    /// Single-qubit gate names to draw from.
    #[arg(long, value_delimiter = ',', default_value = "sqrt_x,sqrt_y,sqrt_w")]
    gates: Vec<String>,
    #[arg(long, default_value = "cz")]
    two_qubit: String,
    /// Allow a qubit to receive the same gate in consecutive layers.
    #[arg(long)]
    allow_repeats: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    /// Depolarizing rate after single-qubit gates.
    #[arg(long, default_value_t = 0.0)]
    r1: f64,
    /// Depolarizing rate per qubit after two-qubit gates.
    #[arg(long, default_value_t = 0.0)]
    r2: f64,
    /// Symmetric readout flip probability.
    #[arg(long, default_value_t = 0.0)]
    readout: f64,
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value = "ideal")]
    backend: String,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    noise: NoiseArgs,
    /// JSON noise schedule applied across the stream.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("rate").required(true).args(["eps", "schedule"])))]
struct Corrupt {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    eps: Option<f64>,
    /// JSON bit-flip schedule.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "circuit"])))]
struct Spectrum {
    /// Sample file to estimate from.
    #[arg(long, requires = "seed")]
    input: Option<PathBuf>,
    /// Circuit whose exact ideal spectrum is written.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Circuit whose ideal spectrum fills the ratio column.
    #[arg(long, requires = "input")]
    reference_circuit: Option<PathBuf>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value = "cross-split")]
    estimator: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Stationarity {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 999)]
    splits: usize,
    #[arg(long, default_value = "l2")]
    metric: String,
    #[arg(long)]
    seed: u64,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Decay {
    /// Spectrum CSV of the noisy samples.
    #[arg(long)]
    noisy: PathBuf,
    /// Spectrum CSV of the reference.
    #[arg(long)]
    reference: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_degree: usize,
    /// Defaults to the last degree both files share.
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Xeb {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("board_seed").required(true).args(["seed", "bottom"])))]
struct BoardDemo {
    #[arg(long, default_value_t = 7)]
    rows: usize,
    #[arg(long, default_value_t = 9)]
    cols: usize,
    /// Color the bottom row and left column at random.
    #[arg(long)]
    seed: Option<u64>,
    /// Bottom row as R/B characters, left to right.
    #[arg(long, requires = "left")]
    bottom: Option<String>,
    /// Left column as R/B characters, bottom to top.
    #[arg(long, requires = "bottom")]
    left: Option<String>,
    /// Rebuild the board from this row (0 = bottom) and `--from-col`.
    #[arg(long, requires = "from_col")]
    from_row: Option<usize>,
    #[arg(long, requires = "from_row")]
    from_col: Option<usize>,
    /// Print the completion stages.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct Report {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Convert {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    n: usize,
    /// Field separator; whitespace when omitted.
    #[arg(long)]
    delimiter: Option<char>,
    /// Zero-based field holding the bits.
    #[arg(long, default_value_t = 0)]
    column: usize,
    #[arg(long, default_value_t = 0)]
    skip_lines: usize,
    /// The dump writes the highest bit first.
    #[arg(long)]
    msb_first: bool,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Lib(nisqlab::Error),
}

impl From<nisqlab::Error> for Failure {
    fn from(e: nisqlab::Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn read_schedule(path: &Path) -> Result<NoiseSchedule, Failure> {
    let text = fs::read_to_string(path).map_err(|e| nisqlab::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Lib(nisqlab::Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    })
}

fn gen_circuit(a: GenCircuit) -> CmdResult {
    let single = a
        .gates
        .iter()
        .map(|g| SingleQubitGate::from_name(g))
        .collect::<Result<Vec<_>, _>>()?;
    let gateset = GatesetConfig {
        single,
        two: TwoQubitGate::from_name(&a.two_qubit)?,
        avoid_repeats: !a.allow_repeats,
    };
    let c = generate_random_circuit(a.rows, a.cols, a.depth, &gateset, a.seed)?;
    nio::write_circuit(&c, &a.out)?;
    println!(
        "{} qubits, {} layers, {} gates -> {}",
        c.n(),
        c.layers().len(),
        c.gate_count(),
        a.out.display()
    );
    Ok(())
}

fn simulate(a: Simulate) -> CmdResult {
    let c = nio::parse_circuit(&a.circuit)?;
    let backend: Backend = a.backend.parse()?;
    let noise = GateNoise::new(a.noise.r1, a.noise.r2, a.noise.readout)?;
    let schedule = a.schedule.as_deref().map(read_schedule).transpose()?;
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let mut s = match backend {
        Backend::Trajectories => {
            sample_trajectories(&c, &noise, schedule.as_ref(), a.samples, a.seed)?
        }
        Backend::Ideal | Backend::Density => {
            let p = if backend == Backend::Ideal {
                if noise.r1 != 0.0 || noise.r2 != 0.0 {
                    return Err(usage("the ideal backend has no gate noise; use --backend density or trajectories"));
                }
                let ideal = ideal_distribution(&c)?;
                nisqlab::noise::apply_bitflip_noise(
                    &ideal,
                    DistributionNoise::new(noise.eps_readout)?,
                )
            } else {
                run_density_matrix(&c, &noise)?
            };
            let mut s = p.sample(a.samples, a.seed);
            s.meta.source = Some(backend.to_string());
            if let Some(schedule) = &schedule {
                s = corrupt_samples_scheduled(&s, schedule, a.seed)?;
            }
            s
        }
    };
    s.meta.circuit = Some(a.circuit.display().to_string());
    nio::write_samples(&s, &a.out)?;
    println!(
        "{} samples of {} bits -> {}",
        s.len(),
        s.n(),
        a.out.display()
    );
    Ok(())
}

fn corrupt(a: Corrupt) -> CmdResult {
    let s = nio::parse_samples(&a.input)?;
    let out = match (a.eps, &a.schedule) {
        (Some(eps), None) => corrupt_samples(&s, DistributionNoise::new(eps)?, a.seed),
        (None, Some(path)) => corrupt_samples_scheduled(&s, &read_schedule(path)?, a.seed)?,
        _ => return Err(usage("give exactly one of --eps or --schedule")),
    };
    nio::write_samples(&out, &a.out)?;
    println!("{} samples -> {}", out.len(), a.out.display());
    Ok(())
}

fn spectrum(a: Spectrum) -> CmdResult {
    let rows = match (&a.input, &a.circuit) {
        (Some(input), None) => {
            let s = nio::parse_samples(input)?;
            let seed = a.seed.ok_or_else(|| usage("--input needs --seed"))?;
            let estimator: Estimator = a.estimator.parse()?;
            let est = estimate_degree_profile(&s, a.max_degree.unwrap_or(s.n()), estimator, seed)?;
            let reference = match &a.reference_circuit {
                Some(path) => Some(degree_profile(&spectrum_of(&ideal_distribution(
                    &nio::parse_circuit(path)?,
                )?))),
                None => None,
            };
            nio::estimate_rows(&est, reference.as_ref())
        }
        (None, Some(circuit)) => {
            let c = nio::parse_circuit(circuit)?;
            let mut p = degree_profile(&spectrum_of(&ideal_distribution(&c)?));
            if let Some(d) = a.max_degree {
                if d > p.n {
                    return Err(usage(format!("--max-degree {d} exceeds bit count {}", p.n)));
                }
                p.weights.truncate(d + 1);
            }
            nio::spectrum_rows(&p)
        }
        _ => return Err(usage("give exactly one of --input or --circuit")),
    };
    nio::emit_spectrum_csv(&rows, &a.out)?;
    for r in &rows {
        println!("W_{} = {}", r.degree, r.weight);
    }
    Ok(())
}

fn stationarity(a: Stationarity) -> CmdResult {
    let s = nio::parse_samples(&a.input)?;
    if s.meta.unordered {
        eprintln!(
            "warning: {} is marked ordered=false; the test assumes file order is stream order",
            a.input.display()
        );
    }
    let metric: Metric = a.metric.parse()?;
    let r = stationarity_test(&s, a.splits, metric, a.seed)?;
    println!(
        "observed {} distance {:.6e}, p = {:.4} over {} splits{}",
        r.metric,
        r.observed_distance,
        r.p_value,
        r.splits,
        if r.dropped_samples > 0 {
            " (last sample dropped)"
        } else {
            ""
        }
    );
    if let Some(out) = &a.out {
        nio::emit_report(&r, out)?;
    }
    Ok(())
}

fn decay(a: Decay) -> CmdResult {
    let noisy = nio::rows_to_estimate(&nio::read_spectrum_csv(&a.noisy)?)?;
    let mut reference = nio::rows_to_estimate(&nio::read_spectrum_csv(&a.reference)?)?;
    let top = noisy.max_degree().min(reference.max_degree());
    // The files carry no bit count; compare over the shared degrees.
    reference.n = noisy.n;
    let mut noisy = noisy;
    noisy.weights.truncate(top + 1);
    noisy.stderr.truncate(top + 1);
    reference.weights.truncate(top + 1);
    reference.stderr.truncate(top + 1);
    let high = a.max_degree.unwrap_or(top);
    let fit = decay_fit_estimates(&noisy, &reference, a.min_degree..=high)?;
    println!(
        "slope {:.6} intercept {:.6} r^2 {:.4} effective rho {:.6} over degrees {:?}",
        fit.slope, fit.intercept, fit.r_squared, fit.effective_rho, fit.degrees
    );
    if !fit.excluded.is_empty() {
        println!("below the weight floor: {:?}", fit.excluded);
    }
    if let Some(out) = &a.out {
        nio::emit_report(&fit, out)?;
    }
    Ok(())
}

fn xeb(a: Xeb) -> CmdResult {
    let s = nio::parse_samples(&a.input)?;
    let c = nio::parse_circuit(&a.circuit)?;
    let e = xeb_estimate(&s, &ideal_distribution(&c)?)?;
    println!(
        "xeb fidelity {:.6} ± {:.6} ({} samples)",
        e.fidelity, e.stderr, e.sample_count
    );
    Ok(())
}

fn parse_colors(text: &str, what: &str) -> Result<Vec<Color>, Failure> {
    text.chars()
        .map(|c| {
            Color::from_char(c).ok_or_else(|| usage(format!("{what}: expected R or B, got {c:?}")))
        })
        .collect()
}

fn board_demo(a: BoardDemo) -> CmdResult {
    let (bottom, left) = match (a.seed, &a.bottom, &a.left) {
        (Some(seed), None, None) => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pick = || {
                if rng.gen::<bool>() {
                    Color::Red
                } else {
                    Color::Blue
                }
            };
            let bottom: Vec<Color> = (0..a.cols).map(|_| pick()).collect();
            let mut left = vec![bottom[0]];
            left.extend((1..a.rows).map(|_| pick()));
            (bottom, left)
        }
        (None, Some(b), Some(l)) => (parse_colors(b, "--bottom")?, parse_colors(l, "--left")?),
        _ => return Err(usage("give either --seed or both --bottom and --left")),
    };
    let (b, trace) = board::complete_with_trace(&bottom, &left)?;
    println!("{b}");
    println!(
        "{}x{} board, {} free seed cells, {} valid boards, valid: {}",
        b.rows(),
        b.cols(),
        board::free_cells(b.rows(), b.cols()),
        board::count_valid(b.rows(), b.cols())
            .map_or("too many to count".into(), |c| c.to_string()),
        board::validate(&b)
    );
    if a.trace {
        for (t, cells) in trace.iter().enumerate() {
            println!("t={t}: {cells:?}");
        }
    }
    if let (Some(r), Some(c)) = (a.from_row, a.from_col) {
        if r >= b.rows() || c >= b.cols() {
            return Err(usage(format!("row {r} / column {c} outside the board")));
        }
        let rebuilt =
            board::reconstruct_from((r, &b.row(r)), (c, &b.column(c)), b.rows(), b.cols())?;
        println!(
            "reconstructed from row {r} and column {c}: {}",
            if rebuilt == b {
                "identical"
            } else {
                "DIFFERENT"
            }
        );
    }
    Ok(())
}

fn report(a: Report) -> CmdResult {
    let config = RunConfig::load(&a.config)?;
    let base = a.config.parent().unwrap_or(Path::new("."));
    let r = nio::run_pipeline(&config, base, &a.out_dir)?;
    println!("config {}", r.provenance.config_hash);
    println!(
        "stationarity: {} distance {:.6e}, p = {:.4}",
        r.stationarity.metric, r.stationarity.observed_distance, r.stationarity.p_value
    );
    match &r.decay {
        Some(f) => println!(
            "decay: r^2 {:.4}, effective rho {:.6}",
            f.r_squared, f.effective_rho
        ),
        None => println!(
            "decay: {}",
            r.decay_error.as_deref().unwrap_or("not fitted")
        ),
    }
    println!("xeb: {:.6} ± {:.6}", r.xeb.fidelity, r.xeb.stderr);
    println!("outputs in {}", a.out_dir.display());
    Ok(())
}

fn convert(a: Convert) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(|e| nisqlab::Error::Io {
        path: a.input.clone(),
        source: e,
    })?;
    let mapping = ColumnMapping {
        delimiter: a.delimiter,
        column: a.column,
        skip_lines: a.skip_lines,
        msb_first: a.msb_first,
    };
    let s = nio::convert_with_mapping(&text, a.n, &mapping, &a.input)?;
    nio::write_samples(&s, &a.out)?;
    println!("{} samples -> {}", s.len(), a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::GenCircuit(a) => gen_circuit(a),
        Command::Simulate(a) => simulate(a),
        Command::Corrupt(a) => corrupt(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Stationarity(a) => stationarity(a),
        Command::Decay(a) => decay(a),
        Command::Xeb(a) => xeb(a),
        Command::BoardDemo(a) => board_demo(a),
        Command::Report(a) => report(a),
        Command::Convert(a) => convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}
