use std::fs;
use std::path::Path;
use std::process::{Command, Output};

/// Runs the binary in `dir` with whitespace-separated arguments.
fn nisqlab(args: &str, dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nisqlab"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &str, dir: &Path) -> String {
    let out = nisqlab(args, dir);
    assert!(
        out.status.success(),
        "`{args}` failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &str, dir: &Path) -> i32 {
    nisqlab(args, dir).status.code().unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sample_and_analyse_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        "gen-circuit --rows 2 --cols 3 --depth 12 --seed 3 --out c.json",
        d,
    );
    ok(
        "simulate --circuit c.json --backend trajectories --samples 20000 --seed 1 \
         --r1 0.01 --r2 0.02 --out s.txt",
        d,
    );
    let samples = fs::read_to_string(d.join("s.txt")).unwrap();
    let data = samples.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data, 20_000);

    ok(
        "spectrum --input s.txt --seed 2 --reference-circuit c.json --out noisy.csv",
        d,
    );
    ok("spectrum --circuit c.json --out ideal.csv", d);
    let csv = fs::read_to_string(d.join("noisy.csv")).unwrap();
    assert!(csv.starts_with("degree,weight,stderr,ratio\n"));
    assert_eq!(csv.lines().count(), 8);

    ok(
        "decay --noisy noisy.csv --reference ideal.csv --out fit.json",
        d,
    );
    let rho = json(d.join("fit.json"))["effective_rho"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 1.0);

    let text = ok("stationarity --input s.txt --splits 199 --seed 4", d);
    assert!(text.contains("p"), "{text}");
    ok("xeb --input s.txt --circuit c.json", d);

    ok(
        "corrupt --input s.txt --eps 0.1 --seed 5 --out flipped.txt",
        d,
    );
    fs::write(
        d.join("drift.json"),
        r#"{"kind": "linear", "start": 0.0, "end": 0.3, "target": "bit_flip"}"#,
    )
    .unwrap();
    ok(
        "corrupt --input s.txt --schedule drift.json --seed 5 --out drift.txt",
        d,
    );
    ok(
        "stationarity --input drift.txt --splits 199 --seed 4 --out st.json",
        d,
    );
    let st = json(d.join("st.json"));
    assert!(st["p_value"].as_f64().unwrap() <= 0.01, "{st}");

    let shuffled = samples.replace("# ordered=true", "# ordered=false");
    fs::write(d.join("shuffled.txt"), shuffled).unwrap();
    let out = nisqlab("stationarity --input shuffled.txt --splits 99 --seed 4", d);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("ordered=false"));
}

#[test]
fn report_replays_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("run.toml"),
        "[circuit]\nrows = 2\ncols = 2\ndepth = 8\nseed = 1\n\n\
         [simulation]\nbackend = \"density\"\nsamples = 5000\nseed = 2\n\n\
         [noise]\nr1 = 0.01\nr2 = 0.01\n\n[analysis]\nseed = 3\nsplits = 99\n",
    )
    .unwrap();
    ok("report --config run.toml --out-dir a", d);
    ok("report --config run.toml --out-dir b", d);
    for f in ["circuit.json", "samples.txt", "spectrum.csv", "report.json"] {
        let a = fs::read(d.join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn board_demo_prints_a_valid_board() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let text = ok(
        "board-demo --rows 3 --cols 4 --bottom RBBR --left RRB --trace",
        d,
    );
    assert!(text.contains("valid"), "{text}");
    let seeded = "board-demo --seed 1 --from-row 3 --from-col 4";
    assert_eq!(ok(seeded, d), ok(seeded, d));
    // corner cell disagrees between row and column
    assert_eq!(
        code("board-demo --bottom RB --left BB --rows 2 --cols 2", d),
        2
    );
}

#[test]
fn convert_reads_foreign_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("dump.csv"), "shot,bits\n0,011\n1,100\n").unwrap();
    ok(
        "convert --input dump.csv --n 3 --delimiter , --column 1 --skip-lines 1 \
         --msb-first --out s.txt",
        d,
    );
    let text = fs::read_to_string(d.join("s.txt")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data, ["110", "001"]);
}

#[test]
fn exit_codes_distinguish_usage_data_and_io_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code("--help", d), 0);
    assert_eq!(code("--version", d), 0);
    assert_eq!(code("", d), 1);
    assert_eq!(code("simulate --circuit c.json", d), 1);
    assert_eq!(code("corrupt --input s.txt --seed 1 --out o.txt", d), 1);
    assert_eq!(code("stationarity --input missing.txt --seed 1", d), 3);

    fs::write(d.join("bad.txt"), "# n=3\n010\n0120\n").unwrap();
    let bad = "stationarity --input bad.txt --seed 1";
    assert_eq!(code(bad, d), 2);
    let stderr = String::from_utf8(nisqlab(bad, d).stderr).unwrap();
    assert!(stderr.contains('3'), "{stderr}");

    ok(
        "gen-circuit --rows 3 --cols 4 --depth 4 --seed 1 --out big.json",
        d,
    );
    assert_eq!(
        code(
            "simulate --circuit big.json --backend density --samples 10 --seed 1 --out x.txt",
            d
        ),
        2
    );
    assert_eq!(
        code(
            "gen-circuit --rows 5 --cols 5 --depth 4 --seed 1 --out huge.json",
            d
        ),
        2
    );
}
