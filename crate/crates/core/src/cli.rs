//! Command-line driver. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bases::{
    default_family, emit_circuit, required_bases, BasisId, Family, MeasurementMode,
};
use crate::counts::{read_counts, write_counts, CountsFile};
use crate::error::{Error, Result};
use crate::harness::{
    bench_run, bootstrap_ci, simulate_counts, write_csv, BenchConfig, NoiseModel, StateFamily,
};
use crate::measure::DEFAULT_SHOTS;
use crate::reconstruct::{reconstruct, EstimateJson, ReconstructionOptions};
use crate::state::{fidelity, PureState};

#[derive(Parser, Debug)]
#[command(
    name = "puretomo",
    version,
    about = "Inductive pure-state estimation for n-qubit systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample counts of a state in every basis a reconstruction needs.
    Simulate(SimulateArgs),
    /// Estimate a state from a counts file.
    Reconstruct(ReconstructArgs),
    /// Monte Carlo benchmark over random or named states.
    Bench(BenchArgs),
    /// List the measurement bases and their circuits.
    Bases(BasesArgs),
    /// Bootstrap band for the fidelity of a counts file against a target.
    Bootstrap(BootstrapArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// haar, separable, phi1..phi4 (ghz, bell), or a state JSON file.
    #[arg(long)]
    state: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "local")]
    mode: MeasurementMode,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// White-noise weight mixed into every basis.
    #[arg(long)]
    noise_lambda: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Reference state for fidelity: a named state or a state JSON file.
    #[arg(long)]
    target: Option<String>,
    /// Use every sign pattern of the local bases.
    #[arg(long)]
    extra_rows: bool,
    /// Write the estimate JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// TOML file with the same fields as the flags; flags are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Qubit counts: `6`, `2,4,6` or `2..10` (inclusive).
    #[arg(long, default_value = "2..6")]
    n: String,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "local")]
    mode: MeasurementMode,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "haar")]
    states: StateFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    noise_lambda: Option<f64>,
    /// Compose white noise from the preparation gates (named states only).
    #[arg(long)]
    gate_noise: bool,
    /// Force extra rows on or off (default: on for local mode).
    #[arg(long)]
    extra_rows: Option<bool>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON summary destination.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BasesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "local")]
    mode: MeasurementMode,
    /// Print OpenQASM 2.0 for every basis without controlled gates.
    #[arg(long)]
    qasm: bool,
}

#[derive(Args, Debug)]
struct BootstrapArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 200)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    extra_rows: bool,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        // Closed downstream pipe, e.g. `puretomo bases ... | head`.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate_cmd(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Bases(a) => bases_cmd(a),
        Command::Bootstrap(a) => bootstrap_cmd(a),
    }
}

/// A named state, `haar[:seed]`, `separable[:seed]`, or a state JSON path.
fn resolve_state(arg: &str, n: Option<usize>, seed: u64) -> Result<PureState> {
    let (name, seed) = match arg.split_once(':') {
        Some((name, s)) => (
            name,
            s.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad seed in '{arg}'")))?,
        ),
        None => (arg, seed),
    };
    if let Ok(family) = name.parse::<StateFamily>() {
        let n = n.ok_or_else(|| Error::InvalidConfig(format!("state '{name}' needs --n")))?;
        return family.generate(n, seed);
    }
    let state: PureState = serde_json::from_str(&std::fs::read_to_string(arg)?)?;
    if let Some(n) = n {
        if state.n() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: state.n(),
            });
        }
    }
    Ok(state)
}

fn mode_of(file: &CountsFile) -> MeasurementMode {
    if file
        .records
        .iter()
        .any(|r| matches!(r.basis(), BasisId::Entangled { .. }))
    {
        MeasurementMode::Entangled
    } else {
        MeasurementMode::Local
    }
}

fn options_for(file: &CountsFile, extra_rows: bool) -> ReconstructionOptions {
    ReconstructionOptions::new(mode_of(file), file.family.clone()).with_extra_rows(extra_rows)
}

fn simulate_cmd(a: SimulateArgs) -> Result<()> {
    let psi = resolve_state(&a.state, a.n, a.seed)?;
    let family = default_family(a.m)?;
    let records = simulate_counts(&psi, a.mode, &family, a.shots, a.noise_lambda, a.seed)?;
    let file = CountsFile::new(psi.n(), family, records)?;
    write_counts(&file, &a.out)?;
    println!(
        "wrote {} bases x {} shots for n={} to {}",
        file.records.len(),
        a.shots,
        psi.n(),
        a.out.display()
    );
    Ok(())
}

fn reconstruct_cmd(a: ReconstructArgs) -> Result<()> {
    let file = read_counts(&a.input)?;
    let opts = options_for(&file, a.extra_rows);
    let (est, diag) = reconstruct(&file.records, file.n, &opts)?;
    let fid = a
        .target
        .as_deref()
        .map(|t| resolve_state(t, Some(file.n), 0).and_then(|target| fidelity(&target, &est)))
        .transpose()?;
    let json = serde_json::to_string_pretty(&EstimateJson::new(&est, &diag, fid))?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, json)?;
            println!("estimate written to {}", path.display());
            if let Some(f) = fid {
                println!("fidelity {f:.6}");
            }
            println!(
                "solved {} phases, {} null branches, {} fallbacks",
                diag.solved(),
                diag.null_branches,
                diag.fallbacks
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidConfig(format!("bad qubit range '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(num).collect()
}

fn bench_config(a: &BenchArgs) -> Result<BenchConfig> {
    if let Some(path) = &a.config {
        return BenchConfig::from_toml(&std::fs::read_to_string(path)?);
    }
    let mut cfg = BenchConfig::new(parse_range(&a.n)?, a.m, a.mode, a.states);
    cfg.shots = a.shots;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.noise_lambda = a.noise_lambda;
    cfg.noise = a.gate_noise.then(NoiseModel::default_gates);
    cfg.extra_rows = a.extra_rows;
    cfg.validate()?;
    Ok(cfg)
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let cfg = bench_config(&a)?;
    let res = bench_run(&cfg)?;
    match &a.csv {
        Some(path) => write_csv(&res.rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(&res.rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &a.json {
        std::fs::write(path, res.to_json()?)?;
    }
    eprintln!(
        "{:>4} {:>9} {:>9} {:>9} {:>9}",
        "n", "median", "iqr", "mean", "secs"
    );
    for s in &res.per_n {
        eprintln!(
            "{:>4} {:>9.4} {:>9.4} {:>9.4} {:>9.2}",
            s.n, s.median, s.iqr, s.mean, s.runtime_secs
        );
    }
    Ok(())
}

fn bases_cmd(a: BasesArgs) -> Result<()> {
    let family: Family = default_family(a.m)?;
    let mut out = std::io::stdout().lock();
    for id in required_bases(a.n, a.m, a.mode) {
        let circuit = emit_circuit(id, a.n, &family)?;
        if a.qasm {
            match circuit.to_qasm() {
                Some(q) => writeln!(out, "// {id}\n{q}")?,
                None => writeln!(
                    out,
                    "// {id}: multi-controlled gates, no OpenQASM 2.0 form\n"
                )?,
            }
        } else {
            writeln!(out, "{}", circuit.to_text())?;
        }
    }
    Ok(())
}

fn bootstrap_cmd(a: BootstrapArgs) -> Result<()> {
    let file = read_counts(&a.input)?;
    let target = resolve_state(&a.target, Some(file.n), 0)?;
    let opts = options_for(&file, a.extra_rows);
    let res = bootstrap_ci(&file.records, file.n, &opts, a.resamples, a.seed, &target)?;
    println!("{}", serde_json::to_string_pretty(&res)?);
    Ok(())
}

/// Reads a counts file and reconstructs it; used by the examples.
pub fn reconstruct_file(path: &Path, extra_rows: bool) -> Result<(PureState, CountsFile)> {
    let file = read_counts(path)?;
    let (est, _) = reconstruct(&file.records, file.n, &options_for(&file, extra_rows))?;
    Ok((est, file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("6").unwrap(), vec![6]);
        assert_eq!(parse_range("2, 4").unwrap(), vec![2, 4]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(cli_main(["puretomo", "frobnicate"]), 1);
        assert_eq!(cli_main(["puretomo", "bases", "--bogus"]), 1);
        assert_eq!(cli_main(["puretomo", "--help"]), 0);
    }
}
