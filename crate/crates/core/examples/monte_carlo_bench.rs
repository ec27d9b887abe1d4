// Median fidelity over random states. Pass `full` for 100 trials up to n=10.

use puretomo::bases::MeasurementMode;
use puretomo::harness::{bench_run, write_csv, BenchConfig, StateFamily};

pub fn run_example() -> puretomo::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let (n_max, trials) = if full { (10, 100) } else { (5, 20) };
    for (mode, ns) in [
        (MeasurementMode::Local, (2..=n_max).collect::<Vec<_>>()),
        (MeasurementMode::Entangled, (2..=n_max.min(6)).collect()),
    ] {
        for m in 2..=4 {
            let mut cfg = BenchConfig::new(ns.clone(), m, mode, StateFamily::Haar);
            cfg.trials = trials;
            cfg.seed = 1;
            let res = bench_run(&cfg)?;
            let line: Vec<String> = res
                .per_n
                .iter()
                .map(|s| format!("{}:{:.3}", s.n, s.median))
                .collect();
            println!("{mode} m={m}  {}", line.join("  "));
            if full && m == 2 && mode == MeasurementMode::Local {
                write_csv(&res.rows, std::fs::File::create("bench_local_m2.csv")?)?;
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
