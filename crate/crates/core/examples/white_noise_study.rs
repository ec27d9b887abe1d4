// Fidelity of Bell-pair and GHZ states under preparation noise composed per
// gate, against the noiseless simulation.

use puretomo::bases::MeasurementMode;
use puretomo::harness::{bench_run, BenchConfig, NoiseModel, StateFamily};
use puretomo::measure::{preparation_noise, R_CNOT, R_LOCAL};
use puretomo::state::NamedState;

pub fn run_example() -> puretomo::Result<()> {
    let ns: Vec<usize> = (2..=8).collect();
    for kind in [NamedState::Phi3, NamedState::Phi4] {
        println!("{kind}, local m=3");
        let mut rows = Vec::new();
        for noise in [None, Some(NoiseModel::default_gates())] {
            let mut cfg = BenchConfig::new(
                ns.clone(),
                3,
                MeasurementMode::Local,
                StateFamily::Named(kind),
            );
            cfg.trials = 20;
            cfg.noise = noise;
            rows.push(bench_run(&cfg)?);
        }
        for (clean, noisy) in rows[0].per_n.iter().zip(&rows[1].per_n) {
            let ceiling = 1.0 - preparation_noise(kind, clean.n, R_LOCAL, R_CNOT);
            println!(
                "  n={:>2}  noiseless {:.4}  noisy {:.4}  1-lambda {:.4}",
                clean.n, clean.median, noisy.median, ceiling
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
