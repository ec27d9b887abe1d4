// Reconstruct a two-qubit state from exact and from sampled probabilities,
// and compare with the brute-force likelihood search.

use num_complex::Complex64;
use puretomo::bases::MeasurementMode;
use puretomo::harness::{oracle_grid_reconstruct, simulate_counts, simulate_exact};
use puretomo::reconstruct::{reconstruct, reconstruct_from_probs, ReconstructionOptions};
use puretomo::state::{fidelity, PureState};

pub fn run_example() -> puretomo::Result<()> {
    let psi = PureState::normalized(vec![
        Complex64::new(0.6, 0.0),
        Complex64::from_polar(0.48, 1.2),
        Complex64::from_polar(0.5, -2.0),
        Complex64::from_polar(0.4, 0.3),
    ])?;
    let opts = ReconstructionOptions::local(2)?;

    let tables = simulate_exact(&psi, MeasurementMode::Local, &opts.family)?;
    let (exact, diag) = reconstruct_from_probs(&tables, 2, &opts)?;
    println!(
        "exact probabilities: fidelity {:.12}",
        fidelity(&psi, &exact)?
    );
    for ((j, beta), (c, s)) in &diag.phases {
        println!("  delta(j={j}, beta={beta}) = {:+.6}", s.atan2(*c));
    }

    let records = simulate_counts(&psi, MeasurementMode::Local, &opts.family, 8192, None, 3)?;
    let (est, _) = reconstruct(&records, 2, &opts)?;
    let oracle = oracle_grid_reconstruct(&records, 2, &opts.family, 10_000)?;
    println!("8192 shots: fidelity {:.5}", fidelity(&psi, &est)?);
    println!("likelihood grid: fidelity {:.5}", fidelity(&psi, &oracle)?);
    println!("estimate vs grid: {:.5}", fidelity(&est, &oracle)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
