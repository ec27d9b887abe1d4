// Bootstrap band for the fidelity of a sampled GHZ state.

use puretomo::bases::MeasurementMode;
use puretomo::harness::{bootstrap_ci, simulate_counts};
use puretomo::reconstruct::ReconstructionOptions;
use puretomo::state::{named_state, NamedState};

pub fn run_example() -> puretomo::Result<()> {
    let target = named_state(NamedState::Phi4, 3)?;
    let opts = ReconstructionOptions::local(2)?.with_extra_rows(true);
    for shots in [512, 2048, 8192] {
        let records = simulate_counts(
            &target,
            MeasurementMode::Local,
            &opts.family,
            shots,
            Some(0.05),
            9,
        )?;
        let ci = bootstrap_ci(&records, 3, &opts, 200, 17, &target)?;
        println!(
            "shots {shots:>5}: fidelity {:.4}  band [{:.4}, {:.4}]",
            ci.point, ci.lo, ci.hi
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
