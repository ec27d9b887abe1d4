macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(states, "states.rs");
example!(bases_and_circuits, "bases_and_circuits.rs");
example!(simulate_counts, "simulate_counts.rs");
example!(two_qubit_reconstruction, "two_qubit_reconstruction.rs");
example!(bootstrap_error_bars, "bootstrap_error_bars.rs");
example!(white_noise_study, "white_noise_study.rs");
example!(monte_carlo_bench, "monte_carlo_bench.rs");

#[test]
fn states_example_runs() {
    states::run_example().expect("states example should run");
}

#[test]
fn bases_example_runs() {
    bases_and_circuits::run_example().expect("bases example should run");
}

#[test]
fn simulate_example_runs() {
    simulate_counts::run_example().expect("simulate example should run");
}

#[test]
fn reconstruction_example_runs() {
    two_qubit_reconstruction::run_example().expect("reconstruction example should run");
}

#[test]
fn bootstrap_example_runs() {
    bootstrap_error_bars::run_example().expect("bootstrap example should run");
}

#[test]
fn white_noise_example_runs() {
    white_noise_study::run_example().expect("white noise example should run");
}

#[test]
fn bench_example_runs() {
    monte_carlo_bench::run_example().expect("bench example should run");
}
