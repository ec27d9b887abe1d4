// Born probabilities, white noise, shot sampling and the counts file.

use puretomo::bases::{default_family, BasisId, MeasurementMode};
use puretomo::counts::{read_counts, write_counts, CountsFile};
use puretomo::harness::simulate_counts;
use puretomo::measure::{born_probs, mix_white_noise, preparation_noise, sample, R_CNOT, R_LOCAL};
use puretomo::state::{named_state, NamedState};

pub fn run_example() -> puretomo::Result<()> {
    let family = default_family(2)?;
    let ghz = named_state(NamedState::Phi4, 2)?;

    let exact = born_probs(&ghz, BasisId::Local { a: 1, b: 2 }, &family)?;
    println!("L(1,2) probabilities {:?}", exact.probs);
    let lambda = preparation_noise(NamedState::Phi4, 2, R_LOCAL, R_CNOT);
    let noisy = mix_white_noise(&exact, lambda)?;
    println!("with lambda={lambda:.4}: {:?}", noisy.probs);
    let drawn = sample(&noisy, 8192, 1)?;
    println!("8192 shots: {:?}", drawn.counts());

    let records = simulate_counts(&ghz, MeasurementMode::Local, &family, 8192, Some(lambda), 5)?;
    let file = CountsFile::new(2, family, records)?;
    let dir = std::env::temp_dir().join(format!("puretomo-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ghz_counts.json");
    write_counts(&file, &path)?;
    let back = read_counts(&path)?;
    println!(
        "{} records written to {}, read back equal: {}",
        back.records.len(),
        path.display(),
        back == file
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
