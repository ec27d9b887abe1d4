// Building states, slicing reduced blocks and writing the state JSON.

use puretomo::state::{fidelity, haar_random, named_state, reduced_slice, NamedState, PureState};

pub fn run_example() -> puretomo::Result<()> {
    let ghz = named_state(NamedState::Phi4, 3)?;
    println!("GHZ(3) amplitudes:");
    for (i, z) in ghz.amps().iter().enumerate() {
        println!("  |{i:03b}> {:+.4} {:+.4}i", z.re, z.im);
    }

    let bell = named_state(NamedState::Phi3, 2)?;
    let product = bell.tensor(&PureState::basis(1, 0)?);
    println!(
        "Phi3(3) equals Bell x |0>: {}",
        product == named_state(NamedState::Phi3, 3)?
    );

    let psi = haar_random(4, 2024);
    for j in 0..=4 {
        let norms: Vec<String> = (0..1usize << (4 - j))
            .map(|beta| reduced_slice(&psi, j, beta).map(|b| format!("{:.3}", b.norm())))
            .collect::<Result<_, _>>()?;
        println!("level {j}: block norms [{}]", norms.join(", "));
    }

    let text = serde_json::to_string(&psi)?;
    let back: PureState = serde_json::from_str(&text)?;
    println!("JSON round trip fidelity {:.15}", fidelity(&psi, &back)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
