// Measurement bases, the role of each outcome, and the circuits that realise
// them.

use puretomo::bases::{
    default_family, emit_circuit, outcome_role, required_bases, BasisId, MeasurementMode,
};

pub fn run_example() -> puretomo::Result<()> {
    let n = 3;
    let family = default_family(2)?;
    for mode in [MeasurementMode::Local, MeasurementMode::Entangled] {
        let ids = required_bases(n, family.len(), mode);
        println!("{mode} mode, n={n}: {} bases", ids.len());
    }

    let id = BasisId::Entangled { a: 2 };
    println!("roles of {id}:");
    for k in 0..1 << n {
        match outcome_role(id, k, n) {
            Some(r) => println!(
                "  outcome {k}: j={} beta={} canonical={}",
                r.j,
                r.beta,
                r.is_canonical()
            ),
            None => println!("  outcome {k}: |-->^n"),
        }
    }

    print!(
        "{}",
        emit_circuit(BasisId::Local { a: 2, b: 2 }, n, &family)?.to_text()
    );
    let entangled = emit_circuit(id, n, &family)?;
    print!("{}", entangled.to_text());
    println!(
        "entangled circuit has QASM form: {}",
        entangled.to_qasm().is_some()
    );
    if let Some(q) = emit_circuit(BasisId::Local { a: 1, b: 1 }, n, &family)?.to_qasm() {
        print!("{q}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> puretomo::Result<()> {
    run_example()
}
