//! Inductive estimation of n-qubit pure states.
//!
//! A state is recovered from the computational basis plus either `m·n` local
//! product bases or `m` entangled bases. Amplitude moduli come straight from
//! computational probabilities; relative phases are fixed one reduced state at
//! a time, doubling the number of qubits at each level.
//!
//! ```
//! use puretomo::{bases::MeasurementMode, harness::simulate_exact, reconstruct::*, state::*};
//!
//! let psi = haar_random(3, 11);
//! let opts = ReconstructionOptions::local(2).unwrap();
//! let tables = simulate_exact(&psi, MeasurementMode::Local, &opts.family).unwrap();
//! let (est, _) = reconstruct_from_probs(&tables, 3, &opts).unwrap();
//! assert!(fidelity(&psi, &est).unwrap() > 1.0 - 1e-10);
//! ```

pub mod bases;
pub mod cli;
pub mod counts;
pub mod error;
pub mod harness;
pub mod measure;
pub mod reconstruct;
pub mod seeds;
pub mod state;

pub use error::{Error, Result};
