//! Measurement circuits: a gate list that, followed by a computational-basis
//! readout of every qubit, realizes a basis.
//!
//! Every gate is `U_a†` for a family member, where `U_a|0⟩ = |+_a⟩` and
//! `U_a|1⟩ = |−_a⟩`. Multi-controlled gates stay abstract (controls on `|1⟩`).

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{entangled_offset, BasisId, Family, QubitBasis};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub controls: Vec<usize>,
    pub target: usize,
    pub basis: QubitBasis,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        if self.controls.is_empty() {
            "udg"
        } else {
            "mcudg"
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub basis: BasisId,
    pub gates: Vec<Gate>,
}

pub fn emit_circuit(id: BasisId, n: usize, family: &Family) -> Result<Circuit> {
    id.validate(n, family.len())?;
    let gates = match id {
        BasisId::Computational => Vec::new(),
        BasisId::Local { a, b } => {
            let basis = *family.member(a)?;
            (0..b)
                .map(|target| Gate {
                    controls: Vec::new(),
                    target,
                    basis,
                })
                .collect()
        }
        BasisId::Entangled { a } => {
            // Undo the preparation ladder: qubit q is rotated iff all lower
            // qubits read |1⟩ (i.e. are |−⟩) after they have been undone.
            let basis = *family.member(a)?;
            (0..n)
                .map(|target| Gate {
                    controls: (0..target).collect(),
                    target,
                    basis,
                })
                .collect()
        }
    };
    Ok(Circuit {
        n,
        basis: id,
        gates,
    })
}

/// Maps a computational readout of an entangled-basis circuit to the outcome
/// index used by [`super::basis_states`].
pub fn entangled_readout_to_outcome(n: usize, readout: usize) -> usize {
    let ones = (readout.trailing_ones() as usize).min(n);
    if ones == n {
        return (1 << n) - 1;
    }
    let j = ones + 1;
    entangled_offset(n, j) + (readout >> j)
}

impl Circuit {
    /// Outcome index for a raw computational readout after this circuit.
    pub fn readout_to_outcome(&self, readout: usize) -> usize {
        match self.basis {
            BasisId::Entangled { .. } => entangled_readout_to_outcome(self.n, readout),
            _ => readout,
        }
    }

    /// Applies the gates to a statevector.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != 1 << self.n {
            return Err(Error::DimensionMismatch {
                left: 1 << self.n,
                right: amps.len(),
            });
        }
        let mut out = amps.to_vec();
        for g in &self.gates {
            let m = g.basis.adjoint();
            let tbit = 1usize << g.target;
            let cmask: usize = g.controls.iter().map(|c| 1usize << c).sum();
            for i in 0..out.len() {
                if i & tbit != 0 || i & cmask != cmask {
                    continue;
                }
                let (x0, x1) = (out[i], out[i | tbit]);
                out[i] = m[0][0] * x0 + m[0][1] * x1;
                out[i | tbit] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
        Ok(out)
    }

    /// Line format: `gate <name> [<controls>] <target> <u> <v> <phi>`, then
    /// `measure all`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# basis {} n={}\n", self.basis, self.n);
        for g in &self.gates {
            let controls: Vec<String> = g.controls.iter().map(|c| c.to_string()).collect();
            writeln!(
                s,
                "gate {} [{}] {} {:?} {:?} {:?}",
                g.name(),
                controls.join(","),
                g.target,
                g.basis.u(),
                g.basis.v(),
                g.basis.phi()
            )
            .unwrap();
        }
        s.push_str("measure all\n");
        s
    }

    /// OpenQASM 2.0 rendering; `None` when the circuit has controlled gates.
    pub fn to_qasm(&self) -> Option<String> {
        if self.gates.iter().any(|g| !g.controls.is_empty()) {
            return None;
        }
        let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        writeln!(s, "qreg q[{}];\ncreg c[{}];", self.n, self.n).unwrap();
        for g in &self.gates {
            let (theta, phi, lambda) = u3_adjoint_params(&g.basis);
            writeln!(s, "u3({theta:?},{phi:?},{lambda:?}) q[{}];", g.target).unwrap();
        }
        s.push_str("measure q -> c;\n");
        Some(s)
    }
}

/// `(θ, φ, λ)` with `u3(θ, φ, λ) = U_a†`. `U_a = u3(2·atan2(v, u), φ_a, π)`.
pub fn u3_adjoint_params(q: &QubitBasis) -> (f64, f64, f64) {
    let theta = 2.0 * q.v().atan2(q.u());
    (-theta, -std::f64::consts::PI, -q.phi())
}
