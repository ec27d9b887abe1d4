//! Born probabilities, the white-noise model and multinomial shot sampling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bases::{BasisId, Family, QubitBasis};
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::state::{rng_from_seed, NamedState, PureState};

/// Default shots per basis, `2^13`.
pub const DEFAULT_SHOTS: u64 = 8192;

/// Average error per single-qubit gate in the device noise model.
pub const R_LOCAL: f64 = 5e-4;
/// Average error per CNOT in the device noise model.
pub const R_CNOT: f64 = 2e-2;

/// Outcome distribution of one basis, in that basis's outcome order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbTable {
    pub basis: BasisId,
    pub probs: Vec<f64>,
}

impl ProbTable {
    pub fn n(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }
}

/// Applies `U†` (rows `⟨+|`, `⟨−|`) to each of the qubits `0..b`.
fn rotate_low_qubits(amps: &mut [Complex64], q: &QubitBasis, b: usize) {
    let m = q.adjoint();
    for target in 0..b {
        let tbit = 1usize << target;
        for i in 0..amps.len() {
            if i & tbit != 0 {
                continue;
            }
            let (x0, x1) = (amps[i], amps[i | tbit]);
            amps[i] = m[0][0] * x0 + m[0][1] * x1;
            amps[i | tbit] = m[1][0] * x0 + m[1][1] * x1;
        }
    }
}

/// Amplitudes `⟨b_k|Ψ⟩` for every state of an entangled basis, in outcome order.
fn entangled_amplitudes(amps: &[Complex64], q: &QubitBasis) -> Vec<Complex64> {
    let n = amps.len().trailing_zeros() as usize;
    let plus = q.plus().map(|z| z.conj());
    let minus = q.minus().map(|z| z.conj());
    let mut out = Vec::with_capacity(amps.len());
    // contracted[β] = ⟨−^{j−1}| block β of level j−1⟩
    let mut contracted = amps.to_vec();
    for _ in 1..=n {
        let half = contracted.len() / 2;
        let mut next = Vec::with_capacity(half);
        for beta in 0..half {
            let (x0, x1) = (contracted[2 * beta], contracted[2 * beta + 1]);
            out.push(plus[0] * x0 + plus[1] * x1);
            next.push(minus[0] * x0 + minus[1] * x1);
        }
        contracted = next;
    }
    out.push(contracted[0]);
    out
}

fn finish(basis: BasisId, mut probs: Vec<f64>) -> ProbTable {
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    ProbTable { basis, probs }
}

/// `probs[k] = |⟨b_k|Ψ⟩|²` over the outcome order of `id`.
pub fn born_probs(state: &PureState, id: BasisId, family: &Family) -> Result<ProbTable> {
    let n = state.n();
    id.validate(n, family.len())?;
    let probs = match id {
        BasisId::Computational => state.amps().iter().map(|z| z.norm_sqr()).collect(),
        BasisId::Local { a, b } => {
            let mut amps = state.amps().to_vec();
            rotate_low_qubits(&mut amps, family.member(a)?, b);
            amps.iter().map(|z| z.norm_sqr()).collect()
        }
        BasisId::Entangled { a } => entangled_amplitudes(state.amps(), family.member(a)?)
            .iter()
            .map(|z| z.norm_sqr())
            .collect(),
    };
    Ok(finish(id, probs))
}

/// `(1 − λ)·p + λ/2^n`.
pub fn mix_white_noise(pt: &ProbTable, lambda: f64) -> Result<ProbTable> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let uniform = 1.0 / pt.probs.len() as f64;
    let probs = pt
        .probs
        .iter()
        .map(|p| (1.0 - lambda) * p + lambda * uniform)
        .collect();
    Ok(finish(pt.basis, probs))
}

/// Depolarizing weight of one gate with average error `r` on n qubits,
/// `2^n·r / (2^n − 1)`.
pub fn gate_white_noise(n: usize, r: f64) -> f64 {
    let d = (1u64 << n) as f64;
    (d * r / (d - 1.0)).clamp(0.0, 1.0)
}

/// Total weight after a sequence of gates, each given as `(rate, count)`.
/// Channels compose as `1 − λ = Π (1 − λ_gate)`.
pub fn compose_white_noise(n: usize, gates: &[(f64, usize)]) -> f64 {
    let keep: f64 = gates
        .iter()
        .map(|&(r, count)| (1.0 - gate_white_noise(n, r)).powi(count as i32))
        .product();
    1.0 - keep
}

/// `(single-qubit gates, CNOTs)` needed to prepare a named state.
pub fn preparation_gate_counts(kind: NamedState, n: usize) -> (usize, usize) {
    match kind {
        NamedState::Phi1 | NamedState::Phi2 => (n, 0),
        NamedState::Phi3 => (n / 2, n / 2),
        NamedState::Phi4 => (1, n.saturating_sub(1)),
    }
}

/// White-noise weight for preparing `kind` with the given per-gate rates.
pub fn preparation_noise(kind: NamedState, n: usize, r_local: f64, r_cnot: f64) -> f64 {
    let (local, cnot) = preparation_gate_counts(kind, n);
    compose_white_noise(n, &[(r_local, local), (r_cnot, cnot)])
}

/// Multinomial draw of `shots` outcomes by sequential binomial conditioning.
pub fn sample(pt: &ProbTable, shots: u64, seed: u64) -> Result<CountsRecord> {
    if shots == 0 {
        return Err(Error::InvalidCounts("shots must be >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    let mut remaining = shots;
    let mut mass = 1.0f64;
    let last = pt.probs.len() - 1;
    for (k, &p) in pt.probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let drawn = if k == last {
            remaining
        } else {
            let ratio = if mass > 0.0 {
                (p / mass).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let dist = Binomial::new(remaining, ratio)
                .map_err(|e| Error::InvalidCounts(format!("binomial draw: {e}")))?;
            dist.sample(&mut rng)
        };
        if drawn > 0 {
            counts.insert(k, drawn);
        }
        remaining -= drawn;
        mass -= p;
    }
    CountsRecord::new(pt.basis, pt.n(), shots, counts)
}

/// `counts / shots` as a dense table.
pub fn to_empirical(cr: &CountsRecord) -> ProbTable {
    let mut probs = vec![0.0; 1 << cr.n()];
    let shots = cr.shots() as f64;
    for (&k, &c) in cr.counts() {
        probs[k] = c as f64 / shots;
    }
    ProbTable {
        basis: cr.basis(),
        probs,
    }
}
