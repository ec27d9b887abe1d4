//! Pure states, reduced-state slices and the random/named state generators.
//!
//! Index convention: amplitude `amps[α]` belongs to the computational state
//! `|α_{n-1} … α_0⟩` with `α = Σ_k 2^k α_k`. Qubit 0 is the least significant
//! bit, so the leftmost tensor factor is the most significant one.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes below this modulus are treated as zero when fixing the global phase.
pub const PHASE_EPS: f64 = 1e-10;

/// The RNG used everywhere a seed is accepted.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A normalized n-qubit state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let amps: Vec<Complex64> = raw
            .amps
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let state = PureState::new(amps)?;
        if state.n != raw.n {
            return Err(Error::DimensionMismatch {
                left: raw.n,
                right: state.n,
            });
        }
        Ok(state)
    }
}

impl From<PureState> for StateJson {
    fn from(s: PureState) -> Self {
        StateJson {
            n: s.n,
            amps: s.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

impl PureState {
    /// Validating constructor: the input norm must already be within 1e-6 of
    /// one, after which the vector is rescaled to unit norm.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::rescale(n, amps, norm))
    }

    /// Rescales any non-zero power-of-two-length vector to a unit state.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self::rescale(n, amps, norm))
    }

    fn rescale(n: usize, mut amps: Vec<Complex64>, norm: f64) -> Self {
        // Within rounding of one already; rescaling would only perturb bits.
        if (norm - 1.0).abs() > 1e-12 {
            let inv = 1.0 / norm;
            amps.iter_mut().for_each(|z| *z *= inv);
        }
        PureState { n, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if n == 0 || index >= dim {
            return Err(Error::OutOfRange(format!("basis state {index} for n={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` as the more significant factor.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        PureState {
            n: self.n + other.n,
            amps,
        }
    }
}

/// [`PureState::new`] as a free function.
pub fn make_state(amps: Vec<Complex64>) -> Result<PureState> {
    PureState::new(amps)
}

fn gaussian_vector(dim: usize, rng: &mut Rng) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

fn haar_from_rng(n: usize, rng: &mut Rng) -> PureState {
    loop {
        // A zero Gaussian vector has probability zero; loop only for form.
        if let Ok(s) = PureState::normalized(gaussian_vector(1 << n, rng)) {
            return s;
        }
    }
}

/// Haar-random n-qubit state (normalized complex Gaussian vector).
pub fn haar_random(n: usize, seed: u64) -> PureState {
    assert!(n >= 1, "haar_random needs n >= 1");
    haar_from_rng(n, &mut rng_from_seed(seed))
}

/// Tensor product of n independent Haar-random qubits. Qubit n-1 is drawn
/// first, so `random_separable(1, s) == haar_random(1, s)`.
pub fn random_separable(n: usize, seed: u64) -> PureState {
    assert!(n >= 1, "random_separable needs n >= 1");
    let mut rng = rng_from_seed(seed);
    let mut state = haar_from_rng(1, &mut rng);
    for _ in 1..n {
        state = state.tensor(&haar_from_rng(1, &mut rng));
    }
    state
}

/// The four fixed benchmark states used for the hardware-style studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedState {
    /// `((|0⟩ − e^{iπ/4}|1⟩)/√2)^{⊗n}`
    Phi1,
    /// `((|0⟩ + e^{iπ/4}|1⟩)/√2)^{⊗n}`
    Phi2,
    /// Bell pairs `(|00⟩+|11⟩)/√2`, padded with `|0⟩` for odd n.
    Phi3,
    /// GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
    Phi4,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [Self::Phi1, Self::Phi2, Self::Phi3, Self::Phi4];
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Phi1 => "phi1",
            Self::Phi2 => "phi2",
            Self::Phi3 => "phi3",
            Self::Phi4 => "phi4",
        };
        f.write_str(s)
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi1" => Ok(Self::Phi1),
            "phi2" => Ok(Self::Phi2),
            "phi3" | "bell" => Ok(Self::Phi3),
            "phi4" | "ghz" => Ok(Self::Phi4),
            other => Err(Error::InvalidConfig(format!(
                "unknown named state '{other}'"
            ))),
        }
    }
}

pub fn named_state(kind: NamedState, n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::OutOfRange("named states need n >= 1".into()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dim = 1usize << n;
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        NamedState::Phi1 | NamedState::Phi2 => {
            let sign = if kind == NamedState::Phi1 { -1.0 } else { 1.0 };
            let qubit = PureState {
                n: 1,
                amps: vec![
                    Complex64::new(h, 0.0),
                    sign * Complex64::from_polar(h, std::f64::consts::FRAC_PI_4),
                ],
            };
            let mut state = qubit.clone();
            for _ in 1..n {
                state = state.tensor(&qubit);
            }
            Ok(state)
        }
        NamedState::Phi3 => {
            let bell = PureState {
                n: 2,
                amps: vec![Complex64::new(h, 0.0), zero, zero, Complex64::new(h, 0.0)],
            };
            let mut state: Option<PureState> = None;
            for _ in 0..n / 2 {
                state = Some(match state {
                    None => bell.clone(),
                    Some(s) => s.tensor(&bell),
                });
            }
            let ket0 = PureState::basis(1, 0)?;
            Ok(match (state, n % 2) {
                (Some(s), 0) => s,
                (Some(s), _) => s.tensor(&ket0),
                (None, _) => ket0,
            })
        }
        NamedState::Phi4 => {
            if n < 2 {
                return Err(Error::OutOfRange("GHZ state needs n >= 2".into()));
            }
            let mut amps = vec![zero; dim];
            amps[0] = Complex64::new(h, 0.0);
            amps[dim - 1] = Complex64::new(h, 0.0);
            Ok(PureState { n, amps })
        }
    }
}

/// `|⟨a|b⟩|²`, clamped into `[0, 1]`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Rotates the global phase so the first amplitude with modulus above
/// [`PHASE_EPS`] is real and positive.
pub fn global_phase_normalize(state: &PureState) -> PureState {
    let mut amps = state.amps.clone();
    if let Some(pivot) = amps.iter().find(|z| z.norm() > PHASE_EPS) {
        let rot = pivot.conj() / pivot.norm();
        amps.iter_mut().for_each(|z| *z *= rot);
    }
    PureState { n: state.n, amps }
}

/// A contiguous, non-normalized block of `2^j` amplitudes labelled `(j, β)`.
///
/// Level `j = 0` blocks are single amplitudes; they seed the first merge.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub j: usize,
    pub beta: usize,
    pub amps: Vec<Complex64>,
}

impl ReducedState {
    pub fn new(j: usize, beta: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << j {
            return Err(Error::DimensionMismatch {
                left: 1 << j,
                right: amps.len(),
            });
        }
        Ok(ReducedState { j, beta, amps })
    }

    pub fn null(j: usize, beta: usize) -> Self {
        ReducedState {
            j,
            beta,
            amps: vec![Complex64::new(0.0, 0.0); 1 << j],
        }
    }

    pub fn is_null(&self) -> bool {
        self.amps.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }
}

/// Block `amps[2^j·β .. 2^j·(β+1)]` of `psi`.
pub fn reduced_slice(psi: &PureState, j: usize, beta: usize) -> Result<ReducedState> {
    if j > psi.n || beta >= 1 << (psi.n - j) {
        return Err(Error::OutOfRange(format!(
            "reduced slice (j={j}, beta={beta}) for n={}",
            psi.n
        )));
    }
    let len = 1usize << j;
    let start = len * beta;
    Ok(ReducedState {
        j,
        beta,
        amps: psi.amps[start..start + len].to_vec(),
    })
}
