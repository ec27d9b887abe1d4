//! Maximum-likelihood phase search over a grid, for one or two qubits.
//!
//! Moduli are fixed to `√p` from the computational basis; the relative phases
//! of amplitudes `1..2^n` are searched. For one qubit the grid is exhaustive.
//! For two qubits a coarse full grid is refined around its best points until
//! the step reaches `2π / resolution`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::bases::{basis_states, BasisId, Family};
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::measure::{to_empirical, ProbTable};
use crate::state::{global_phase_normalize, PureState};

pub const MIN_RESOLUTION: usize = 10_000;

const COARSE: usize = 48;
const SEEDS: usize = 8;
const SHRINK: f64 = 4.0;

struct Likelihood {
    moduli: Vec<f64>,
    /// `(weight, ⟨b|)` for every outcome with nonzero weight.
    terms: Vec<(f64, Vec<Complex64>)>,
}

impl Likelihood {
    fn new(tables: &[(ProbTable, f64)], n: usize, family: &Family) -> Result<Self> {
        let comp = tables
            .iter()
            .find(|(t, _)| t.basis == BasisId::Computational)
            .ok_or(Error::MissingBasis(BasisId::Computational))?;
        let threshold = 0.5 / comp.1;
        let moduli = comp
            .0
            .probs
            .iter()
            .map(|&p| if p < threshold { 0.0 } else { p.sqrt() })
            .collect();
        let mut terms = Vec::new();
        for (t, weight) in tables {
            if t.probs.len() != 1 << n {
                return Err(Error::DimensionMismatch {
                    left: 1 << n,
                    right: t.probs.len(),
                });
            }
            let states = basis_states(n, t.basis, family)?;
            for (p, s) in t.probs.iter().zip(states) {
                if *p > 0.0 {
                    terms.push((p * weight, s.amps().iter().map(|z| z.conj()).collect()));
                }
            }
        }
        Ok(Likelihood { moduli, terms })
    }

    fn state(&self, phases: &[f64]) -> Vec<Complex64> {
        self.moduli
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let theta = if i == 0 { 0.0 } else { phases[i - 1] };
                Complex64::from_polar(c, theta)
            })
            .collect()
    }

    fn log_likelihood(&self, phases: &[f64]) -> f64 {
        let psi = self.state(phases);
        self.terms
            .iter()
            .map(|(w, bra)| {
                let amp: Complex64 = bra.iter().zip(&psi).map(|(b, x)| b * x).sum();
                w * amp.norm_sqr().max(1e-300).ln()
            })
            .sum()
    }
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| TAU * k as f64 / points as f64)
}

fn search_one(lik: &Likelihood, resolution: usize) -> Vec<f64> {
    let best = grid(resolution)
        .map(|t| (lik.log_likelihood(&[t]), t))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty grid");
    vec![best.1]
}

fn search_three(lik: &Likelihood, resolution: usize) -> Vec<f64> {
    let mut coarse = Vec::with_capacity(COARSE.pow(3));
    for a in grid(COARSE) {
        for b in grid(COARSE) {
            for c in grid(COARSE) {
                let p = [a, b, c];
                coarse.push((lik.log_likelihood(&p), p));
            }
        }
    }
    coarse.sort_by(|x, y| y.0.total_cmp(&x.0));

    let target = TAU / resolution as f64;
    let mut best = coarse[0];
    for &(mut cur_ll, mut cur) in coarse.iter().take(SEEDS) {
        let mut step = TAU / COARSE as f64;
        while step > target {
            step = (step / SHRINK).max(target);
            let half = SHRINK as i32;
            let centre = cur;
            for i in -half..=half {
                for j in -half..=half {
                    for k in -half..=half {
                        let p = [
                            centre[0] + i as f64 * step,
                            centre[1] + j as f64 * step,
                            centre[2] + k as f64 * step,
                        ];
                        let ll = lik.log_likelihood(&p);
                        if ll > cur_ll {
                            cur_ll = ll;
                            cur = p;
                        }
                    }
                }
            }
        }
        if cur_ll > best.0 {
            best = (cur_ll, cur);
        }
    }
    best.1.to_vec()
}

fn run(
    tables: &[(ProbTable, f64)],
    n: usize,
    family: &Family,
    resolution: usize,
) -> Result<PureState> {
    if !(1..=2).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "grid oracle supports n <= 2, got {n}"
        )));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be >= {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let lik = Likelihood::new(tables, n, family)?;
    let phases = if n == 1 {
        search_one(&lik, resolution)
    } else {
        search_three(&lik, resolution)
    };
    Ok(global_phase_normalize(&PureState::normalized(
        lik.state(&phases),
    )?))
}

/// Maximum-likelihood estimate from counts of any set of bases that includes
/// the computational one.
pub fn oracle_grid_reconstruct(
    records: &[CountsRecord],
    n: usize,
    family: &Family,
    resolution: usize,
) -> Result<PureState> {
    let tables: Vec<_> = records
        .iter()
        .map(|r| (to_empirical(r), r.shots() as f64))
        .collect();
    run(&tables, n, family, resolution)
}

/// Same search with probability tables treated as `shots` draws each.
pub fn oracle_grid_from_probs(
    tables: &[ProbTable],
    n: usize,
    family: &Family,
    resolution: usize,
    shots: f64,
) -> Result<PureState> {
    let tables: Vec<_> = tables.iter().map(|t| (t.clone(), shots)).collect();
    run(&tables, n, family, resolution)
}
