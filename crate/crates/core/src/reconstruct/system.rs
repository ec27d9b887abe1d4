//! The per-(j, β) linear system for `(cos δ, sin δ)` and its solver.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lstsq;
use crate::bases::{Family, OutcomeRole, QubitBasis};
use crate::error::{Error, Result};
use crate::state::ReducedState;

/// One measured projector probability with the role it plays.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub role: OutcomeRole,
    pub prob: f64,
}

/// How rows are scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowForm {
    /// `(Re X, −Im X)` with `X = e^{−iφ}⟨A|W⟩⟨W|B⟩` and right-hand side
    /// `(P − u²|⟨W|A⟩|² − v²|⟨W|B⟩|²) / 2uv`. Only canonical roles allowed.
    Canonical,
    /// `(2 Re X, −2 Im X)` with `X = conj(⟨σ|0⟩⟨w|A⟩)·⟨σ|1⟩⟨w|B⟩` and
    /// right-hand side `P − |⟨σ|0⟩⟨w|A⟩|² − |⟨σ|1⟩⟨w|B⟩|²`; any sign pattern.
    General,
}

/// Rows are divided by `‖A‖·‖B‖` so that at `j = 1` the canonical matrix is
/// exactly `[cos φ_a, sin φ_a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSystem {
    pub j: usize,
    pub beta: usize,
    pub rows: Vec<[f64; 2]>,
    pub rhs: Vec<f64>,
    pub cond: f64,
}

impl PhaseSystem {
    pub fn from_rows(j: usize, beta: usize, rows: Vec<[f64; 2]>, rhs: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptySystem);
        }
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                left: rows.len(),
                right: rhs.len(),
            });
        }
        let cond = lstsq::solve(&rows, &rhs).cond;
        Ok(PhaseSystem {
            j,
            beta,
            rows,
            rhs,
            cond,
        })
    }

    /// `Σ (row·x − rhs)²`.
    pub fn residual(&self, x: [f64; 2]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, t)| (r[0] * x[0] + r[1] * x[1] - t).powi(2))
            .sum()
    }
}

/// `⟨s|x⟩` for every sign pattern `s` over all qubits of `x` (bit = 1 for `−`).
pub fn pattern_amplitudes(x: &[Complex64], q: &QubitBasis) -> Vec<Complex64> {
    let m = q.adjoint();
    let mut out = x.to_vec();
    let mut tbit = 1;
    while tbit < out.len() {
        for i in 0..out.len() {
            if i & tbit == 0 {
                let (x0, x1) = (out[i], out[i | tbit]);
                out[i] = m[0][0] * x0 + m[0][1] * x1;
                out[i | tbit] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
        tbit <<= 1;
    }
    out
}

pub fn build_system(
    j: usize,
    beta: usize,
    child_a: &ReducedState,
    child_b: &ReducedState,
    equations: &[Equation],
    family: &Family,
    form: RowForm,
) -> Result<PhaseSystem> {
    if j == 0 {
        return Err(Error::OutOfRange("phase systems start at j = 1".into()));
    }
    let len = 1usize << (j - 1);
    if child_a.amps.len() != len || child_b.amps.len() != len {
        return Err(Error::DimensionMismatch {
            left: len,
            right: child_a.amps.len().max(child_b.amps.len()),
        });
    }
    if child_a.is_null() || child_b.is_null() {
        return Err(Error::NullChild { j, beta });
    }
    if equations.is_empty() {
        return Err(Error::EmptySystem);
    }

    let mut cache: Vec<Option<(Vec<Complex64>, Vec<Complex64>)>> = vec![None; family.len() + 1];
    let mut rows = Vec::with_capacity(equations.len());
    let mut rhs = Vec::with_capacity(equations.len());
    for eq in equations {
        let role = &eq.role;
        if role.j != j || role.beta != beta || role.tail.len() + 1 != j {
            return Err(Error::OutOfRange(format!(
                "equation role {role:?} does not belong to system (j={j}, beta={beta})"
            )));
        }
        let q = family.member(role.a)?;
        let (pa, pb) = cache[role.a].get_or_insert_with(|| {
            (
                pattern_amplitudes(&child_a.amps, q),
                pattern_amplitudes(&child_b.amps, q),
            )
        });
        let tail = role.pattern_bits() & (len - 1);
        let (wa, wb) = (pa[tail], pb[tail]);
        match form {
            RowForm::Canonical => {
                if !role.is_canonical() {
                    return Err(Error::OutOfRange(format!(
                        "non-canonical role {role:?} in a canonical system"
                    )));
                }
                let (u, v) = (q.u(), q.v());
                let x = Complex64::from_polar(1.0, -q.phi()) * wa.conj() * wb;
                rows.push([x.re, -x.im]);
                rhs.push((eq.prob - u * u * wa.norm_sqr() - v * v * wb.norm_sqr()) / (2.0 * u * v));
            }
            RowForm::General => {
                let ket = q.ket(role.sign0);
                let a = ket[0].conj() * wa;
                let b = ket[1].conj() * wb;
                let x = a.conj() * b;
                rows.push([2.0 * x.re, -2.0 * x.im]);
                rhs.push(eq.prob - a.norm_sqr() - b.norm_sqr());
            }
        }
    }
    let scale = 1.0 / (child_a.norm() * child_b.norm());
    rows.iter_mut().for_each(|r| {
        r[0] *= scale;
        r[1] *= scale;
    });
    rhs.iter_mut().for_each(|t| *t *= scale);
    PhaseSystem::from_rows(j, beta, rows, rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityPolicy {
    /// Pick the unit-circle candidate with the smallest residual over all rows.
    #[default]
    ResidualPick,
    /// Report an error instead of guessing.
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSolution {
    pub cos: f64,
    pub sin: f64,
    /// The ill-conditioned branch was taken.
    pub fallback: bool,
    /// Every row was zero, so δ = 0 was assigned.
    pub default_phase: bool,
}

impl PhaseSolution {
    pub fn delta(&self) -> f64 {
        self.sin.atan2(self.cos)
    }
}

fn unit(x: f64, y: f64) -> Option<[f64; 2]> {
    let r = x.hypot(y);
    (r > 0.0 && r.is_finite()).then(|| [x / r, y / r])
}

/// Points of the unit circle on the line `p·c + q·s = t`, or the closest
/// circle point when the line misses the circle.
fn circle_candidates(p: f64, q: f64, t: f64) -> Vec<[f64; 2]> {
    let rho = p.hypot(q);
    let theta = q.atan2(p);
    let ratio = t / rho;
    if ratio >= 1.0 {
        return vec![[theta.cos(), theta.sin()]];
    }
    if ratio <= -1.0 {
        return vec![[-theta.cos(), -theta.sin()]];
    }
    let spread = ratio.acos();
    vec![
        [(theta + spread).cos(), (theta + spread).sin()],
        [(theta - spread).cos(), (theta - spread).sin()],
    ]
}

/// Least squares projected onto the unit circle when `cond <= cond_threshold`.
/// Otherwise the rows of largest norm are intersected with the circle and the
/// candidate with the smallest residual over all rows wins; ties go to the
/// larger `cos δ`.
pub fn solve_phase(
    sys: &PhaseSystem,
    cond_threshold: f64,
    policy: AmbiguityPolicy,
) -> Result<PhaseSolution> {
    if sys.rows.is_empty() {
        return Err(Error::EmptySystem);
    }
    if sys.cond <= cond_threshold {
        let fit = lstsq::solve(&sys.rows, &sys.rhs);
        if let Some([c, s]) = fit.solution.and_then(|[x, y]| unit(x, y)) {
            return Ok(PhaseSolution {
                cos: c,
                sin: s,
                fallback: false,
                default_phase: false,
            });
        }
    }
    if policy == AmbiguityPolicy::Fail {
        return Err(Error::Ambiguous {
            j: sys.j,
            beta: sys.beta,
            cond: sys.cond,
        });
    }

    let norm = sys
        .rows
        .iter()
        .map(|r| r[0].hypot(r[1]))
        .fold(0.0, f64::max);
    if norm == 0.0 {
        return Ok(PhaseSolution {
            cos: 1.0,
            sin: 0.0,
            fallback: true,
            default_phase: true,
        });
    }
    // Every row tied for the largest norm counts as dominant.
    let candidates: Vec<[f64; 2]> = sys
        .rows
        .iter()
        .zip(&sys.rhs)
        .filter(|(r, _)| r[0].hypot(r[1]) >= norm * (1.0 - 1e-9))
        .flat_map(|(r, &t)| circle_candidates(r[0], r[1], t))
        .collect();
    let best = candidates
        .iter()
        .map(|&x| (x, sys.residual(x)))
        .reduce(|best, cand| {
            let tol = 1e-9 * best.1.max(cand.1) + 1e-30;
            if cand.1 < best.1 - tol || ((cand.1 - best.1).abs() <= tol && cand.0[0] > best.0[0]) {
                cand
            } else {
                best
            }
        })
        .map(|(x, _)| x)
        .expect("at least one candidate");
    Ok(PhaseSolution {
        cos: best[0],
        sin: best[1],
        fallback: true,
        default_phase: false,
    })
}
