//! Inductive pure-state reconstruction.
//!
//! Amplitudes come from the computational basis (`c_α = √p_α`). Relative
//! phases are then recovered level by level: each reduced state at level `j`
//! is `|0⟩⊗A + e^{iδ}|1⟩⊗B` for its two level-`j−1` children, and `δ` is
//! the solution of a small least-squares system in `(cos δ, sin δ)` built
//! from projector probabilities. Level `n` is the estimate.

mod lstsq;
mod system;

pub use lstsq::{solve as lstsq_two_columns, triangular_singular_values, TwoColumnFit};
pub use system::{
    build_system, pattern_amplitudes, solve_phase, AmbiguityPolicy, Equation, PhaseSolution,
    PhaseSystem, RowForm,
};

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::{
    canonical_outcome, default_family, outcome_role, BasisId, Family, MeasurementMode, OutcomeRole,
};
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::measure::{to_empirical, ProbTable};
use crate::state::{global_phase_normalize, PureState, ReducedState};

/// Null threshold used for exact probability tables.
pub const EXACT_NULL_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionOptions {
    pub mode: MeasurementMode,
    pub family: Family,
    /// Use every sign pattern of `L_aj` at level `j`, not only the canonical
    /// one. Ignored in entangled mode.
    pub use_extra_rows: bool,
    /// Probabilities below this are clamped to zero amplitude. `None` means
    /// `0.5 / shots` for counts and [`EXACT_NULL_THRESHOLD`] for exact tables.
    pub null_threshold: Option<f64>,
    pub cond_threshold: f64,
    pub ambiguity_policy: AmbiguityPolicy,
}

impl ReconstructionOptions {
    pub fn new(mode: MeasurementMode, family: Family) -> Self {
        ReconstructionOptions {
            mode,
            family,
            use_extra_rows: false,
            null_threshold: None,
            cond_threshold: 1e6,
            ambiguity_policy: AmbiguityPolicy::ResidualPick,
        }
    }

    pub fn local(m: usize) -> Result<Self> {
        Ok(Self::new(MeasurementMode::Local, default_family(m)?))
    }

    pub fn entangled(m: usize) -> Result<Self> {
        Ok(Self::new(MeasurementMode::Entangled, default_family(m)?))
    }

    pub fn with_extra_rows(mut self, on: bool) -> Self {
        self.use_extra_rows = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.family.len() < 2 {
            return Err(Error::FamilyTooSmall(self.family.len()));
        }
        let bad = |x: f64| !(x > 0.0 && x.is_finite());
        if bad(self.cond_threshold) || self.null_threshold.is_some_and(bad) {
            return Err(Error::InvalidConfig("thresholds must be positive".into()));
        }
        Ok(())
    }

    fn row_form(&self) -> RowForm {
        if self.extended() {
            RowForm::General
        } else {
            RowForm::Canonical
        }
    }

    fn extended(&self) -> bool {
        self.use_extra_rows && self.mode == MeasurementMode::Local
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Condition number per solved `(j, β)` problem.
    pub cond: BTreeMap<(usize, usize), f64>,
    /// `(cos δ, sin δ)` per solved problem.
    pub phases: BTreeMap<(usize, usize), (f64, f64)>,
    /// Problems skipped because a child was null.
    pub null_branches: usize,
    /// Problems solved through the ill-conditioned branch.
    pub fallbacks: usize,
    /// Fallbacks where every row was zero and δ = 0 was assigned.
    pub default_phases: usize,
}

impl Diagnostics {
    pub fn solved(&self) -> usize {
        self.cond.len()
    }

    pub fn cond_max(&self) -> f64 {
        self.cond.values().copied().fold(0.0, f64::max)
    }
}

/// `c_α = √(count_α / shots)`, zeroed below the null threshold.
pub fn amplitudes_from_counts(
    comp: &CountsRecord,
    null_threshold: Option<f64>,
) -> Result<Vec<f64>> {
    if comp.basis() != BasisId::Computational {
        return Err(Error::InvalidCounts(format!(
            "amplitudes need the computational basis, got {}",
            comp.basis()
        )));
    }
    let threshold = null_threshold.unwrap_or(0.5 / comp.shots() as f64);
    Ok(amplitudes_from_probs(&to_empirical(comp).probs, threshold))
}

fn amplitudes_from_probs(probs: &[f64], threshold: f64) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| if p < threshold { 0.0 } else { p.sqrt() })
        .collect()
}

/// `|0⟩⊗A + e^{iδ}|1⟩⊗B`; a null child forces δ = 0.
pub fn merge_children(
    child_a: &ReducedState,
    child_b: &ReducedState,
    cos: f64,
    sin: f64,
) -> Result<ReducedState> {
    if child_a.j != child_b.j || child_b.beta != child_a.beta + 1 || !child_a.beta.is_multiple_of(2)
    {
        return Err(Error::OutOfRange(format!(
            "children (j={}, beta={}) and (j={}, beta={}) are not siblings",
            child_a.j, child_a.beta, child_b.j, child_b.beta
        )));
    }
    let phase = if child_a.is_null() || child_b.is_null() {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(cos, sin)
    };
    let amps = child_a
        .amps
        .iter()
        .copied()
        .chain(child_b.amps.iter().map(|z| z * phase))
        .collect();
    ReducedState::new(child_a.j + 1, child_a.beta / 2, amps)
}

/// Dense tables indexed by basis, validated against `n` and the options.
struct Inputs {
    tables: HashMap<BasisId, Vec<f64>>,
}

impl Inputs {
    fn new(tables: &[ProbTable], n: usize, opts: &ReconstructionOptions) -> Result<Self> {
        let mut map = HashMap::new();
        for t in tables {
            if t.probs.len() != 1 << n {
                return Err(Error::DimensionMismatch {
                    left: 1 << n,
                    right: t.probs.len(),
                });
            }
            t.basis.validate(n, opts.family.len())?;
            if map.insert(t.basis, t.probs.clone()).is_some() {
                return Err(Error::InvalidCounts(format!("duplicate basis {}", t.basis)));
            }
        }
        for id in crate::bases::required_bases(n, opts.family.len(), opts.mode) {
            if !map.contains_key(&id) {
                return Err(Error::MissingBasis(id));
            }
        }
        Ok(Inputs { tables: map })
    }

    fn table(&self, id: BasisId) -> &[f64] {
        &self.tables[&id]
    }

    fn equations(
        &self,
        n: usize,
        j: usize,
        beta: usize,
        opts: &ReconstructionOptions,
    ) -> Vec<Equation> {
        let m = opts.family.len();
        let mut eqs = Vec::new();
        for a in 1..=m {
            let id = match opts.mode {
                MeasurementMode::Local => BasisId::Local { a, b: j },
                MeasurementMode::Entangled => BasisId::Entangled { a },
            };
            let probs = self.table(id);
            if opts.extended() {
                let start = beta << j;
                for (k, &prob) in probs.iter().enumerate().skip(start).take(1 << j) {
                    let role = outcome_role(id, k, n).expect("local outcomes carry roles");
                    eqs.push(Equation { role, prob });
                }
            } else {
                let k = canonical_outcome(id, n, j, beta).expect("canonical outcome exists");
                eqs.push(Equation {
                    role: OutcomeRole::canonical(j, beta, a),
                    prob: probs[k],
                });
            }
        }
        eqs
    }
}

/// Reconstructs from counts records (computational basis plus every basis the
/// mode requires).
pub fn reconstruct(
    records: &[CountsRecord],
    n: usize,
    opts: &ReconstructionOptions,
) -> Result<(PureState, Diagnostics)> {
    let mut min_shots = u64::MAX;
    for r in records {
        if r.n() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: r.n(),
            });
        }
        min_shots = min_shots.min(r.shots());
    }
    let comp = records
        .iter()
        .find(|r| r.basis() == BasisId::Computational)
        .ok_or(Error::MissingBasis(BasisId::Computational))?;
    let threshold = opts.null_threshold.unwrap_or(0.5 / comp.shots() as f64);
    let tables: Vec<ProbTable> = records.iter().map(to_empirical).collect();
    reconstruct_with_threshold(&tables, n, opts, threshold)
}

/// Reconstructs from probability tables (exact or empirical).
pub fn reconstruct_from_probs(
    tables: &[ProbTable],
    n: usize,
    opts: &ReconstructionOptions,
) -> Result<(PureState, Diagnostics)> {
    let threshold = opts.null_threshold.unwrap_or(EXACT_NULL_THRESHOLD);
    reconstruct_with_threshold(tables, n, opts, threshold)
}

fn reconstruct_with_threshold(
    tables: &[ProbTable],
    n: usize,
    opts: &ReconstructionOptions,
    null_threshold: f64,
) -> Result<(PureState, Diagnostics)> {
    opts.validate()?;
    if n == 0 {
        return Err(Error::OutOfRange("n must be >= 1".into()));
    }
    let inputs = Inputs::new(tables, n, opts)?;
    let amps = amplitudes_from_probs(inputs.table(BasisId::Computational), null_threshold);

    let mut diag = Diagnostics::default();
    let mut level: Vec<ReducedState> = amps
        .iter()
        .enumerate()
        .map(|(alpha, &c)| ReducedState {
            j: 0,
            beta: alpha,
            amps: vec![Complex64::new(c, 0.0)],
        })
        .collect();

    for j in 1..=n {
        let mut next = Vec::with_capacity(level.len() / 2);
        for (beta, pair) in level.chunks_exact(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if a.is_null() || b.is_null() {
                diag.null_branches += 1;
                next.push(merge_children(a, b, 1.0, 0.0)?);
                continue;
            }
            let eqs = inputs.equations(n, j, beta, opts);
            let sys = build_system(j, beta, a, b, &eqs, &opts.family, opts.row_form())?;
            let sol = solve_phase(&sys, opts.cond_threshold, opts.ambiguity_policy)?;
            diag.cond.insert((j, beta), sys.cond);
            diag.phases.insert((j, beta), (sol.cos, sol.sin));
            diag.fallbacks += sol.fallback as usize;
            diag.default_phases += sol.default_phase as usize;
            next.push(merge_children(a, b, sol.cos, sol.sin)?);
        }
        level = next;
    }

    let top = level.pop().expect("one reduced state at level n");
    let state = PureState::normalized(top.amps)?;
    Ok((global_phase_normalize(&state), diag))
}

/// Estimate output: the state schema plus diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateJson {
    pub n: usize,
    pub amps: Vec<[f64; 2]>,
    pub diagnostics: DiagnosticsJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    /// Keyed `"j,beta"`; `null` marks an infinite condition number.
    pub cond: BTreeMap<String, Option<f64>>,
    pub fallbacks: usize,
    pub null_branches: usize,
    pub default_phases: usize,
}

impl EstimateJson {
    pub fn new(state: &PureState, diag: &Diagnostics, fidelity: Option<f64>) -> Self {
        EstimateJson {
            n: state.n(),
            amps: state.amps().iter().map(|z| [z.re, z.im]).collect(),
            diagnostics: DiagnosticsJson {
                cond: diag
                    .cond
                    .iter()
                    .map(|(&(j, b), &c)| (format!("{j},{b}"), c.is_finite().then_some(c)))
                    .collect(),
                fallbacks: diag.fallbacks,
                null_branches: diag.null_branches,
                default_phases: diag.default_phases,
            },
            fidelity,
        }
    }

    pub fn state(&self) -> Result<PureState> {
        PureState::new(
            self.amps
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}
