//! Simulation pipelines, the Monte Carlo benchmark, bootstrap error bars and
//! a brute-force likelihood oracle for small systems.

mod bootstrap;
mod oracle;

pub use bootstrap::{bootstrap_ci, BootstrapResult, MIN_RESAMPLES};
pub use oracle::{oracle_grid_from_probs, oracle_grid_reconstruct, MIN_RESOLUTION};

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases::{default_family, required_bases, Family, MeasurementMode};
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::measure::{
    born_probs, mix_white_noise, preparation_noise, sample, ProbTable, R_CNOT, R_LOCAL,
};
use crate::reconstruct::{reconstruct, ReconstructionOptions};
use crate::seeds::derive_seed;
use crate::state::{fidelity, haar_random, named_state, random_separable, NamedState, PureState};

/// Exact outcome tables for every basis `mode` requires.
pub fn simulate_exact(
    psi: &PureState,
    mode: MeasurementMode,
    family: &Family,
) -> Result<Vec<ProbTable>> {
    required_bases(psi.n(), family.len(), mode)
        .into_iter()
        .map(|id| born_probs(psi, id, family))
        .collect()
}

/// Sampled counts for every basis `mode` requires. Basis `k` (in
/// [`required_bases`] order) draws from `derive_seed(seed, &[k])`.
pub fn simulate_counts(
    psi: &PureState,
    mode: MeasurementMode,
    family: &Family,
    shots: u64,
    noise_lambda: Option<f64>,
    seed: u64,
) -> Result<Vec<CountsRecord>> {
    simulate_exact(psi, mode, family)?
        .iter()
        .enumerate()
        .map(|(k, pt)| {
            let pt = match noise_lambda {
                Some(l) => mix_white_noise(pt, l)?,
                None => pt.clone(),
            };
            sample(&pt, shots, derive_seed(seed, &[k as u64]))
        })
        .collect()
}

/// Where benchmark states come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateFamily {
    Haar,
    Separable,
    Named(NamedState),
}

impl StateFamily {
    pub fn generate(&self, n: usize, seed: u64) -> Result<PureState> {
        match self {
            StateFamily::Haar => Ok(haar_random(n, seed)),
            StateFamily::Separable => Ok(random_separable(n, seed)),
            StateFamily::Named(kind) => named_state(*kind, n),
        }
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(Self::Haar),
            "separable" | "product" => Ok(Self::Separable),
            other => other.parse().map(Self::Named),
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Haar => f.write_str("haar"),
            Self::Separable => f.write_str("separable"),
            Self::Named(k) => k.fmt(f),
        }
    }
}

impl TryFrom<String> for StateFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StateFamily> for String {
    fn from(s: StateFamily) -> String {
        s.to_string()
    }
}

/// How preparation noise is applied in a benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Fixed white-noise weight for every basis.
    Lambda(f64),
    /// Weight composed from the named state's preparation gates, with the
    /// given single-qubit and CNOT error rates.
    Gates { r_local: f64, r_cnot: f64 },
}

impl NoiseModel {
    pub fn default_gates() -> Self {
        NoiseModel::Gates {
            r_local: R_LOCAL,
            r_cnot: R_CNOT,
        }
    }

    fn lambda(&self, states: StateFamily, n: usize) -> Result<f64> {
        match (*self, states) {
            (NoiseModel::Lambda(l), _) => Ok(l),
            (NoiseModel::Gates { r_local, r_cnot }, StateFamily::Named(kind)) => {
                Ok(preparation_noise(kind, n, r_local, r_cnot))
            }
            (NoiseModel::Gates { .. }, other) => Err(Error::InvalidConfig(format!(
                "gate noise needs a named state family, got {other}"
            ))),
        }
    }
}

fn default_max_qubits() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n_range: Vec<usize>,
    pub m: usize,
    pub mode: MeasurementMode,
    pub shots: u64,
    pub trials: usize,
    #[serde(rename = "states")]
    pub state_family: StateFamily,
    pub seed: u64,
    #[serde(default)]
    pub noise_lambda: Option<f64>,
    /// Overrides `noise_lambda` when set.
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    /// Use every sign pattern of the local bases as rows; `None` means on
    /// for local mode.
    #[serde(default)]
    pub extra_rows: Option<bool>,
    /// Largest n the run may allocate.
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
}

impl BenchConfig {
    pub fn new(
        n_range: Vec<usize>,
        m: usize,
        mode: MeasurementMode,
        state_family: StateFamily,
    ) -> Self {
        BenchConfig {
            n_range,
            m,
            mode,
            shots: crate::measure::DEFAULT_SHOTS,
            trials: 100,
            state_family,
            seed: 0,
            noise_lambda: None,
            noise: None,
            extra_rows: None,
            max_qubits: default_max_qubits(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: BenchConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be >= 1");
        }
        if self.shots == 0 {
            return bad("shots must be >= 1");
        }
        if self.n_range.is_empty() {
            return bad("n_range must not be empty");
        }
        if self.m < 2 {
            return Err(Error::FamilyTooSmall(self.m));
        }
        for &n in &self.n_range {
            if n == 0 {
                return bad("qubit counts must be >= 1");
            }
            if n > self.max_qubits {
                return Err(Error::InvalidConfig(format!(
                    "n={n} exceeds the resource guard of {} qubits",
                    self.max_qubits
                )));
            }
        }
        if let Some(l) = self.noise_lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::LambdaOutOfRange(l));
            }
        }
        Ok(())
    }

    pub fn options(&self) -> Result<ReconstructionOptions> {
        let family = default_family(self.m)?;
        let extra = self
            .extra_rows
            .unwrap_or(self.mode == MeasurementMode::Local);
        Ok(ReconstructionOptions::new(self.mode, family).with_extra_rows(extra))
    }

    fn noise_model(&self) -> Option<NoiseModel> {
        self.noise.or(self.noise_lambda.map(NoiseModel::Lambda))
    }
}

/// Seed of the state drawn for `(n, trial)`.
pub fn state_seed(master: u64, n: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, trial as u64, 0])
}

/// Master seed handed to [`simulate_counts`] for `(n, trial)`.
pub fn counts_seed(master: u64, n: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, trial as u64, 1])
}

/// One row of the benchmark CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub n: usize,
    pub trial: usize,
    pub fidelity: f64,
    pub cond_max: f64,
    pub fallbacks: usize,
}

/// One simulate + reconstruct trial.
pub fn run_trial(
    cfg: &BenchConfig,
    opts: &ReconstructionOptions,
    n: usize,
    trial: usize,
) -> Result<TrialRow> {
    let psi = cfg
        .state_family
        .generate(n, state_seed(cfg.seed, n, trial))?;
    let lambda = cfg
        .noise_model()
        .map(|model| model.lambda(cfg.state_family, n))
        .transpose()?;
    let records = simulate_counts(
        &psi,
        cfg.mode,
        &opts.family,
        cfg.shots,
        lambda,
        counts_seed(cfg.seed, n, trial),
    )?;
    let (est, diag) = reconstruct(&records, n, opts)?;
    Ok(TrialRow {
        n,
        trial,
        fidelity: fidelity(&psi, &est)?,
        cond_max: diag.cond_max(),
        fallbacks: diag.fallbacks,
    })
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    /// Ordered by trial index.
    pub fidelities: Vec<f64>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub mean: f64,
    pub cond_max: f64,
    pub fallbacks: usize,
    pub runtime_secs: f64,
}

impl NSummary {
    fn new(n: usize, rows: &[TrialRow], runtime_secs: f64) -> Self {
        let fidelities: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
        let mut sorted = fidelities.clone();
        sorted.sort_by(f64::total_cmp);
        let (q1, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
        NSummary {
            n,
            median: quantile(&sorted, 0.5),
            q1,
            q3,
            iqr: q3 - q1,
            mean: fidelities.iter().sum::<f64>() / fidelities.len() as f64,
            cond_max: rows.iter().map(|r| r.cond_max).fold(0.0, f64::max),
            fallbacks: rows.iter().map(|r| r.fallbacks).sum(),
            runtime_secs,
            fidelities,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub config: BenchConfig,
    pub per_n: Vec<NSummary>,
    pub runtime_secs: f64,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl BenchResult {
    pub fn summary(&self, n: usize) -> Option<&NSummary> {
        self.per_n.iter().find(|s| s.n == n)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs every `(n, trial)` in parallel. Results do not depend on scheduling.
pub fn bench_run(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let opts = cfg.options()?;
    let start = Instant::now();
    let mut per_n = Vec::with_capacity(cfg.n_range.len());
    let mut rows = Vec::new();
    for &n in &cfg.n_range {
        let t = Instant::now();
        let n_rows = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, &opts, n, trial))
            .collect::<Result<Vec<_>>>()?;
        per_n.push(NSummary::new(n, &n_rows, t.elapsed().as_secs_f64()));
        rows.extend(n_rows);
    }
    Ok(BenchResult {
        config: cfg.clone(),
        per_n,
        runtime_secs: start.elapsed().as_secs_f64(),
        rows,
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidCounts(format!("csv: {e}"))
}

/// Writes `n,trial,fidelity,cond_max,fallbacks` rows with a header.
pub fn write_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: MeasurementMode) -> BenchConfig {
        let mut cfg = BenchConfig::new(vec![2, 3], 2, mode, StateFamily::Haar);
        cfg.trials = 6;
        cfg.seed = 42;
        cfg
    }

    #[test]
    fn quantiles_interpolate() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&d, 0.5), 2.5);
        assert_eq!(quantile(&d, 0.0), 1.0);
        assert_eq!(quantile(&d, 1.0), 4.0);
        assert!((quantile(&d, 0.25) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn bench_is_deterministic_and_shaped() {
        let cfg = small(MeasurementMode::Local);
        let a = bench_run(&cfg).unwrap();
        let b = bench_run(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 12);
        for s in &a.per_n {
            assert_eq!(s.fidelities.len(), 6);
            assert!(s.fidelities.iter().all(|f| (0.0..=1.0).contains(f)));
            assert!(s.q1 <= s.median && s.median <= s.q3);
        }
    }

    #[test]
    fn single_trial_matches_manual_pipeline() {
        let mut cfg = small(MeasurementMode::Entangled);
        cfg.trials = 1;
        cfg.n_range = vec![3];
        let res = bench_run(&cfg).unwrap();
        let psi = haar_random(3, state_seed(42, 3, 0));
        let opts = cfg.options().unwrap();
        let recs = simulate_counts(
            &psi,
            cfg.mode,
            &opts.family,
            cfg.shots,
            None,
            counts_seed(42, 3, 0),
        )
        .unwrap();
        let (est, _) = reconstruct(&recs, 3, &opts).unwrap();
        assert_eq!(
            res.rows[0].fidelity.to_bits(),
            fidelity(&psi, &est).unwrap().to_bits()
        );
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = small(MeasurementMode::Local);
        cfg.trials = 0;
        assert!(bench_run(&cfg).is_err());
        let mut cfg = small(MeasurementMode::Local);
        cfg.n_range = vec![30];
        assert!(matches!(bench_run(&cfg), Err(Error::InvalidConfig(_))));
        let mut cfg = small(MeasurementMode::Local);
        cfg.noise = Some(NoiseModel::default_gates());
        assert!(bench_run(&cfg).is_err());
        let mut cfg = small(MeasurementMode::Local);
        cfg.n_range.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn toml_config() {
        let cfg = BenchConfig::from_toml(
            "n_range = [2, 4]\nm = 3\nmode = \"entangled\"\nshots = 1024\ntrials = 3\nstates = \"phi4\"\nseed = 9\n\n[noise.gates]\nr_local = 0.0005\nr_cnot = 0.02\n",
        )
        .unwrap();
        assert_eq!(cfg.state_family, StateFamily::Named(NamedState::Phi4));
        assert_eq!(cfg.noise, Some(NoiseModel::default_gates()));
        assert!(BenchConfig::from_toml("n_range = [2]\nm = 2\nmode = \"local\"\nshots = 1\ntrials = 1\nstates = \"haar\"\nseed = 0\nbogus = 1\n").is_err());
        assert!(BenchConfig::from_toml("n_range = []\nm = 2\nmode = \"local\"\nshots = 1\ntrials = 1\nstates = \"haar\"\nseed = 0\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            TrialRow {
                n: 2,
                trial: 0,
                fidelity: 0.987654321,
                cond_max: 1.5,
                fallbacks: 0,
            },
            TrialRow {
                n: 2,
                trial: 1,
                fidelity: 1.0,
                cond_max: f64::INFINITY,
                fallbacks: 3,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,trial,fidelity,cond_max,fallbacks\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn state_family_names() {
        for s in ["haar", "separable", "phi1", "phi2", "phi3", "phi4"] {
            assert_eq!(s.parse::<StateFamily>().unwrap().to_string(), s);
        }
        assert_eq!(
            "ghz".parse::<StateFamily>().unwrap(),
            StateFamily::Named(NamedState::Phi4)
        );
        assert!("foo".parse::<StateFamily>().is_err());
    }
}
