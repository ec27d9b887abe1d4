use std::collections::BTreeMap;

use proptest::prelude::*;
use puretomo::bases::{canonical_outcome, outcome_role, OutcomeRole};
use puretomo::bases::{default_family, required_bases, BasisId, MeasurementMode};
use puretomo::counts::{CountsFile, CountsRecord};
use puretomo::harness::{simulate_counts, simulate_exact};
use puretomo::measure::{born_probs, sample};
use puretomo::reconstruct::{
    build_system, lstsq_two_columns, reconstruct, reconstruct_from_probs, solve_phase,
    AmbiguityPolicy, Equation, PhaseSystem, ReconstructionOptions, RowForm,
};
use puretomo::state::{fidelity, haar_random, reduced_slice, ReducedState, PHASE_EPS};

fn residual(rows: &[[f64; 2]], rhs: &[f64], x: [f64; 2]) -> f64 {
    rows.iter()
        .zip(rhs)
        .map(|(r, t)| (r[0] * x[0] + r[1] * x[1] - t).powi(2))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_reconstruction_local(n in 1usize..=5, m in 2usize..=4, seed in any::<u64>(), extra in any::<bool>()) {
        let psi = haar_random(n, seed);
        let opts = ReconstructionOptions::local(m).unwrap().with_extra_rows(extra);
        let tables = simulate_exact(&psi, MeasurementMode::Local, &opts.family).unwrap();
        let (est, diag) = reconstruct_from_probs(&tables, n, &opts).unwrap();
        prop_assert!(fidelity(&psi, &est).unwrap() >= 1.0 - 1e-8);
        prop_assert_eq!(diag.solved() + diag.null_branches, (1 << n) - 1);
    }

    #[test]
    fn exact_reconstruction_entangled(n in 1usize..=5, m in 2usize..=3, seed in any::<u64>()) {
        let psi = haar_random(n, seed);
        let opts = ReconstructionOptions::entangled(m).unwrap();
        let tables = simulate_exact(&psi, MeasurementMode::Entangled, &opts.family).unwrap();
        let (est, diag) = reconstruct_from_probs(&tables, n, &opts).unwrap();
        if diag.fallbacks == 0 {
            prop_assert!(fidelity(&psi, &est).unwrap() >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn estimates_are_normalized_and_phase_fixed(n in 1usize..=5, seed in any::<u64>(), entangled in any::<bool>()) {
        let psi = haar_random(n, seed);
        let opts = if entangled {
            ReconstructionOptions::entangled(2).unwrap()
        } else {
            ReconstructionOptions::local(2).unwrap()
        };
        let recs = simulate_counts(&psi, opts.mode, &opts.family, 256, None, seed ^ 1).unwrap();
        let (est, diag) = reconstruct(&recs, n, &opts).unwrap();
        let norm: f64 = est.amps().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        let pivot = est.amps().iter().find(|z| z.norm() > PHASE_EPS).unwrap();
        prop_assert!(pivot.im == 0.0 && pivot.re > 0.0);
        for (c, s) in diag.phases.values() {
            prop_assert!((c * c + s * s - 1.0).abs() <= 1e-12);
        }
        let (again, _) = reconstruct(&recs, n, &opts).unwrap();
        prop_assert_eq!(est, again);
    }

    #[test]
    fn solve_phase_lands_on_unit_circle(
        rows in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        rhs_scale in -3.0f64..3.0,
        threshold in prop::sample::select(vec![1e2, 1e6]),
    ) {
        let rhs: Vec<f64> = rows.iter().enumerate().map(|(i, r)| rhs_scale * (r.0 - r.1) + 0.1 * i as f64).collect();
        let rows: Vec<[f64; 2]> = rows.into_iter().map(|(a, b)| [a, b]).collect();
        let sys = PhaseSystem::from_rows(2, 0, rows, rhs).unwrap();
        let sol = solve_phase(&sys, threshold, AmbiguityPolicy::ResidualPick).unwrap();
        prop_assert!((sol.cos * sol.cos + sol.sin * sol.sin - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampled_counts_sum_to_shots(n in 1usize..=4, shots in 1u64..5000, seed in any::<u64>()) {
        let psi = haar_random(n, seed);
        let fam = default_family(2).unwrap();
        for id in required_bases(n, 2, MeasurementMode::Entangled) {
            let pt = born_probs(&psi, id, &fam).unwrap();
            prop_assert!((pt.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let cr = sample(&pt, shots, seed).unwrap();
            prop_assert_eq!(cr.counts().values().sum::<u64>(), shots);
        }
    }

    #[test]
    fn counts_json_round_trip(n in 1usize..=4, records in prop::collection::vec(prop::collection::btree_map(0usize..16, 0u64..50, 0..8), 1..4)) {
        let fam = default_family(2).unwrap();
        let ids = required_bases(n, 2, MeasurementMode::Local);
        let recs: Vec<CountsRecord> = records
            .into_iter()
            .zip(&ids)
            .filter_map(|(mut counts, &id)| {
                counts.retain(|&k, _| k < 1 << n);
                counts.insert(0, 1);
                let shots = counts.values().sum();
                CountsRecord::new(id, n, shots, counts).ok()
            })
            .collect();
        let file = CountsFile::new(n, fam, recs).unwrap();
        let text = file.to_json().unwrap();
        let back = CountsFile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }
}

fn children(
    psi: &puretomo::state::PureState,
    j: usize,
    beta: usize,
) -> (ReducedState, ReducedState) {
    (
        reduced_slice(psi, j - 1, 2 * beta).unwrap(),
        reduced_slice(psi, j - 1, 2 * beta + 1).unwrap(),
    )
}

#[test]
fn extra_rows_never_beat_canonical_on_shared_rows() {
    let fam = default_family(3).unwrap();
    for seed in 0..20u64 {
        let n = 4;
        let psi = haar_random(n, seed);
        let recs = simulate_counts(&psi, MeasurementMode::Local, &fam, 2048, None, seed).unwrap();
        let tables: BTreeMap<BasisId, Vec<f64>> = recs
            .iter()
            .map(|r| (r.basis(), puretomo::measure::to_empirical(r).probs))
            .collect();
        for j in 1..=n {
            for beta in 0..1 << (n - j) {
                let (a, b) = children(&psi, j, beta);
                let mut canon = Vec::new();
                let mut all = Vec::new();
                for a_idx in 1..=3 {
                    let id = BasisId::Local { a: a_idx, b: j };
                    let k = canonical_outcome(id, n, j, beta).unwrap();
                    canon.push(Equation {
                        role: OutcomeRole::canonical(j, beta, a_idx),
                        prob: tables[&id][k],
                    });
                    for (k, &prob) in tables[&id].iter().enumerate().skip(beta << j).take(1 << j) {
                        all.push(Equation {
                            role: outcome_role(id, k, n).unwrap(),
                            prob,
                        });
                    }
                }
                // Canonical equations in the general scaling, so residuals compare.
                let shared = build_system(j, beta, &a, &b, &canon, &fam, RowForm::General).unwrap();
                let ext = build_system(j, beta, &a, &b, &all, &fam, RowForm::General).unwrap();
                let x_can = lstsq_two_columns(&shared.rows, &shared.rhs)
                    .solution
                    .unwrap();
                let x_ext = lstsq_two_columns(&ext.rows, &ext.rhs).solution.unwrap();
                let tol = 1e-12;
                assert!(
                    residual(&shared.rows, &shared.rhs, x_can)
                        <= residual(&shared.rows, &shared.rhs, x_ext) + tol
                );
                assert!(
                    residual(&ext.rows, &ext.rhs, x_ext)
                        <= residual(&ext.rows, &ext.rhs, x_can) + tol
                );
            }
        }
    }
}

#[test]
fn null_blocks_contribute_no_problems() {
    let fam = default_family(2).unwrap();
    let psi = haar_random(4, 8);
    let mut tables = simulate_exact(&psi, MeasurementMode::Local, &fam).unwrap();
    // Zero the computational outcomes of block (j=2, beta=1).
    for k in 4..8 {
        tables[0].probs[k] = 0.0;
    }
    let opts = ReconstructionOptions::local(2).unwrap();
    let (_, diag) = reconstruct_from_probs(&tables, 4, &opts).unwrap();
    for (j, beta) in [(1, 2), (1, 3), (2, 1)] {
        assert!(
            !diag.cond.contains_key(&(j, beta)),
            "({j}, {beta}) was solved"
        );
    }
    assert_eq!(diag.solved() + diag.null_branches, 15);
}
