mod common;

use common::*;
use proptest::prelude::*;
use qgas::audit::{audit, Classification, DEFAULT_TOL};
use qgas::error::Error;
use qgas::linalg::{conjugate, hermitian_eig, trace_product, ComplexMatrix, Ket};
use qgas::observers::{states_equivalent, Observer};
use qgas::quantum::{
    are_orthogonal, lift_povm, measure, optimal_separation_povm, Povm, StatisticalMatrix,
};
use qgas::thermo::{canonical_contents, Chamber, EventKind, GasComponent, LabState, Ledger};
use rand::Rng;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn lab_with(chambers: Vec<Chamber>, dim: usize) -> LabState {
    chambers
        .into_iter()
        .fold(LabState::new(1.0, dim).unwrap(), |lab, c| lab.with_chamber(c).unwrap())
}

fn pure_gas(k: &Ket, moles: f64) -> GasComponent {
    GasComponent::new(StatisticalMatrix::pure(k), moles).unwrap()
}

fn check_povm_and_measurement(seed: u64, dim: usize) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let outcomes = r.random_range(2..=4);
    let povm = random_povm(&mut r, dim, outcomes);
    // completeness, recomputed with nalgebra
    let sum = povm
        .effects()
        .iter()
        .fold(nalgebra::DMatrix::zeros(dim, dim), |acc, a| acc + to_na(a).adjoint() * to_na(a));
    let identity = nalgebra::DMatrix::<num_complex::Complex64>::identity(dim, dim);
    prop_assert!((sum - identity).iter().all(|z| z.norm() <= 1e-10));

    let rho = random_state(&mut r, dim);
    let results = measure(&povm, &rho).unwrap();
    let total: f64 = results.iter().map(|o| o.probability).sum();
    prop_assert!((total - 1.0).abs() <= 1e-10);
    for o in &results {
        prop_assert!((-1e-10..=1.0 + 1e-10).contains(&o.probability));
        if let Some(post) = &o.post_state {
            prop_assert!((post.matrix().trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(post.matrix().is_hermitian(1e-10));
            prop_assert!(min_eigenvalue(post.matrix()) >= -1e-10);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn povm_completeness_and_normalization_dim2(seed in any::<u64>()) {
        check_povm_and_measurement(seed, 2)?;
    }

    #[test]
    fn povm_completeness_and_normalization_dim4(seed in any::<u64>()) {
        check_povm_and_measurement(seed, 4)?;
    }

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let m = random_hermitian(&mut r, dim);
        let pairs = hermitian_eig(&m, 1e-12).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(dim).unwrap();
        for p in &pairs {
            rebuilt = rebuilt.add(&ComplexMatrix::projector(&p.vector).scale(p.value)).unwrap();
        }
        prop_assert!(rebuilt.max_abs_diff(&m).unwrap() <= 1e-10);
    }

    #[test]
    fn trace_product_is_cyclic(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let a = from_na(&random_matrix_na(&mut r, dim));
        let b = from_na(&random_matrix_na(&mut r, dim));
        let d = trace_product(&a, &b).unwrap() - trace_product(&b, &a).unwrap();
        prop_assert!(d.norm() <= 1e-14 * (1.0 + dim as f64 * dim as f64));
    }

    #[test]
    fn conjugation_keeps_positivity(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let a = from_na(&random_matrix_na(&mut r, dim));
        let rho = random_state(&mut r, dim);
        let out = conjugate(&a, rho.matrix()).unwrap();
        prop_assert!(min_eigenvalue(&out.hermitian_part()) >= -1e-10);
    }

    #[test]
    fn coarse_graining_is_a_channel(seed in any::<u64>()) {
        let mut r = rng(seed);
        let obs = random_coarse_observer(&mut r);
        let rho = random_state(&mut r, 4);
        let out = obs.coarse_grain(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.matrix().trace().im.abs() <= 1e-10);
        prop_assert!(min_eigenvalue(out.matrix()) >= -1e-10);
    }

    #[test]
    fn lift_agrees_with_coarse_graining(seed in any::<u64>()) {
        let mut r = rng(seed);
        let obs = random_coarse_observer(&mut r);
        let povm = random_povm(&mut r, 2, 2);
        let lifted = lift_povm(&povm, &obs).unwrap();
        let rho = random_state(&mut r, 4);
        let p_lab = lifted.probabilities(&rho).unwrap();
        let p_obs = povm.probabilities(&obs.coarse_grain(&rho).unwrap()).unwrap();
        for (a, b) in p_lab.iter().zip(&p_obs) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn no_perfect_discrimination(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 4])) {
        let mut r = rng(seed);
        let rho = random_state(&mut r, dim);
        let sigma = random_state(&mut r, dim);
        let overlap = trace_product(rho.matrix(), sigma.matrix()).unwrap().re;
        prop_assume!(overlap > 1e-6);
        prop_assert!(!are_orthogonal(&rho, &sigma, 1e-9).unwrap());
        for povm in [random_povm(&mut r, dim, 2), projective_povm(&mut r, dim)] {
            let pr = povm.probabilities(&rho).unwrap();
            let ps = povm.probabilities(&sigma).unwrap();
            prop_assert!(!(pr[0] > 1.0 - 1e-9 && ps[0] < 1e-9));
        }
    }

    #[test]
    fn membranes_cannot_unmix_overlapping_pure_gases(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 4])) {
        let mut r = rng(seed);
        let a = random_ket(&mut r, dim);
        let b = random_ket(&mut r, dim);
        prop_assume!(a.inner(&b).unwrap().norm_sqr() > 1e-6);
        let lab = lab_with(vec![
            Chamber::new("A", 0.5, vec![pure_gas(&a, 0.5)]).unwrap(),
            Chamber::new("B", 0.5, vec![pure_gas(&b, 0.5)]).unwrap(),
        ], dim);
        let best = optimal_separation_povm(&[
            (0.5, StatisticalMatrix::pure(&a)),
            (0.5, StatisticalMatrix::pure(&b)),
        ]).unwrap().povm;
        for povm in [best, projective_povm(&mut r, dim), random_povm(&mut r, dim, 3)] {
            let is_indistinguishable = matches!(lab.mix("A", "B", "M", &povm), Err(Error::Indistinguishable { .. }));
            prop_assert!(is_indistinguishable);
        }
    }

    #[test]
    fn optimal_separation_projectors_are_orthogonal(seed in any::<u64>(), dim in 2usize..=4) {
        let mut r = rng(seed);
        let parts: Vec<(f64, StatisticalMatrix)> = (0..3).map(|_| (1.0 / 3.0, random_state(&mut r, dim))).collect();
        let sep = optimal_separation_povm(&parts).unwrap();
        let effects = sep.povm.effects();
        for i in 0..effects.len() {
            for j in 0..i {
                prop_assert!(trace_product(&effects[i], &effects[j]).unwrap().norm() <= 1e-10);
            }
        }
        let oracle = oracle_eigenvalues(StatisticalMatrix::mixture(&parts).unwrap().matrix());
        for (a, b) in sep.eigenvalues.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn mix_then_separate_is_reversible(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 4]), na in 0.05f64..2.0, nb in 0.05f64..2.0) {
        let mut r = rng(seed);
        let basis = random_basis(&mut r, dim);
        // equal pressure: volume proportional to moles
        let lab = lab_with(vec![
            Chamber::new("A", na, vec![pure_gas(&basis[0], na)]).unwrap(),
            Chamber::new("B", nb, vec![pure_gas(&basis[1], nb)]).unwrap(),
        ], dim);
        let povm = Povm::projective(&basis).unwrap();
        let (mixed, e1) = lab.mix("A", "B", "M", &povm).unwrap();
        let (back, e2) = mixed.separate("M", &povm, &["A", "B"]).unwrap();
        prop_assert!(e1.heat_absorbed_by_gas >= 0.0);
        prop_assert!(e2.heat_absorbed_by_gas <= 0.0);
        prop_assert!((e1.heat_absorbed_by_gas + e2.heat_absorbed_by_gas).abs() <= 1e-9);
        for (x, y) in lab.chambers().iter().zip(back.chambers()) {
            prop_assert!((x.volume() - y.volume()).abs() <= 1e-9);
            prop_assert!((x.total_moles() - y.total_moles()).abs() <= 1e-12);
        }
    }

    #[test]
    fn random_operations_conserve_moles_and_book_q_equal_w(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = if r.random_bool(0.5) { 2 } else { 4 };
        let basis = random_basis(&mut r, dim);
        let mut lab = lab_with(vec![
            Chamber::new("A", 1.0, vec![
                GasComponent::new(random_state(&mut r, dim), 0.6).unwrap(),
                GasComponent::new(random_state(&mut r, dim), 0.4).unwrap(),
            ]).unwrap(),
            Chamber::new("B", 0.5, vec![pure_gas(&basis[0], 0.5)]).unwrap(),
        ], dim);
        let total = lab.total_moles();
        let mut ledger = Ledger::new();
        let mut fresh = 0;
        for _ in 0..8 {
            let names: Vec<String> = lab.chambers().iter().map(|c| c.name().to_string()).collect();
            let pick = names[r.random_range(0..names.len())].clone();
            fresh += 2;
            let (x, y) = (format!("c{fresh}"), format!("c{}", fresh + 1));
            let step = match r.random_range(0..5) {
                0 => lab.separate(&pick, &random_povm(&mut r, dim, 2), &[]),
                1 => lab.partition(&pick, r.random_range(0.1..0.9), [&x, &y]),
                2 => lab.rotate(&pick, &[(basis[0].clone(), basis[1].clone()), (basis[1].clone(), basis[0].clone())]),
                3 if names.len() >= 2 => lab.join(&names[0], &names[1], &x),
                _ if names.len() >= 2 => lab.mix(&names[0], &names[1], &x, &projective_povm(&mut r, dim)),
                _ => continue,
            };
            let Ok((next, event)) = step else { continue };
            prop_assert_eq!(event.heat_absorbed_by_gas, event.work_done_by_gas);
            match event.kind {
                EventKind::Separate => prop_assert!(event.heat_absorbed_by_gas <= 0.0),
                EventKind::Mix => prop_assert!(event.heat_absorbed_by_gas >= 0.0),
                _ => prop_assert_eq!(event.heat_absorbed_by_gas, 0.0),
            }
            prop_assert!((next.total_moles() - total).abs() <= 1e-12);
            for c in next.chambers() {
                let contents = canonical_contents(c).unwrap();
                let sum: f64 = contents.iter().map(|(w, _)| w).sum();
                prop_assert!((sum - 1.0).abs() <= 1e-10);
                prop_assert!(contents.iter().all(|(w, _)| *w >= 0.0));
            }
            ledger.record(event);
            lab = next;
        }
        for e in ledger.events() {
            prop_assert_eq!(e.heat_absorbed_by_gas, e.work_done_by_gas);
        }
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_and_coarsens(seed in any::<u64>()) {
        let mut r = rng(seed);
        let coarse = random_coarse_observer(&mut r);
        let fine = Observer::identity("fine", 4).unwrap();
        let gas = |r: &mut rand_chacha::ChaCha8Rng| GasComponent::new(random_state(r, 4), 0.5).unwrap();
        let a = lab_with(vec![Chamber::new("A", 1.0, vec![gas(&mut r)]).unwrap()], 4);
        let b = lab_with(vec![Chamber::new("A", 1.0, vec![gas(&mut r)]).unwrap()], 4);
        for obs in [&coarse, &fine] {
            prop_assert!(states_equivalent(obs, &a, &a, DEFAULT_TOL).unwrap());
            prop_assert_eq!(
                states_equivalent(obs, &a, &b, DEFAULT_TOL).unwrap(),
                states_equivalent(obs, &b, &a, DEFAULT_TOL).unwrap()
            );
        }
        // refinement: whatever the identity observer equates, the coarse one does too
        if states_equivalent(&fine, &a, &b, DEFAULT_TOL).unwrap() {
            prop_assert!(states_equivalent(&coarse, &a, &b, DEFAULT_TOL).unwrap());
        }
        let (halves, _) = a.partition("A", 0.3, ["X", "Y"]).unwrap();
        let (rejoined, _) = halves.join("X", "Y", "A").unwrap();
        prop_assert!(states_equivalent(&fine, &a, &rejoined, DEFAULT_TOL).unwrap());
        prop_assert!(states_equivalent(&coarse, &a, &rejoined, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn classification_table(q in -10.0f64..10.0, closed in any::<bool>()) {
        let c = Classification::classify(q, closed, DEFAULT_TOL);
        let expected = if !closed {
            Classification::OpenCycle
        } else if q > DEFAULT_TOL {
            Classification::ApparentViolation
        } else {
            Classification::Consistent
        };
        prop_assert_eq!(c, expected);
    }

    #[test]
    fn audit_is_additive(heats in prop::collection::vec(-1.0f64..1.0, 1..12), split in 0usize..12) {
        let lab = lab_with(vec![Chamber::new("A", 1.0, vec![pure_gas(&Ket::basis(2, 0).unwrap(), 1.0)]).unwrap()], 2);
        let obs = Observer::identity("id", 2).unwrap();
        let mut ledger = Ledger::new();
        ledger.checkpoint_at("c1", &lab).unwrap();
        let split = split.min(heats.len());
        for (i, q) in heats.iter().enumerate() {
            if i == split {
                ledger.checkpoint_at("c2", &lab).unwrap();
            }
            ledger.record(qgas::thermo::LedgerEvent::isothermal(EventKind::Mix, *q, "synthetic"));
        }
        if split == heats.len() {
            ledger.checkpoint_at("c2", &lab).unwrap();
        }
        let whole = audit(&ledger, &obs, "c1", &lab, DEFAULT_TOL).unwrap().q_total;
        let first = ledger.heat_between("c1", "c2").unwrap();
        let second = audit(&ledger, &obs, "c2", &lab, DEFAULT_TOL).unwrap().q_total;
        prop_assert!((whole - first - second).abs() <= 1e-12);
    }
}

#[test]
fn sector_rotation_is_invisible_only_to_the_coarse_observer() {
    // lab kets 0 and 2 share a description; swapping them is a unitary the
    // coarse observer cannot see
    let k = |i| Ket::basis(4, i).unwrap();
    let one = |i| Ket::basis(2, i).unwrap();
    let coarse = qgas::observers::build_observer(
        "coarse",
        &[(k(0), one(0)), (k(1), one(1)), (k(2), one(0)), (k(3), one(1))],
        2,
    )
    .unwrap();
    let fine = Observer::identity("fine", 4).unwrap();
    let a = lab_with(vec![Chamber::new("A", 1.0, vec![pure_gas(&k(0), 1.0)]).unwrap()], 4);
    let (b, _) = a.rotate("A", &[(k(0), k(2)), (k(2), k(0))]).unwrap();
    assert!(states_equivalent(&coarse, &a, &b, DEFAULT_TOL).unwrap());
    assert!(!states_equivalent(&fine, &a, &b, DEFAULT_TOL).unwrap());
}
