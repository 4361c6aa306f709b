mod common;

use common::*;
use qgas::linalg::{hermitian_eig, ComplexMatrix, Ket};

#[test]
fn eigenvalues_match_nalgebra_up_to_dim_8() {
    let mut r = rng(7);
    for dim in 1..=8 {
        for _ in 0..50 {
            let m = random_hermitian(&mut r, dim);
            let ours: Vec<f64> = hermitian_eig(&m, 1e-12).unwrap().iter().map(|p| p.value).collect();
            let oracle = oracle_eigenvalues(&m);
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-10, "dim {dim}: {ours:?} vs {oracle:?}");
            }
        }
    }
}

#[test]
fn eigenvectors_satisfy_the_eigen_equation() {
    let mut r = rng(11);
    for dim in 1..=8 {
        let m = random_hermitian(&mut r, dim);
        let pairs = hermitian_eig(&m, 1e-12).unwrap();
        for p in &pairs {
            let mv = m.apply(&p.vector).unwrap();
            for (x, v) in mv.iter().zip(p.vector.amplitudes()) {
                assert!((x - v * p.value).norm() <= 1e-10);
            }
            // phase convention: first significant component real and positive
            let lead = p.vector.amplitudes().iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(lead.im.abs() <= 1e-12 && lead.re > 0.0);
        }
        for (i, a) in pairs.iter().enumerate() {
            for b in &pairs[..i] {
                assert!(a.vector.inner(&b.vector).unwrap().norm() <= 1e-10);
            }
        }
    }
}

#[test]
fn degenerate_spectrum_is_deterministic() {
    // a rotated projector of rank 2 in dimension 4: the 1-eigenspace is degenerate
    let mut r = rng(3);
    let basis = random_basis(&mut r, 4);
    let m = ComplexMatrix::projector(&basis[0]).add(&ComplexMatrix::projector(&basis[1])).unwrap();
    let first = hermitian_eig(&m, 1e-12).unwrap();
    let second = hermitian_eig(&m.clone(), 1e-12).unwrap();
    assert_eq!(first, second);
    let values: Vec<f64> = first.iter().map(|p| p.value).collect();
    for (a, b) in values.iter().zip([1.0, 1.0, 0.0, 0.0]) {
        assert!((a - b).abs() <= 1e-12);
    }
    // identity: eigenvectors are the canonical basis, ordered descending
    // lexicographically
    let id = hermitian_eig(&ComplexMatrix::identity(3).unwrap(), 1e-12).unwrap();
    let vectors: Vec<Ket> = id.into_iter().map(|p| p.vector).collect();
    assert_eq!(vectors, vec![Ket::basis(3, 0).unwrap(), Ket::basis(3, 1).unwrap(), Ket::basis(3, 2).unwrap()]);
}
