//! Two observers describing the same lab: one resolves the two species of
//! spin gas, the other only sees the spin.
//!
//! Run with `cargo run --example coarse_graining`.

use qgas::linalg::Ket;
use qgas::observers::{build_observer, Observer};
use qgas::quantum::{lift_povm, Povm, StatisticalMatrix};

fn ket(a: &[f64]) -> Ket {
    Ket::from_real(a).expect("valid ket")
}

pub fn spin_only() -> qgas::Result<Observer> {
    let table = [
        (ket(&[1.0, 0.0, 0.0, 0.0]), ket(&[1.0, 0.0])),
        (ket(&[0.0, 1.0, 0.0, 0.0]), ket(&[0.0, 1.0])),
        (ket(&[0.0, 0.0, 1.0, 0.0]), ket(&[1.0, 0.0])),
        (ket(&[0.0, 0.0, 0.0, 1.0]), ket(&[0.0, 1.0])),
    ];
    build_observer("spin-only", &table, 2)
}

/// Returns the probability of the lifted outcome in the lab and in the
/// observer's own description.
pub fn run() -> qgas::Result<(f64, f64)> {
    let coarse = spin_only()?;
    let fine = Observer::identity("full", 4)?;
    println!("{} groups the lab kets into {} sectors", coarse.name(), coarse.sector_isometries().len());

    // z+ of the first species mixed with x+ of the second
    let lab = StatisticalMatrix::mixture(&[
        (0.5, StatisticalMatrix::pure(&ket(&[1.0, 0.0, 0.0, 0.0]))),
        (0.5, StatisticalMatrix::pure(&ket(&[0.0, 0.0, 1.0, 1.0]))),
    ])?;
    println!("seen by {}:\n{}", fine.name(), fine.coarse_grain(&lab)?.matrix());
    let seen = coarse.coarse_grain(&lab)?;
    println!("seen by {}:\n{}", coarse.name(), seen.matrix());

    let povm = Povm::projective(&[ket(&[1.0, 0.0]), ket(&[0.0, 1.0])])?;
    let lifted = lift_povm(&povm, &coarse)?;
    let p_lab = lifted.probabilities(&lab)?[0];
    let p_obs = povm.probabilities(&seen)?[0];
    println!("P(z+) = {p_lab:.9} in the lab, {p_obs:.9} in the description");
    Ok((p_lab, p_obs))
}

fn main() -> qgas::Result<()> {
    run().map(|_| ())
}
