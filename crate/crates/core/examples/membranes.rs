//! Semi-permeable membranes: a perfect and a partial separation, with the
//! heat booked for each.
//!
//! Run with `cargo run --example membranes`.

use qgas::linalg::Ket;
use qgas::quantum::{optimal_separation_povm, Povm, StatisticalMatrix};
use qgas::thermo::{canonical_contents, Chamber, GasComponent, LabState};

fn half_and_half(a: &Ket, b: &Ket) -> qgas::Result<LabState> {
    let contents = vec![
        GasComponent::new(StatisticalMatrix::pure(a), 0.5)?,
        GasComponent::new(StatisticalMatrix::pure(b), 0.5)?,
    ];
    LabState::new(1.0, 2)?.with_chamber(Chamber::new("A", 1.0, contents)?)
}

fn report(lab: &LabState, heat: f64) {
    for c in lab.chambers() {
        println!("  {:<6} V = {:.7}  n = {:.7}", c.name(), c.volume(), c.total_moles());
    }
    println!("  heat absorbed by the gas: {heat:.9}");
}

/// Returns the heat of the perfect and of the partial separation.
pub fn run() -> qgas::Result<(f64, f64)> {
    let zp = Ket::from_real(&[1.0, 0.0])?;
    let zm = Ket::from_real(&[0.0, 1.0])?;
    let xp = Ket::from_real(&[1.0, 1.0])?;

    println!("z+ and z- gases, membranes along z:");
    let lab = half_and_half(&zp, &zm)?;
    let (perfect, event) = lab.separate("A", &Povm::projective(&[zp.clone(), zm])?, &["Up", "Down"])?;
    report(&perfect, event.heat_absorbed_by_gas);
    let q_perfect = event.heat_absorbed_by_gas;

    println!("z+ and x+ gases, membranes along the mixture eigenbasis:");
    let lab = half_and_half(&zp, &xp)?;
    let contents = canonical_contents(lab.chamber("A")?)?;
    let povm = optimal_separation_povm(&contents)?.povm;
    let (partial, event) = lab.separate("A", &povm, &["Plus", "Minus"])?;
    report(&partial, event.heat_absorbed_by_gas);
    Ok((q_perfect, event.heat_absorbed_by_gas))
}

fn main() -> qgas::Result<()> {
    run().map(|_| ())
}
