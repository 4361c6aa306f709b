//! Mixing two kinds of argon and auditing the result, directly through the
//! library API.
//!
//! Run with `cargo run --example audit_cycle`.

use qgas::audit::{audit, Verdict, DEFAULT_TOL};
use qgas::linalg::Ket;
use qgas::observers::{build_observer, Observer};
use qgas::quantum::{Povm, StatisticalMatrix};
use qgas::thermo::{Chamber, GasComponent, LabState, Ledger};

pub fn run() -> qgas::Result<Vec<Verdict>> {
    let a = Ket::from_real(&[1.0, 0.0])?;
    let b = Ket::from_real(&[0.0, 1.0])?;
    let one = Ket::from_real(&[1.0])?;
    let blind = build_observer("blind", &[(a.clone(), one.clone()), (b.clone(), one)], 1)?;
    let sharp = Observer::identity("sharp", 2)?;

    let gas = |k: &Ket| GasComponent::new(StatisticalMatrix::pure(k), 0.5);
    let mut lab = LabState::new(1.0, 2)?
        .with_chamber(Chamber::new("U", 0.5, vec![gas(&a)?])?)?
        .with_chamber(Chamber::new("L", 0.5, vec![gas(&b)?])?)?;
    let mut ledger = Ledger::new();
    ledger.checkpoint_at("start", &lab)?;

    let membranes = Povm::projective(&[a, b])?;
    let (mixed, event) = lab.mix("U", "L", "M", &membranes)?;
    println!("{:>10}  Q = {:+.9}  {}", event.kind, event.heat_absorbed_by_gas, event.description);
    ledger.record(event);
    let (halved, event) = mixed.partition("M", 0.5, ["U", "L"])?;
    println!("{:>10}  Q = {:+.9}  {}", event.kind, event.heat_absorbed_by_gas, event.description);
    ledger.record(event);
    lab = halved;

    let mut verdicts = Vec::new();
    for obs in [&blind, &sharp] {
        let v = audit(&ledger, obs, "start", &lab, DEFAULT_TOL)?;
        println!(
            "{}: Q/T = {:.9}, cycle {}, {}",
            v.observer,
            v.q_over_t,
            if v.cycle_closed { "closed" } else { "open" },
            v.classification
        );
        verdicts.push(v);
    }
    Ok(verdicts)
}

fn main() -> qgas::Result<()> {
    run().map(|_| ())
}
