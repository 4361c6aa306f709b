//! Runs every example in `examples/` and checks what it returns.

#[allow(dead_code)]
#[path = "../examples/eigen_mixture.rs"]
mod eigen_mixture;
#[allow(dead_code)]
#[path = "../examples/membranes.rs"]
mod membranes;
#[allow(dead_code)]
#[path = "../examples/coarse_graining.rs"]
mod coarse_graining;
#[allow(dead_code)]
#[path = "../examples/audit_cycle.rs"]
mod audit_cycle;
#[allow(dead_code)]
#[path = "../examples/protocol_script.rs"]
mod protocol_script;
#[allow(dead_code)]
#[path = "../examples/scenarios.rs"]
mod scenarios;

use qgas::audit::Classification;
use std::f64::consts::LN_2;

#[test]
fn eigen_mixture() {
    let values = eigen_mixture::run().unwrap();
    let s2 = 2f64.sqrt();
    assert!((values[0] - (2.0 + s2) / 4.0).abs() < 1e-12);
    assert!((values[1] - (2.0 - s2) / 4.0).abs() < 1e-12);
}

#[test]
fn membranes() {
    let (perfect, partial) = membranes::run().unwrap();
    assert!((perfect + LN_2).abs() < 1e-12);
    let p = (2.0 + 2f64.sqrt()) / 4.0;
    assert!((partial - (p * p.ln() + (1.0 - p) * (1.0 - p).ln())).abs() < 1e-12);
}

#[test]
fn coarse_graining() {
    let (lab, obs) = coarse_graining::run().unwrap();
    assert!((lab - 0.75).abs() < 1e-12);
    assert!((obs - 0.75).abs() < 1e-12);
}

#[test]
fn audit_cycle() {
    let verdicts = audit_cycle::run().unwrap();
    assert_eq!(verdicts[0].classification, Classification::ApparentViolation);
    assert_eq!(verdicts[1].classification, Classification::OpenCycle);
}

#[test]
fn protocol_script() {
    let exec = protocol_script::run().unwrap();
    assert_eq!(exec.verdicts[0].classification, Classification::Consistent);
}

#[test]
fn scenarios() {
    let out = scenarios::run(None);
    assert_eq!(out.len(), 6);
    assert_eq!(scenarios::run(Some("jaynes-marie")).len(), 1);
}
