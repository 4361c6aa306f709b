//! Eigen-decomposition of an equal mixture of z+ and x+ spin states.
//!
//! Run with `cargo run --example eigen_mixture`.

use qgas::linalg::Ket;
use qgas::quantum::{optimal_separation_povm, StatisticalMatrix};

pub fn run() -> qgas::Result<Vec<f64>> {
    let zp = StatisticalMatrix::pure(&Ket::from_real(&[1.0, 0.0])?);
    let xp = StatisticalMatrix::pure(&Ket::from_real(&[1.0, 1.0])?);
    let lambda = StatisticalMatrix::mixture(&[(0.5, zp.clone()), (0.5, xp.clone())])?;
    println!("mixture:\n{}", lambda.matrix());

    let sep = optimal_separation_povm(&[(0.5, zp), (0.5, xp)])?;
    for (value, vector) in sep.eigenvalues.iter().zip(&sep.eigenvectors) {
        let amps: Vec<String> = vector.amplitudes().iter().map(|z| format!("{:.6}", z.re)).collect();
        println!("eigenvalue {value:.9}  eigenvector [{}]", amps.join(", "));
    }
    Ok(sep.eigenvalues)
}

fn main() -> qgas::Result<()> {
    run().map(|_| ())
}
