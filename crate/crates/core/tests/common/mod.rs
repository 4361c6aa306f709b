//! Random generators and an independent linear algebra oracle (nalgebra).
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qgas::linalg::{ComplexMatrix, Ket};
use qgas::observers::{build_observer, Observer};
use qgas::quantum::{Povm, StatisticalMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.entries())
}

pub fn from_na(m: &DMatrix<Complex64>) -> ComplexMatrix {
    let rows: Vec<Vec<Complex64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    ComplexMatrix::from_rows(&rows).unwrap()
}

pub fn random_matrix_na(rng: &mut impl Rng, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let m = random_matrix_na(rng, dim);
    from_na(&((&m + m.adjoint()) * c(0.5, 0.0)))
}

pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        if let Ok(k) = Ket::new(amps) {
            return k;
        }
    }
}

/// Columns of a random unitary, via nalgebra's QR.
pub fn random_basis(rng: &mut impl Rng, dim: usize) -> Vec<Ket> {
    let q = random_matrix_na(rng, dim).qr().q();
    (0..dim).map(|j| Ket::new(q.column(j).iter().copied().collect()).unwrap()).collect()
}

/// Random full-rank or low-rank state `M M† / tr`.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> StatisticalMatrix {
    let rank = rng.random_range(1..=dim);
    let m = DMatrix::from_fn(dim, rank, |_, _| random_complex(rng));
    let rho = &m * m.adjoint();
    let tr = rho.trace();
    StatisticalMatrix::new(from_na(&(rho / tr))).unwrap()
}

/// `S^{-1/2}` of a positive definite Hermitian matrix, by nalgebra.
fn inverse_sqrt(s: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = s.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| c(1.0 / v.sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Random complete set of Kraus effects: `A_k = M_k S^{-1/2}` with
/// `S = Σ M_k† M_k`.
pub fn random_povm(rng: &mut impl Rng, dim: usize, outcomes: usize) -> Povm {
    let ms: Vec<DMatrix<Complex64>> = (0..outcomes).map(|_| random_matrix_na(rng, dim)).collect();
    let s = ms.iter().fold(DMatrix::zeros(dim, dim), |acc, m| acc + m.adjoint() * m);
    let inv = inverse_sqrt(&s);
    let effects = ms.iter().map(|m| from_na(&(m * &inv))).collect();
    Povm::new(effects, (0..outcomes).map(|i| format!("o{i}")).collect()).unwrap()
}

pub fn projective_povm(rng: &mut impl Rng, dim: usize) -> Povm {
    Povm::projective(&random_basis(rng, dim)).unwrap()
}

/// Observer on a random lab basis of dimension 4, describing it in a
/// two-dimensional space through two randomly rotated sectors.
pub fn random_coarse_observer(rng: &mut impl Rng) -> Observer {
    let lab = random_basis(rng, 4);
    let first = random_basis(rng, 2);
    let second = random_basis(rng, 2);
    let table = vec![
        (lab[0].clone(), first[0].clone()),
        (lab[1].clone(), first[1].clone()),
        (lab[2].clone(), second[0].clone()),
        (lab[3].clone(), second[1].clone()),
    ];
    build_observer("random", &table, 2).unwrap()
}

/// Eigenvalues of a Hermitian matrix, descending, by nalgebra.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    *oracle_eigenvalues(m).last().unwrap()
}

/// A valid prelude: one spin space, two gases, one filled chamber and an
/// identity observer `me`. Eight lines.
pub const PRELUDE: &str = "\
space s dim 2
ket up = [1, 0]
ket down = [0, 1]
gas Up from ket up
gas Down from ket down
observer me table { up -> up, down -> down } dim 2
chamber A volume 1
fill A { Up: 0.5, Down: 0.5 } moles 1
";

/// A malformed protocol with the line and token the error must point at
/// (empty token: end of line).
pub struct Malformed {
    pub name: &'static str,
    pub source: String,
    pub line: usize,
    pub token: &'static str,
}

fn after_prelude(name: &'static str, extra: &str, line: usize, token: &'static str) -> Malformed {
    Malformed {
        name,
        source: format!("{PRELUDE}{extra}\n"),
        line,
        token,
    }
}

fn standalone(name: &'static str, source: &str, line: usize, token: &'static str) -> Malformed {
    Malformed {
        name,
        source: source.to_string(),
        line,
        token,
    }
}

pub fn malformed_cases() -> Vec<Malformed> {
    vec![
        standalone("undeclared chamber in first step", "space s dim 2\nseparate A by eigenbasis into B C\n", 2, "A"),
        after_prelude("undeclared chamber", "separate Z by eigenbasis into B C", 9, "Z"),
        after_prelude("undeclared second chamber", "mix A B into C by povm { up, down }", 9, "B"),
        after_prelude("undeclared ket in povm", "separate A by povm { up, left } into B C", 9, "left"),
        after_prelude("dangling arrow", "rotate A map { up -> }", 9, "}"),
        after_prelude("fraction out of range", "partition A at 1.5 into B C", 9, "1.5"),
        after_prelude("join arity", "join A into B", 9, "B"),
        after_prelude("missing checkpoint label", "checkpoint", 9, ""),
        after_prelude("undeclared observer", "checkpoint a\naudit nobody from a", 10, "nobody"),
        after_prelude("undeclared checkpoint", "assert-closed me from zz", 9, "zz"),
        after_prelude("unknown keyword", "teleport A", 9, "teleport"),
        after_prelude("stray character", "chamber B volume 1 $", 9, "$"),
        standalone("second space", "space s dim 2\nspace t dim 3\n", 2, "space"),
        standalone("dimension too large", "space s dim 9\n", 1, "9"),
        standalone("trailing comma", "space s dim 2\nket k = [1, 0, ]\n", 2, "]"),
        standalone("zero ket", "space s dim 2\nket k = [0, 0]\n", 2, "["),
        standalone("undeclared ket for gas", "space s dim 2\nket k = [1, 0]\ngas G from ket q\n", 3, "q"),
        after_prelude("declaration after step", "checkpoint a\ntemp 2", 10, "temp"),
        after_prelude("duplicate output chamber", "separate A by povm { up, down } into B B", 9, "B"),
        standalone("bare imaginary unit", "space s dim 2\nket k = [1, 0.5+i]\n", 2, "i"),
    ]
}
