//! Small dense complex matrices and kets.
//!
//! Everything here is sized for desk-scale Hilbert spaces (dimension 1 to 8).
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration with a fixed
//! sweep order, so identical inputs always give bit-identical outputs.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 8;

/// Jacobi stops once every off-diagonal magnitude is below this (scaled by the
/// matrix norm when that exceeds one).
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues closer than this are treated as degenerate when ordering.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Components below this magnitude are skipped when fixing an eigenvector's phase.
pub const PHASE_TOL: f64 = 1e-10;

const KET_NORM_TOL: f64 = 1e-12;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Dimension(format!(
            "dimension {dim} outside supported range 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from complex rows; every row must have as many entries
    /// as there are rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * m.dim + i] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Rank-one projector `|k⟩⟨k|`.
    pub fn projector(ket: &Ket) -> Self {
        Self::outer_unchecked(ket.amplitudes(), ket.amplitudes())
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &Ket, b: &Ket) -> Result<Self> {
        same_dim(a.dim(), b.dim())?;
        Ok(Self::outer_unchecked(a.amplitudes(), b.amplitudes()))
    }

    pub(crate) fn outer_unchecked(a: &[Complex64], b: &[Complex64]) -> Self {
        let dim = a.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for x in a {
            for y in b {
                entries.push(x * y.conj());
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Self { dim: n, entries }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * other.entries[k * n + c];
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Largest entrywise `|m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let d = (self.entries[r * n + c] - self.entries[c * n + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m†) / 2`; removes rounding asymmetry from products.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for r in 0..n {
            for c in r..n {
                let avg = (self.entries[r * n + c] + self.entries[c * n + r].conj()) * 0.5;
                out.entries[r * n + c] = avg;
                out.entries[c * n + r] = avg.conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dim(self.dim, other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol)
    }

    /// `m |v⟩`.
    pub fn apply(&self, ket: &Ket) -> Result<Vec<Complex64>> {
        same_dim(self.dim, ket.dim())?;
        Ok(self.apply_unchecked(ket.amplitudes()))
    }

    pub(crate) fn apply_unchecked(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.entries[r * n + c] * v[c]).sum())
            .collect()
    }

    /// `⟨a| m |b⟩`.
    pub(crate) fn sandwich(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mb = self.apply_unchecked(b);
        a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum()
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn format_complex(z: Complex64) -> String {
    if z.im.abs() < 1e-15 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Normalizes `amplitudes` and checks the result has unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidKet(format!("cannot normalize vector of norm {norm}")));
        }
        let amplitudes: Vec<Complex64> = amplitudes.into_iter().map(|z| z / norm).collect();
        let check = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (check - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::InvalidKet(format!("normalized norm {check} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Canonical basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Same ray up to a global phase, within `tol` on `1 - |⟨a|b⟩|`.
    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        self.inner(other).is_ok_and(|z| 1.0 - z.norm() <= tol)
    }

    /// Rotates the global phase so the first component above [`PHASE_TOL`] is
    /// real and positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(lead) = self.amplitudes.iter().find(|z| z.norm() > PHASE_TOL) {
            let rot = lead.conj() / lead.norm();
            for z in &mut self.amplitudes {
                *z *= rot;
            }
        }
        self
    }
}

/// One eigenvalue with its unit eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Ket,
}

/// `tr(a·b)`.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    same_dim(a.dim, b.dim)?;
    let n = a.dim;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a.entries[i * n + k] * b.entries[k * n + i];
        }
    }
    Ok(acc)
}

/// `a·rho·a†`.
pub fn conjugate(a: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim(a.dim, rho.dim)?;
    Ok(a.mul_unchecked(rho).mul_unchecked(&a.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order. Within a degenerate group
/// (values closer than [`DEGENERACY_TOL`]) eigenvectors are ordered by
/// descending lexicographic comparison of their `(re, im)` components, and
/// every eigenvector has its first significant component real and positive.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim;
    let mut a = m.hermitian_part().entries;
    let mut v = ComplexMatrix::identity(n)?.entries;

    let frobenius = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = JACOBI_OFF_DIAGONAL_TOL * frobenius.max(1.0);

    for _ in 0..MAX_SWEEPS {
        let off = max_off_diagonal(&a, n);
        if off < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| {
            let column: Vec<Complex64> = (0..n).map(|r| v[r * n + j]).collect();
            EigenPair {
                value: a[j * n + j].re,
                vector: Ket { amplitudes: column }.with_canonical_phase(),
            }
        })
        .collect();
    order_eigenpairs(&mut pairs);
    Ok(pairs)
}

fn max_off_diagonal(a: &[Complex64], n: usize) -> f64 {
    let mut off = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            off = off.max(a[p * n + q].norm());
        }
    }
    off
}

/// Annihilates `a[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(c, s)`
/// restricted to the `(p, q)` plane, then updates `a ← G†aG` and `v ← vG`.
fn jacobi_rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    // columns: a ← a·G
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * g_pp + akq * g_qp;
        a[k * n + q] = akp * g_pq + akq * g_qq;
    }
    // rows: a ← G†·a
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * g_pp + vkq * g_qp;
        v[k * n + q] = vkp * g_pq + vkq * g_qq;
    }
}

fn order_eigenpairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|x, y| y.value.partial_cmp(&x.value).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].value - pairs[end].value <= DEGENERACY_TOL {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lexicographic_desc(&x.vector, &y.vector));
        start = end;
    }
}

fn lexicographic_desc(x: &Ket, y: &Ket) -> Ordering {
    for (a, b) in x.amplitudes.iter().zip(&y.amplitudes) {
        for (p, q) in [(a.re, b.re), (a.im, b.im)] {
            if (p - q).abs() > PHASE_TOL {
                return q.partial_cmp(&p).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}
