//! Observer-relative descriptions of a lab state.
//!
//! An observer is defined by a table sending each lab basis ket to a ket of the
//! observer's own (possibly smaller) description space. Rows whose images are
//! mutually orthonormal are grouped into a sector, and each sector becomes an
//! isometry `V_k`; the coarse-graining channel is `ρ ↦ Σ_k V_k ρ V_k†`.
//! Coherences between different sectors are dropped by that channel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Ket};
use crate::quantum::{self, StatisticalMatrix};
use crate::thermo::LabState;

const BASIS_TOL: f64 = 1e-10;

/// `V_k = Σ_r |obs_r⟩⟨lab_r|` for the rows `r` of one sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorIsometry {
    rows: Vec<(Ket, Ket)>,
}

impl SectorIsometry {
    /// `(lab ket, observer ket)` rows of this sector, in table order.
    pub fn rows(&self) -> &[(Ket, Ket)] {
        &self.rows
    }

    /// Dense `obs_dim × lab_dim` matrix of the isometry.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let (lab0, obs0) = &self.rows[0];
        let mut m = vec![vec![Complex64::new(0.0, 0.0); lab0.dim()]; obs0.dim()];
        for (lab, obs) in &self.rows {
            for (i, o) in obs.amplitudes().iter().enumerate() {
                for (j, l) in lab.amplitudes().iter().enumerate() {
                    m[i][j] += o * l.conj();
                }
            }
        }
        m
    }

    /// `V ρ V†` on the observer space.
    fn push_forward(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        for (lab_r, obs_r) in &self.rows {
            for (lab_s, obs_s) in &self.rows {
                let coeff = rho.sandwich(lab_r.amplitudes(), lab_s.amplitudes());
                if coeff.norm() == 0.0 {
                    continue;
                }
                let term = ComplexMatrix::outer_unchecked(obs_r.amplitudes(), obs_s.amplitudes());
                *out = out.add_unchecked(&scale_complex(&term, coeff));
            }
        }
    }

    /// `V† A V` on the lab space.
    fn pull_back(&self, a: &ComplexMatrix, out: &mut ComplexMatrix) {
        for (lab_r, obs_r) in &self.rows {
            for (lab_s, obs_s) in &self.rows {
                let coeff = a.sandwich(obs_r.amplitudes(), obs_s.amplitudes());
                if coeff.norm() == 0.0 {
                    continue;
                }
                let term = ComplexMatrix::outer_unchecked(lab_r.amplitudes(), lab_s.amplitudes());
                *out = out.add_unchecked(&scale_complex(&term, coeff));
            }
        }
    }
}

fn scale_complex(m: &ComplexMatrix, z: Complex64) -> ComplexMatrix {
    let entries = m.entries().iter().map(|e| e * z).collect();
    ComplexMatrix::new(m.dim(), entries).expect("same shape")
}

/// A coarse-graining channel from the lab space to an observer's space.
#[derive(Clone, Debug, PartialEq)]
pub struct Observer {
    name: String,
    obs_dim: usize,
    lab_dim: usize,
    sectors: Vec<SectorIsometry>,
}

impl Observer {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn lab_dim(&self) -> usize {
        self.lab_dim
    }

    pub fn sector_isometries(&self) -> &[SectorIsometry] {
        &self.sectors
    }

    /// Observer who sees the lab space exactly.
    pub fn identity(name: impl Into<String>, dim: usize) -> Result<Self> {
        let table = (0..dim)
            .map(|i| Ok((Ket::basis(dim, i)?, Ket::basis(dim, i)?)))
            .collect::<Result<Vec<_>>>()?;
        build_observer(name, &table, dim)
    }

    /// `Σ_k V_k ρ V_k†`.
    pub fn coarse_grain(&self, rho: &StatisticalMatrix) -> Result<StatisticalMatrix> {
        if rho.dim() != self.lab_dim {
            return Err(Error::Dimension(format!(
                "observer `{}` reads lab dimension {} but state has dimension {}",
                self.name,
                self.lab_dim,
                rho.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.obs_dim)?;
        for sector in &self.sectors {
            sector.push_forward(rho.matrix(), &mut out);
        }
        StatisticalMatrix::new(out.hermitian_part())
    }

    /// `Σ_k V_k† A V_k`, the lab-space operator an observer-space operator
    /// corresponds to.
    pub fn pull_back(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.dim() != self.obs_dim {
            return Err(Error::Dimension(format!(
                "operator has dimension {} but observer `{}` describes dimension {}",
                a.dim(),
                self.name,
                self.obs_dim
            )));
        }
        let mut out = ComplexMatrix::zeros(self.lab_dim)?;
        for sector in &self.sectors {
            sector.pull_back(a, &mut out);
        }
        Ok(out)
    }
}

/// Builds an observer from `(lab ket, observer ket)` rows.
///
/// The lab kets must form an orthonormal basis of the lab space. Rows are
/// assigned greedily, in table order, to the first sector whose observer images
/// stay orthonormal with the new row.
pub fn build_observer(
    name: impl Into<String>,
    table: &[(Ket, Ket)],
    obs_dim: usize,
) -> Result<Observer> {
    let name = name.into();
    crate::linalg::check_dim(obs_dim)?;
    let Some((first, _)) = table.first() else {
        return Err(Error::Basis(format!("observer `{name}` has an empty table")));
    };
    let lab_dim = first.dim();
    if table.len() != lab_dim {
        return Err(Error::Basis(format!(
            "observer `{name}`: {} table rows cannot form a basis of dimension {lab_dim}",
            table.len()
        )));
    }
    for (i, (a, _)) in table.iter().enumerate() {
        if a.dim() != lab_dim {
            return Err(Error::Basis(format!("observer `{name}`: lab kets differ in dimension")));
        }
        for (j, (b, _)) in table[..i].iter().enumerate() {
            let overlap = a.inner(b)?.norm();
            if overlap > BASIS_TOL {
                return Err(Error::Basis(format!(
                    "observer `{name}`: lab kets in rows {j} and {i} are not orthogonal (overlap {overlap:.3e})"
                )));
            }
        }
    }

    let mut sectors: Vec<SectorIsometry> = Vec::new();
    for (lab, obs) in table {
        if obs.dim() != obs_dim {
            return Err(Error::Sector(format!(
                "observer `{name}`: description ket has dimension {} but the observer space has dimension {obs_dim}",
                obs.dim()
            )));
        }
        let slot = sectors.iter_mut().find(|s| {
            s.rows
                .iter()
                .all(|(_, o)| o.inner(obs).is_ok_and(|z| z.norm() <= BASIS_TOL))
        });
        match slot {
            Some(sector) => sector.rows.push((lab.clone(), obs.clone())),
            None => sectors.push(SectorIsometry {
                rows: vec![(lab.clone(), obs.clone())],
            }),
        }
    }

    let observer = Observer {
        name,
        obs_dim,
        lab_dim,
        sectors,
    };
    let identity = ComplexMatrix::identity(obs_dim)?;
    let completeness = observer.pull_back(&identity)?;
    let deviation = completeness.max_abs_diff(&ComplexMatrix::identity(lab_dim)?)?;
    if deviation > BASIS_TOL {
        return Err(Error::Sector(format!(
            "observer `{}` is not trace preserving (deviation {deviation:.3e})",
            observer.name
        )));
    }
    Ok(observer)
}

/// What one chamber looks like to an observer.
#[derive(Clone, Debug, PartialEq)]
pub struct ChamberView {
    pub chamber: String,
    pub volume: f64,
    pub moles: f64,
    /// Coarse-grained aggregate statistical matrix.
    pub aggregate: StatisticalMatrix,
    /// Spectral mixture of `aggregate`, weights descending.
    pub mixture: Vec<(f64, StatisticalMatrix)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObserverView {
    pub observer: String,
    pub chambers: Vec<ChamberView>,
}

/// Describes every chamber of `lab` in the observer's terms.
pub fn view(obs: &Observer, lab: &LabState) -> Result<ObserverView> {
    let chambers = lab
        .chambers()
        .iter()
        .map(|chamber| {
            let aggregate = obs.coarse_grain(&chamber.aggregate()?)?;
            let mixture = quantum::spectral_mixture(&aggregate)?;
            Ok(ChamberView {
                chamber: chamber.name().to_string(),
                volume: chamber.volume(),
                moles: chamber.total_moles(),
                aggregate,
                mixture,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObserverView {
        observer: obs.name.clone(),
        chambers,
    })
}

/// Why two lab states look different to an observer.
#[derive(Clone, Debug, PartialEq)]
pub struct ChamberDifference {
    pub chamber: String,
    pub detail: String,
}

/// First chamber (in `a`'s order) whose volume, moles or coarse-grained
/// aggregate differs by more than `tol`.
pub fn first_difference(
    obs: &Observer,
    a: &LabState,
    b: &LabState,
    tol: f64,
) -> Result<Option<ChamberDifference>> {
    let mut names_a: Vec<&str> = a.chambers().iter().map(|c| c.name()).collect();
    let mut names_b: Vec<&str> = b.chambers().iter().map(|c| c.name()).collect();
    names_a.sort_unstable();
    names_b.sort_unstable();
    if names_a != names_b {
        return Err(Error::Shape(format!(
            "chambers {{{}}} vs {{{}}}",
            names_a.join(", "),
            names_b.join(", ")
        )));
    }
    for ca in a.chambers() {
        let cb = b.chamber(ca.name())?;
        let diff = |detail: String| {
            Ok(Some(ChamberDifference {
                chamber: ca.name().to_string(),
                detail,
            }))
        };
        if (ca.volume() - cb.volume()).abs() > tol {
            return diff(format!("volume {} vs {}", ca.volume(), cb.volume()));
        }
        if (ca.total_moles() - cb.total_moles()).abs() > tol {
            return diff(format!("moles {} vs {}", ca.total_moles(), cb.total_moles()));
        }
        let ra = obs.coarse_grain(&ca.aggregate()?)?;
        let rb = obs.coarse_grain(&cb.aggregate()?)?;
        let d = ra.matrix().max_abs_diff(rb.matrix())?;
        if d > tol {
            return diff(format!("statistical matrices differ by {d:.3e}"));
        }
    }
    Ok(None)
}

/// True iff `a` and `b` are indistinguishable to `obs` within `tol`.
pub fn states_equivalent(obs: &Observer, a: &LabState, b: &LabState, tol: f64) -> Result<bool> {
    Ok(first_difference(obs, a, b, tol)?.is_none())
}
