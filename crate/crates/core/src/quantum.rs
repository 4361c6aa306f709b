//! Statistical matrices, POVMs and membrane measurements.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, EigenPair, Ket};
use crate::observers::Observer;

/// Hermiticity and unit-trace tolerance for statistical matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a statistical matrix.
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Entrywise tolerance on `Σ A†A = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Outcomes below this probability have no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Trace-one positive Hermitian matrix describing a gas's internal degree of
/// freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticalMatrix {
    matrix: ComplexMatrix,
    label: Option<String>,
}

impl StatisticalMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min_eig = linalg::hermitian_eig(&matrix, STATE_TOL)?
            .last()
            .map(|p| p.value)
            .unwrap_or(0.0);
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self {
            matrix,
            label: None,
        })
    }

    /// `|k⟩⟨k|`.
    pub fn pure(ket: &Ket) -> Self {
        Self {
            matrix: ComplexMatrix::projector(ket),
            label: None,
        }
    }

    /// Normalizes a positive operator by its trace, symmetrizing rounding noise.
    pub(crate) fn from_unnormalized(matrix: &ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace().re;
        if trace <= 0.0 {
            return Err(Error::InvalidState(format!("cannot normalize trace {trace}")));
        }
        Self::new(matrix.hermitian_part().scale(1.0 / trace))
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be positive and sum to one.
    pub fn mixture(components: &[(f64, StatisticalMatrix)]) -> Result<Self> {
        check_weights(components.iter().map(|(w, _)| *w))?;
        let dim = components[0].1.dim();
        let mut acc = ComplexMatrix::zeros(dim)?;
        for (w, rho) in components {
            acc = acc.add(&rho.matrix.scale(*w))?;
        }
        Self::new(acc.hermitian_part())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Entrywise comparison of the underlying matrices, ignoring labels.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }
}

pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut count = 0;
    let mut total = 0.0;
    for w in weights {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Weight(format!("weight {w} is not positive")));
        }
        total += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Weight("no components".into()));
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Weight(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// A measurement given by Kraus operators `Aᵢ` acting as `ρ ↦ AᵢρAᵢ†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
    outcome_labels: Vec<String>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>, outcome_labels: Vec<String>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::Povm("no effects".into()));
        }
        if outcome_labels.len() != effects.len() {
            return Err(Error::Povm(format!(
                "{} labels for {} effects",
                outcome_labels.len(),
                effects.len()
            )));
        }
        let dim = effects[0].dim();
        if effects.iter().any(|e| e.dim() != dim) {
            return Err(Error::Povm("effects have different dimensions".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim)?;
        for e in &effects {
            sum = sum.add_unchecked(&e.adjoint().mul_unchecked(e));
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim)?)?;
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Povm(format!(
                "effects are not complete (max deviation from identity {deviation:.3e})"
            )));
        }
        Ok(Self {
            effects,
            outcome_labels,
        })
    }

    /// Projective measurement onto the given kets, labelled `0, 1, ...`.
    pub fn projective(kets: &[Ket]) -> Result<Self> {
        let labels = (0..kets.len()).map(|i| i.to_string()).collect();
        Self::projective_labelled(kets, labels)
    }

    pub fn projective_labelled(kets: &[Ket], labels: Vec<String>) -> Result<Self> {
        Self::new(kets.iter().map(ComplexMatrix::projector).collect(), labels)
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome probabilities `tr(AᵢρAᵢ†)` without the post states.
    pub fn probabilities(&self, rho: &StatisticalMatrix) -> Result<Vec<f64>> {
        self.check_dim(rho.dim())?;
        self.effects
            .iter()
            .map(|a| Ok(linalg::conjugate(a, rho.matrix())?.trace().re))
            .collect()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Dimension(format!(
                "POVM acts on dimension {} but state has dimension {dim}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// One measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeResult {
    pub probability: f64,
    /// `None` when the outcome has (numerically) zero probability.
    pub post_state: Option<StatisticalMatrix>,
}

/// Applies every outcome of `povm` to `rho`.
pub fn measure(povm: &Povm, rho: &StatisticalMatrix) -> Result<Vec<OutcomeResult>> {
    povm.check_dim(rho.dim())?;
    let mut results = Vec::with_capacity(povm.len());
    for a in povm.effects() {
        let unnormalized = linalg::conjugate(a, rho.matrix())?;
        let probability = unnormalized.trace().re.clamp(0.0, 1.0);
        let post_state = if probability < ZERO_PROBABILITY {
            None
        } else {
            Some(StatisticalMatrix::from_unnormalized(&unnormalized)?)
        };
        results.push(OutcomeResult {
            probability,
            post_state,
        });
    }
    let total: f64 = results.iter().map(|r| r.probability).sum();
    debug_assert!((total - 1.0).abs() <= 1e-10, "probabilities sum to {total}");
    Ok(results)
}

/// `|tr(a·b)| ≤ tol`.
pub fn are_orthogonal(a: &StatisticalMatrix, b: &StatisticalMatrix, tol: f64) -> Result<bool> {
    Ok(linalg::trace_product(a.matrix(), b.matrix())?.norm() <= tol)
}

/// Eigen-decomposition of `rho` as a mixture of pure states, weights
/// descending, with zero-weight terms dropped.
pub fn spectral_mixture(rho: &StatisticalMatrix) -> Result<Vec<(f64, StatisticalMatrix)>> {
    Ok(linalg::hermitian_eig(rho.matrix(), STATE_TOL)?
        .into_iter()
        .filter(|p| p.value > ZERO_PROBABILITY)
        .map(|p| (p.value, StatisticalMatrix::pure(&p.vector)))
        .collect())
}

/// Projective measurement onto the eigenbasis of a mixture, with the
/// mixture's eigenvalues in the same (descending) order.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalSeparation {
    pub povm: Povm,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Ket>,
}

/// Builds the membrane pair that separates a gas mixture into the eigen-gases
/// of its aggregate statistical matrix `λ = Σ wᵢρᵢ`.
pub fn optimal_separation_povm(
    components: &[(f64, StatisticalMatrix)],
) -> Result<OptimalSeparation> {
    check_weights(components.iter().map(|(w, _)| *w))?;
    let dim = components[0].1.dim();
    if components.iter().any(|(_, rho)| rho.dim() != dim) {
        return Err(Error::Dimension("mixture components differ in dimension".into()));
    }
    let aggregate = StatisticalMatrix::mixture(components)?;
    let pairs = linalg::hermitian_eig(aggregate.matrix(), STATE_TOL)?;
    let (eigenvalues, eigenvectors): (Vec<f64>, Vec<Ket>) = pairs
        .into_iter()
        .map(|EigenPair { value, vector }| (value, vector))
        .unzip();
    let povm = Povm::projective_labelled(
        &eigenvectors,
        (0..dim).map(|i| format!("eig{i}")).collect(),
    )?;
    Ok(OptimalSeparation {
        povm,
        eigenvalues,
        eigenvectors,
    })
}

/// Lifts a POVM written in an observer's description space to the lab space:
/// each effect `A` becomes `Σ_k V_k† A V_k` over the observer's sectors.
pub fn lift_povm(povm: &Povm, observer: &Observer) -> Result<Povm> {
    if povm.dim() != observer.obs_dim() {
        return Err(Error::Dimension(format!(
            "POVM acts on dimension {} but observer `{}` describes dimension {}",
            povm.dim(),
            observer.name(),
            observer.obs_dim()
        )));
    }
    let lifted: Vec<ComplexMatrix> = povm
        .effects()
        .iter()
        .map(|a| observer.pull_back(a))
        .collect::<Result<_>>()?;
    Povm::new(lifted, povm.outcome_labels().to_vec()).map_err(|e| {
        Error::Embedding(format!(
            "observer `{}` does not embed every description ket in each sector: {e}",
            observer.name()
        ))
    })
}
