//! Chambers of quantum ideal gases, membrane operations and the heat ledger.
//!
//! Units have `R = 1`, so with one mole at `T = 1` every recorded heat is the
//! coefficient of `nRT`. All processes are isothermal, so the work done by the
//! gas always equals the heat it absorbs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Ket};
use crate::quantum::{self, Povm, StatisticalMatrix};

/// Outcome fractions below this are pruned instead of making zero-volume chambers.
pub const MIN_OUTCOME_FRACTION: f64 = 1e-12;
/// A mixing membrane pair must pass or block each chamber to within this.
pub const DISTINGUISH_TOL: f64 = 1e-9;
/// Components whose statistical matrices agree entrywise to this are merged.
pub const MERGE_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

/// `W = nRT ln(V_f / V_i)` with `R = 1`.
pub fn isothermal_work(moles: f64, temperature: f64, v_initial: f64, v_final: f64) -> Result<f64> {
    for (what, x) in [
        ("moles", moles),
        ("temperature", temperature),
        ("initial volume", v_initial),
        ("final volume", v_final),
    ] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("{what} must be positive, got {x}")));
        }
    }
    Ok(moles * temperature * (v_final / v_initial).ln())
}

/// A quantity of gas whose particles share one statistical matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GasComponent {
    pub state: StatisticalMatrix,
    pub moles: f64,
}

impl GasComponent {
    pub fn new(state: StatisticalMatrix, moles: f64) -> Result<Self> {
        if !(moles > 0.0) || !moles.is_finite() {
            return Err(Error::Domain(format!("moles must be positive, got {moles}")));
        }
        Ok(Self { state, moles })
    }
}

/// Merges components with equal statistical matrices, keeping first-seen order.
fn merge_components(components: impl IntoIterator<Item = GasComponent>) -> Vec<GasComponent> {
    let mut merged: Vec<GasComponent> = Vec::new();
    for c in components {
        match merged.iter_mut().find(|m| m.state.approx_eq(&c.state, MERGE_TOL)) {
            Some(m) => m.moles += c.moles,
            None => merged.push(c),
        }
    }
    merged
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chamber {
    name: String,
    volume: f64,
    contents: Vec<GasComponent>,
}

impl Chamber {
    pub fn new(name: impl Into<String>, volume: f64, contents: Vec<GasComponent>) -> Result<Self> {
        let name = name.into();
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::Domain(format!("chamber `{name}` volume must be positive, got {volume}")));
        }
        if let Some(first) = contents.first() {
            let dim = first.state.dim();
            if contents.iter().any(|c| c.state.dim() != dim) {
                return Err(Error::Dimension(format!("chamber `{name}` mixes state dimensions")));
            }
        }
        Ok(Self {
            name,
            volume,
            contents: merge_components(contents),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contents(&self) -> &[GasComponent] {
        &self.contents
    }

    pub fn total_moles(&self) -> f64 {
        self.contents.iter().map(|c| c.moles).sum()
    }

    /// Mole-weighted statistical matrix `Σ (nᵢ/n) ρᵢ`.
    pub fn aggregate(&self) -> Result<StatisticalMatrix> {
        let Some(first) = self.contents.first() else {
            return Err(Error::EmptyChamber(self.name.clone()));
        };
        let total = self.total_moles();
        let mut acc = ComplexMatrix::zeros(first.state.dim())?;
        for c in &self.contents {
            acc = acc.add(&c.state.matrix().scale(c.moles / total))?;
        }
        StatisticalMatrix::new(acc.hermitian_part())
    }

    fn renamed(&self, name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..self.clone()
        }
    }
}

/// Spectral description of a chamber's gas: eigenvalue weights with rank-one
/// eigenprojectors, zero weights dropped.
pub fn canonical_contents(chamber: &Chamber) -> Result<Vec<(f64, StatisticalMatrix)>> {
    quantum::spectral_mixture(&chamber.aggregate()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Mix,
    Separate,
    Rotate,
    Partition,
    Join,
    Checkpoint,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Mix => "mix",
            EventKind::Separate => "separate",
            EventKind::Rotate => "rotate",
            EventKind::Partition => "partition",
            EventKind::Join => "join",
            EventKind::Checkpoint => "checkpoint",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "mix" => EventKind::Mix,
            "separate" => EventKind::Separate,
            "rotate" => EventKind::Rotate,
            "partition" => EventKind::Partition,
            "join" => EventKind::Join,
            "checkpoint" => EventKind::Checkpoint,
            other => return Err(format!("unknown event kind `{other}`")),
        })
    }
}

/// One ledger line. `step_index` is assigned when the event is recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEvent {
    pub step_index: usize,
    pub kind: EventKind,
    pub heat_absorbed_by_gas: f64,
    pub work_done_by_gas: f64,
    pub description: String,
}

impl LedgerEvent {
    /// Isothermal ideal gas: the work done equals the heat absorbed.
    pub fn isothermal(kind: EventKind, heat: f64, description: impl Into<String>) -> Self {
        let event = Self {
            step_index: 0,
            kind,
            heat_absorbed_by_gas: heat,
            work_done_by_gas: heat,
            description: description.into(),
        };
        assert_eq!(event.heat_absorbed_by_gas, event.work_done_by_gas);
        event
    }
}

/// The lab: chambers at one common temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct LabState {
    temperature: f64,
    lab_dim: usize,
    chambers: Vec<Chamber>,
}

impl LabState {
    pub fn new(temperature: f64, lab_dim: usize) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
        }
        linalg::check_dim(lab_dim)?;
        Ok(Self {
            temperature,
            lab_dim,
            chambers: Vec::new(),
        })
    }

    pub fn with_chamber(mut self, chamber: Chamber) -> Result<Self> {
        if self.chambers.iter().any(|c| c.name == chamber.name) {
            return Err(Error::Domain(format!("chamber `{}` already exists", chamber.name)));
        }
        if chamber.contents.iter().any(|c| c.state.dim() != self.lab_dim) {
            return Err(Error::Dimension(format!(
                "chamber `{}` holds states outside lab dimension {}",
                chamber.name, self.lab_dim
            )));
        }
        self.chambers.push(chamber);
        Ok(self)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn lab_dim(&self) -> usize {
        self.lab_dim
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn chamber(&self, name: &str) -> Result<&Chamber> {
        self.chambers
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Name(name.to_string()))
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.chambers
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Name(name.to_string()))
    }

    pub fn total_moles(&self) -> f64 {
        self.chambers.iter().map(Chamber::total_moles).sum()
    }

    /// Replaces the chambers at `remove` by `insert`, placed where the first
    /// removed chamber was.
    fn splice(&self, remove: &[usize], insert: Vec<Chamber>) -> Result<Self> {
        let at = *remove.iter().min().expect("at least one chamber removed");
        let mut kept: Vec<Chamber> = Vec::with_capacity(self.chambers.len() + insert.len());
        for (i, c) in self.chambers.iter().enumerate() {
            if i == at {
                kept.extend(insert.iter().cloned());
            }
            if !remove.contains(&i) {
                kept.push(c.clone());
            }
        }
        for (i, c) in kept.iter().enumerate() {
            if kept[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::Domain(format!("chamber `{}` already exists", c.name)));
            }
        }
        Ok(Self {
            chambers: kept,
            ..self.clone()
        })
    }

    fn check_povm(&self, povm: &Povm) -> Result<()> {
        if povm.dim() != self.lab_dim {
            return Err(Error::Dimension(format!(
                "membrane POVM acts on dimension {} but the lab has dimension {}",
                povm.dim(),
                self.lab_dim
            )));
        }
        Ok(())
    }

    /// Drives two semi-permeable membranes through `chamber`, sorting each
    /// particle by the outcome of `povm`.
    ///
    /// Outcome `i` ends up in its own chamber holding every component's share
    /// `(post_stateᵢ, n·pᵢ)` at the common final pressure, i.e. in volume
    /// `fᵢ·V` where `fᵢ` is the outcome's mole fraction. The heat absorbed is
    /// `Σᵢ nᵢ T ln fᵢ ≤ 0`. New chambers are named from `names` in outcome
    /// order (one name per non-empty outcome); when `names` is empty they are
    /// called `<chamber>.<outcome label>`.
    pub fn separate(&self, chamber: &str, povm: &Povm, names: &[&str]) -> Result<(LabState, LedgerEvent)> {
        let pos = self.position(chamber)?;
        self.check_povm(povm)?;
        let source = &self.chambers[pos];
        let total = source.total_moles();

        let mut outcomes: Vec<Vec<GasComponent>> = vec![Vec::new(); povm.len()];
        for component in &source.contents {
            for (i, r) in quantum::measure(povm, &component.state)?.into_iter().enumerate() {
                if let Some(post) = r.post_state {
                    outcomes[i].push(GasComponent {
                        state: post,
                        moles: component.moles * r.probability,
                    });
                }
            }
        }

        let kept: Vec<(usize, f64, Vec<GasComponent>)> = outcomes
            .into_iter()
            .enumerate()
            .map(|(i, comps)| (i, comps.iter().map(|c| c.moles).sum::<f64>(), comps))
            .filter(|(_, n, _)| n / total >= MIN_OUTCOME_FRACTION)
            .collect();
        if !names.is_empty() && names.len() != kept.len() {
            return Err(Error::Domain(format!(
                "separating `{chamber}` yields {} chamber(s) but {} name(s) were given",
                kept.len(),
                names.len()
            )));
        }
        let kept_total: f64 = kept.iter().map(|(_, n, _)| n).sum();

        let mut heat = 0.0;
        let mut new_chambers = Vec::with_capacity(kept.len());
        let mut parts = Vec::with_capacity(kept.len());
        for (k, (i, moles, comps)) in kept.into_iter().enumerate() {
            let fraction = moles / kept_total;
            heat += moles * self.temperature * fraction.ln();
            let name = match names.get(k) {
                Some(n) => n.to_string(),
                None => format!("{chamber}.{}", povm.outcome_labels()[i]),
            };
            parts.push(format!("{name} ({:.6})", fraction));
            new_chambers.push(Chamber::new(name, fraction * source.volume, comps)?);
        }
        let next = self.splice(&[pos], new_chambers)?;
        let event = LedgerEvent::isothermal(
            EventKind::Separate,
            heat,
            format!("separate {chamber} -> {}", parts.join(", ")),
        );
        Ok((next, event))
    }

    /// Reversibly mixes chambers `a` and `b` into `into` through a membrane
    /// pair that passes one chamber and blocks the other.
    ///
    /// Fails with [`Error::Indistinguishable`] if any outcome of `povm` fires
    /// for both chambers' gas. The heat absorbed is
    /// `Σ_c n_c T ln((V_a + V_b) / V_c) ≥ 0`.
    pub fn mix(&self, a: &str, b: &str, into: &str, povm: &Povm) -> Result<(LabState, LedgerEvent)> {
        if a == b {
            return Err(Error::Domain(format!("cannot mix chamber `{a}` with itself")));
        }
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        self.check_povm(povm)?;
        let ca = &self.chambers[pa];
        let cb = &self.chambers[pb];
        let prob_a = povm.probabilities(&ca.aggregate()?)?;
        let prob_b = povm.probabilities(&cb.aggregate()?)?;
        for (i, (x, y)) in prob_a.iter().zip(&prob_b).enumerate() {
            if *x > DISTINGUISH_TOL && *y > DISTINGUISH_TOL {
                return Err(Error::Indistinguishable {
                    a: a.to_string(),
                    b: b.to_string(),
                    detail: format!(
                        "outcome `{}` fires with probability {x:.6} for `{a}` and {y:.6} for `{b}`",
                        povm.outcome_labels()[i]
                    ),
                });
            }
        }
        let volume = ca.volume + cb.volume;
        let heat = isothermal_work(ca.total_moles(), self.temperature, ca.volume, volume)?
            + isothermal_work(cb.total_moles(), self.temperature, cb.volume, volume)?;
        let contents = ca.contents.iter().chain(&cb.contents).cloned().collect();
        let merged = Chamber::new(into, volume, contents)?;
        let next = self.splice(&[pa, pb], vec![merged])?;
        let event = LedgerEvent::isothermal(EventKind::Mix, heat, format!("mix {a} + {b} -> {into}"));
        Ok((next, event))
    }

    /// Applies the unitary extending `mapping` (source ket ↦ image ket) to
    /// every component in `chamber`. Isochoric, so no heat is exchanged.
    pub fn rotate(&self, chamber: &str, mapping: &[(Ket, Ket)]) -> Result<(LabState, LedgerEvent)> {
        let pos = self.position(chamber)?;
        let u = unitary_from_mapping(mapping, self.lab_dim)?;
        let u_dag = u.adjoint();
        let source = &self.chambers[pos];
        let contents = source
            .contents
            .iter()
            .map(|c| {
                let rotated = u.matmul(c.state.matrix())?.matmul(&u_dag)?;
                Ok(GasComponent {
                    state: StatisticalMatrix::from_unnormalized(&rotated)?,
                    moles: c.moles,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rotated = Chamber::new(chamber, source.volume, contents)?;
        let next = self.splice(&[pos], vec![rotated])?;
        let event = LedgerEvent::isothermal(
            EventKind::Rotate,
            0.0,
            format!("rotate {chamber} ({} ket(s) mapped)", mapping.len()),
        );
        Ok((next, event))
    }

    /// Inserts an impermeable wall at `fraction` of the chamber's volume.
    pub fn partition(&self, chamber: &str, fraction: f64, names: [&str; 2]) -> Result<(LabState, LedgerEvent)> {
        let pos = self.position(chamber)?;
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::Domain(format!("partition fraction {fraction} outside (0, 1)")));
        }
        let source = &self.chambers[pos];
        let part = |name: &str, f: f64| {
            let contents = source
                .contents
                .iter()
                .map(|c| GasComponent {
                    state: c.state.clone(),
                    moles: c.moles * f,
                })
                .collect();
            Chamber::new(name, source.volume * f, contents)
        };
        let first = part(names[0], fraction)?;
        let second = part(names[1], 1.0 - fraction)?;
        let next = self.splice(&[pos], vec![first, second])?;
        let event = LedgerEvent::isothermal(
            EventKind::Partition,
            0.0,
            format!("partition {chamber} at {fraction} -> {}, {}", names[0], names[1]),
        );
        Ok((next, event))
    }

    /// Removes the wall between `a` and `b`. No heat is booked here; any cost
    /// of the resulting mixture shows up in later membrane operations.
    pub fn join(&self, a: &str, b: &str, into: &str) -> Result<(LabState, LedgerEvent)> {
        if a == b {
            return Err(Error::Domain(format!("cannot join chamber `{a}` with itself")));
        }
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        let ca = &self.chambers[pa];
        let cb = &self.chambers[pb];
        let contents = ca.contents.iter().chain(&cb.contents).cloned().collect();
        let merged = Chamber::new(into, ca.volume + cb.volume, contents)?;
        let next = self.splice(&[pa, pb], vec![merged])?;
        let event = LedgerEvent::isothermal(EventKind::Join, 0.0, format!("join {a} + {b} -> {into}"));
        Ok((next, event))
    }

    /// Renames a chamber without touching its contents.
    pub fn rename(&self, from: &str, to: &str) -> Result<LabState> {
        let pos = self.position(from)?;
        let renamed = self.chambers[pos].renamed(to);
        self.splice(&[pos], vec![renamed])
    }
}

/// Unitary `U` with `U|s⟩ = |t⟩` for every `(s, t)` in `mapping`, completed on
/// the orthogonal complements by Gram-Schmidt over the canonical basis.
pub fn unitary_from_mapping(mapping: &[(Ket, Ket)], dim: usize) -> Result<ComplexMatrix> {
    if mapping.is_empty() {
        return Err(Error::Unitary("empty mapping".into()));
    }
    let sources: Vec<&Ket> = mapping.iter().map(|(s, _)| s).collect();
    let images: Vec<&Ket> = mapping.iter().map(|(_, t)| t).collect();
    for (what, kets) in [("source", &sources), ("image", &images)] {
        for (i, k) in kets.iter().enumerate() {
            if k.dim() != dim {
                return Err(Error::Unitary(format!(
                    "{what} ket {i} has dimension {} but the lab has dimension {dim}",
                    k.dim()
                )));
            }
            for (j, other) in kets[..i].iter().enumerate() {
                let overlap = k.inner(other)?.norm();
                if overlap > UNITARY_TOL {
                    return Err(Error::Unitary(format!(
                        "{what} kets {j} and {i} are not orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
        }
    }
    let source_rest = complete_basis(&sources, dim)?;
    let image_rest = complete_basis(&images, dim)?;
    let mut u = ComplexMatrix::zeros(dim)?;
    for (s, t) in mapping {
        u = u.add_unchecked(&ComplexMatrix::outer(t, s)?);
    }
    for (s, t) in source_rest.iter().zip(&image_rest) {
        u = u.add_unchecked(&ComplexMatrix::outer(t, s)?);
    }
    let deviation = u
        .adjoint()
        .matmul(&u)?
        .max_abs_diff(&ComplexMatrix::identity(dim)?)?;
    if deviation > UNITARY_TOL {
        return Err(Error::Unitary(format!("completion deviates from unitary by {deviation:.3e}")));
    }
    Ok(u)
}

fn complete_basis(kets: &[&Ket], dim: usize) -> Result<Vec<Ket>> {
    let mut basis: Vec<Vec<num_complex::Complex64>> =
        kets.iter().map(|k| k.amplitudes().to_vec()).collect();
    let mut extra = Vec::new();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = Ket::basis(dim, i)?.amplitudes().to_vec();
        for b in &basis {
            let overlap: num_complex::Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            let k = Ket::new(v)?;
            basis.push(k.amplitudes().to_vec());
            extra.push(k);
        }
    }
    Ok(extra)
}

/// A saved lab state and the ledger position it was taken at.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Number of events recorded before (and including) the checkpoint event.
    pub events_before: usize,
    pub state: LabState,
}

/// Ordered event log plus labelled snapshots.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ledger {
    events: Vec<LedgerEvent>,
    checkpoints: BTreeMap<String, Checkpoint>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn checkpoints(&self) -> &BTreeMap<String, Checkpoint> {
        &self.checkpoints
    }

    pub fn checkpoint_state(&self, label: &str) -> Result<&LabState> {
        Ok(&self.checkpoint(label)?.state)
    }

    fn checkpoint(&self, label: &str) -> Result<&Checkpoint> {
        self.checkpoints
            .get(label)
            .ok_or_else(|| Error::Name(label.to_string()))
    }

    /// Appends `event`, assigning the next step index (starting from 1).
    pub fn record(&mut self, mut event: LedgerEvent) -> &LedgerEvent {
        assert_eq!(event.heat_absorbed_by_gas, event.work_done_by_gas);
        event.step_index = self.events.len() + 1;
        self.events.push(event);
        self.events.last().expect("just pushed")
    }

    /// Records a checkpoint event and stores a snapshot of `state`.
    pub fn checkpoint_at(&mut self, label: &str, state: &LabState) -> Result<&LedgerEvent> {
        if self.checkpoints.contains_key(label) {
            return Err(Error::Domain(format!("checkpoint `{label}` already exists")));
        }
        self.record(LedgerEvent::isothermal(
            EventKind::Checkpoint,
            0.0,
            format!("checkpoint {label}"),
        ));
        self.checkpoints.insert(
            label.to_string(),
            Checkpoint {
                events_before: self.events.len(),
                state: state.clone(),
            },
        );
        Ok(self.events.last().expect("just pushed"))
    }

    /// Heat absorbed by the gases over every event after checkpoint `label`.
    pub fn heat_since(&self, label: &str) -> Result<f64> {
        let start = self.checkpoint(label)?.events_before;
        Ok(self.events[start..].iter().map(|e| e.heat_absorbed_by_gas).sum())
    }

    /// Heat absorbed between two checkpoints (`to` after `from`).
    pub fn heat_between(&self, from: &str, to: &str) -> Result<f64> {
        let start = self.checkpoint(from)?.events_before;
        let end = self.checkpoint(to)?.events_before;
        if end < start {
            return Err(Error::Domain(format!("checkpoint `{to}` precedes `{from}`")));
        }
        Ok(self.events[start..end].iter().map(|e| e.heat_absorbed_by_gas).sum())
    }

    pub fn total_heat(&self) -> f64 {
        self.events.iter().map(|e| e.heat_absorbed_by_gas).sum()
    }
}
