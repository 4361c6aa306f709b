//! Second-law verdicts over a ledger span.
//!
//! The only entropy fact used is that a closed cycle has `ΔS = 0`. Whether a
//! cycle is closed depends on who is looking: the auditor compares the lab
//! state at a checkpoint with the current one through an observer's channel.
//! A closed cycle with `Q/T > 0` is an apparent violation; an open cycle
//! supports no second-law claim at all.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::observers::{self, Observer};
use crate::thermo::{LabState, Ledger};

/// Slack on sign tests and state comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Consistent,
    ApparentViolation,
    OpenCycle,
}

impl Classification {
    pub fn classify(q_over_t: f64, cycle_closed: bool, tol: f64) -> Self {
        match (cycle_closed, q_over_t > tol) {
            (false, _) => Classification::OpenCycle,
            (true, true) => Classification::ApparentViolation,
            (true, false) => Classification::Consistent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Consistent => "consistent",
            Classification::ApparentViolation => "apparent_violation",
            Classification::OpenCycle => "open_cycle",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "consistent" => Ok(Classification::Consistent),
            "apparent_violation" => Ok(Classification::ApparentViolation),
            "open_cycle" => Ok(Classification::OpenCycle),
            other => Err(format!("unknown classification `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub observer: String,
    pub from_checkpoint: String,
    /// Number of ledger events at the time of the audit.
    pub at_step: usize,
    pub q_total: f64,
    pub q_over_t: f64,
    pub cycle_closed: bool,
    pub classification: Classification,
}

/// Audits the span from checkpoint `from_label` to `current` as seen by `obs`.
///
/// Chamber layouts that differ from the checkpoint's count as an open cycle.
pub fn audit(
    ledger: &Ledger,
    obs: &Observer,
    from_label: &str,
    current: &LabState,
    tol: f64,
) -> Result<Verdict> {
    let snapshot = ledger.checkpoint_state(from_label)?;
    let q_total = ledger.heat_since(from_label)?;
    let q_over_t = q_total / current.temperature();
    let cycle_closed = match observers::states_equivalent(obs, snapshot, current, tol) {
        Ok(closed) => closed,
        Err(Error::Shape(_)) => false,
        Err(e) => return Err(e),
    };
    Ok(Verdict {
        observer: obs.name().to_string(),
        from_checkpoint: from_label.to_string(),
        at_step: ledger.events().len(),
        q_total,
        q_over_t,
        cycle_closed,
        classification: Classification::classify(q_over_t, cycle_closed, tol),
    })
}
