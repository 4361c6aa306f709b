//! Deterministic simulator and second-law auditor for quantum ideal gases.
//!
//! Gases carry an internal quantum degree of freedom described by a
//! statistical matrix. Semi-permeable membranes are two-outcome measurements;
//! moving them isothermally books work and heat in a [`thermo::Ledger`].
//! Observers describe the lab through coarse-graining channels, and the
//! [`audit`] module decides, per observer, whether a run closed a cycle and
//! whether its heat balance respects `Q/T ≤ 0` on closed cycles.
//!
//! Protocols are written in a small line-oriented language (see [`protocol`])
//! and six built-in demonstrations live in [`demos`].

pub mod audit;
pub mod cli;
pub mod demos;
pub mod error;
pub mod linalg;
pub mod observers;
pub mod protocol;
pub mod quantum;
pub mod report;
pub mod thermo;

pub use error::{Error, Result};
