//! Rendering runs as human-readable tables or machine-readable records.
//!
//! Records are one per line, tab separated: a record type (`event`, `view` or
//! `verdict`) followed by `key=value` fields in a fixed order. Numbers carry
//! 12 significant digits. Tabs, newlines and backslashes inside values are
//! escaped as `\t`, `\n` and `\\`.

use std::fmt::Write as _;

use crate::audit::{Classification, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{format_complex, hermitian_eig, Ket};
use crate::observers::{self, Observer, ObserverView};
use crate::protocol::Execution;
use crate::quantum::StatisticalMatrix;
use crate::thermo::EventKind;

/// Significant digits in records.
pub const RECORD_DIGITS: usize = 12;

/// Formats `x` with [`RECORD_DIGITS`] significant digits, trailing zeros
/// removed, switching to exponent notation for very large or small values.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", RECORD_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (RECORD_DIGITS as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("valid float");
    let fixed = format!("{rounded:.decimals$}");
    let fixed = trim_zeros(&fixed);
    if fixed == "-0" {
        "0".into()
    } else {
        fixed
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub step: usize,
    pub kind: EventKind,
    pub heat: f64,
    pub work: f64,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViewRecord {
    pub observer: String,
    pub chamber: String,
    pub volume: f64,
    pub moles: f64,
    /// `weight:label` pairs joined by `;`, weights descending.
    pub mixture: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictRecord {
    pub observer: String,
    pub from: String,
    pub at_step: usize,
    pub q_total: f64,
    pub q_over_t: f64,
    pub cycle_closed: bool,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Record {
    Event(EventRecord),
    View(ViewRecord),
    Verdict(VerdictRecord),
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        Self {
            observer: v.observer.clone(),
            from: v.from_checkpoint.clone(),
            at_step: v.at_step,
            q_total: v.q_total,
            q_over_t: v.q_over_t,
            cycle_closed: v.cycle_closed,
            classification: v.classification,
        }
    }
}

/// Observers whose views and verdicts are reported: all declared ones, or
/// just `filter`.
fn selected<'a>(exec: &'a Execution, filter: Option<&str>) -> Result<Vec<&'a Observer>> {
    match filter {
        None => Ok(exec.observers.iter().collect()),
        Some(name) => exec
            .observer(name)
            .map(|o| vec![o])
            .ok_or_else(|| Error::Name(name.to_string())),
    }
}

/// Final views of the lab through the selected observers.
pub fn final_views(exec: &Execution, filter: Option<&str>) -> Result<Vec<ObserverView>> {
    selected(exec, filter)?
        .into_iter()
        .map(|o| observers::view(o, &exec.lab))
        .collect()
}

/// Names a pure state after a declared ket on the same ray, or spells out its
/// amplitudes.
fn state_label(state: &StatisticalMatrix, kets: &[(String, Ket)]) -> Result<String> {
    for (name, ket) in kets {
        if ket.dim() == state.dim() {
            let p = state.matrix().sandwich(ket.amplitudes(), ket.amplitudes()).re;
            if (p - 1.0).abs() < 1e-9 {
                return Ok(name.clone());
            }
        }
    }
    let top = hermitian_eig(state.matrix(), 1e-9)?;
    let amps: Vec<String> = top[0]
        .vector
        .amplitudes()
        .iter()
        .map(|z| format_complex(*z))
        .collect();
    Ok(format!("[{}]", amps.join(" ")))
}

fn mixture_text(view: &observers::ChamberView, kets: &[(String, Ket)]) -> Result<String> {
    let parts = view
        .mixture
        .iter()
        .map(|(w, s)| Ok(format!("{}:{}", format_number(*w), state_label(s, kets)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.join(";"))
}

/// Events in ledger order, then final views, then verdicts in audit order.
pub fn records(exec: &Execution, filter: Option<&str>) -> Result<Vec<Record>> {
    let mut out: Vec<Record> = exec
        .ledger
        .events()
        .iter()
        .map(|e| {
            Record::Event(EventRecord {
                step: e.step_index,
                kind: e.kind,
                heat: e.heat_absorbed_by_gas,
                work: e.work_done_by_gas,
                description: e.description.clone(),
            })
        })
        .collect();
    for view in final_views(exec, filter)? {
        for c in &view.chambers {
            out.push(Record::View(ViewRecord {
                observer: view.observer.clone(),
                chamber: c.chamber.clone(),
                volume: c.volume,
                moles: c.moles,
                mixture: mixture_text(c, &exec.kets)?,
            }));
        }
    }
    out.extend(
        exec.verdicts
            .iter()
            .filter(|v| filter.is_none_or(|f| f == v.observer))
            .map(|v| Record::Verdict(v.into())),
    );
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

fn unescape(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

impl Record {
    /// One line, without the trailing newline.
    pub fn to_line(&self) -> String {
        let (tag, fields): (&str, Vec<(&str, String)>) = match self {
            Record::Event(e) => (
                "event",
                vec![
                    ("step", e.step.to_string()),
                    ("kind", e.kind.as_str().to_string()),
                    ("heat", format_number(e.heat)),
                    ("work", format_number(e.work)),
                    ("description", escape(&e.description)),
                ],
            ),
            Record::View(v) => (
                "view",
                vec![
                    ("observer", escape(&v.observer)),
                    ("chamber", escape(&v.chamber)),
                    ("volume", format_number(v.volume)),
                    ("moles", format_number(v.moles)),
                    ("mixture", escape(&v.mixture)),
                ],
            ),
            Record::Verdict(v) => (
                "verdict",
                vec![
                    ("observer", escape(&v.observer)),
                    ("from", escape(&v.from)),
                    ("atStep", v.at_step.to_string()),
                    ("qTotal", format_number(v.q_total)),
                    ("qOverT", format_number(v.q_over_t)),
                    ("cycleClosed", v.cycle_closed.to_string()),
                    ("classification", v.classification.as_str().to_string()),
                ],
            ),
        };
        let mut line = tag.to_string();
        for (k, v) in fields {
            let _ = write!(line, "\t{k}={v}");
        }
        line
    }

    /// Inverse of [`Record::to_line`].
    pub fn from_line(line: &str) -> std::result::Result<Self, String> {
        let mut parts = line.split('\t');
        let tag = parts.next().unwrap_or_default();
        let fields: Vec<(&str, &str)> = parts
            .map(|p| p.split_once('=').ok_or_else(|| format!("field without `=`: `{p}`")))
            .collect::<std::result::Result<_, _>>()?;
        let mut it = fields.into_iter();
        let mut field = |key: &str| -> std::result::Result<String, String> {
            match it.next() {
                Some((k, v)) if k == key => unescape(v),
                Some((k, _)) => Err(format!("expected field `{key}`, found `{k}`")),
                None => Err(format!("missing field `{key}`")),
            }
        };
        fn num(s: String) -> std::result::Result<f64, String> {
            s.parse().map_err(|_| format!("bad number `{s}`"))
        }
        fn int(s: String) -> std::result::Result<usize, String> {
            s.parse().map_err(|_| format!("bad integer `{s}`"))
        }
        let record = match tag {
            "event" => Record::Event(EventRecord {
                step: int(field("step")?)?,
                kind: field("kind")?.parse()?,
                heat: num(field("heat")?)?,
                work: num(field("work")?)?,
                description: field("description")?,
            }),
            "view" => Record::View(ViewRecord {
                observer: field("observer")?,
                chamber: field("chamber")?,
                volume: num(field("volume")?)?,
                moles: num(field("moles")?)?,
                mixture: field("mixture")?,
            }),
            "verdict" => Record::Verdict(VerdictRecord {
                observer: field("observer")?,
                from: field("from")?,
                at_step: int(field("atStep")?)?,
                q_total: num(field("qTotal")?)?,
                q_over_t: num(field("qOverT")?)?,
                cycle_closed: match field("cycleClosed")?.as_str() {
                    "true" => true,
                    "false" => false,
                    other => return Err(format!("bad boolean `{other}`")),
                },
                classification: field("classification")?.parse()?,
            }),
            other => return Err(format!("unknown record type `{other}`")),
        };
        if let Some((k, _)) = it.next() {
            return Err(format!("unexpected field `{k}`"));
        }
        Ok(record)
    }
}

pub fn render_records(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_records(text: &str) -> std::result::Result<Vec<Record>, String> {
    text.lines()
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| Record::from_line(l).map_err(|e| format!("record {}: {e}", i + 1)))
        .collect()
}

/// The ledger, final views and verdicts as aligned text.
pub fn render_table(exec: &Execution, filter: Option<&str>) -> Result<String> {
    let mut out = String::new();
    let t = exec.lab.temperature();
    let _ = writeln!(out, "ledger (T = {}, heat Q absorbed by the gas, Q = W)", format_number(t));
    let _ = writeln!(out, "{:>4}  {:<10}  {:>14}  {:>14}  description", "step", "kind", "Q", "W");
    for e in exec.ledger.events() {
        let _ = writeln!(
            out,
            "{:>4}  {:<10}  {:>14.9}  {:>14.9}  {}",
            e.step_index,
            e.kind.as_str(),
            e.heat_absorbed_by_gas,
            e.work_done_by_gas,
            e.description
        );
    }
    let _ = writeln!(out, "total Q = {:.9}", exec.ledger.total_heat());

    for view in final_views(exec, filter)? {
        let _ = writeln!(out);
        let _ = writeln!(out, "final state seen by {}", view.observer);
        for c in &view.chambers {
            let _ = writeln!(
                out,
                "  {:<8} V = {:<10} n = {:<10} {}",
                c.chamber,
                format_number(c.volume),
                format_number(c.moles),
                mixture_text(c, &exec.kets)?.replace(';', "  ")
            );
        }
    }

    let verdicts: Vec<&Verdict> = exec
        .verdicts
        .iter()
        .filter(|v| filter.is_none_or(|f| f == v.observer))
        .collect();
    if !verdicts.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "verdicts");
        for v in verdicts {
            let _ = writeln!(
                out,
                "  {} from {} at step {}: Q = {:.9}, Q/T = {:.9}, cycle {}, {}",
                v.observer,
                v.from_checkpoint,
                v.at_step,
                v.q_total,
                v.q_over_t,
                if v.cycle_closed { "closed" } else { "open" },
                v.classification
            );
        }
    }
    Ok(out)
}
