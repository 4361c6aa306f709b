use std::collections::HashMap;
use std::fmt;

use super::ast::{Decl, KetPovm, ProtocolAst, SeparateBy, Step};
use crate::audit::{self, Verdict, DEFAULT_TOL};
use crate::error::Error;
use crate::linalg::{ComplexMatrix, Ket};
use crate::observers::{build_observer, first_difference, Observer};
use crate::quantum::{lift_povm, optimal_separation_povm, Povm, StatisticalMatrix};
use crate::thermo::{canonical_contents, Chamber, GasComponent, LabState, Ledger};

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct Execution {
    pub lab: LabState,
    pub ledger: Ledger,
    pub verdicts: Vec<Verdict>,
    /// Declared observers, in declaration order.
    pub observers: Vec<Observer>,
    /// Declared kets, in declaration order.
    pub kets: Vec<(String, Ket)>,
}

impl Execution {
    pub fn observer(&self, name: &str) -> Option<&Observer> {
        self.observers.iter().find(|o| o.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    /// Building the initial lab from the declarations failed.
    Setup { line: usize, error: Error },
    /// Step `step` (1-based, source line `line`) failed.
    Step { step: usize, line: usize, error: Error },
    /// An `assert-closed` found the cycle open.
    NotClosed {
        step: usize,
        line: usize,
        observer: String,
        checkpoint: String,
        chamber: Option<String>,
        detail: String,
    },
}

impl RunError {
    /// `NotClosed` is a semantic failure; everything else is an error.
    pub fn is_assertion(&self) -> bool {
        matches!(self, RunError::NotClosed { .. })
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Setup { line, error } => write!(f, "line {line}: {error}"),
            RunError::Step { step, line, error } => write!(f, "step {step} (line {line}): {error}"),
            RunError::NotClosed {
                step,
                line,
                observer,
                checkpoint,
                chamber,
                detail,
            } => {
                write!(
                    f,
                    "step {step} (line {line}): cycle from `{checkpoint}` is not closed for observer `{observer}`"
                )?;
                match chamber {
                    Some(c) => write!(f, ": chamber `{c}` differs ({detail})"),
                    None => write!(f, ": {detail}"),
                }
            }
        }
    }
}

impl std::error::Error for RunError {}

/// Runs `ast` with the default audit tolerance.
pub fn execute(ast: &ProtocolAst) -> Result<Execution, RunError> {
    execute_with_tol(ast, DEFAULT_TOL)
}

struct Scope {
    kets: HashMap<String, Ket>,
    gases: HashMap<String, StatisticalMatrix>,
    observers: HashMap<String, Observer>,
}

impl Scope {
    fn ket(&self, name: &str) -> Result<&Ket, Error> {
        self.kets.get(name).ok_or_else(|| Error::Name(name.to_string()))
    }

    fn observer(&self, name: &str) -> Result<&Observer, Error> {
        self.observers.get(name).ok_or_else(|| Error::Name(name.to_string()))
    }

    fn povm(&self, p: &KetPovm) -> Result<Povm, Error> {
        let kets = p.kets.iter().map(|k| self.ket(k).cloned()).collect::<Result<Vec<_>, _>>()?;
        let povm = Povm::projective_labelled(&kets, p.kets.clone())?;
        match &p.lift {
            Some(obs) => lift_povm(&povm, self.observer(obs)?),
            None => Ok(povm),
        }
    }
}

/// Runs `ast`, comparing states and heat signs with slack `tol`.
pub fn execute_with_tol(ast: &ProtocolAst, tol: f64) -> Result<Execution, RunError> {
    let setup = |line: usize| move |error: Error| RunError::Setup { line, error };
    let lab_dim = ast
        .space_dim()
        .ok_or_else(|| setup(1)(Error::Domain("missing space declaration".into())))?;
    let mut scope = Scope {
        kets: HashMap::new(),
        gases: HashMap::new(),
        observers: HashMap::new(),
    };
    let mut temperature = 1.0;
    let mut ket_order = Vec::new();
    let mut observer_order = Vec::new();
    let mut chambers: Vec<(String, f64, Vec<GasComponent>)> = Vec::new();

    for d in &ast.declarations {
        let err = setup(d.line);
        match &d.node {
            Decl::Space { .. } => {}
            Decl::Temp(t) => temperature = *t,
            Decl::Ket { name, amplitudes } => {
                let ket = Ket::new(amplitudes.clone()).map_err(err)?;
                ket_order.push((name.clone(), ket.clone()));
                scope.kets.insert(name.clone(), ket);
            }
            Decl::GasFromKet { name, ket } => {
                let state = StatisticalMatrix::pure(scope.ket(ket).map_err(err)?).with_label(name.clone());
                scope.gases.insert(name.clone(), state);
            }
            Decl::GasMatrix { name, rows } => {
                let state = ComplexMatrix::from_rows(rows)
                    .and_then(StatisticalMatrix::new)
                    .map_err(err)?
                    .with_label(name.clone());
                scope.gases.insert(name.clone(), state);
            }
            Decl::Observer { name, table, dim } => {
                let rows = table
                    .iter()
                    .map(|(l, o)| Ok((scope.ket(l)?.clone(), scope.ket(o)?.clone())))
                    .collect::<Result<Vec<_>, Error>>()
                    .map_err(err)?;
                let obs = build_observer(name.clone(), &rows, *dim).map_err(setup(d.line))?;
                observer_order.push(obs.clone());
                scope.observers.insert(name.clone(), obs);
            }
            Decl::Chamber { name, volume } => chambers.push((name.clone(), *volume, Vec::new())),
            Decl::Fill { chamber, parts, moles } => {
                let slot = chambers
                    .iter_mut()
                    .find(|(n, _, _)| n == chamber)
                    .ok_or_else(|| err(Error::Name(chamber.clone())))?;
                for (gas, w) in parts {
                    let state = scope
                        .gases
                        .get(gas)
                        .cloned()
                        .ok_or_else(|| setup(d.line)(Error::Name(gas.clone())))?;
                    slot.2.push(GasComponent::new(state, moles * w).map_err(setup(d.line))?);
                }
            }
        }
    }

    let mut lab = LabState::new(temperature, lab_dim).map_err(setup(1))?;
    for (name, volume, contents) in chambers {
        let line = ast
            .declarations
            .iter()
            .find(|d| matches!(&d.node, Decl::Chamber { name: n, .. } if *n == name))
            .map_or(1, |d| d.line);
        let chamber = Chamber::new(name, volume, contents).map_err(setup(line))?;
        lab = lab.with_chamber(chamber).map_err(setup(line))?;
    }

    let mut ledger = Ledger::new();
    let mut verdicts = Vec::new();
    for (i, s) in ast.steps.iter().enumerate() {
        let step = i + 1;
        let line = s.line;
        let fail = |error: Error| RunError::Step { step, line, error };
        let (next, event) = match &s.node {
            Step::Mix { a, b, into, povm } => {
                let povm = scope.povm(povm).map_err(fail)?;
                lab.mix(a, b, into, &povm).map_err(fail)?
            }
            Step::Separate { chamber, by, into } => {
                let povm = match by {
                    SeparateBy::Eigenbasis => {
                        let contents = lab.chamber(chamber).and_then(canonical_contents).map_err(fail)?;
                        optimal_separation_povm(&contents).map_err(fail)?.povm
                    }
                    SeparateBy::Povm(p) => scope.povm(p).map_err(fail)?,
                };
                let names: Vec<&str> = into.iter().map(String::as_str).collect();
                lab.separate(chamber, &povm, &names).map_err(fail)?
            }
            Step::Rotate { chamber, map } => {
                let mapping = map
                    .iter()
                    .map(|(f, t)| Ok((scope.ket(f)?.clone(), scope.ket(t)?.clone())))
                    .collect::<Result<Vec<_>, Error>>()
                    .map_err(fail)?;
                lab.rotate(chamber, &mapping).map_err(fail)?
            }
            Step::Partition {
                chamber,
                fraction,
                into: [x, y],
            } => lab.partition(chamber, *fraction, [x.as_str(), y.as_str()]).map_err(fail)?,
            Step::Join { a, b, into } => lab.join(a, b, into).map_err(fail)?,
            Step::Checkpoint(label) => {
                ledger.checkpoint_at(label, &lab).map_err(fail)?;
                continue;
            }
            Step::AssertClosed { observer, checkpoint } => {
                let obs = scope.observer(observer).map_err(fail)?;
                let snapshot = ledger.checkpoint_state(checkpoint).map_err(fail)?;
                let not_closed = |chamber: Option<String>, detail: String| RunError::NotClosed {
                    step,
                    line,
                    observer: observer.clone(),
                    checkpoint: checkpoint.clone(),
                    chamber,
                    detail,
                };
                match first_difference(obs, snapshot, &lab, tol) {
                    Ok(None) => continue,
                    Ok(Some(diff)) => return Err(not_closed(Some(diff.chamber), diff.detail)),
                    Err(Error::Shape(detail)) => return Err(not_closed(None, detail)),
                    Err(e) => return Err(fail(e)),
                }
            }
            Step::Audit { observer, checkpoint } => {
                let obs = scope.observer(observer).map_err(fail)?;
                verdicts.push(audit::audit(&ledger, obs, checkpoint, &lab, tol).map_err(fail)?);
                continue;
            }
        };
        lab = next;
        ledger.record(event);
    }

    Ok(Execution {
        lab,
        ledger,
        verdicts,
        observers: observer_order,
        kets: ket_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Classification;
    use crate::protocol::parse;
    use std::f64::consts::LN_2;

    const TWO_GASES: &str = "\
space lab dim 2
ket up = [1, 0]
ket down = [0, 1]
gas Up from ket up
gas Down from ket down
observer me table { up -> up, down -> down } dim 2
chamber A volume 1
fill A { Up: 0.5, Down: 0.5 } moles 1
";

    #[test]
    fn separate_then_mix_back() {
        let src = format!(
            "{TWO_GASES}checkpoint start\nseparate A by povm {{ up, down }} into B C\nmix B C into A by povm {{ up, down }}\naudit me from start\n"
        );
        let run = execute(&parse(&src).unwrap()).unwrap();
        let heats: Vec<f64> = run.ledger.events().iter().map(|e| e.heat_absorbed_by_gas).collect();
        assert_eq!(heats.len(), 3);
        assert!((heats[1] + LN_2).abs() < 1e-12);
        assert!((heats[2] - LN_2).abs() < 1e-12);
        let v = &run.verdicts[0];
        assert!(v.cycle_closed);
        assert_eq!(v.classification, Classification::Consistent);
        assert!(v.q_total.abs() < 1e-12);
    }

    #[test]
    fn eigenbasis_separation_of_pure_gas() {
        let src = format!("{TWO_GASES}separate A by eigenbasis into B C\n");
        let run = execute(&parse(&src).unwrap()).unwrap();
        assert_eq!(run.lab.chambers().len(), 2);
        assert!((run.ledger.total_heat() + LN_2).abs() < 1e-12);
    }

    #[test]
    fn failed_assertion_names_the_chamber() {
        let src = format!("{TWO_GASES}checkpoint start\npartition A at 0.25 into B C\njoin B C into A\nrotate A map {{ up -> down, down -> up }}\nassert-closed me from start\n");
        let run = execute(&parse(&src).unwrap());
        // swapping two equally populated gases changes nothing
        assert!(run.is_ok());
        let src = src.replace("fill A { Up: 0.5, Down: 0.5 }", "fill A { Up: 0.25, Down: 0.75 }");
        let err = execute(&parse(&src).unwrap()).unwrap_err();
        assert!(err.is_assertion());
        match err {
            RunError::NotClosed {
                step,
                observer,
                chamber,
                ..
            } => {
                assert_eq!(step, 5);
                assert_eq!(observer, "me");
                assert_eq!(chamber.as_deref(), Some("A"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn runtime_errors_carry_the_step() {
        let src = format!("{TWO_GASES}partition A at 0.5 into B C\nmix B C into D by povm {{ up, down }}\n");
        let err = execute(&parse(&src).unwrap()).unwrap_err();
        match err {
            RunError::Step { step, line, error } => {
                assert_eq!((step, line), (2, 10));
                assert!(matches!(error, Error::Indistinguishable { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
