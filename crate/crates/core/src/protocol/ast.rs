use num_complex::Complex64;

/// A node tagged with the 1-based source line it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Located<T> {
    pub line: usize,
    pub node: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Space { name: String, dim: usize },
    Temp(f64),
    Ket { name: String, amplitudes: Vec<Complex64> },
    GasFromKet { name: String, ket: String },
    GasMatrix { name: String, rows: Vec<Vec<Complex64>> },
    Observer { name: String, table: Vec<(String, String)>, dim: usize },
    Chamber { name: String, volume: f64 },
    Fill { chamber: String, parts: Vec<(String, f64)>, moles: f64 },
}

/// `povm { k1, k2, ... }`, optionally lifted from an observer's space.
#[derive(Clone, Debug, PartialEq)]
pub struct KetPovm {
    pub kets: Vec<String>,
    pub lift: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeparateBy {
    Eigenbasis,
    Povm(KetPovm),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Mix { a: String, b: String, into: String, povm: KetPovm },
    Separate { chamber: String, by: SeparateBy, into: Vec<String> },
    Rotate { chamber: String, map: Vec<(String, String)> },
    Partition { chamber: String, fraction: f64, into: [String; 2] },
    Join { a: String, b: String, into: String },
    Checkpoint(String),
    AssertClosed { observer: String, checkpoint: String },
    Audit { observer: String, checkpoint: String },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProtocolAst {
    pub declarations: Vec<Located<Decl>>,
    pub steps: Vec<Located<Step>>,
}

impl ProtocolAst {
    /// Declarations without line numbers.
    pub fn decl_nodes(&self) -> Vec<&Decl> {
        self.declarations.iter().map(|d| &d.node).collect()
    }

    /// Steps without line numbers.
    pub fn step_nodes(&self) -> Vec<&Step> {
        self.steps.iter().map(|s| &s.node).collect()
    }

    pub fn space_dim(&self) -> Option<usize> {
        self.declarations.iter().find_map(|d| match d.node {
            Decl::Space { dim, .. } => Some(dim),
            _ => None,
        })
    }
}
