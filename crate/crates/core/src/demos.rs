//! The bundled demonstration protocols.
//!
//! Each demo is a protocol source compiled into the binary, so runs are
//! reproducible byte for byte.

use crate::protocol::{self, Execution, ParseError, ProtocolAst, RunError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Demo {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

pub const DEMOS: [Demo; 6] = [
    Demo {
        name: "perfect-separation",
        summary: "orthogonal spin gases sorted by ideal membranes; heat ln 2 released",
        source: include_str!("../demos/perfect-separation.qgas"),
    },
    Demo {
        name: "partial-separation",
        summary: "z+ and x+ gases split along the mixture eigenbasis",
        source: include_str!("../demos/partial-separation.qgas"),
    },
    Demo {
        name: "peres-tatiana",
        summary: "two-species cycle audited by an observer blind to the species",
        source: include_str!("../demos/peres-tatiana.qgas"),
    },
    Demo {
        name: "peres-willard",
        summary: "the same cycle completed for an observer who sees the species",
        source: include_str!("../demos/peres-willard.qgas"),
    },
    Demo {
        name: "jaynes-johann",
        summary: "two argons mixed and halved, audited by both observers",
        source: include_str!("../demos/jaynes-johann.qgas"),
    },
    Demo {
        name: "jaynes-marie",
        summary: "the argon cycle completed by re-separating the two kinds",
        source: include_str!("../demos/jaynes-marie.qgas"),
    },
];

pub fn names() -> Vec<&'static str> {
    DEMOS.iter().map(|d| d.name).collect()
}

pub fn find(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}

impl Demo {
    pub fn parse(&self) -> Result<ProtocolAst, ParseError> {
        protocol::parse(self.source)
    }

    /// Parses and runs the demo with the default tolerance.
    ///
    /// # Panics
    ///
    /// If the bundled source does not parse, which the test suite rules out.
    pub fn run(&self) -> Result<Execution, RunError> {
        let ast = self
            .parse()
            .unwrap_or_else(|e| panic!("bundled demo `{}` does not parse: {e}", self.name));
        protocol::execute(&ast)
    }
}
