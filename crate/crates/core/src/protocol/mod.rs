//! The protocol language.
//!
//! A protocol is a line-oriented script: declarations (space, kets, gases,
//! observers, chambers and their fillings) followed by steps. `#` starts a
//! comment and blank lines are ignored.
//!
//! ```text
//! space lab dim 2
//! ket up = [1, 0]
//! ket down = [0, 1]
//! gas Up from ket up
//! gas Down from ket down
//! chamber A volume 1
//! fill A { Up: 0.5, Down: 0.5 } moles 1
//! observer me table { up -> up, down -> down } dim 2
//! checkpoint start
//! separate A by povm { up, down } into B C
//! audit me from start
//! ```
//!
//! [`parse`] checks every identifier against the declarations seen so far and
//! reports the first problem with its line and column. [`render`] prints an AST
//! back in canonical form, and [`execute`] runs it.

mod ast;
mod interp;
mod lexer;
mod parser;
mod render;

use std::fmt;

pub use ast::{Decl, KetPovm, Located, ProtocolAst, SeparateBy, Step};
pub use interp::{execute, execute_with_tol, Execution, RunError};
pub use parser::parse;
pub use render::{render, render_complex, render_number};

/// A syntax or declaration error, positioned at the offending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line.
    pub line: usize,
    /// 1-based character column.
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>, token: &str) -> Self {
        Self {
            line,
            column,
            message: message.into(),
            token: token.to_string(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.token.is_empty() {
            write!(f, " (at `{}`)", self.token)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
