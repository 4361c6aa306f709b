use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use super::ast::{Decl, KetPovm, Located, ProtocolAst, SeparateBy, Step};
use super::lexer::{tokenize_line, Token, TokenKind};
use super::ParseError;
use crate::linalg::{ComplexMatrix, Ket, MAX_DIM};
use crate::observers::build_observer;
use crate::quantum::StatisticalMatrix;

/// Fill weights must sum to one within this.
const FILL_WEIGHT_TOL: f64 = 1e-9;

/// Parses a protocol, stopping at the first error.
pub fn parse(source: &str) -> Result<ProtocolAst, ParseError> {
    let mut env = Env::default();
    let mut ast = ProtocolAst::default();
    let mut last_line = 1;
    for (idx, raw) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = tokenize_line(text, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        last_line = line_no;
        let mut cur = Cursor {
            tokens,
            pos: 0,
            line: line_no,
            width: text.chars().count(),
        };
        let keyword = cur.ident("a declaration or step keyword")?;
        match keyword.as_str() {
            "space" | "temp" | "ket" | "gas" | "observer" | "chamber" | "fill" => {
                if !ast.steps.is_empty() {
                    return Err(cur.error_at(0, "declarations must come before the first step"));
                }
                let node = env.declaration(&keyword, &mut cur)?;
                cur.finish()?;
                ast.declarations.push(Located { line: line_no, node });
            }
            "mix" | "separate" | "rotate" | "partition" | "join" | "checkpoint" | "assert-closed"
            | "audit" => {
                if ast.steps.is_empty() {
                    env.begin_steps()?;
                }
                let node = env.step(&keyword, &mut cur)?;
                cur.finish()?;
                ast.steps.push(Located { line: line_no, node });
            }
            _ => return Err(cur.error_at(0, format!("unknown keyword `{keyword}`"))),
        }
    }
    if env.space.is_none() {
        return Err(ParseError::new(last_line, 1, "missing `space` declaration", ""));
    }
    if ast.steps.is_empty() {
        env.begin_steps()?;
    }
    Ok(ast)
}

/// An identifier and the index of its token.
type Word = (String, usize);

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    width: usize,
}

impl Cursor {
    fn error_at(&self, index: usize, message: impl Into<String>) -> ParseError {
        match self.tokens.get(index) {
            Some(t) => ParseError::new(self.line, t.column, message, &t.text),
            None => ParseError::new(self.line, self.width.max(1), message, ""),
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn expected(&self, what: &str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(t) => self.error_here(format!("expected {what}, found `{}`", t.text)),
            None => self.error_here(format!("expected {what} before end of line")),
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.expected(what)),
        }
    }

    /// An identifier together with its token index, for later diagnostics.
    fn name(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let at = self.pos;
        Ok((self.ident(what)?, at))
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(s)) if s == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.expected(&format!("`{word}`"))),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == word)
    }

    fn punct(&mut self, kind: TokenKind, shown: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.expected(&format!("`{shown}`")))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn real(&mut self, what: &str) -> Result<(f64, usize), ParseError> {
        match self.peek() {
            Some(&TokenKind::Number {
                value,
                imaginary: false,
                ..
            }) => {
                self.pos += 1;
                Ok((value, self.pos - 1))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn int(&mut self, what: &str) -> Result<(usize, usize), ParseError> {
        let (value, at) = self.real(what)?;
        if value < 1.0 || value.fract() != 0.0 || !self.tokens[at].text.chars().all(|c| c.is_ascii_digit()) {
            return Err(self.error_at(at, format!("expected {what}, a positive integer")));
        }
        Ok((value as usize, at))
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        let (re, _) = self.real("a number")?;
        let sign = match self.peek() {
            Some(TokenKind::Plus) => Some(1.0),
            Some(TokenKind::Minus) => Some(-1.0),
            Some(&TokenKind::Number {
                imaginary: true,
                signed: true,
                ..
            }) => {
                return match self.tokens[self.pos].kind {
                    TokenKind::Number { value, .. } => {
                        self.pos += 1;
                        Ok(Complex64::new(re, value))
                    }
                    _ => unreachable!(),
                };
            }
            _ => None,
        };
        let Some(sign) = sign else {
            return Ok(Complex64::new(re, 0.0));
        };
        self.pos += 1;
        match self.peek() {
            Some(&TokenKind::Number {
                value,
                imaginary: true,
                signed: false,
            }) => {
                self.pos += 1;
                Ok(Complex64::new(re, sign * value))
            }
            _ => Err(self.expected("an imaginary part such as `0.5i`")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            Err(self.error_here(format!("unexpected `{}`", self.tokens[self.pos].text)))
        } else {
            Ok(())
        }
    }

    /// `{ a -> b, c -> d }`
    fn arrow_table(&mut self) -> Result<Vec<(Word, Word)>, ParseError> {
        self.punct(TokenKind::LBrace, "{")?;
        let mut rows = Vec::new();
        loop {
            let from = self.name("a ket name")?;
            self.punct(TokenKind::Arrow, "->")?;
            let to = self.name("a ket name")?;
            rows.push((from, to));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.punct(TokenKind::RBrace, "}")?;
        Ok(rows)
    }

    /// `[ c, c, ... ]`
    fn complex_list(&mut self) -> Result<Vec<Complex64>, ParseError> {
        self.punct(TokenKind::LBracket, "[")?;
        let mut values = vec![self.complex()?];
        while self.eat(&TokenKind::Comma) {
            values.push(self.complex()?);
        }
        self.punct(TokenKind::RBracket, "]")?;
        Ok(values)
    }
}

#[derive(Default)]
struct Env {
    space: Option<(String, usize)>,
    temp_seen: bool,
    kets: HashMap<String, Ket>,
    gases: HashSet<String>,
    observers: HashMap<String, usize>,
    /// Declared chambers with their declaration position, in order.
    chambers: Vec<(String, usize, usize)>,
    filled: HashSet<String>,
    live: HashSet<String>,
    checkpoints: HashSet<String>,
}

impl Env {
    fn lab_dim(&self, cur: &Cursor, what: &str) -> Result<usize, ParseError> {
        self.space
            .as_ref()
            .map(|(_, d)| *d)
            .ok_or_else(|| cur.error_at(0, format!("`space` must be declared before {what}")))
    }

    fn ket(&self, cur: &Cursor, (name, at): &(String, usize)) -> Result<&Ket, ParseError> {
        self.kets
            .get(name)
            .ok_or_else(|| cur.error_at(*at, format!("undeclared ket `{name}`")))
    }

    fn lab_ket(&self, cur: &Cursor, id: &(String, usize), dim: usize) -> Result<&Ket, ParseError> {
        let ket = self.ket(cur, id)?;
        if ket.dim() != dim {
            return Err(cur.error_at(
                id.1,
                format!("ket `{}` has dimension {} but {dim} is required", id.0, ket.dim()),
            ));
        }
        Ok(ket)
    }

    fn observer(&self, cur: &Cursor, (name, at): &(String, usize)) -> Result<usize, ParseError> {
        self.observers
            .get(name)
            .copied()
            .ok_or_else(|| cur.error_at(*at, format!("undeclared observer `{name}`")))
    }

    fn chamber_declared(&self, name: &str) -> bool {
        self.chambers.iter().any(|(c, _, _)| c == name)
    }

    fn begin_steps(&mut self) -> Result<(), ParseError> {
        for (name, line, column) in &self.chambers {
            if !self.filled.contains(name) {
                return Err(ParseError::new(
                    *line,
                    *column,
                    format!("chamber `{name}` is never filled"),
                    name,
                ));
            }
        }
        self.live = self.chambers.iter().map(|(c, _, _)| c.clone()).collect();
        Ok(())
    }

    fn declaration(&mut self, keyword: &str, cur: &mut Cursor) -> Result<Decl, ParseError> {
        match keyword {
            "space" => {
                if self.space.is_some() {
                    return Err(cur.error_at(0, "only one `space` declaration is allowed"));
                }
                let (name, _) = cur.name("a space name")?;
                cur.keyword("dim")?;
                let (dim, at) = cur.int("a dimension")?;
                if dim > MAX_DIM {
                    return Err(cur.error_at(at, format!("dimension must be at most {MAX_DIM}")));
                }
                self.space = Some((name.clone(), dim));
                Ok(Decl::Space { name, dim })
            }
            "temp" => {
                if self.temp_seen {
                    return Err(cur.error_at(0, "only one `temp` declaration is allowed"));
                }
                let (t, at) = cur.real("a temperature")?;
                if t <= 0.0 {
                    return Err(cur.error_at(at, "temperature must be positive"));
                }
                self.temp_seen = true;
                Ok(Decl::Temp(t))
            }
            "ket" => {
                let (name, at) = cur.name("a ket name")?;
                if self.kets.contains_key(&name) {
                    return Err(cur.error_at(at, format!("ket `{name}` is already declared")));
                }
                cur.punct(TokenKind::Equals, "=")?;
                let list_at = cur.pos;
                let amplitudes = cur.complex_list()?;
                let ket = Ket::new(amplitudes.clone()).map_err(|e| cur.error_at(list_at, e.to_string()))?;
                self.kets.insert(name.clone(), ket);
                Ok(Decl::Ket { name, amplitudes })
            }
            "gas" => {
                let dim = self.lab_dim(cur, "gases")?;
                let (name, at) = cur.name("a gas name")?;
                if self.gases.contains(&name) {
                    return Err(cur.error_at(at, format!("gas `{name}` is already declared")));
                }
                let node = if cur.at_keyword("from") {
                    cur.keyword("from")?;
                    cur.keyword("ket")?;
                    let ket = cur.name("a ket name")?;
                    self.lab_ket(cur, &ket, dim)?;
                    Decl::GasFromKet {
                        name: name.clone(),
                        ket: ket.0,
                    }
                } else if cur.at_keyword("matrix") {
                    cur.keyword("matrix")?;
                    let matrix_at = cur.pos;
                    cur.punct(TokenKind::LBracket, "[")?;
                    let mut rows = vec![cur.complex_list()?];
                    while cur.eat(&TokenKind::Comma) {
                        rows.push(cur.complex_list()?);
                    }
                    cur.punct(TokenKind::RBracket, "]")?;
                    if rows.len() != dim {
                        return Err(cur.error_at(
                            matrix_at,
                            format!("matrix has {} rows but the space has dimension {dim}", rows.len()),
                        ));
                    }
                    ComplexMatrix::from_rows(&rows)
                        .and_then(StatisticalMatrix::new)
                        .map_err(|e| cur.error_at(matrix_at, e.to_string()))?;
                    Decl::GasMatrix {
                        name: name.clone(),
                        rows,
                    }
                } else {
                    return Err(cur.expected("`from` or `matrix`"));
                };
                self.gases.insert(name);
                Ok(node)
            }
            "observer" => {
                let lab_dim = self.lab_dim(cur, "observers")?;
                let (name, at) = cur.name("an observer name")?;
                if self.observers.contains_key(&name) {
                    return Err(cur.error_at(at, format!("observer `{name}` is already declared")));
                }
                let table_at = cur.pos + 1;
                cur.keyword("table")?;
                let rows = cur.arrow_table()?;
                cur.keyword("dim")?;
                let (obs_dim, dim_at) = cur.int("a dimension")?;
                if obs_dim > MAX_DIM {
                    return Err(cur.error_at(dim_at, format!("dimension must be at most {MAX_DIM}")));
                }
                let mut kets = Vec::with_capacity(rows.len());
                for (lab, obs) in &rows {
                    let l = self.lab_ket(cur, lab, lab_dim)?.clone();
                    let o = self.lab_ket(cur, obs, obs_dim)?.clone();
                    kets.push((l, o));
                }
                build_observer(name.clone(), &kets, obs_dim).map_err(|e| cur.error_at(table_at, e.to_string()))?;
                self.observers.insert(name.clone(), obs_dim);
                Ok(Decl::Observer {
                    name,
                    table: rows.into_iter().map(|((l, _), (o, _))| (l, o)).collect(),
                    dim: obs_dim,
                })
            }
            "chamber" => {
                self.lab_dim(cur, "chambers")?;
                let (name, at) = cur.name("a chamber name")?;
                if self.chamber_declared(&name) {
                    return Err(cur.error_at(at, format!("chamber `{name}` is already declared")));
                }
                cur.keyword("volume")?;
                let (volume, vat) = cur.real("a volume")?;
                if volume <= 0.0 {
                    return Err(cur.error_at(vat, "volume must be positive"));
                }
                let column = cur.tokens[at].column;
                self.chambers.push((name.clone(), cur.line, column));
                Ok(Decl::Chamber { name, volume })
            }
            "fill" => {
                self.lab_dim(cur, "fillings")?;
                let (chamber, at) = cur.name("a chamber name")?;
                if !self.chamber_declared(&chamber) {
                    return Err(cur.error_at(at, format!("undeclared chamber `{chamber}`")));
                }
                if self.filled.contains(&chamber) {
                    return Err(cur.error_at(at, format!("chamber `{chamber}` is already filled")));
                }
                let open_at = cur.pos;
                cur.punct(TokenKind::LBrace, "{")?;
                let mut parts: Vec<(String, f64)> = Vec::new();
                loop {
                    let (gas, gat) = cur.name("a gas name")?;
                    if !self.gases.contains(&gas) {
                        return Err(cur.error_at(gat, format!("undeclared gas `{gas}`")));
                    }
                    if parts.iter().any(|(g, _)| *g == gas) {
                        return Err(cur.error_at(gat, format!("gas `{gas}` listed twice")));
                    }
                    cur.punct(TokenKind::Colon, ":")?;
                    let (w, wat) = cur.real("a weight")?;
                    if w <= 0.0 {
                        return Err(cur.error_at(wat, "weights must be positive"));
                    }
                    parts.push((gas, w));
                    if !cur.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                cur.punct(TokenKind::RBrace, "}")?;
                let sum: f64 = parts.iter().map(|(_, w)| w).sum();
                if (sum - 1.0).abs() > FILL_WEIGHT_TOL {
                    return Err(cur.error_at(open_at, format!("weights sum to {sum}, not 1")));
                }
                cur.keyword("moles")?;
                let (moles, mat) = cur.real("an amount in moles")?;
                if moles <= 0.0 {
                    return Err(cur.error_at(mat, "moles must be positive"));
                }
                self.filled.insert(chamber.clone());
                Ok(Decl::Fill { chamber, parts, moles })
            }
            _ => unreachable!("dispatched on declaration keywords"),
        }
    }

    fn live_chamber(&self, cur: &Cursor, (name, at): &(String, usize)) -> Result<(), ParseError> {
        if self.live.contains(name) {
            Ok(())
        } else if self.chamber_declared(name) {
            Err(cur.error_at(*at, format!("chamber `{name}` no longer exists at this point")))
        } else {
            Err(cur.error_at(*at, format!("undeclared chamber `{name}`")))
        }
    }

    /// Retires `consumed` and introduces `produced`, which must be fresh and
    /// distinct.
    fn replace(&mut self, cur: &Cursor, consumed: &[&(String, usize)], produced: &[(String, usize)]) -> Result<(), ParseError> {
        for (i, c) in consumed.iter().enumerate() {
            self.live_chamber(cur, c)?;
            if consumed[..i].iter().any(|o| o.0 == c.0) {
                return Err(cur.error_at(c.1, format!("chamber `{}` used twice", c.0)));
            }
        }
        for c in consumed {
            self.live.remove(&c.0);
        }
        for (i, (name, at)) in produced.iter().enumerate() {
            if self.live.contains(name) || produced[..i].iter().any(|(o, _)| o == name) {
                return Err(cur.error_at(*at, format!("chamber `{name}` already exists")));
            }
        }
        for (name, _) in produced {
            self.live.insert(name.clone());
        }
        Ok(())
    }

    fn ket_povm(&self, cur: &mut Cursor) -> Result<KetPovm, ParseError> {
        let lab_dim = self.space.as_ref().map(|(_, d)| *d).unwrap_or(0);
        cur.keyword("povm")?;
        cur.punct(TokenKind::LBrace, "{")?;
        let mut kets = vec![cur.name("a ket name")?];
        while cur.eat(&TokenKind::Comma) {
            kets.push(cur.name("a ket name")?);
        }
        cur.punct(TokenKind::RBrace, "}")?;
        let lift = if cur.at_keyword("lift") {
            cur.keyword("lift")?;
            Some(cur.name("an observer name")?)
        } else {
            None
        };
        let dim = match &lift {
            Some(obs) => self.observer(cur, obs)?,
            None => lab_dim,
        };
        for k in &kets {
            self.lab_ket(cur, k, dim)?;
        }
        Ok(KetPovm {
            kets: kets.into_iter().map(|(k, _)| k).collect(),
            lift: lift.map(|(o, _)| o),
        })
    }

    fn step(&mut self, keyword: &str, cur: &mut Cursor) -> Result<Step, ParseError> {
        match keyword {
            "mix" => {
                let a = cur.name("a chamber name")?;
                let b = cur.name("a chamber name")?;
                cur.keyword("into")?;
                let into = cur.name("a chamber name")?;
                cur.keyword("by")?;
                let povm = self.ket_povm(cur)?;
                self.replace(cur, &[&a, &b], std::slice::from_ref(&into))?;
                Ok(Step::Mix {
                    a: a.0,
                    b: b.0,
                    into: into.0,
                    povm,
                })
            }
            "separate" => {
                let chamber = cur.name("a chamber name")?;
                self.live_chamber(cur, &chamber)?;
                cur.keyword("by")?;
                let by = if cur.at_keyword("eigenbasis") {
                    cur.keyword("eigenbasis")?;
                    SeparateBy::Eigenbasis
                } else {
                    SeparateBy::Povm(self.ket_povm(cur)?)
                };
                cur.keyword("into")?;
                let mut into = vec![cur.name("a chamber name")?, cur.name("a chamber name")?];
                while matches!(cur.peek(), Some(TokenKind::Ident(_))) {
                    into.push(cur.name("a chamber name")?);
                }
                self.replace(cur, &[&chamber], &into)?;
                Ok(Step::Separate {
                    chamber: chamber.0,
                    by,
                    into: into.into_iter().map(|(n, _)| n).collect(),
                })
            }
            "rotate" => {
                let dim = self.space.as_ref().map(|(_, d)| *d).unwrap_or(0);
                let chamber = cur.name("a chamber name")?;
                self.live_chamber(cur, &chamber)?;
                cur.keyword("map")?;
                let rows = cur.arrow_table()?;
                for (from, to) in &rows {
                    self.lab_ket(cur, from, dim)?;
                    self.lab_ket(cur, to, dim)?;
                }
                Ok(Step::Rotate {
                    chamber: chamber.0,
                    map: rows.into_iter().map(|((f, _), (t, _))| (f, t)).collect(),
                })
            }
            "partition" => {
                let chamber = cur.name("a chamber name")?;
                cur.keyword("at")?;
                let (fraction, fat) = cur.real("a fraction")?;
                if !(fraction > 0.0 && fraction < 1.0) {
                    return Err(cur.error_at(fat, "fraction must lie strictly between 0 and 1"));
                }
                cur.keyword("into")?;
                let x = cur.name("a chamber name")?;
                let y = cur.name("a chamber name")?;
                self.replace(cur, &[&chamber], &[x.clone(), y.clone()])?;
                Ok(Step::Partition {
                    chamber: chamber.0,
                    fraction,
                    into: [x.0, y.0],
                })
            }
            "join" => {
                let a = cur.name("a chamber name")?;
                let b = cur.name("a chamber name")?;
                cur.keyword("into")?;
                let into = cur.name("a chamber name")?;
                self.replace(cur, &[&a, &b], std::slice::from_ref(&into))?;
                Ok(Step::Join {
                    a: a.0,
                    b: b.0,
                    into: into.0,
                })
            }
            "checkpoint" => {
                let (label, at) = cur.name("a checkpoint label")?;
                if !self.checkpoints.insert(label.clone()) {
                    return Err(cur.error_at(at, format!("checkpoint `{label}` is already defined")));
                }
                Ok(Step::Checkpoint(label))
            }
            "assert-closed" | "audit" => {
                let observer = cur.name("an observer name")?;
                self.observer(cur, &observer)?;
                cur.keyword("from")?;
                let (checkpoint, at) = cur.name("a checkpoint label")?;
                if !self.checkpoints.contains(&checkpoint) {
                    return Err(cur.error_at(at, format!("undeclared checkpoint `{checkpoint}`")));
                }
                Ok(if keyword == "audit" {
                    Step::Audit {
                        observer: observer.0,
                        checkpoint,
                    }
                } else {
                    Step::AssertClosed {
                        observer: observer.0,
                        checkpoint,
                    }
                })
            }
            _ => unreachable!("dispatched on step keywords"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "space lab dim 2\nket up = [1, 0]\nket down = [0, 1]\ngas Up from ket up\n";

    #[test]
    fn single_chamber_declaration() {
        let err = parse("space s dim 2\nchamber A volume 0.5\n").unwrap_err();
        // an unfilled chamber is rejected once the declarations end
        assert_eq!((err.line, err.column), (2, 9));
        let ok = parse("space s dim 2\nket k = [1, 0]\ngas G from ket k\nchamber A volume 0.5\nfill A { G: 1 } moles 1\n")
            .unwrap();
        assert_eq!(
            ok.declarations[3].node,
            Decl::Chamber {
                name: "A".into(),
                volume: 0.5
            }
        );
        assert_eq!(ok.declarations[3].line, 4);
    }

    #[test]
    fn undeclared_chamber_in_separate() {
        let src = format!("{HEADER}chamber B0 volume 1\nfill B0 {{ Up: 1 }} moles 1\nseparate A by eigenbasis into B C\n");
        let err = parse(&src).unwrap_err();
        assert_eq!(err.line, 7);
        assert_eq!(err.column, 10);
        assert_eq!(err.token, "A");
        assert!(err.message.contains("undeclared chamber"));
    }

    #[test]
    fn complex_amplitudes_and_crlf() {
        let ast = parse("space s dim 2\r\nket k = [0.6, 0-0.8i] # comment\r\n").unwrap();
        assert_eq!(
            ast.declarations[1].node,
            Decl::Ket {
                name: "k".into(),
                amplitudes: vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8)]
            }
        );
    }

    #[test]
    fn consumed_chambers_are_gone() {
        let src = format!(
            "{HEADER}chamber A volume 1\nfill A {{ Up: 1 }} moles 1\npartition A at 0.5 into B C\njoin A B into D\n"
        );
        let err = parse(&src).unwrap_err();
        assert_eq!((err.line, err.column), (8, 6));
        assert!(err.message.contains("no longer exists"));
    }

    #[test]
    fn lifted_povm_uses_observer_dimension() {
        let src = "space s dim 2\nket a = [1, 0]\nket b = [0, 1]\nket one = [1]\n\
                   observer o table { a -> one, b -> one } dim 1\ngas G from ket a\n\
                   chamber A volume 1\nfill A { G: 1 } moles 1\n\
                   separate A by povm { one } lift o into B C\n";
        let ast = parse(src).unwrap();
        assert_eq!(
            ast.steps[0].node,
            Step::Separate {
                chamber: "A".into(),
                by: SeparateBy::Povm(KetPovm {
                    kets: vec!["one".into()],
                    lift: Some("o".into())
                }),
                into: vec!["B".into(), "C".into()],
            }
        );
        let bad = src.replace("{ one } lift o", "{ one }");
        let err = parse(&bad).unwrap_err();
        assert_eq!(err.token, "one");
    }

    #[test]
    fn declarations_after_steps_are_rejected() {
        let src = format!("{HEADER}chamber A volume 1\nfill A {{ Up: 1 }} moles 1\ncheckpoint a\ntemp 2\n");
        let err = parse(&src).unwrap_err();
        assert_eq!((err.line, err.column), (8, 1));
    }
}
