use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// A real literal, or an imaginary one when `imaginary` (trailing `i`).
    Number { value: f64, imaginary: bool, signed: bool },
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Equals,
    Arrow,
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based character column.
    pub column: usize,
    pub text: String,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

/// Splits one source line (without its terminator) into tokens; `#` starts a
/// comment.
pub fn tokenize_line(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let single = |kind: TokenKind| Token {
            kind,
            column,
            text: c.to_string(),
        };
        match c {
            '{' => tokens.push(single(TokenKind::LBrace)),
            '}' => tokens.push(single(TokenKind::RBrace)),
            '[' => tokens.push(single(TokenKind::LBracket)),
            ']' => tokens.push(single(TokenKind::RBracket)),
            ',' => tokens.push(single(TokenKind::Comma)),
            ':' => tokens.push(single(TokenKind::Colon)),
            '=' => tokens.push(single(TokenKind::Equals)),
            _ => {}
        }
        if matches!(c, '{' | '}' | '[' | ']' | ',' | ':' | '=') {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '-' && next == Some('>') {
            tokens.push(Token {
                kind: TokenKind::Arrow,
                column,
                text: "->".into(),
            });
            i += 2;
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || c == '.'
            || ((c == '+' || c == '-') && next.is_some_and(|n| n.is_ascii_digit() || n == '.'));
        if starts_number {
            let start = i;
            if c == '+' || c == '-' {
                i += 1;
            }
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let imaginary = i < chars.len() && chars[i] == 'i';
            if imaginary {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            if i < chars.len() && is_ident_continue(chars[i]) {
                return Err(ParseError::new(line_no, column, "malformed number", &text));
            }
            let value: f64 = literal
                .parse()
                .map_err(|_| ParseError::new(line_no, column, "malformed number", &text))?;
            if !value.is_finite() {
                return Err(ParseError::new(line_no, column, "number out of range", &text));
            }
            tokens.push(Token {
                kind: TokenKind::Number {
                    value,
                    imaginary,
                    signed: c == '+' || c == '-',
                },
                column,
                text,
            });
            continue;
        }
        if c == '+' || c == '-' {
            tokens.push(single(if c == '+' { TokenKind::Plus } else { TokenKind::Minus }));
            i += 1;
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let hyphen = d == '-' && chars.get(i + 1).is_some_and(|&n| is_ident_start(n));
                if is_ident_continue(d) || hyphen {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[start..i].iter().collect();
            tokens.push(Token {
                kind: TokenKind::Ident(text.clone()),
                column,
                text,
            });
            continue;
        }
        return Err(ParseError::new(line_no, column, "unexpected character", &c.to_string()));
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(line: &str) -> Vec<TokenKind> {
        tokenize_line(line, 1).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn keywords_and_arrows() {
        assert_eq!(
            kinds("assert-closed a->b # comment"),
            vec![
                TokenKind::Ident("assert-closed".into()),
                TokenKind::Ident("a".into()),
                TokenKind::Arrow,
                TokenKind::Ident("b".into()),
            ]
        );
    }

    #[test]
    fn complex_literals() {
        assert_eq!(
            kinds("0.5-0.25i"),
            vec![
                TokenKind::Number { value: 0.5, imaginary: false, signed: false },
                TokenKind::Number { value: -0.25, imaginary: true, signed: true },
            ]
        );
        assert_eq!(
            kinds("1e-3 + 2i"),
            vec![
                TokenKind::Number { value: 1e-3, imaginary: false, signed: false },
                TokenKind::Plus,
                TokenKind::Number { value: 2.0, imaginary: true, signed: false },
            ]
        );
    }

    #[test]
    fn columns_are_one_based() {
        let toks = tokenize_line("  chamber A", 3).unwrap();
        assert_eq!(toks[0].column, 3);
        assert_eq!(toks[1].column, 11);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize_line("chamber A volume 0.5 $", 7).unwrap_err();
        assert_eq!(err.line, 7);
        assert_eq!(err.column, 22);
        assert_eq!(err.token, "$");
        assert!(tokenize_line("0.5x", 1).is_err());
    }
}
