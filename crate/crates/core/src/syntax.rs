//! Lexer and parse errors shared by the three source languages.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: variable `{name}` occurs more than once in a pattern")]
    NonlinearPattern { line: usize, column: usize, name: String },
    #[error("{line}:{column}: unbound variable `{name}`")]
    UnboundVariable { line: usize, column: usize, name: String },
    #[error("{line}:{column}: unknown function `{name}`")]
    UnknownFunction { line: usize, column: usize, name: String },
}

impl ParseError {
    pub fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax { line: pos.line, column: pos.column, message: message.into() }
    }

    pub fn position(&self) -> Pos {
        let (line, column) = match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::NonlinearPattern { line, column, .. }
            | ParseError::UnboundVariable { line, column, .. }
            | ParseError::UnknownFunction { line, column, .. } => (*line, *column),
        };
        Pos { line, column }
    }
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    Choose,
    Eq,
    Lt,
    Le,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Semi => ";",
                    Tok::Assign => ":=",
                    Tok::Choose => ":∈",
                    Tok::Eq => "=",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::Arrow => "->",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let advance = |n: usize, column: &mut usize| *column += n;
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && is_ident_start(chars[i]) {
                return Err(ParseError::syntax(pos, "malformed number"));
            }
            let digits: String = chars[start..i].iter().collect();
            advance(i - start, &mut column);
            out.push(Token { tok: Tok::Int(digits.parse().expect("ascii digits")), pos });
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            advance(i - start, &mut column);
            out.push(Token { tok: Tok::Ident(word), pos });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            (':', Some('=')) => (Tok::Assign, 2),
            (':', Some('∈')) => (Tok::Choose, 2),
            (':', Some('i'))
                if chars.get(i + 2) == Some(&'n') && !chars.get(i + 3).copied().is_some_and(is_ident_char) =>
            {
                (Tok::Choose, 3)
            }
            ('<', Some('=')) => (Tok::Le, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('→', _) => (Tok::Arrow, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            _ => return Err(ParseError::syntax(pos, format!("unexpected character `{c}`"))),
        };
        i += len;
        column += len;
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column } });
    Ok(out)
}

/// Token cursor used by the recursive-descent parsers.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor { toks: tokenize(src)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Pos, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::syntax(self.pos(), format!("expected {expected}, found {}", self.peek()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn choose_spellings() {
        assert_eq!(kinds("d :∈ x")[1], Tok::Choose);
        assert_eq!(kinds("d :in x")[1], Tok::Choose);
        assert!(tokenize("d :inx").is_err());
    }

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("# header\n  x := 1").unwrap();
        assert_eq!(toks[0].pos, Pos { line: 2, column: 3 });
        assert_eq!(toks[1].pos, Pos { line: 2, column: 5 });
    }

    #[test]
    fn bad_input() {
        assert!(matches!(tokenize("x @ 1"), Err(ParseError::Syntax { line: 1, column: 3, .. })));
        assert!(tokenize("12abc").is_err());
    }

    #[test]
    fn arrows() {
        assert_eq!(kinds("fun x -> x")[2], Tok::Arrow);
        assert_eq!(kinds("fun x → x")[2], Tok::Arrow);
    }
}
