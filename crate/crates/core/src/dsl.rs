//! Text format for recurrence specs.
//!
//! ```text
//! # Fibonacci
//! seq F: F(n) = F(n-1) + F(n-2); F(1) = 1; F(2) = 1
//! ```
//!
//! A statement starts with `seq NAME:` followed by the recurrence and one seed
//! assignment per lag, separated by `;`. An omitted coefficient means 1, lags
//! not mentioned have coefficient 0, and seeds must sit at consecutive indices.
//! Whitespace is insignificant and `#` starts a comment running to end of line.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::sequences::SequenceSpec;

/// Where spec text came from; only used for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    File(PathBuf),
    Inline,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSource {
    pub text: String,
    pub origin: Origin,
}

impl SpecSource {
    pub fn inline(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: Origin::Inline,
        }
    }

    pub fn file(path: impl Into<PathBuf>, text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: Origin::File(path.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("`{found}` does not match sequence name `{expected}`")]
    NameMismatch { expected: String, found: String },
    #[error("lag must be positive")]
    NonPositiveLag,
    #[error("lag {0} appears more than once")]
    DuplicateLag(usize),
    #[error("coefficient of the largest lag is zero")]
    ZeroTrailingCoefficient,
    #[error("order {expected} recurrence needs {expected} seeds, found {found}")]
    SeedCount { expected: usize, found: usize },
    #[error("seed indices must be consecutive")]
    NonConsecutiveSeeds,
    #[error("number too large")]
    NumberTooLarge,
    #[error("no `seq` statement found")]
    NoStatement,
    #[error("expected a single `seq` statement, found {0}")]
    MultipleStatements(usize),
}

/// Parses text holding exactly one `seq` statement.
pub fn parse(source: &SpecSource) -> Result<SequenceSpec, ParseError> {
    let mut specs = parse_all(source)?;
    match specs.len() {
        1 => Ok(specs.pop().expect("one spec")),
        0 => Err(end_error(&source.text, ParseErrorKind::NoStatement)),
        n => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::MultipleStatements(n),
        }),
    }
}

/// Parses every `seq` statement in the text.
pub fn parse_all(source: &SpecSource) -> Result<Vec<SequenceSpec>, ParseError> {
    let tokens = lex(&source.text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        eof: end_position(&source.text),
    };
    let mut specs = Vec::new();
    while !parser.at_end() {
        specs.push(parser.statement()?);
    }
    Ok(specs)
}

/// Canonical text for a spec; `parse(format(spec))` reproduces it.
pub fn format(spec: &SequenceSpec) -> String {
    let name = spec.name();
    let mut out = format!("seq {name}: {name}(n)=");
    let mut first = true;
    for (i, c) in spec.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        match (first, neg) {
            (true, false) => {}
            (_, true) => out.push('-'),
            (false, false) => out.push('+'),
        }
        first = false;
        let mag = c.magnitude();
        if !mag.is_one() {
            let _ = write!(out, "{mag}*");
        }
        let _ = write!(out, "{name}(n-{})", i + 1);
    }
    for (i, seed) in spec.seeds().iter().enumerate() {
        let _ = write!(out, "; {name}({})={seed}", spec.seed_start() + i as i64);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigUint),
    Punct(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Punct(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.split('\n').count();
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn end_error(text: &str, kind: ParseErrorKind) -> ParseError {
    let (line, column) = end_position(text);
    ParseError { line, column, kind }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                ident.push(c);
                bump(&mut chars);
            }
            tokens.push(Token {
                tok: Tok::Ident(ident),
                line: start_line,
                column: start_col,
            });
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                bump(&mut chars);
            }
            let value = digits.parse::<BigUint>().expect("ascii digits");
            tokens.push(Token {
                tok: Tok::Int(value),
                line: start_line,
                column: start_col,
            });
        } else if ":()=;+-*".contains(c) {
            bump(&mut chars);
            tokens.push(Token {
                tok: Tok::Punct(c),
                line: start_line,
                column: start_col,
            });
        } else {
            return Err(ParseError {
                line: start_line,
                column: start_col,
                kind: ParseErrorKind::UnexpectedChar(c),
            });
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    eof: (usize, usize),
}

struct Term {
    lag: usize,
    coeff: BigInt,
    line: usize,
    column: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map_or(self.eof, |t| (t.line, t.column))
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn expected(&self, what: &str) -> ParseError {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), Tok::describe);
        self.error_here(ParseErrorKind::Expected {
            expected: what.to_string(),
            found,
        })
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.expected(&format!("`{c}`")))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        let hit = self.peek() == Some(&Tok::Punct(c));
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.expected("identifier")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.expected(&format!("`{kw}`"))),
        }
    }

    fn int(&mut self) -> Result<BigUint, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.expected("integer")),
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, ParseError> {
        let neg = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        let mag = BigInt::from(self.int()?);
        Ok(if neg { -mag } else { mag })
    }

    fn named(&mut self, name: &str) -> Result<(), ParseError> {
        let (line, column) = self.here();
        let found = self.ident()?;
        if found != name {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::NameMismatch {
                    expected: name.to_string(),
                    found,
                },
            });
        }
        Ok(())
    }

    fn starts_statement(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == "seq")
            && matches!(self.peek_at(1), Some(Tok::Ident(_)))
    }

    fn statement(&mut self) -> Result<SequenceSpec, ParseError> {
        let (line, column) = self.here();
        self.keyword("seq")?;
        let name = self.ident()?;
        self.punct(':')?;
        self.named(&name)?;
        self.punct('(')?;
        self.keyword("n")?;
        self.punct(')')?;
        self.punct('=')?;

        let mut terms = vec![self.term(&name, true)?];
        while matches!(self.peek(), Some(Tok::Punct('+' | '-'))) {
            terms.push(self.term(&name, false)?);
        }

        let mut seeds: Vec<(i64, BigInt, usize, usize)> = Vec::new();
        while self.eat_punct(';') {
            if self.at_end() || self.starts_statement() {
                break;
            }
            let (sl, sc) = self.here();
            self.named(&name)?;
            self.punct('(')?;
            let index = self.signed_int()?;
            let index = i64::try_from(index).map_err(|_| ParseError {
                line: sl,
                column: sc,
                kind: ParseErrorKind::NumberTooLarge,
            })?;
            self.punct(')')?;
            self.punct('=')?;
            let value = self.signed_int()?;
            seeds.push((index, value, sl, sc));
        }
        if !self.at_end() && !self.starts_statement() {
            return Err(self.expected("`;` or `seq`"));
        }

        let order = terms
            .iter()
            .map(|t| t.lag)
            .max()
            .expect("at least one term");
        let mut coeffs = vec![BigInt::zero(); order];
        let mut seen = vec![false; order];
        for t in &terms {
            if std::mem::replace(&mut seen[t.lag - 1], true) {
                return Err(ParseError {
                    line: t.line,
                    column: t.column,
                    kind: ParseErrorKind::DuplicateLag(t.lag),
                });
            }
            coeffs[t.lag - 1] = t.coeff.clone();
        }
        if coeffs[order - 1].is_zero() {
            let t = terms
                .iter()
                .find(|t| t.lag == order)
                .expect("trailing term");
            return Err(ParseError {
                line: t.line,
                column: t.column,
                kind: ParseErrorKind::ZeroTrailingCoefficient,
            });
        }
        if seeds.len() != order {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::SeedCount {
                    expected: order,
                    found: seeds.len(),
                },
            });
        }
        let start = seeds.iter().map(|s| s.0).min().expect("order >= 1");
        let mut ordered: Vec<Option<BigInt>> = vec![None; order];
        for (index, value, sl, sc) in seeds {
            let slot = usize::try_from(index - start)
                .ok()
                .and_then(|i| ordered.get_mut(i))
                .filter(|slot| slot.is_none());
            match slot {
                Some(slot) => *slot = Some(value),
                None => {
                    return Err(ParseError {
                        line: sl,
                        column: sc,
                        kind: ParseErrorKind::NonConsecutiveSeeds,
                    })
                }
            }
        }
        let seeds = ordered.into_iter().map(|v| v.expect("filled")).collect();
        Ok(SequenceSpec::new(name, coeffs, seeds, start).expect("validated above"))
    }

    /// `[+|-] [INT *] NAME ( n - INT )`
    fn term(&mut self, name: &str, leading: bool) -> Result<Term, ParseError> {
        let (line, column) = self.here();
        let neg = self.eat_punct('-');
        if !neg && !self.eat_punct('+') && !leading {
            return Err(self.expected("`+` or `-`"));
        }
        let mut coeff = BigInt::one();
        if let Some(Tok::Int(_)) = self.peek() {
            coeff = BigInt::from(self.int()?);
            self.punct('*')?;
        }
        if neg {
            coeff = -coeff;
        }
        self.named(name)?;
        self.punct('(')?;
        self.keyword("n")?;
        let lag_pos = self.here();
        let lag = if self.eat_punct('-') {
            self.int()?
        } else {
            BigUint::zero()
        };
        self.punct(')')?;
        let lag = usize::try_from(&lag).map_err(|_| ParseError {
            line: lag_pos.0,
            column: lag_pos.1,
            kind: ParseErrorKind::NumberTooLarge,
        })?;
        if lag == 0 {
            return Err(ParseError {
                line: lag_pos.0,
                column: lag_pos.1,
                kind: ParseErrorKind::NonPositiveLag,
            });
        }
        // guards against absurd orders allocating huge coefficient vectors
        if lag > MAX_ORDER {
            return Err(ParseError {
                line: lag_pos.0,
                column: lag_pos.1,
                kind: ParseErrorKind::NumberTooLarge,
            });
        }
        Ok(Term {
            lag,
            coeff,
            line,
            column,
        })
    }
}

/// Largest lag accepted in spec text.
pub const MAX_ORDER: usize = 4096;
