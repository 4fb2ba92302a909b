//! Text format for rule definitions.
//!
//! One rule per file:
//!
//! ```text
//! # binary expansion
//! rule be {
//!   r = 1;
//!   succ 0: 2*x;
//!   succ 1: 2*x+1;
//! }
//! ```
//!
//! Bodies are either `succ <i>: <affine>;` declarations (one per branch
//! index, affine forms `a*x+b`, `a*x`, `x+b`, `x`, or a bare natural) or
//! `map <nat> -> <nat>,...;` table entries. `#` comments to end of line;
//! whitespace is insignificant. Every diagnostic carries a line and column.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rule::{AffineBranch, RuleError, RuleSystem, MAX_ARITY_EXPONENT};

/// A parsed, validated rule definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub name: String,
    pub arity_exponent: u32,
    pub branches: RuleBranches,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBranches {
    /// Branch i maps x to scale·x + offset.
    Affine(Vec<AffineBranch>),
    /// Finite successor table; every entry lists exactly 2^r labels.
    Table(BTreeMap<BigUint, Vec<BigUint>>),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
}

#[derive(Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    Expected {
        wanted: &'static str,
        found: String,
    },
    DuplicateArityDecl,
    MissingArityDecl,
    ArityTooLarge(u32),
    MixedBranchKinds,
    BranchIndexOutOfRange {
        index: BigUint,
        arity: u64,
    },
    DuplicateBranchIndex(BigUint),
    BranchCountMismatch {
        got: u64,
        expected: u64,
    },
    DuplicateTableKey(BigUint),
    WrongTableEntryLen {
        key: BigUint,
        got: usize,
        expected: u64,
    },
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            Expected { wanted, found } => write!(f, "expected {wanted}, found {found}"),
            DuplicateArityDecl => write!(f, "duplicate r declaration"),
            MissingArityDecl => write!(f, "missing r declaration"),
            ArityTooLarge(r) => {
                write!(
                    f,
                    "arity exponent {r} exceeds supported maximum {MAX_ARITY_EXPONENT}"
                )
            }
            MixedBranchKinds => write!(f, "rule mixes succ and map declarations"),
            BranchIndexOutOfRange { index, arity } => {
                write!(f, "branch index {index} out of range for {arity} branches")
            }
            DuplicateBranchIndex(i) => write!(f, "duplicate branch index {i}"),
            BranchCountMismatch { got, expected } => {
                write!(f, "rule declares {got} branches, arity requires {expected}")
            }
            DuplicateTableKey(k) => write!(f, "duplicate table key {k}"),
            WrongTableEntryLen { key, got, expected } => {
                write!(
                    f,
                    "table entry {key} lists {got} successors, expected {expected}"
                )
            }
            TrailingInput => write!(f, "unexpected input after rule definition"),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(BigUint),
    LBrace,
    RBrace,
    Semi,
    Colon,
    Eq,
    Arrow,
    Star,
    Plus,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Nat(n) => write!(f, "number {n}"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Eq => write!(f, "'='"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Comma => write!(f, "','"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let (tl, tc) = (line, col);
        let Some(&c) = chars.peek() else {
            out.push(Spanned {
                tok: Tok::Eof,
                line: tl,
                col: tc,
            });
            return Ok(out);
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | ';' | ':' | '=' | '*' | '+' | ',' => {
                bump!();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    ',' => Tok::Comma,
                    _ => unreachable!(),
                };
                out.push(Spanned {
                    tok,
                    line: tl,
                    col: tc,
                });
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    out.push(Spanned {
                        tok: Tok::Arrow,
                        line: tl,
                        col: tc,
                    });
                } else {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        kind: ParseErrorKind::UnexpectedChar('-'),
                    });
                }
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let value = digits.parse::<BigUint>().expect("digits only");
                out.push(Spanned {
                    tok: Tok::Nat(value),
                    line: tl,
                    col: tc,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(ident),
                    line: tl,
                    col: tc,
                });
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    kind: ParseErrorKind::UnexpectedChar(other),
                });
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, at: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: at.line,
            col: at.col,
            kind,
        }
    }

    fn expect_tok(&mut self, want: Tok, wanted: &'static str) -> Result<Spanned, ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.err(
                &t,
                ParseErrorKind::Expected {
                    wanted,
                    found: t.tok.to_string(),
                },
            ))
        }
    }

    fn expect_keyword(&mut self, kw: &'static str) -> Result<Spanned, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => Err(self.err(
                &t,
                ParseErrorKind::Expected {
                    wanted: kw,
                    found: other.to_string(),
                },
            )),
        }
    }

    fn expect_nat(&mut self, wanted: &'static str) -> Result<(BigUint, Spanned), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Nat(n) => Ok((n.clone(), t.clone())),
            other => Err(self.err(
                &t,
                ParseErrorKind::Expected {
                    wanted,
                    found: other.to_string(),
                },
            )),
        }
    }

    /// affine := nat '*' 'x' ('+' nat)? | 'x' ('+' nat)? | nat
    fn parse_affine(&mut self) -> Result<AffineBranch, ParseError> {
        let t = self.next();
        let (scale, has_x) = match &t.tok {
            Tok::Nat(a) => {
                if self.peek().tok == Tok::Star {
                    self.next();
                    self.expect_keyword("x")?;
                    (a.clone(), true)
                } else {
                    // bare constant
                    return Ok(AffineBranch {
                        scale: BigUint::zero(),
                        offset: a.clone(),
                    });
                }
            }
            Tok::Ident(s) if s == "x" => (BigUint::one(), true),
            other => {
                return Err(self.err(
                    &t,
                    ParseErrorKind::Expected {
                        wanted: "affine form",
                        found: other.to_string(),
                    },
                ));
            }
        };
        debug_assert!(has_x);
        let offset = if self.peek().tok == Tok::Plus {
            self.next();
            self.expect_nat("offset")?.0
        } else {
            BigUint::zero()
        };
        Ok(AffineBranch { scale, offset })
    }

    fn parse_rule(&mut self) -> Result<RuleSpec, ParseError> {
        self.expect_keyword("rule")?;
        let name_tok = self.next();
        let name = match &name_tok.tok {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(self.err(
                    &name_tok,
                    ParseErrorKind::Expected {
                        wanted: "rule name",
                        found: other.to_string(),
                    },
                ));
            }
        };
        self.expect_tok(Tok::LBrace, "'{'")?;

        let mut arity: Option<u32> = None;
        let mut succ: Vec<(BigUint, AffineBranch, Spanned)> = Vec::new();
        let mut table: Vec<(BigUint, Vec<BigUint>, Spanned)> = Vec::new();

        let close = loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break t,
                Tok::Ident(s) if s == "r" => {
                    self.expect_tok(Tok::Eq, "'='")?;
                    let (value, vt) = self.expect_nat("arity exponent")?;
                    if arity.is_some() {
                        return Err(self.err(&t, ParseErrorKind::DuplicateArityDecl));
                    }
                    let r: u32 = match value.try_into() {
                        Ok(r) if r <= MAX_ARITY_EXPONENT => r,
                        _ => {
                            return Err(self.err(&vt, ParseErrorKind::ArityTooLarge(u32::MAX)));
                        }
                    };
                    arity = Some(r);
                    self.expect_tok(Tok::Semi, "';'")?;
                }
                Tok::Ident(s) if s == "succ" => {
                    let (index, it) = self.expect_nat("branch index")?;
                    self.expect_tok(Tok::Colon, "':'")?;
                    let branch = self.parse_affine()?;
                    self.expect_tok(Tok::Semi, "';'")?;
                    succ.push((index, branch, it));
                }
                Tok::Ident(s) if s == "map" => {
                    let (key, kt) = self.expect_nat("table key")?;
                    self.expect_tok(Tok::Arrow, "'->'")?;
                    let mut values = vec![self.expect_nat("successor label")?.0];
                    while self.peek().tok == Tok::Comma {
                        self.next();
                        values.push(self.expect_nat("successor label")?.0);
                    }
                    self.expect_tok(Tok::Semi, "';'")?;
                    table.push((key, values, kt));
                }
                other => {
                    return Err(self.err(
                        &t,
                        ParseErrorKind::Expected {
                            wanted: "declaration or '}'",
                            found: other.to_string(),
                        },
                    ));
                }
            }
        };

        let end = self.next();
        if end.tok != Tok::Eof {
            return Err(self.err(&end, ParseErrorKind::TrailingInput));
        }

        let Some(r) = arity else {
            return Err(self.err(&close, ParseErrorKind::MissingArityDecl));
        };
        let k = 1u64 << r;

        if !succ.is_empty() && !table.is_empty() {
            return Err(self.err(&table[0].2, ParseErrorKind::MixedBranchKinds));
        }

        if !table.is_empty() {
            let mut entries = BTreeMap::new();
            for (key, values, kt) in table {
                if values.len() as u64 != k {
                    return Err(self.err(
                        &kt,
                        ParseErrorKind::WrongTableEntryLen {
                            key,
                            got: values.len(),
                            expected: k,
                        },
                    ));
                }
                if entries.insert(key.clone(), values).is_some() {
                    return Err(self.err(&kt, ParseErrorKind::DuplicateTableKey(key)));
                }
            }
            return Ok(RuleSpec {
                name,
                arity_exponent: r,
                branches: RuleBranches::Table(entries),
            });
        }

        // Affine body: indices must cover 0..k exactly once.
        let mut slots: Vec<Option<AffineBranch>> = vec![None; k as usize];
        let count = succ.len() as u64;
        for (index, branch, it) in succ {
            let i: u64 = match (&index).try_into() {
                Ok(i) if i < k => i,
                _ => {
                    return Err(self.err(
                        &it,
                        ParseErrorKind::BranchIndexOutOfRange { index, arity: k },
                    ));
                }
            };
            if slots[i as usize].is_some() {
                return Err(self.err(&it, ParseErrorKind::DuplicateBranchIndex(index)));
            }
            slots[i as usize] = Some(branch);
        }
        if count != k {
            return Err(self.err(
                &close,
                ParseErrorKind::BranchCountMismatch {
                    got: count,
                    expected: k,
                },
            ));
        }
        let branches: Vec<AffineBranch> = slots
            .into_iter()
            .map(|b| b.expect("all slots filled"))
            .collect();
        Ok(RuleSpec {
            name,
            arity_exponent: r,
            branches: RuleBranches::Affine(branches),
        })
    }
}

/// Parses a single rule definition.
pub fn parse_rule(text: &str) -> Result<RuleSpec, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.parse_rule()
}

/// Canonical text form; parses back to a structurally equal spec.
pub fn pretty_print(spec: &RuleSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "rule {} {{\n  r = {};\n",
        spec.name, spec.arity_exponent
    ));
    match &spec.branches {
        RuleBranches::Affine(branches) => {
            for (i, b) in branches.iter().enumerate() {
                out.push_str(&format!("  succ {i}: {};\n", render_affine(b)));
            }
        }
        RuleBranches::Table(entries) => {
            for (key, values) in entries {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("  map {key} -> {};\n", vals.join(",")));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn render_affine(b: &AffineBranch) -> String {
    if b.scale.is_zero() {
        return b.offset.to_string();
    }
    let head = if b.scale.is_one() {
        "x".to_string()
    } else {
        format!("{}*x", b.scale)
    };
    if b.offset.is_zero() {
        head
    } else {
        format!("{head}+{}", b.offset)
    }
}

/// Builds the executable rule for a validated spec.
pub fn compile(spec: &RuleSpec) -> Result<RuleSystem, RuleError> {
    match &spec.branches {
        RuleBranches::Affine(branches) => {
            RuleSystem::affine(&spec.name, spec.arity_exponent, branches.clone())
        }
        RuleBranches::Table(entries) => {
            RuleSystem::table(&spec.name, spec.arity_exponent, entries.clone())
        }
    }
}
