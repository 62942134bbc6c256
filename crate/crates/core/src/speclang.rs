//! Constraint specification language.
//!
//! ```text
//! spec   := "alphabet" symbol+ ";" "violation" regex ";"
//! regex  := seq ("|" seq)*
//! seq    := rep+
//! rep    := atom ("*" | "+" | "?")?
//! atom   := symbol | "(" regex ")"
//! symbol := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! `#` starts a comment running to the end of the line. A violation pattern
//! denotes a regular language `L`; the monitored constraint is its set of
//! minimal words, so `a b?` and `a` describe the same constraint.

use std::fmt;

use thiserror::Error;

use crate::detector::{FiniteDetector, RegularPrefixFreeSet};
use crate::error::{Error, Result};
use crate::families::{
    machine_from_regular, machine_to_detector, prefix_free_kernel_of_machine, EilenbergMachine,
};
use crate::sequences::{Alphabet, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("symbol `{0}` is not declared in the alphabet")]
    UndeclaredSymbol(String),
    #[error("an alphabet needs a minimum of two symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("duplicate alphabet symbol `{0}`")]
    DuplicateSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexAst {
    Symbol(Symbol),
    Concat(Vec<RegexAst>),
    Alt(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Optional(Box<RegexAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub pattern: RegexAst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Semi,
    Pipe,
    Star,
    Plus,
    Question,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Question => f.write_str("`?`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, SpecError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let single = match c {
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Pipe),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '?' => Some(Tok::Question),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            out.push(Token {
                tok,
                line: l,
                column: col,
            });
        } else if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars
                .peek()
                .filter(|c| c.is_ascii_alphanumeric() || **c == '_')
            {
                ident.push(c);
                chars.next();
                column += 1;
            }
            out.push(Token {
                tok: Tok::Ident(ident),
                line: l,
                column: col,
            });
        } else {
            return Err(SpecError {
                kind: SpecErrorKind::Lexical(c),
                line: l,
                column: col,
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    alphabet: Option<Alphabet>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: SpecErrorKind) -> SpecError {
        let t = self.peek();
        SpecError {
            kind,
            line: t.line,
            column: t.column,
        }
    }

    fn expected(&self, what: &str) -> SpecError {
        self.error_here(SpecErrorKind::Syntax {
            expected: what.to_string(),
            found: self.peek().tok.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SpecError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SpecError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.expected(&format!("`{kw}`"))),
        }
    }

    fn spec(&mut self, name: &str) -> Result<ConstraintSpec, SpecError> {
        self.keyword("alphabet")?;
        let start = (self.peek().line, self.peek().column);
        let mut names: Vec<String> = Vec::new();
        while let Tok::Ident(s) = &self.peek().tok {
            if names.contains(s) {
                return Err(self.error_here(SpecErrorKind::DuplicateSymbol(s.clone())));
            }
            names.push(s.clone());
            self.bump();
        }
        if names.len() < 2 {
            return Err(SpecError {
                kind: SpecErrorKind::AlphabetTooSmall(names.len()),
                line: start.0,
                column: start.1,
            });
        }
        self.expect(Tok::Semi, "`;` after the alphabet")?;
        self.alphabet = Some(Alphabet::new(names).expect("validated above"));
        self.keyword("violation")?;
        let pattern = self.alt()?;
        self.expect(Tok::Semi, "`;` after the violation pattern")?;
        if self.peek().tok != Tok::End {
            return Err(self.expected("end of input"));
        }
        Ok(ConstraintSpec {
            name: name.to_string(),
            alphabet: self.alphabet.take().expect("set above"),
            pattern,
        })
    }

    fn alt(&mut self) -> Result<RegexAst, SpecError> {
        let mut branches = vec![self.seq()?];
        while self.peek().tok == Tok::Pipe {
            self.bump();
            branches.push(self.seq()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().expect("one branch")
        } else {
            RegexAst::Alt(branches)
        })
    }

    fn seq(&mut self) -> Result<RegexAst, SpecError> {
        let mut items = Vec::new();
        while matches!(self.peek().tok, Tok::Ident(_) | Tok::LParen) {
            items.push(self.rep()?);
        }
        match items.len() {
            0 => Err(self.expected("a symbol or `(`")),
            1 => Ok(items.pop().expect("one item")),
            _ => Ok(RegexAst::Concat(items)),
        }
    }

    fn rep(&mut self) -> Result<RegexAst, SpecError> {
        let atom = self.atom()?;
        let wrap: fn(Box<RegexAst>) -> RegexAst = match self.peek().tok {
            Tok::Star => RegexAst::Star,
            Tok::Plus => RegexAst::Plus,
            Tok::Question => RegexAst::Optional,
            _ => return Ok(atom),
        };
        self.bump();
        Ok(wrap(Box::new(atom)))
    }

    fn atom(&mut self) -> Result<RegexAst, SpecError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                let alphabet = self.alphabet.as_ref().expect("alphabet parsed first");
                let sym = alphabet
                    .symbol(&name)
                    .map_err(|_| self.error_here(SpecErrorKind::UndeclaredSymbol(name.clone())))?;
                self.bump();
                Ok(RegexAst::Symbol(sym))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.alt()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.expected("a symbol or `(`")),
        }
    }
}

/// Parses a specification; the result is named `spec`.
pub fn parse(text: &str) -> Result<ConstraintSpec, SpecError> {
    parse_named("spec", text)
}

pub fn parse_named(name: &str, text: &str) -> Result<ConstraintSpec, SpecError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        alphabet: None,
    };
    p.spec(name)
}

impl RegexAst {
    /// Text form accepted back by the parser, parenthesized only where the
    /// tree structure requires it.
    pub fn pretty(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        self.write(alphabet, &mut out);
        out
    }

    fn write(&self, al: &Alphabet, out: &mut String) {
        let group = |e: &RegexAst, out: &mut String, needs: bool| {
            if needs {
                out.push('(');
                e.write(al, out);
                out.push(')');
            } else {
                e.write(al, out);
            }
        };
        match self {
            RegexAst::Symbol(s) => out.push_str(al.name(*s)),
            RegexAst::Concat(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    group(e, out, matches!(e, RegexAst::Concat(_) | RegexAst::Alt(_)));
                }
            }
            RegexAst::Alt(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    group(e, out, matches!(e, RegexAst::Alt(_)));
                }
            }
            RegexAst::Star(e) | RegexAst::Plus(e) | RegexAst::Optional(e) => {
                group(e, out, !matches!(**e, RegexAst::Symbol(_)));
                out.push(match self {
                    RegexAst::Star(_) => '*',
                    RegexAst::Plus(_) => '+',
                    _ => '?',
                });
            }
        }
    }

    /// Position (Glushkov) automaton: state 0 is initial, state `p > 0`
    /// is the `p`-th symbol occurrence; there are no ε-moves.
    pub fn to_machine(&self, alphabet: &Alphabet) -> Result<EilenbergMachine> {
        let mut b = Glushkov::default();
        let (nullable, first, last) = b.walk(self);
        let mut transitions = Vec::new();
        for &p in &first {
            transitions.push((0, b.labels[p - 1], p));
        }
        for &(p, q) in &b.follow {
            transitions.push((p, b.labels[q - 1], q));
        }
        let mut finals = last;
        if nullable {
            finals.push(0);
        }
        EilenbergMachine::new(
            alphabet.clone(),
            b.labels.len() + 1,
            transitions,
            [0],
            finals,
        )
    }
}

#[derive(Default)]
struct Glushkov {
    labels: Vec<Symbol>,
    follow: Vec<(usize, usize)>,
}

impl Glushkov {
    fn walk(&mut self, e: &RegexAst) -> (bool, Vec<usize>, Vec<usize>) {
        match e {
            RegexAst::Symbol(s) => {
                self.labels.push(*s);
                let p = self.labels.len();
                (false, vec![p], vec![p])
            }
            RegexAst::Concat(items) => {
                let mut acc = (true, Vec::new(), Vec::new());
                for item in items {
                    let (n2, f2, l2) = self.walk(item);
                    let (n1, mut f1, l1) = acc;
                    for &l in &l1 {
                        for &f in &f2 {
                            self.follow.push((l, f));
                        }
                    }
                    if n1 {
                        f1.extend(&f2);
                    }
                    let mut last = l2;
                    if n2 {
                        last.extend(&l1);
                    }
                    acc = (n1 && n2, f1, last);
                }
                acc
            }
            RegexAst::Alt(items) => {
                let mut acc = (false, Vec::new(), Vec::new());
                for item in items {
                    let (n, f, l) = self.walk(item);
                    acc.0 |= n;
                    acc.1.extend(f);
                    acc.2.extend(l);
                }
                acc
            }
            RegexAst::Star(inner) | RegexAst::Plus(inner) => {
                let (n, f, l) = self.walk(inner);
                for &p in &l {
                    for &q in &f {
                        self.follow.push((p, q));
                    }
                }
                (n || matches!(e, RegexAst::Star(_)), f, l)
            }
            RegexAst::Optional(inner) => {
                let (_, f, l) = self.walk(inner);
                (true, f, l)
            }
        }
    }
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alphabet {}; violation {};",
            self.alphabet,
            self.pattern.pretty(&self.alphabet)
        )
    }
}

/// `min(L)`: the words of `L` none of whose proper prefixes is in `L`.
pub fn prefix_free_kernel(pattern: &RegexAst, alphabet: &Alphabet) -> Result<RegularPrefixFreeSet> {
    prefix_free_kernel_of_machine(&pattern.to_machine(alphabet)?)
}

/// Whether taking minimal words removes anything from `L(pattern)`.
pub fn kernel_changes_language(spec: &ConstraintSpec) -> Result<bool> {
    Ok(!spec.pattern.to_machine(&spec.alphabet)?.is_prefix_free())
}

/// The minimal detector whose violation language is the kernel of the
/// pattern, with initial state `0`.
pub fn compile(spec: &ConstraintSpec) -> Result<(FiniteDetector, usize)> {
    let kernel = prefix_free_kernel(&spec.pattern, &spec.alphabet)?;
    let (d, x) = machine_to_detector(&machine_from_regular(&kernel))?;
    d.canonical(x)
}

impl From<SpecError> for Error {
    fn from(e: SpecError) -> Self {
        Error::Format {
            what: "spec",
            line: e.line,
            message: e.to_string(),
        }
    }
}
