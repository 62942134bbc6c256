//! Text table format for finite detectors:
//!
//! ```text
//! states: s0 s1
//! alphabet: a b
//! s0: a->s0 b->FAULT
//! s1: a->s1 b->s1
//! ```
//!
//! Blank lines and `#` comments are ignored when reading.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::sequences::Alphabet;
use crate::systems::Step;

use super::FiniteDetector;

const FAULT: &str = "FAULT";

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        what: "detector",
        line,
        message: message.into(),
    }
}

/// Lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Splits `key: rest` (the colon is optional) and checks the key.
pub(crate) fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(key)?;
    let rest = rest.strip_prefix(':').unwrap_or(rest);
    (rest.is_empty() || rest.starts_with(char::is_whitespace)).then(|| rest.trim())
}

impl FiniteDetector {
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<FiniteDetector> {
        let mut lines = content_lines(text);
        let (ln, first) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let names: Vec<String> = header(first, "states")
            .ok_or_else(|| err(ln, "expected `states:` header"))?
            .split_whitespace()
            .map(String::from)
            .collect();
        if names.is_empty() {
            return Err(err(ln, "a detector needs at least one state"));
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n == FAULT || index.insert(n.as_str(), i).is_some() {
                return Err(err(ln, format!("bad or duplicate state name `{n}`")));
            }
        }
        let (ln, second) = lines
            .next()
            .ok_or_else(|| err(ln + 1, "missing `alphabet:` header"))?;
        let alphabet = Alphabet::new(
            header(second, "alphabet")
                .ok_or_else(|| err(ln, "expected `alphabet:` header"))?
                .split_whitespace(),
        )
        .map_err(|e| err(ln, e.to_string()))?;

        let mut rows: Vec<Option<Vec<Step<usize>>>> = vec![None; names.len()];
        for (ln, line) in lines {
            let (state, entries) = line
                .split_once(':')
                .ok_or_else(|| err(ln, "expected `state: sym->target ...`"))?;
            let state = state.trim();
            let &x = index
                .get(state)
                .ok_or_else(|| err(ln, format!("unknown state `{state}`")))?;
            if rows[x].is_some() {
                return Err(err(ln, format!("state `{state}` listed twice")));
            }
            let mut row = vec![None; alphabet.len()];
            for entry in entries.split_whitespace() {
                let (sym, target) = entry
                    .split_once("->")
                    .ok_or_else(|| err(ln, format!("bad entry `{entry}`")))?;
                let n = alphabet.symbol(sym).map_err(|e| err(ln, e.to_string()))?;
                let step = if target == FAULT {
                    Step::Fault
                } else {
                    Step::Next(
                        *index
                            .get(target)
                            .ok_or_else(|| err(ln, format!("unknown target `{target}`")))?,
                    )
                };
                if row[n.index()].replace(step).is_some() {
                    return Err(err(ln, format!("symbol `{sym}` given twice")));
                }
            }
            let row: Option<Vec<_>> = row.into_iter().collect();
            rows[x] =
                Some(row.ok_or_else(|| err(ln, format!("state `{state}` is missing a symbol")))?);
        }
        let table = rows
            .into_iter()
            .zip(&names)
            .map(|(r, n)| r.ok_or_else(|| err(0, format!("no transitions for state `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        FiniteDetector::with_names(alphabet, names, table)
    }
}

impl fmt::Display for FiniteDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.names.join(" "))?;
        writeln!(f, "alphabet: {}", self.alphabet)?;
        for (name, row) in self.names.iter().zip(&self.table) {
            write!(f, "{name}:")?;
            for (n, step) in self.alphabet.symbols().zip(row) {
                let target = match step {
                    Step::Fault => FAULT,
                    Step::Next(y) => &self.names[*y],
                };
                write!(f, " {}->{}", self.alphabet.name(n), target)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
