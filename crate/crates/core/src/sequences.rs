//! Alphabets, finite words, eventually periodic streams and finite word sets.
//!
//! Symbols are indices into an [`Alphabet`]; words and lassos are plain
//! index sequences and only meet their alphabet when parsed, printed or fed
//! to a detector. Words order by length first and then lexicographically by
//! declaration order, so every set iterates in the same canonical order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A notification token, stored as its position in the declaring alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn new(index: usize) -> Self {
        Symbol(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite, ordered set of at least two distinct notification names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        if names.len() < 2 {
            return Err(Error::AlphabetTooSmall(names.len()));
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Alphabets are never empty; provided for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(Symbol::new)
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Symbol::new)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol.index()]
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        symbol.index() < self.names.len()
    }

    pub fn check_symbol(&self, symbol: Symbol) -> Result<()> {
        if self.contains(symbol) {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                index: symbol.index(),
                size: self.len(),
            })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        word.iter().try_for_each(|&s| self.check_symbol(s))
    }

    pub fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.names.join(" "),
                right: other.names.join(" "),
            })
        }
    }

    /// Parses whitespace-separated tokens into a word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace().map(|t| self.symbol(t)).collect()
    }

    /// Parses a lasso literal `u ; v`, where `u` may be empty.
    pub fn parse_lasso(&self, text: &str) -> Result<LassoStream> {
        let (prefix, period) = text.split_once(';').ok_or_else(|| Error::Format {
            what: "lasso",
            line: 1,
            message: "expected `prefix ; period`".into(),
        })?;
        LassoStream::new(self.parse_word(prefix)?, self.parse_word(period)?)
    }

    pub fn format_word(&self, word: &Word) -> String {
        word.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_lasso(&self, lasso: &LassoStream) -> String {
        let prefix = self.format_word(lasso.prefix());
        if prefix.is_empty() {
            format!("; {}", self.format_word(lasso.period()))
        } else {
            format!("{} ; {}", prefix, self.format_word(lasso.period()))
        }
    }

    pub fn format_set(&self, set: &FiniteWordSet) -> String {
        let words: Vec<String> = set
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "ε".to_string()
                } else {
                    format!("\"{}\"", self.format_word(w))
                }
            })
            .collect();
        format!("{{{}}}", words.join(", "))
    }

    /// All words of length at most `depth`, shortest first.
    pub fn words_up_to(&self, depth: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(layer.len() * self.len());
            for w in &layer {
                for s in self.symbols() {
                    next.push(w.appended(s));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names.join(" "))
    }
}

/// A finite sequence of symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(symbol: Symbol) -> Self {
        Word(vec![symbol])
    }

    /// Builds a word from raw indices; handy in tests.
    pub fn from_indices(indices: &[usize]) -> Self {
        indices.iter().map(|&i| Symbol::new(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn appended(&self, symbol: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(symbol);
        Word(v)
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.0.push(symbol);
    }

    /// The prefix of length `k` (the whole word if `k` is larger).
    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && other.0.starts_with(&self.0)
    }

    /// All nonempty proper prefixes, shortest first.
    pub fn proper_prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (1..self.len()).map(move |k| self.prefix(k))
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An eventually periodic stream `prefix · period^ω`.
///
/// Values are kept normalized: the period is primitive and the prefix is as
/// short as possible, so two lassos are equal iff they denote the same stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoStream {
    prefix: Word,
    period: Word,
}

impl LassoStream {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut prefix = prefix.into_inner();
        let mut period = primitive_root(period.into_inner());
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(LassoStream {
            prefix: Word(prefix),
            period: Word(period),
        })
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// Number of distinct suffixes; `|prefix| + |period|` for normalized lassos.
    pub fn suffix_count(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Index of the suffix starting at `k` among `0..suffix_count()`.
    pub fn position(&self, k: usize) -> usize {
        let p = self.prefix.len();
        if k < p {
            k
        } else {
            p + (k - p) % self.period.len()
        }
    }

    pub fn symbol_at(&self, k: usize) -> Symbol {
        let p = self.prefix.len();
        if k < p {
            self.prefix.0[k]
        } else {
            self.period.0[(k - p) % self.period.len()]
        }
    }
}

fn primitive_root(period: Vec<Symbol>) -> Vec<Symbol> {
    let n = period.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| period[i] == period[i - p]) {
            return period[..p].to_vec();
        }
    }
    period
}

/// Positional access shared by words and lassos.
pub trait Sequence: Sized {
    /// `s(k)`, or `None` where undefined.
    fn at(&self, k: usize) -> Option<Symbol>;

    /// The suffix starting at index `m`.
    fn slice_from(&self, m: usize) -> Self;

    /// `u · self`.
    fn prepend(&self, u: &Word) -> Self;

    /// Symbols at indices `m..l`, cut at the first undefined index.
    fn slice_range(&self, m: usize, l: usize) -> Word {
        (m..l).map_while(|k| self.at(k)).collect()
    }
}

impl Sequence for Word {
    fn at(&self, k: usize) -> Option<Symbol> {
        self.0.get(k).copied()
    }

    fn slice_from(&self, m: usize) -> Word {
        Word(self.0.get(m..).map(<[Symbol]>::to_vec).unwrap_or_default())
    }

    fn prepend(&self, u: &Word) -> Word {
        let mut v = u.0.clone();
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

impl Sequence for LassoStream {
    fn at(&self, k: usize) -> Option<Symbol> {
        Some(self.symbol_at(k))
    }

    fn slice_from(&self, m: usize) -> LassoStream {
        let p = self.prefix.len();
        if m < p {
            LassoStream {
                prefix: self.prefix.slice_from(m),
                period: self.period.clone(),
            }
        } else {
            let mut period = self.period.0.clone();
            let len = period.len();
            period.rotate_left((m - p) % len);
            LassoStream {
                prefix: Word::empty(),
                period: Word(period),
            }
        }
    }

    fn prepend(&self, u: &Word) -> LassoStream {
        LassoStream::new(self.prefix.prepend(u), self.period.clone())
            .expect("period stays nonempty")
    }
}

/// `u · t`, for `t` a word or a lasso.
pub fn concat<S: Sequence>(u: &Word, t: &S) -> S {
    t.prepend(u)
}

/// A finite set of words, iterated shortest first.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FiniteWordSet(BTreeSet<Word>);

impl FiniteWordSet {
    pub fn new() -> Self {
        FiniteWordSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.0.contains(word)
    }

    pub fn contains_epsilon(&self) -> bool {
        self.0.contains(&Word::empty())
    }

    pub fn contains_letter(&self, symbol: Symbol) -> bool {
        self.0.contains(&Word::single(symbol))
    }

    pub fn insert(&mut self, word: Word) -> bool {
        self.0.insert(word)
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, Word> {
        self.0.iter()
    }

    pub fn max_len(&self) -> usize {
        self.0.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Words of length at most `depth`.
    pub fn truncated(&self, depth: usize) -> FiniteWordSet {
        self.0
            .iter()
            .filter(|w| w.len() <= depth)
            .cloned()
            .collect()
    }

    /// `n⁻¹·A = { u | n·u ∈ A }`.
    pub fn derivative(&self, n: Symbol) -> FiniteWordSet {
        self.0
            .iter()
            .filter(|w| w.first() == Some(n))
            .map(|w| w.slice_from(1))
            .collect()
    }

    /// No member is a proper prefix of another member.
    pub fn is_prefix_free(&self) -> bool {
        self.prefix_witness().is_none()
    }

    /// A pair `(u, uv)` of members with `v` nonempty, if one exists.
    pub fn prefix_witness(&self) -> Option<(Word, Word)> {
        for w in &self.0 {
            for k in 0..w.len() {
                let p = w.prefix(k);
                if self.0.contains(&p) {
                    return Some((p, w.clone()));
                }
            }
        }
        None
    }

    /// Rejects sets that cannot be states of the final detector.
    pub fn ensure_detector_language(&self) -> Result<()> {
        if self.contains_epsilon() {
            return Err(Error::EpsilonViolation);
        }
        match self.prefix_witness() {
            Some((prefix, word)) => Err(Error::NotPrefixFree { prefix, word }),
            None => Ok(()),
        }
    }

    /// Splits a prefix-free, ε-free set into its one-letter members and the
    /// derivatives by every other letter.
    pub fn decompose(&self, alphabet: &Alphabet) -> Result<Decomposition> {
        self.ensure_detector_language()?;
        for w in &self.0 {
            alphabet.check_word(w)?;
        }
        let mut immediate = BTreeSet::new();
        let mut residuals = BTreeMap::new();
        for n in alphabet.symbols() {
            if self.contains_letter(n) {
                immediate.insert(n);
            } else {
                residuals.insert(n, self.derivative(n));
            }
        }
        Ok(Decomposition {
            immediate,
            residuals,
        })
    }
}

impl FromIterator<Word> for FiniteWordSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        FiniteWordSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FiniteWordSet {
    type Item = &'a Word;
    type IntoIter = std::collections::btree_set::Iter<'a, Word>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `P = N_P ∪ ⋃_{n ∉ N_P} n·P_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub immediate: BTreeSet<Symbol>,
    pub residuals: BTreeMap<Symbol, FiniteWordSet>,
}

impl Decomposition {
    pub fn reassemble(&self) -> FiniteWordSet {
        let mut out: FiniteWordSet = self.immediate.iter().map(|&n| Word::single(n)).collect();
        for (&n, rest) in &self.residuals {
            for u in rest {
                out.insert(u.prepend(&Word::single(n)));
            }
        }
        out
    }
}
