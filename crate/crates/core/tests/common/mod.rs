//! Brute-force oracles and random generators shared by the integration
//! tests. The oracles work on raw tables and plain vectors so that they do
//! not share code paths with the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use coalmon::speclang::RegexAst;
use coalmon::{Alphabet, FiniteDetector, FiniteWordSet, LassoStream, Step, Symbol, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Table = Vec<Vec<Option<usize>>>;

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn word(ix: &[usize]) -> Word {
    Word::from_indices(ix)
}

pub fn w(text: &str) -> Word {
    ab().parse_word(text).unwrap()
}

pub fn set(words: &[&str]) -> FiniteWordSet {
    words.iter().map(|t| w(t)).collect()
}

/// `None` is a fault.
pub fn raw_table(d: &FiniteDetector) -> Table {
    d.table()
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| match s {
                    Step::Fault => None,
                    Step::Next(y) => Some(*y),
                })
                .collect()
        })
        .collect()
}

pub fn detector_from_raw(table: &Table) -> FiniteDetector {
    let steps = table
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.map_or(Step::Fault, Step::Next))
                .collect()
        })
        .collect();
    FiniteDetector::new(ab(), steps).unwrap()
}

/// Runs the table on a word; `None` once a fault happened.
pub fn oracle_run(table: &Table, x: usize, u: &[usize]) -> Option<usize> {
    let mut s = x;
    for &n in u {
        s = table[s][n]?;
    }
    Some(s)
}

/// Index of the step at which the run faults, if any.
pub fn oracle_fault_at(table: &Table, x: usize, u: &[usize]) -> Option<usize> {
    let mut s = x;
    for (i, &n) in u.iter().enumerate() {
        match table[s][n] {
            None => return Some(i),
            Some(t) => s = t,
        }
    }
    None
}

/// Every word over `{0..k}` of length at most `d`.
pub fn all_words(k: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for u in &layer {
            for n in 0..k {
                let mut v: Vec<usize> = u.clone();
                v.push(n);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Words of length ≤ d that fault exactly at their last symbol.
pub fn oracle_violations(table: &Table, x: usize, d: usize) -> BTreeSet<Vec<usize>> {
    all_words(2, d)
        .into_iter()
        .filter(|u| !u.is_empty() && oracle_fault_at(table, x, u) == Some(u.len() - 1))
        .collect()
}

pub fn as_raw_set(s: &FiniteWordSet) -> BTreeSet<Vec<usize>> {
    s.iter()
        .map(|w| w.iter().map(|n| n.index()).collect())
        .collect()
}

pub fn from_raw_set(s: &BTreeSet<Vec<usize>>) -> FiniteWordSet {
    s.iter().map(|u| word(u)).collect()
}

/// `{u | n·u ∈ A}` by testing every candidate `u`.
pub fn oracle_derivative(a: &BTreeSet<Vec<usize>>, n: usize) -> BTreeSet<Vec<usize>> {
    let max = a.iter().map(Vec::len).max().unwrap_or(0);
    all_words(2, max)
        .into_iter()
        .filter(|u| {
            let mut v = vec![n];
            v.extend(u);
            a.contains(&v)
        })
        .collect()
}

pub fn oracle_prefix_free(a: &BTreeSet<Vec<usize>>) -> bool {
    a.iter()
        .all(|u| a.iter().all(|v| u == v || !v.starts_with(u)))
}

/// Words of `l` none of whose proper prefixes are in `l`.
pub fn oracle_kernel(l: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    l.iter()
        .filter(|u| (0..u.len()).all(|k| !l.contains(&u[..k].to_vec())))
        .cloned()
        .collect()
}

/// The first `len` symbols of a lasso, by plain unrolling.
pub fn unroll(prefix: &[usize], period: &[usize], len: usize) -> Vec<usize> {
    let mut out: Vec<usize> = prefix.iter().copied().take(len).collect();
    while out.len() < len {
        out.push(period[(out.len() - prefix.len()) % period.len()]);
    }
    out
}

/// Length of the shortest faulting prefix of the lasso. The run is periodic
/// after `prefix + states * period` symbols, so that many symbols suffice.
pub fn oracle_monitor(
    table: &Table,
    x: usize,
    prefix: &[usize],
    period: &[usize],
) -> Option<usize> {
    let bound = prefix.len() + table.len() * period.len() + 1;
    oracle_fault_at(table, x, &unroll(prefix, period, bound)).map(|i| i + 1)
}

pub fn lasso(prefix: &[usize], period: &[usize]) -> LassoStream {
    LassoStream::new(word(prefix), word(period)).unwrap()
}

pub fn random_table(r: &mut StdRng, states: usize, fault_prob: f64) -> Table {
    (0..states)
        .map(|_| {
            (0..2)
                .map(|_| {
                    if r.gen_bool(fault_prob) {
                        None
                    } else {
                        Some(r.gen_range(0..states))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn random_word(r: &mut StdRng, max: usize) -> Vec<usize> {
    let len = r.gen_range(0..=max);
    (0..len).map(|_| r.gen_range(0..2)).collect()
}

pub fn random_lasso_parts(
    r: &mut StdRng,
    max_prefix: usize,
    max_period: usize,
) -> (Vec<usize>, Vec<usize>) {
    let prefix = random_word(r, max_prefix);
    let plen = r.gen_range(1..=max_period);
    let period = (0..plen).map(|_| r.gen_range(0..2)).collect();
    (prefix, period)
}

/// All lassos with `|prefix| + |period| ≤ total` over two symbols.
pub fn all_lassos(total: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for u in all_words(2, total - 1) {
        for v in all_words(2, total - u.len()) {
            if !v.is_empty() {
                out.push((u.clone(), v));
            }
        }
    }
    out
}

/// All detectors with exactly `states` states over two symbols.
pub fn all_tables(states: usize) -> Vec<Table> {
    let cell: Vec<Option<usize>> = std::iter::once(None).chain((0..states).map(Some)).collect();
    let cells = states * 2;
    let mut out = Vec::new();
    let total = cell.len().pow(cells as u32);
    for mut code in 0..total {
        let mut flat = Vec::with_capacity(cells);
        for _ in 0..cells {
            flat.push(cell[code % cell.len()]);
            code /= cell.len();
        }
        out.push(flat.chunks(2).map(|c| c.to_vec()).collect());
    }
    out
}

/// A random prefix-free set: random words of length ≤ max, each kept only
/// if it is comparable with nothing chosen so far.
pub fn random_prefix_free(r: &mut StdRng, max_len: usize, tries: usize) -> BTreeSet<Vec<usize>> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for _ in 0..tries {
        let len = r.gen_range(1..=max_len);
        let u: Vec<usize> = (0..len).map(|_| r.gen_range(0..2)).collect();
        if out.iter().all(|v| !u.starts_with(v) && !v.starts_with(&u)) {
            out.insert(u);
        }
    }
    out
}

/// Random NFA as `(states, transitions, initial, finals)`.
pub struct RawMachine {
    pub states: usize,
    pub transitions: Vec<(usize, usize, usize)>,
    pub initial: Vec<usize>,
    pub finals: Vec<usize>,
}

pub fn random_machine(r: &mut StdRng, max_states: usize) -> RawMachine {
    let states = r.gen_range(1..=max_states);
    let mut transitions = Vec::new();
    for p in 0..states {
        for n in 0..2 {
            for q in 0..states {
                if r.gen_bool(0.3) {
                    transitions.push((p, n, q));
                }
            }
        }
    }
    let initial = (0..states).filter(|_| r.gen_bool(0.4)).collect::<Vec<_>>();
    let initial = if initial.is_empty() { vec![0] } else { initial };
    let finals = (0..states).filter(|_| r.gen_bool(0.35)).collect();
    RawMachine {
        states,
        transitions,
        initial,
        finals,
    }
}

impl RawMachine {
    pub fn build(&self) -> coalmon::families::EilenbergMachine {
        coalmon::families::EilenbergMachine::new(
            ab(),
            self.states,
            self.transitions
                .iter()
                .map(|&(p, n, q)| (p, Symbol::new(n), q)),
            self.initial.iter().copied(),
            self.finals.iter().copied(),
        )
        .unwrap()
    }

    /// Path search: is there a run from an initial state labelled `u` ending
    /// in a final state?
    pub fn accepts(&self, u: &[usize]) -> bool {
        fn go(m: &RawMachine, q: usize, u: &[usize]) -> bool {
            match u.split_first() {
                None => m.finals.contains(&q),
                Some((&n, rest)) => m
                    .transitions
                    .iter()
                    .any(|&(p, s, t)| p == q && s == n && go(m, t, rest)),
            }
        }
        self.initial.iter().any(|&q| go(self, q, u))
    }

    pub fn language(&self, d: usize) -> BTreeSet<Vec<usize>> {
        all_words(2, d)
            .into_iter()
            .filter(|u| self.accepts(u))
            .collect()
    }
}

/// Naive regex matching by splitting the word every possible way.
pub fn regex_matches(e: &RegexAst, u: &[usize]) -> bool {
    match e {
        RegexAst::Symbol(s) => u.len() == 1 && u[0] == s.index(),
        RegexAst::Alt(items) => items.iter().any(|i| regex_matches(i, u)),
        RegexAst::Concat(items) => concat_matches(items, u),
        RegexAst::Optional(inner) => u.is_empty() || regex_matches(inner, u),
        RegexAst::Star(inner) => star_matches(inner, u),
        RegexAst::Plus(inner) => {
            (0..=u.len()).any(|k| regex_matches(inner, &u[..k]) && star_matches(inner, &u[k..]))
        }
    }
}

fn concat_matches(items: &[RegexAst], u: &[usize]) -> bool {
    match items.split_first() {
        None => u.is_empty(),
        Some((first, rest)) => {
            (0..=u.len()).any(|k| regex_matches(first, &u[..k]) && concat_matches(rest, &u[k..]))
        }
    }
}

fn star_matches(inner: &RegexAst, u: &[usize]) -> bool {
    // every iteration consumes at least one symbol
    u.is_empty()
        || (1..=u.len()).any(|k| regex_matches(inner, &u[..k]) && star_matches(inner, &u[k..]))
}

pub fn regex_language(e: &RegexAst, d: usize) -> BTreeSet<Vec<usize>> {
    all_words(2, d)
        .into_iter()
        .filter(|u| regex_matches(e, u))
        .collect()
}

pub fn random_regex(r: &mut StdRng, depth: usize) -> RegexAst {
    let sym = |r: &mut StdRng| RegexAst::Symbol(Symbol::new(r.gen_range(0..2)));
    if depth == 0 {
        return sym(r);
    }
    match r.gen_range(0..7) {
        0 | 1 => sym(r),
        2 => RegexAst::Concat(
            (0..r.gen_range(2..=3))
                .map(|_| random_regex(r, depth - 1))
                .collect(),
        ),
        3 => RegexAst::Alt(
            (0..r.gen_range(2..=3))
                .map(|_| random_regex(r, depth - 1))
                .collect(),
        ),
        4 => RegexAst::Star(Box::new(random_regex(r, depth - 1))),
        5 => RegexAst::Plus(Box::new(random_regex(r, depth - 1))),
        _ => RegexAst::Optional(Box::new(random_regex(r, depth - 1))),
    }
}

/// A finite set lifted to a regex: an alternation of symbol sequences.
pub fn regex_of_set(s: &BTreeSet<Vec<usize>>) -> RegexAst {
    let branch = |u: &Vec<usize>| {
        let syms: Vec<RegexAst> = u
            .iter()
            .map(|&n| RegexAst::Symbol(Symbol::new(n)))
            .collect();
        if syms.len() == 1 {
            syms.into_iter().next().unwrap()
        } else {
            RegexAst::Concat(syms)
        }
    };
    let branches: Vec<RegexAst> = s.iter().map(branch).collect();
    if branches.len() == 1 {
        branches.into_iter().next().unwrap()
    } else {
        RegexAst::Alt(branches)
    }
}
