use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::detector::{FiniteDetector, RegularPrefixFreeSet};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol, Word};
use crate::systems::Step;

type Subset = BTreeSet<usize>;

/// A finite nondeterministic machine `⟨Q, T, I, F⟩` with possibly several
/// initial states and no ε-moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EilenbergMachine {
    alphabet: Alphabet,
    names: Vec<String>,
    transitions: BTreeSet<(usize, Symbol, usize)>,
    initial: Subset,
    finals: Subset,
    // delta[q][n] = successors
    delta: Vec<Vec<Vec<usize>>>,
}

impl EilenbergMachine {
    /// States are `0..states`, named `q0, q1, ...`.
    pub fn new(
        alphabet: Alphabet,
        states: usize,
        transitions: impl IntoIterator<Item = (usize, Symbol, usize)>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let names = (0..states).map(|i| format!("q{i}")).collect();
        Self::with_names(alphabet, names, transitions, initial, finals)
    }

    pub fn with_names(
        alphabet: Alphabet,
        names: Vec<String>,
        transitions: impl IntoIterator<Item = (usize, Symbol, usize)>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let n = names.len();
        let transitions: BTreeSet<_> = transitions.into_iter().collect();
        let initial: Subset = initial.into_iter().collect();
        let finals: Subset = finals.into_iter().collect();
        for &(p, sym, q) in &transitions {
            alphabet.check_symbol(sym)?;
            if p >= n {
                return Err(Error::UnknownState(p));
            }
            if q >= n {
                return Err(Error::DanglingTransition {
                    state: p,
                    target: q,
                });
            }
        }
        if let Some(&q) = initial.iter().chain(&finals).find(|&&q| q >= n) {
            return Err(Error::UnknownState(q));
        }
        let mut delta = vec![vec![Vec::new(); alphabet.len()]; n];
        for &(p, sym, q) in &transitions {
            delta[p][sym.index()].push(q);
        }
        Ok(EilenbergMachine {
            alphabet,
            names,
            transitions,
            initial,
            finals,
            delta,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, usize)> + '_ {
        self.transitions.iter().copied()
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    fn successors(&self, from: &Subset, n: Symbol) -> Subset {
        from.iter()
            .flat_map(|&q| self.delta[q][n.index()].iter().copied())
            .collect()
    }

    /// States from which some final state is reachable.
    fn coreachable(&self) -> Subset {
        let mut live = self.finals.clone();
        loop {
            let before = live.len();
            for &(p, _, q) in &self.transitions {
                if live.contains(&q) {
                    live.insert(p);
                }
            }
            if live.len() == before {
                return live;
            }
        }
    }

    fn is_accepting(&self, s: &Subset) -> bool {
        !s.is_disjoint(&self.finals)
    }

    pub fn accepts(&self, word: &Word) -> bool {
        let mut cur = self.initial.clone();
        for &n in word {
            if !self.alphabet.contains(n) {
                return false;
            }
            cur = self.successors(&cur, n);
        }
        self.is_accepting(&cur)
    }

    pub fn accepts_epsilon(&self) -> bool {
        self.is_accepting(&self.initial)
    }

    /// All accepted words of length at most `depth`.
    pub fn language_up_to(&self, depth: usize) -> FiniteWordSet {
        let mut out = FiniteWordSet::new();
        let mut frontier = vec![(Word::empty(), self.initial.clone())];
        for level in 0..=depth {
            let mut next = Vec::new();
            for (w, s) in frontier {
                if s.is_empty() {
                    continue;
                }
                if self.is_accepting(&s) {
                    out.insert(w.clone());
                }
                if level < depth {
                    for n in self.alphabet.symbols() {
                        next.push((w.appended(n), self.successors(&s, n)));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Reachable subsets in breadth-first order (index 0 is `I`), their
    /// transition table, and a shortest word reaching each.
    fn determinize(&self) -> (Vec<Subset>, Vec<Vec<usize>>, Vec<Word>) {
        let mut ids: HashMap<Subset, usize> = HashMap::new();
        let mut subsets = vec![self.initial.clone()];
        let mut access = vec![Word::empty()];
        ids.insert(self.initial.clone(), 0);
        let mut table = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            let mut row = Vec::with_capacity(self.alphabet.len());
            for n in self.alphabet.symbols() {
                let next = self.successors(&cur, n);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        ids.insert(next.clone(), subsets.len());
                        subsets.push(next);
                        access.push(access[i].appended(n));
                        subsets.len() - 1
                    }
                };
                row.push(id);
            }
            table.push(row);
            i += 1;
        }
        (subsets, table, access)
    }

    /// A pair `(u, uv)` of accepted words with `v` nonempty, if the language
    /// is not prefix-free. The check is exact; `u` is as short as possible.
    pub fn prefix_witness(&self) -> Option<(Word, Word)> {
        let (subsets, table, access) = self.determinize();
        for (s, u) in subsets.iter().zip(&access) {
            if !self.is_accepting(s) {
                continue;
            }
            let start = ids_of(&subsets, s);
            // shortest nonempty path from `start` to an accepting subset
            let mut seen = vec![false; subsets.len()];
            let mut queue = VecDeque::new();
            for n in self.alphabet.symbols() {
                let t = table[start][n.index()];
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back((t, Word::single(n)));
                }
            }
            while let Some((t, v)) = queue.pop_front() {
                if self.is_accepting(&subsets[t]) {
                    let mut uv = u.clone();
                    for &m in &v {
                        uv.push(m);
                    }
                    return Some((u.clone(), uv));
                }
                for n in self.alphabet.symbols() {
                    let t2 = table[t][n.index()];
                    if !seen[t2] {
                        seen[t2] = true;
                        queue.push_back((t2, v.appended(n)));
                    }
                }
            }
        }
        None
    }

    pub fn is_prefix_free(&self) -> bool {
        self.prefix_witness().is_none()
    }

    /// Subset construction that faults on entering an accepting subset.
    /// The detector's violation language is the set of minimal words of
    /// `L(M)`. Subsets are trimmed to states that can still reach a final
    /// state, so every dead subset becomes the empty one, the safe sink.
    fn kernel_detector(&self) -> FiniteDetector {
        debug_assert!(!self.accepts_epsilon());
        let live = self.coreachable();
        let trim = |s: Subset| -> Subset { s.intersection(&live).copied().collect() };
        let start = trim(self.initial.clone());
        let mut ids: HashMap<Subset, usize> = HashMap::new();
        let mut subsets = vec![start.clone()];
        ids.insert(start, 0);
        let mut table = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            let row = self
                .alphabet
                .symbols()
                .map(|n| {
                    let next = trim(self.successors(&cur, n));
                    if self.is_accepting(&next) {
                        Step::Fault
                    } else {
                        let id = *ids.entry(next.clone()).or_insert_with(|| {
                            subsets.push(next);
                            subsets.len() - 1
                        });
                        Step::Next(id)
                    }
                })
                .collect();
            table.push(row);
            i += 1;
        }
        let names = subsets
            .iter()
            .map(|s| {
                let inner: Vec<&str> = s.iter().map(|&q| self.names[q].as_str()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        FiniteDetector::with_names(self.alphabet.clone(), names, table).expect("well-formed")
    }
}

fn ids_of(subsets: &[Subset], s: &Subset) -> usize {
    subsets.iter().position(|t| t == s).expect("subset present")
}

/// Determinizes a machine whose language is prefix-free and ε-free into a
/// detector with `⟨d⟩(init) = L(M)`.
pub fn machine_to_detector(m: &EilenbergMachine) -> Result<(FiniteDetector, usize)> {
    if m.accepts_epsilon() {
        return Err(Error::EpsilonViolation);
    }
    if let Some((prefix, word)) = m.prefix_witness() {
        return Err(Error::NotPrefixFree { prefix, word });
    }
    Ok((m.kernel_detector(), 0))
}

/// The minimal bad prefixes of `L(M)`: `{u ∈ L | no proper prefix of u is in L}`.
pub fn prefix_free_kernel_of_machine(m: &EilenbergMachine) -> Result<RegularPrefixFreeSet> {
    if m.accepts_epsilon() {
        return Err(Error::EpsilonViolation);
    }
    RegularPrefixFreeSet::new(Arc::new(m.kernel_detector()), 0).map(|r| r.canonical())
}

/// A machine for `n⁻¹·L(M)`: a fresh initial state `q*` copies every move
/// available from the `n`-successors of the old initial states.
pub fn machine_derivative(m: &EilenbergMachine, n: Symbol) -> Result<EilenbergMachine> {
    m.alphabet.check_symbol(n)?;
    let after_n = m.successors(&m.initial, n);
    let star = m.len();
    let mut names = m.names.clone();
    let mut star_name = "q*".to_string();
    while names.contains(&star_name) {
        star_name.push('\'');
    }
    names.push(star_name);
    let mut transitions: Vec<_> = m.transitions().collect();
    for &(p, sym, q) in &m.transitions {
        if after_n.contains(&p) {
            transitions.push((star, sym, q));
        }
    }
    let mut finals = m.finals.clone();
    if m.is_accepting(&after_n) {
        finals.insert(star);
    }
    EilenbergMachine::with_names(m.alphabet.clone(), names, transitions, [star], finals)
}

/// Reads a regular prefix-free set back as a machine with one final state.
pub fn machine_from_regular(r: &RegularPrefixFreeSet) -> EilenbergMachine {
    let d = r.automaton();
    let accept = d.len();
    let mut names = d.names().to_vec();
    names.push("ACCEPT".into());
    let mut transitions = Vec::new();
    for (p, row) in d.table().iter().enumerate() {
        for (n, step) in r.alphabet().symbols().zip(row) {
            let q = match step {
                Step::Fault => accept,
                Step::Next(y) => *y,
            };
            transitions.push((p, n, q));
        }
    }
    EilenbergMachine::with_names(
        r.alphabet().clone(),
        names,
        transitions,
        [r.state()],
        [accept],
    )
    .expect("well-formed")
}

fn fmt_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        what: "machine",
        line,
        message: message.into(),
    }
}

impl EilenbergMachine {
    /// Parses the text format:
    ///
    /// ```text
    /// states: q0 q1
    /// alphabet: a b
    /// initial: q0
    /// final: q1
    /// q0 -a-> q0
    /// q0 -b-> q1
    /// ```
    pub fn from_text(text: &str) -> Result<EilenbergMachine> {
        use crate::detector::text::{content_lines, header};

        let mut states: Option<Vec<String>> = None;
        let mut alphabet: Option<Alphabet> = None;
        let mut initial_names: Option<Vec<String>> = None;
        let mut final_names: Option<Vec<String>> = None;
        let mut raw = Vec::new();
        for (ln, line) in content_lines(text) {
            let words = |rest: &str| {
                rest.split_whitespace()
                    .map(String::from)
                    .collect::<Vec<_>>()
            };
            if let Some(rest) = header(line, "states") {
                states = Some(words(rest));
            } else if let Some(rest) = header(line, "alphabet") {
                alphabet = Some(
                    Alphabet::new(rest.split_whitespace())
                        .map_err(|e| fmt_err(ln, e.to_string()))?,
                );
            } else if let Some(rest) = header(line, "initial") {
                initial_names = Some(words(rest));
            } else if let Some(rest) = header(line, "final") {
                final_names = Some(words(rest));
            } else {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let label = parts
                    .get(1)
                    .and_then(|l| l.strip_prefix('-'))
                    .and_then(|l| l.strip_suffix("->"));
                match (parts.len(), label) {
                    (3, Some(label)) if !label.is_empty() => raw.push((
                        ln,
                        parts[0].to_string(),
                        label.to_string(),
                        parts[2].to_string(),
                    )),
                    _ => return Err(fmt_err(ln, format!("expected `q -sym-> q'`, got `{line}`"))),
                }
            }
        }
        let names = states.ok_or_else(|| fmt_err(0, "missing `states` line"))?;
        let alphabet = alphabet.ok_or_else(|| fmt_err(0, "missing `alphabet` line"))?;
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(fmt_err(0, format!("duplicate state `{n}`")));
            }
        }
        let lookup = |ln: usize, n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| fmt_err(ln, format!("unknown state `{n}`")))
        };
        let initial = initial_names
            .ok_or_else(|| fmt_err(0, "missing `initial` line"))?
            .iter()
            .map(|n| lookup(0, n))
            .collect::<Result<Vec<_>>>()?;
        let finals = final_names
            .ok_or_else(|| fmt_err(0, "missing `final` line"))?
            .iter()
            .map(|n| lookup(0, n))
            .collect::<Result<Vec<_>>>()?;
        let transitions = raw
            .iter()
            .map(|(ln, p, sym, q)| {
                let sym = alphabet
                    .symbol(sym)
                    .map_err(|e| fmt_err(*ln, e.to_string()))?;
                Ok((lookup(*ln, p)?, sym, lookup(*ln, q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        EilenbergMachine::with_names(alphabet, names, transitions, initial, finals)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EilenbergMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |set: &Subset| {
            set.iter()
                .map(|&q| self.names[q].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "states: {}", self.names.join(" "))?;
        writeln!(f, "alphabet: {}", self.alphabet)?;
        writeln!(f, "initial: {}", list(&self.initial))?;
        writeln!(f, "final: {}", list(&self.finals))?;
        for &(p, n, q) in &self.transitions {
            writeln!(
                f,
                "{} -{}-> {}",
                self.names[p],
                self.alphabet.name(n),
                self.names[q]
            )?;
        }
        Ok(())
    }
}
