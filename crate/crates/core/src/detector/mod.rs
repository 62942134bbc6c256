//! Detectors: systems that read one notification at a time and either fault
//! or move on.
//!
//! A [`FiniteDetector`] stores a complete step table over an explicit state
//! set. Every state `x` determines the prefix-free set `⟨a⟩(x)` of minimal
//! words that drive it into a fault; [`RegularPrefixFreeSet`] is that set in
//! automaton form, and [`PrefixFreeSet`] is the carrier of the final
//! detector whose step is "fault on membership, otherwise derive".

mod final_detector;
mod handle;
mod regular;
pub(crate) mod text;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bisim;
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol, Word};
use crate::systems::Step;

pub use final_detector::{final_step, PrefixFreeSet, SetKey};
pub use handle::{minimal_violation_words, DetectorHandle, FiniteHandle, Reaction};
pub use regular::{anamorphism_regular, RegularPrefixFreeSet};

/// An explicit-state detector with a total step table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteDetector {
    alphabet: Alphabet,
    names: Vec<String>,
    table: Vec<Vec<Step<usize>>>,
}

impl FiniteDetector {
    /// Builds a detector with states named `s0, s1, ...`.
    pub fn new(alphabet: Alphabet, table: Vec<Vec<Step<usize>>>) -> Result<Self> {
        let names = (0..table.len()).map(|i| format!("s{i}")).collect();
        Self::with_names(alphabet, names, table)
    }

    pub fn with_names(
        alphabet: Alphabet,
        names: Vec<String>,
        table: Vec<Vec<Step<usize>>>,
    ) -> Result<Self> {
        let n = table.len();
        if names.len() != n {
            return Err(Error::Format {
                what: "detector",
                line: 0,
                message: format!("{} names for {} states", names.len(), n),
            });
        }
        for (state, row) in table.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::IncompleteStep {
                    state,
                    got: row.len(),
                    expected: alphabet.len(),
                });
            }
            for s in row {
                if let Step::Next(target) = *s {
                    if target >= n {
                        return Err(Error::DanglingTransition { state, target });
                    }
                }
            }
        }
        Ok(FiniteDetector {
            alphabet,
            names,
            table,
        })
    }

    /// The one-state detector that never faults.
    pub fn never_faulting(alphabet: Alphabet) -> Self {
        let row = vec![Step::Next(0); alphabet.len()];
        Self::new(alphabet, vec![row]).expect("well-formed")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<Step<usize>>] {
        &self.table
    }

    pub fn check_state(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownState(x))
        }
    }

    /// `(a x)(n)`.
    pub fn step(&self, x: usize, n: Symbol) -> Result<Step<usize>> {
        self.check_state(x)?;
        self.alphabet.check_symbol(n)?;
        Ok(self.table[x][n.index()])
    }

    pub(crate) fn step_unchecked(&self, x: usize, n: Symbol) -> Step<usize> {
        self.table[x][n.index()]
    }

    /// `a⁺(x, u)` for a nonempty word `u`; a fault absorbs the rest of `u`.
    pub fn extend(&self, x: usize, u: &Word) -> Result<Step<usize>> {
        if u.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.check_state(x)?;
        self.alphabet.check_word(u)?;
        let mut cur = x;
        for &n in u {
            match self.table[cur][n.index()] {
                Step::Fault => return Ok(Step::Fault),
                Step::Next(y) => cur = y,
            }
        }
        Ok(Step::Next(cur))
    }

    /// Words of length at most `depth` in `⟨a⟩(x)`.
    pub fn minimal_violation_words(&self, x: usize, depth: usize) -> Result<FiniteWordSet> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        self.check_state(x)?;
        let mut found = FiniteWordSet::new();
        let mut frontier = vec![(Word::empty(), x)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (w, state) in &frontier {
                for n in self.alphabet.symbols() {
                    match self.table[*state][n.index()] {
                        Step::Fault => {
                            found.insert(w.appended(n));
                        }
                        Step::Next(y) => next.push((w.appended(n), y)),
                    }
                }
            }
            frontier = next;
        }
        Ok(found)
    }

    /// States reachable from `x`, in breadth-first order over the alphabet.
    pub fn reachable(&self, x: usize) -> Result<Vec<usize>> {
        self.check_state(x)?;
        let mut order = vec![x];
        let mut seen = vec![false; self.len()];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(s) = queue.pop_front() {
            for step in &self.table[s] {
                if let Step::Next(y) = *step {
                    if !seen[y] {
                        seen[y] = true;
                        order.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(order)
    }

    /// The minimal detector for `⟨a⟩(x)`, states numbered breadth-first from
    /// the returned initial state `0`. Two states have equal violation
    /// languages iff their canonical forms are equal.
    pub fn canonical(&self, x: usize) -> Result<(FiniteDetector, usize)> {
        self.reachable(x)?;
        let blocks = bisim::detector_blocks(self);
        // breadth-first over blocks from the block of x
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut reps = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(blocks[x], 0);
        reps.push(x);
        queue.push_back(x);
        while let Some(s) = queue.pop_front() {
            for step in &self.table[s] {
                if let Step::Next(y) = *step {
                    if let Entry::Vacant(e) = index.entry(blocks[y]) {
                        e.insert(reps.len());
                        reps.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        let table = reps
            .iter()
            .map(|&r| {
                self.table[r]
                    .iter()
                    .map(|s| s.map(|y| index[&blocks[y]]))
                    .collect()
            })
            .collect();
        Ok((FiniteDetector::new(self.alphabet.clone(), table)?, 0))
    }

    pub fn into_handle(self, x: usize) -> Result<FiniteHandle> {
        FiniteHandle::new(Arc::new(self), x)
    }
}

/// Checks the detector-morphism conditions for the state map `f`.
pub fn check_detector_morphism(f: &[usize], a: &FiniteDetector, b: &FiniteDetector) -> bool {
    if a.alphabet != b.alphabet || f.len() != a.len() || f.iter().any(|&y| y >= b.len()) {
        return false;
    }
    (0..a.len()).all(|x| {
        a.alphabet.symbols().all(
            |n| match (a.step_unchecked(x, n), b.step_unchecked(f[x], n)) {
                (Step::Fault, Step::Fault) => true,
                (Step::Next(x1), Step::Next(y1)) => f[x1] == y1,
                _ => false,
            },
        )
    })
}

/// The trie detector of a finite prefix-free set: states are the distinct
/// iterated derivatives of `p`, the empty set being the safe sink.
pub fn detector_from_explicit_set(
    alphabet: &Alphabet,
    p: &FiniteWordSet,
) -> Result<(FiniteDetector, usize)> {
    p.ensure_detector_language()?;
    for w in p {
        alphabet.check_word(w)?;
    }
    let (sets, table) = derivative_closure(alphabet, p);
    let names = (0..sets.len()).map(|i| format!("s{i}")).collect();
    Ok((
        FiniteDetector::with_names(alphabet.clone(), names, table)?,
        0,
    ))
}

/// Breadth-first closure of `p` under derivatives by non-member letters.
pub(crate) fn derivative_closure(
    alphabet: &Alphabet,
    p: &FiniteWordSet,
) -> (Vec<FiniteWordSet>, Vec<Vec<Step<usize>>>) {
    let mut ids: BTreeMap<FiniteWordSet, usize> = BTreeMap::new();
    let mut sets = vec![p.clone()];
    ids.insert(p.clone(), 0);
    let mut table = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let cur = sets[i].clone();
        let row = alphabet
            .symbols()
            .map(|n| {
                if cur.contains_letter(n) {
                    Step::Fault
                } else {
                    let d = cur.derivative(n);
                    let id = *ids.entry(d.clone()).or_insert_with(|| {
                        sets.push(d);
                        sets.len() - 1
                    });
                    Step::Next(id)
                }
            })
            .collect();
        table.push(row);
        i += 1;
    }
    (sets, table)
}
