//! Detectors backed by a membership predicate or by a word enumerator.
//!
//! Both carry the word read so far; the language they stand for is the
//! derivative of the original set by that word.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use crate::detector::{PrefixFreeSet, Reaction};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol, Word};
use crate::systems::Step;

/// A total membership predicate on words, claimed to decide a prefix-free set.
#[derive(Clone)]
pub struct DecisionProcedure(Rc<dyn Fn(&Word) -> bool>);

impl DecisionProcedure {
    pub fn new(f: impl Fn(&Word) -> bool + 'static) -> Self {
        DecisionProcedure(Rc::new(f))
    }

    /// Membership in a finite set.
    pub fn from_set(set: FiniteWordSet) -> Self {
        DecisionProcedure::new(move |w| set.contains(w))
    }

    pub fn decide(&self, word: &Word) -> bool {
        (self.0)(word)
    }
}

impl fmt::Debug for DecisionProcedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DecisionProcedure(..)")
    }
}

/// `history⁻¹·P` for a decidable `P`.
#[derive(Debug, Clone)]
pub struct DecidableSet {
    alphabet: Alphabet,
    procedure: DecisionProcedure,
    history: Word,
    audit: bool,
}

impl DecidableSet {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn history(&self) -> &Word {
        &self.history
    }

    /// `u ∈ history⁻¹·P`, i.e. `history·u ∈ P`.
    pub fn contains(&self, u: &Word) -> bool {
        let mut w = self.history.clone();
        for &n in u {
            w.push(n);
        }
        self.procedure.decide(&w)
    }

    pub fn step(&self, n: Symbol) -> Result<Step<DecidableSet>> {
        self.alphabet.check_symbol(n)?;
        let word = self.history.appended(n);
        if self.audit {
            for k in 0..word.len() {
                let prefix = word.prefix(k);
                if self.procedure.decide(&prefix) {
                    return Err(Error::PrefixAccepted { prefix, word });
                }
            }
        }
        if self.procedure.decide(&word) {
            Ok(Step::Fault)
        } else {
            Ok(Step::Next(DecidableSet {
                history: word,
                ..self.clone()
            }))
        }
    }
}

/// A detector for the set decided by `procedure`. Its state is the word read
/// so far; with `audit` on, every step re-checks that no proper prefix of the
/// current word (ε included) is accepted.
pub fn decidable_detector(
    alphabet: Alphabet,
    procedure: DecisionProcedure,
    audit: bool,
) -> PrefixFreeSet {
    PrefixFreeSet::Decidable(DecidableSet {
        alphabet,
        procedure,
        history: Word::empty(),
        audit,
    })
}

struct EnumerationState {
    source: Box<dyn Iterator<Item = Word>>,
    produced: Vec<Word>,
    exhausted: bool,
}

/// A deterministic, resumable enumeration of a set of words. Produced words
/// are memoized, so every handle sharing the enumerator sees the same order.
#[derive(Clone)]
pub struct Enumerator {
    alphabet: Alphabet,
    state: Rc<RefCell<EnumerationState>>,
}

impl Enumerator {
    pub fn new(alphabet: Alphabet, source: impl Iterator<Item = Word> + 'static) -> Self {
        Enumerator {
            alphabet,
            state: Rc::new(RefCell::new(EnumerationState {
                source: Box::new(source),
                produced: Vec::new(),
                exhausted: false,
            })),
        }
    }

    /// Enumerates a finite list in the given order, then stops.
    pub fn from_words(alphabet: Alphabet, words: Vec<Word>) -> Self {
        Enumerator::new(alphabet, words.into_iter())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The `k`-th enumerated word, or `None` once the enumeration has ended.
    pub fn get(&self, k: usize) -> Result<Option<Word>> {
        let mut st = self.state.borrow_mut();
        while st.produced.len() <= k && !st.exhausted {
            match st.source.next() {
                Some(w) => {
                    if self.alphabet.check_word(&w).is_err() {
                        return Err(Error::MalformedEnumeration(format!("{:?}", w.symbols())));
                    }
                    st.produced.push(w);
                }
                None => st.exhausted = true,
            }
        }
        Ok(st.produced.get(k).cloned())
    }
}

impl fmt::Debug for Enumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.state.borrow();
        write!(
            f,
            "Enumerator({} produced{})",
            st.produced.len(),
            if st.exhausted { ", exhausted" } else { "" }
        )
    }
}

/// `history⁻¹·P` for a recursively enumerable `P`.
#[derive(Debug, Clone)]
pub struct EnumeratedSet {
    enumerator: Enumerator,
    history: Word,
    budget: usize,
}

impl EnumeratedSet {
    pub fn alphabet(&self) -> &Alphabet {
        self.enumerator.alphabet()
    }

    pub fn history(&self) -> &Word {
        &self.history
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Reads `n` after the history `u`. One membership search runs for each
    /// nonempty prefix of `u·n`; the searches advance round-robin, one
    /// enumerated word per round, for at most `budget` rounds. The first
    /// search to find its word decides: the full word means a fault, a
    /// proper prefix rules the full word out. If the enumeration ends first,
    /// no prefix is a member and the step succeeds.
    pub fn step(&self, n: Symbol) -> Result<Reaction<EnumeratedSet>> {
        self.alphabet().check_symbol(n)?;
        let word = self.history.appended(n);
        let next = || EnumeratedSet {
            history: word.clone(),
            ..self.clone()
        };
        for round in 0..self.budget {
            let Some(candidate) = self.enumerator.get(round)? else {
                return Ok(Reaction::Next(next()));
            };
            for k in 1..=word.len() {
                if candidate.len() == k && word.symbols().starts_with(candidate.symbols()) {
                    return Ok(if k == word.len() {
                        Reaction::Fault
                    } else {
                        Reaction::Next(next())
                    });
                }
            }
        }
        if self.enumerator.get(self.budget)?.is_none() {
            return Ok(Reaction::Next(next()));
        }
        Ok(Reaction::Unknown { steps: self.budget })
    }
}

/// A detector for the set enumerated by `enumerator`, spending at most
/// `budget` enumeration steps on each transition.
pub fn re_detector(enumerator: Enumerator, budget: usize) -> Result<PrefixFreeSet> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    Ok(PrefixFreeSet::Enumerated(EnumeratedSet {
        enumerator,
        history: Word::empty(),
        budget,
    }))
}
