use std::sync::Arc;

use crate::bisim;
use crate::error::Result;
use crate::sequences::{Alphabet, FiniteWordSet, Symbol, Word};
use crate::systems::Step;

use super::FiniteDetector;

/// A regular prefix-free language, stored as a state of a finite detector.
///
/// Read as an automaton, every `Fault` entry of the table is an edge into a
/// single absorbing accepting state and every other entry is an ordinary
/// edge; no path continues past acceptance, so the accepted language is
/// prefix-free and never contains ε.
#[derive(Debug, Clone)]
pub struct RegularPrefixFreeSet {
    automaton: Arc<FiniteDetector>,
    state: usize,
}

/// Complete deterministic automaton view of a [`RegularPrefixFreeSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteDfa {
    pub transitions: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
    pub initial: usize,
}

impl RegularPrefixFreeSet {
    pub fn new(automaton: Arc<FiniteDetector>, state: usize) -> Result<Self> {
        automaton.check_state(state)?;
        Ok(RegularPrefixFreeSet { automaton, state })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.automaton.alphabet()
    }

    pub fn automaton(&self) -> &Arc<FiniteDetector> {
        &self.automaton
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Membership: the run faults exactly on the last symbol.
    pub fn accepts(&self, word: &Word) -> bool {
        let mut cur = self.state;
        for (i, &n) in word.iter().enumerate() {
            if !self.alphabet().contains(n) {
                return false;
            }
            match self.automaton.step_unchecked(cur, n) {
                Step::Fault => return i + 1 == word.len(),
                Step::Next(y) => cur = y,
            }
        }
        false
    }

    pub fn words_up_to(&self, depth: usize) -> Result<FiniteWordSet> {
        self.automaton.minimal_violation_words(self.state, depth)
    }

    pub fn is_empty(&self) -> bool {
        self.automaton
            .reachable(self.state)
            .expect("state checked on construction")
            .iter()
            .all(|&s| self.automaton.table()[s].iter().all(|t| !t.is_fault()))
    }

    /// Language equality, decided by bisimilarity.
    pub fn equivalent(&self, other: &RegularPrefixFreeSet) -> bool {
        bisim::bisimilar(&self.automaton, self.state, &other.automaton, other.state)
            .unwrap_or(false)
    }

    /// `Fault` if `n` is a member, otherwise the derivative `n⁻¹·P`.
    pub fn step(&self, n: Symbol) -> Result<Step<RegularPrefixFreeSet>> {
        Ok(self
            .automaton
            .step(self.state, n)?
            .map(|state| RegularPrefixFreeSet {
                automaton: Arc::clone(&self.automaton),
                state,
            }))
    }

    /// Minimal, breadth-first numbered form of this language.
    pub fn canonical(&self) -> RegularPrefixFreeSet {
        let (d, x) = self
            .automaton
            .canonical(self.state)
            .expect("state checked on construction");
        RegularPrefixFreeSet {
            automaton: Arc::new(d),
            state: x,
        }
    }

    /// The same language as a complete DFA whose extra last state is the
    /// absorbing accept state.
    pub fn complete_dfa(&self) -> CompleteDfa {
        let n = self.automaton.len();
        let mut transitions: Vec<Vec<usize>> = self
            .automaton
            .table()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| match s {
                        Step::Fault => n,
                        Step::Next(y) => *y,
                    })
                    .collect()
            })
            .collect();
        transitions.push(vec![n; self.alphabet().len()]);
        let mut accepting = vec![false; n + 1];
        accepting[n] = true;
        CompleteDfa {
            transitions,
            accepting,
            initial: self.state,
        }
    }
}

impl PartialEq for RegularPrefixFreeSet {
    fn eq(&self, other: &Self) -> bool {
        self.equivalent(other)
    }
}

/// `⟨a⟩(x)` as a regular prefix-free set: the detector restricted to the
/// states reachable from `x` and minimized.
pub fn anamorphism_regular(a: &FiniteDetector, x: usize) -> Result<RegularPrefixFreeSet> {
    let (d, init) = a.canonical(x)?;
    RegularPrefixFreeSet::new(Arc::new(d), init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::tests::{ab, fault_on_b};
    use Step::{Fault, Next};

    #[test]
    fn never_faulting_is_empty() {
        let r = anamorphism_regular(&FiniteDetector::never_faulting(ab()), 0).unwrap();
        assert!(r.is_empty());
        assert!(r.words_up_to(6).unwrap().is_empty());
    }

    #[test]
    fn fault_on_b_is_a_star_b() {
        let r = anamorphism_regular(&fault_on_b(), 0).unwrap();
        let w = |t| ab().parse_word(t).unwrap();
        assert!(r.accepts(&w("a a b")));
        assert!(!r.accepts(&w("a b b")));
        assert!(!r.accepts(&w("a a")));
        assert!(!r.accepts(&Word::empty()));
        let a = ab().symbol("a").unwrap();
        match r.step(a).unwrap() {
            Step::Next(d) => assert!(d.equivalent(&r)),
            Step::Fault => panic!("a is not a member"),
        }
    }

    #[test]
    fn bisimilar_starts_share_language() {
        let twin =
            FiniteDetector::new(ab(), vec![vec![Next(1), Fault], vec![Next(0), Fault]]).unwrap();
        let r0 = anamorphism_regular(&twin, 0).unwrap();
        let r1 = anamorphism_regular(&twin, 1).unwrap();
        assert_eq!(r0.words_up_to(6).unwrap(), r1.words_up_to(6).unwrap());
        assert!(r0.equivalent(&r1));
        assert_eq!(r0.automaton().as_ref(), r1.automaton().as_ref());
    }

    #[test]
    fn complete_dfa_has_absorbing_accept() {
        let dfa = anamorphism_regular(&fault_on_b(), 0)
            .unwrap()
            .complete_dfa();
        assert_eq!(dfa.transitions, vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(dfa.accepting, vec![false, true]);
    }
}
