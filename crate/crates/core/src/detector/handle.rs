use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol, Word};
use crate::systems::Step;

use super::FiniteDetector;

/// Outcome of stepping a detector handle.
#[derive(Debug, Clone, PartialEq)]
pub enum Reaction<H> {
    Fault,
    Next(H),
    /// The step could not be decided within its budget.
    Unknown {
        steps: usize,
    },
}

impl<H> Reaction<H> {
    pub fn is_fault(&self) -> bool {
        matches!(self, Reaction::Fault)
    }
}

impl<H> From<Step<H>> for Reaction<H> {
    fn from(step: Step<H>) -> Self {
        match step {
            Step::Fault => Reaction::Fault,
            Step::Next(h) => Reaction::Next(h),
        }
    }
}

/// A detector state that can be stepped by value.
///
/// Stepping never mutates `self`; equal histories give equal outcomes.
pub trait DetectorHandle: Clone {
    /// Identity of the current state when the carrier is finite.
    type Key: Eq + Hash + Clone;

    fn alphabet(&self) -> &Alphabet;

    fn step(&self, n: Symbol) -> Result<Reaction<Self>>;

    /// `Some` only for handles over finite carriers; lasso monitors use it
    /// to certify that no fault is ever reached.
    fn key(&self) -> Option<Self::Key> {
        None
    }
}

/// A state of a shared [`FiniteDetector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteHandle {
    detector: Arc<FiniteDetector>,
    state: usize,
}

impl FiniteHandle {
    pub fn new(detector: Arc<FiniteDetector>, state: usize) -> Result<Self> {
        detector.check_state(state)?;
        Ok(FiniteHandle { detector, state })
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn detector(&self) -> &Arc<FiniteDetector> {
        &self.detector
    }
}

impl DetectorHandle for FiniteHandle {
    type Key = usize;

    fn alphabet(&self) -> &Alphabet {
        self.detector.alphabet()
    }

    fn step(&self, n: Symbol) -> Result<Reaction<Self>> {
        Ok(self
            .detector
            .step(self.state, n)?
            .map(|state| FiniteHandle {
                detector: Arc::clone(&self.detector),
                state,
            })
            .into())
    }

    fn key(&self) -> Option<usize> {
        Some(self.state)
    }
}

/// Depth-`depth` truncation of the violation language of any handle.
/// An undecided step anywhere in the search is an error, never a guess.
pub fn minimal_violation_words<H: DetectorHandle>(
    handle: &H,
    depth: usize,
) -> Result<FiniteWordSet> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let symbols: Vec<Symbol> = handle.alphabet().symbols().collect();
    let mut found = FiniteWordSet::new();
    let mut frontier = vec![(Word::empty(), handle.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, h) in &frontier {
            for &n in &symbols {
                match h.step(n)? {
                    Reaction::Fault => {
                        found.insert(w.appended(n));
                    }
                    Reaction::Next(h2) => next.push((w.appended(n), h2)),
                    Reaction::Unknown { steps } => return Err(Error::BudgetExhausted { steps }),
                }
            }
        }
        frontier = next;
    }
    Ok(found)
}
