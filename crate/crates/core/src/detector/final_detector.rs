//! The final detector. Its states are prefix-free, ε-free languages; reading
//! `n` faults when `n` is itself a member and otherwise moves to `n⁻¹·P`.
//! The carrier is realized by four representations, one per way a language
//! can be given.

use std::sync::Arc;

use crate::error::Result;
use crate::families::{DecidableSet, EnumeratedSet};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol};
use crate::systems::Step;

use super::handle::{DetectorHandle, Reaction};
use super::regular::RegularPrefixFreeSet;

#[derive(Clone)]
pub enum PrefixFreeSet {
    Explicit {
        alphabet: Alphabet,
        set: FiniteWordSet,
    },
    Regular(RegularPrefixFreeSet),
    Decidable(DecidableSet),
    Enumerated(EnumeratedSet),
}

impl std::fmt::Debug for PrefixFreeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrefixFreeSet::Explicit { alphabet, set } => {
                write!(f, "Explicit({})", alphabet.format_set(set))
            }
            PrefixFreeSet::Regular(r) => write!(f, "Regular(state {})", r.state()),
            PrefixFreeSet::Decidable(d) => write!(f, "Decidable(after {:?})", d.history()),
            PrefixFreeSet::Enumerated(e) => write!(f, "Enumerated(after {:?})", e.history()),
        }
    }
}

impl PrefixFreeSet {
    pub fn explicit(alphabet: Alphabet, set: FiniteWordSet) -> Result<Self> {
        set.ensure_detector_language()?;
        for w in &set {
            alphabet.check_word(w)?;
        }
        Ok(PrefixFreeSet::Explicit { alphabet, set })
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            PrefixFreeSet::Explicit { alphabet, .. } => alphabet,
            PrefixFreeSet::Regular(r) => r.alphabet(),
            PrefixFreeSet::Decidable(d) => d.alphabet(),
            PrefixFreeSet::Enumerated(e) => e.alphabet(),
        }
    }
}

/// Identity of a finite-carrier state of the final detector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetKey {
    Explicit(FiniteWordSet),
    Regular { automaton: usize, state: usize },
}

/// One transition of the final detector.
pub fn final_step(p: &PrefixFreeSet, n: Symbol) -> Result<Reaction<PrefixFreeSet>> {
    p.alphabet().check_symbol(n)?;
    match p {
        PrefixFreeSet::Explicit { alphabet, set } => Ok(if set.contains_letter(n) {
            Reaction::Fault
        } else {
            Reaction::Next(PrefixFreeSet::Explicit {
                alphabet: alphabet.clone(),
                set: set.derivative(n),
            })
        }),
        PrefixFreeSet::Regular(r) => Ok(match r.step(n)? {
            Step::Fault => Reaction::Fault,
            Step::Next(r2) => Reaction::Next(PrefixFreeSet::Regular(r2)),
        }),
        PrefixFreeSet::Decidable(d) => Ok(match d.step(n)? {
            Step::Fault => Reaction::Fault,
            Step::Next(d2) => Reaction::Next(PrefixFreeSet::Decidable(d2)),
        }),
        PrefixFreeSet::Enumerated(e) => Ok(match e.step(n)? {
            Reaction::Fault => Reaction::Fault,
            Reaction::Next(e2) => Reaction::Next(PrefixFreeSet::Enumerated(e2)),
            Reaction::Unknown { steps } => Reaction::Unknown { steps },
        }),
    }
}

impl DetectorHandle for PrefixFreeSet {
    type Key = SetKey;

    fn alphabet(&self) -> &Alphabet {
        PrefixFreeSet::alphabet(self)
    }

    fn step(&self, n: Symbol) -> Result<Reaction<Self>> {
        final_step(self, n)
    }

    fn key(&self) -> Option<SetKey> {
        match self {
            PrefixFreeSet::Explicit { set, .. } => Some(SetKey::Explicit(set.clone())),
            PrefixFreeSet::Regular(r) => Some(SetKey::Regular {
                automaton: Arc::as_ptr(r.automaton()) as usize,
                state: r.state(),
            }),
            _ => None,
        }
    }
}

impl From<RegularPrefixFreeSet> for PrefixFreeSet {
    fn from(r: RegularPrefixFreeSet) -> Self {
        PrefixFreeSet::Regular(r)
    }
}
