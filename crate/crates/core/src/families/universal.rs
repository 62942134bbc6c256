use std::collections::BTreeMap;

use crate::detector::{derivative_closure, FiniteDetector};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, FiniteWordSet, Symbol};
use crate::systems::Step;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyCheck {
    Closed,
    /// `n ∉ set` and `n⁻¹·set` is not a member of the family.
    NotClosed {
        set: FiniteWordSet,
        symbol: Symbol,
    },
}

impl FamilyCheck {
    pub fn is_closed(&self) -> bool {
        matches!(self, FamilyCheck::Closed)
    }
}

fn validate(alphabet: &Alphabet, family: &[FiniteWordSet]) -> Result<()> {
    for p in family {
        p.ensure_detector_language()?;
        for w in p {
            alphabet.check_word(w)?;
        }
    }
    Ok(())
}

/// A family admits a universal detector iff every member is closed under
/// derivatives by its non-member letters.
pub fn check_universal_family(
    alphabet: &Alphabet,
    family: &[FiniteWordSet],
) -> Result<FamilyCheck> {
    validate(alphabet, family)?;
    for p in family {
        for n in alphabet.symbols() {
            if !p.contains_letter(n) && !family.contains(&p.derivative(n)) {
                return Ok(FamilyCheck::NotClosed {
                    set: p.clone(),
                    symbol: n,
                });
            }
        }
    }
    Ok(FamilyCheck::Closed)
}

/// One state per distinct member, in first-occurrence order; each state
/// faults on the member's one-letter words and otherwise steps to the
/// derivative.
pub fn universal_detector_for(
    alphabet: &Alphabet,
    family: &[FiniteWordSet],
) -> Result<(FiniteDetector, BTreeMap<FiniteWordSet, usize>)> {
    if let FamilyCheck::NotClosed { set, symbol } = check_universal_family(alphabet, family)? {
        return Err(Error::NotUniversal {
            set: alphabet.format_set(&set),
            symbol: alphabet.name(symbol).to_string(),
        });
    }
    let mut index = BTreeMap::new();
    let mut members = Vec::new();
    for p in family {
        if !index.contains_key(p) {
            index.insert(p.clone(), members.len());
            members.push(p);
        }
    }
    let table = members
        .iter()
        .map(|p| {
            alphabet
                .symbols()
                .map(|n| {
                    if p.contains_letter(n) {
                        Step::Fault
                    } else {
                        Step::Next(index[&p.derivative(n)])
                    }
                })
                .collect()
        })
        .collect();
    Ok((FiniteDetector::new(alphabet.clone(), table)?, index))
}

/// `p` together with all its iterated derivatives: the smallest universal
/// family containing `p`.
pub fn derivative_family(alphabet: &Alphabet, p: &FiniteWordSet) -> Result<Vec<FiniteWordSet>> {
    validate(alphabet, std::slice::from_ref(p))?;
    Ok(derivative_closure(alphabet, p).0)
}
