mod common;

use std::collections::BTreeSet;

use coalmon::detector::{detector_from_explicit_set, DetectorHandle, Reaction};
use coalmon::families::{
    check_universal_family, decidable_detector, derivative_family, machine_derivative,
    machine_to_detector, re_detector, universal_detector_for, DecisionProcedure, EilenbergMachine,
    Enumerator,
};
use coalmon::speclang::RegexAst;
use coalmon::{Error, FiniteWordSet, Step, Symbol};
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn fault_position<H: DetectorHandle>(h: &H, u: &[usize]) -> Result<Option<usize>, ()> {
    let mut cur = h.clone();
    for (i, &n) in u.iter().enumerate() {
        match cur.step(Symbol::new(n)).unwrap() {
            Reaction::Fault => return Ok(Some(i)),
            Reaction::Next(next) => cur = next,
            Reaction::Unknown { .. } => return Err(()),
        }
    }
    Ok(None)
}

proptest! {
    #[test]
    fn prefix_free_machines_round_trip(seed in any::<u64>()) {
        let raw = random_prefix_free(&mut rng(seed), 4, 6);
        prop_assume!(!raw.is_empty());
        let pattern: RegexAst = regex_of_set(&raw);
        let m = pattern.to_machine(&ab()).unwrap();
        prop_assert!(m.is_prefix_free());
        let (d, x) = machine_to_detector(&m).unwrap();
        prop_assert_eq!(as_raw_set(&d.minimal_violation_words(x, 6).unwrap()), raw.clone());
        prop_assert_eq!(as_raw_set(&m.language_up_to(6)), raw);
    }

    #[test]
    fn machine_derivative_matches_definition(seed in any::<u64>()) {
        let raw = random_machine(&mut rng(seed), 4);
        let m = raw.build();
        prop_assert_eq!(as_raw_set(&m.language_up_to(5)), raw.language(5));
        for n in 0..2 {
            let dm = machine_derivative(&m, Symbol::new(n)).unwrap();
            let whole = raw.language(5);
            let expected: BTreeSet<Vec<usize>> = oracle_derivative(&whole, n).into_iter().filter(|u| u.len() <= 4).collect();
            prop_assert_eq!(as_raw_set(&dm.language_up_to(4)), expected);
        }
    }

    #[test]
    fn machine_prefix_freeness_is_exact(seed in any::<u64>()) {
        let raw = random_machine(&mut rng(seed), 3);
        let m = raw.build();
        let lang = raw.language(7);
        match m.prefix_witness() {
            Some((u, v)) => {
                prop_assert!(u.is_proper_prefix_of(&v));
                prop_assert!(m.accepts(&u) && m.accepts(&v));
            }
            // a 3-state machine has at most 8 subsets, so a violation would
            // show up below length 8
            None => prop_assert!(oracle_prefix_free(&lang)),
        }
    }

    #[test]
    fn decidable_and_enumerated_match_trie(seed in any::<u64>()) {
        let mut g = rng(seed);
        let raw = random_prefix_free(&mut g, 4, 6);
        let p = from_raw_set(&raw);
        let (trie, t0) = detector_from_explicit_set(&ab(), &p).unwrap();
        let decided = decidable_detector(ab(), DecisionProcedure::from_set(p.clone()), true);
        let mut order: Vec<_> = p.iter().cloned().collect();
        order.shuffle(&mut g);
        let budget = order.len() + 1;
        let enumerated = re_detector(Enumerator::from_words(ab(), order), budget).unwrap();
        let handle = trie.clone().into_handle(t0).unwrap();
        for u in all_words(2, 6) {
            let want = fault_position(&handle, &u);
            prop_assert_eq!(fault_position(&decided, &u), want);
            if u.len() <= 4 {
                prop_assert_eq!(fault_position(&enumerated, &u), want);
            }
        }
    }

    #[test]
    fn universal_families(seed in any::<u64>()) {
        let mut g = rng(seed);
        let mut family: Vec<FiniteWordSet> = Vec::new();
        for _ in 0..g.gen_range(1..=3) {
            let p = from_raw_set(&random_prefix_free(&mut g, 3, 4));
            let closure = derivative_family(&ab(), &p).unwrap();
            // sometimes drop a member to break closure
            for (i, q) in closure.into_iter().enumerate() {
                if i == 0 || g.gen_bool(0.85) {
                    family.push(q);
                }
            }
        }
        let check = check_universal_family(&ab(), &family).unwrap();
        match universal_detector_for(&ab(), &family) {
            Ok((d, index)) => {
                prop_assert!(check.is_closed());
                for (p, &x) in &index {
                    prop_assert_eq!(&d.minimal_violation_words(x, 6).unwrap(), p);
                }
            }
            Err(Error::NotUniversal { .. }) => prop_assert!(!check.is_closed()),
            Err(e) => prop_assert!(false, "unexpected {:?}", e),
        }
    }
}

#[test]
fn machine_examples() {
    let a = Symbol::new(0);
    let b = Symbol::new(1);
    let only_b = EilenbergMachine::new(ab(), 2, [(0, b, 1)], [0], [1]).unwrap();
    let (d, x) = machine_to_detector(&only_b).unwrap();
    assert_eq!(d.step(x, b).unwrap(), Step::Fault);
    let sink = d.step(x, a).unwrap().next().unwrap();
    assert!(d.minimal_violation_words(sink, 6).unwrap().is_empty());

    let empty = EilenbergMachine::new(ab(), 1, [], [0], []).unwrap();
    assert_eq!(machine_to_detector(&empty).unwrap().0.len(), 1);

    let eps = EilenbergMachine::new(ab(), 1, [], [0], [0]).unwrap();
    assert_eq!(
        machine_to_detector(&eps).unwrap_err(),
        Error::EpsilonViolation
    );
}
