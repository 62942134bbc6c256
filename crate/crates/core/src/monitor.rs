//! Monitoring: pairing a system with output with a detector yields a system
//! with termination whose termination time is the length of the shortest bad
//! prefix (minus one). On a lasso the pair (detector state, lasso position)
//! ranges over a finite set, so either a fault or a repeated pair is reached.

use std::collections::HashSet;

use serde::Serialize;

use crate::detector::{
    anamorphism_regular, DetectorHandle, FiniteDetector, PrefixFreeSet, Reaction,
};
use crate::error::{Error, Result};
use crate::sequences::{LassoStream, Sequence, Symbol, Word};
use crate::systems::{SSystem, Step, TSystem};

/// `Join(σ, a)` materialized on the full product; the pair `(x, y)` is
/// state `x * detector_len + y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSystem {
    system_len: usize,
    detector_len: usize,
    inner: TSystem,
}

impl JoinSystem {
    pub fn pair_index(&self, system_state: usize, detector_state: usize) -> usize {
        system_state * self.detector_len + detector_state
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.detector_len, index % self.detector_len)
    }

    pub fn system_len(&self) -> usize {
        self.system_len
    }

    pub fn detector_len(&self) -> usize {
        self.detector_len
    }

    pub fn as_t_system(&self) -> &TSystem {
        &self.inner
    }
}

/// `(x, y) ↦ ↓` if `(a y)(out x) = ↓`, else `(tr x, (a y)(out x))`.
pub fn join(sigma: &SSystem, a: &FiniteDetector) -> Result<JoinSystem> {
    sigma.alphabet().ensure_same(a.alphabet())?;
    let dl = a.len();
    let mut step = Vec::with_capacity(sigma.len() * dl);
    for x in 0..sigma.len() {
        for y in 0..dl {
            step.push(
                a.step_unchecked(y, sigma.out(x))
                    .map(|y1| sigma.tr(x) * dl + y1),
            );
        }
    }
    Ok(JoinSystem {
        system_len: sigma.len(),
        detector_len: dl,
        inner: TSystem::new(step)?,
    })
}

/// `Join(f, g) = f × g` as a map between product state indices.
pub fn join_map(f: &[usize], g: &[usize], source: &JoinSystem, target: &JoinSystem) -> Vec<usize> {
    (0..source.system_len * source.detector_len)
        .map(|i| {
            let (x, y) = source.pair(i);
            target.pair_index(f[x], g[y])
        })
        .collect()
}

/// Outcome of monitoring a stream from a detector state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MonitorVerdict {
    /// `bad_prefix` is the shortest prefix driving the detector into a
    /// fault; `ana_value = prefix_len - 1` is the termination time of the
    /// joined system.
    Violation {
        prefix_len: usize,
        bad_prefix: Word,
        ana_value: usize,
    },
    /// No prefix ever faults.
    CertifiedSafe,
    /// A step could not be decided within its budget.
    Unknown { steps_consumed: usize },
}

impl MonitorVerdict {
    fn violation(bad_prefix: Word) -> Self {
        let prefix_len = bad_prefix.len();
        MonitorVerdict::Violation {
            prefix_len,
            bad_prefix,
            ana_value: prefix_len - 1,
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, MonitorVerdict::Violation { .. })
    }

    pub fn prefix_len(&self) -> Option<usize> {
        match self {
            MonitorVerdict::Violation { prefix_len, .. } => Some(*prefix_len),
            _ => None,
        }
    }
}

/// Runs `a` from `x` along `s` until a fault or a repeated
/// (state, position) pair.
pub fn monitor_lasso(a: &FiniteDetector, x: usize, s: &LassoStream) -> Result<MonitorVerdict> {
    a.check_state(x)?;
    a.alphabet().check_word(s.prefix())?;
    a.alphabet().check_word(s.period())?;
    let mut seen = vec![false; a.len() * s.suffix_count()];
    let mut state = x;
    let mut m = 0;
    loop {
        let slot = state * s.suffix_count() + s.position(m);
        if seen[slot] {
            return Ok(MonitorVerdict::CertifiedSafe);
        }
        seen[slot] = true;
        match a.step_unchecked(state, s.symbol_at(m)) {
            Step::Fault => return Ok(MonitorVerdict::violation(s.slice_range(0, m + 1))),
            Step::Next(y) => state = y,
        }
        m += 1;
    }
}

/// Lasso monitoring for any handle. Safety is certified only for handles
/// exposing a finite-state key; otherwise the run stops with `Unknown`
/// after `max_steps` symbols.
pub fn monitor_lasso_handle<H: DetectorHandle>(
    handle: &H,
    s: &LassoStream,
    max_steps: usize,
) -> Result<MonitorVerdict> {
    let mut seen: HashSet<(H::Key, usize)> = HashSet::new();
    let mut cur = handle.clone();
    for m in 0..max_steps {
        if let Some(key) = cur.key() {
            if !seen.insert((key, s.position(m))) {
                return Ok(MonitorVerdict::CertifiedSafe);
            }
        }
        match cur.step(s.symbol_at(m))? {
            Reaction::Fault => return Ok(MonitorVerdict::violation(s.slice_range(0, m + 1))),
            Reaction::Next(h) => cur = h,
            Reaction::Unknown { .. } => return Ok(MonitorVerdict::Unknown { steps_consumed: m }),
        }
    }
    Ok(MonitorVerdict::Unknown {
        steps_consumed: max_steps,
    })
}

/// `s ∈ constr(a, x)`: the stream never produces a bad prefix.
pub fn constr_member(a: &FiniteDetector, x: usize, s: &LassoStream) -> Result<bool> {
    Ok(monitor_lasso(a, x, s)? == MonitorVerdict::CertifiedSafe)
}

/// Verdicts of `a` at `x` and of the final detector at `⟨a⟩(x)` on the same
/// lasso. The two always agree.
pub fn transfer_to_universal(
    a: &FiniteDetector,
    x: usize,
    s: &LassoStream,
) -> Result<(MonitorVerdict, MonitorVerdict)> {
    let direct = monitor_lasso(a, x, s)?;
    let language = anamorphism_regular(a, x)?;
    let bound = language.automaton().len() * s.suffix_count() + 1;
    let universal = monitor_lasso_handle(&PrefixFreeSet::Regular(language), s, bound)?;
    Ok((direct, universal))
}

/// Result of feeding one symbol to an [`OnlineMonitor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feed {
    Ok,
    /// The `position`-th symbol (1-based) completed a minimal bad prefix.
    Violation {
        position: usize,
    },
    Unknown {
        steps_consumed: usize,
    },
}

/// Incremental monitor over a live feed. After a violation or an unknown
/// step, further feeds are rejected.
#[derive(Debug, Clone)]
pub struct OnlineMonitor<H> {
    handle: H,
    consumed: Word,
    verdict: Option<Feed>,
}

pub fn monitor_online<H: DetectorHandle>(handle: H) -> OnlineMonitor<H> {
    OnlineMonitor {
        handle,
        consumed: Word::empty(),
        verdict: None,
    }
}

impl<H: DetectorHandle> OnlineMonitor<H> {
    pub fn feed(&mut self, n: Symbol) -> Result<Feed> {
        if self.verdict.is_some() {
            return Err(Error::MonitorTerminated);
        }
        let outcome = match self.handle.step(n)? {
            Reaction::Fault => {
                self.consumed.push(n);
                Feed::Violation {
                    position: self.consumed.len(),
                }
            }
            Reaction::Next(h) => {
                self.consumed.push(n);
                self.handle = h;
                return Ok(Feed::Ok);
            }
            Reaction::Unknown { .. } => Feed::Unknown {
                steps_consumed: self.consumed.len(),
            },
        };
        self.verdict = Some(outcome.clone());
        Ok(outcome)
    }

    /// Symbols accepted so far, including a violating last symbol.
    pub fn consumed(&self) -> &Word {
        &self.consumed
    }

    pub fn is_terminated(&self) -> bool {
        self.verdict.is_some()
    }

    /// The terminal outcome, if one was reached.
    pub fn verdict(&self) -> Option<MonitorVerdict> {
        match self.verdict.as_ref()? {
            Feed::Violation { .. } => Some(MonitorVerdict::violation(self.consumed.clone())),
            Feed::Unknown { steps_consumed } => Some(MonitorVerdict::Unknown {
                steps_consumed: *steps_consumed,
            }),
            Feed::Ok => None,
        }
    }

    pub fn handle(&self) -> &H {
        &self.handle
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{re_detector, Enumerator};
    use crate::sequences::Alphabet;
    use crate::systems::{check_t_morphism, stream_system, TerminationTime};
    use Step::{Fault, Next};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(t: &str) -> Word {
        ab().parse_word(t).unwrap()
    }

    fn lasso(u: &str, v: &str) -> LassoStream {
        LassoStream::new(w(u), w(v)).unwrap()
    }

    fn fault_on_b() -> FiniteDetector {
        FiniteDetector::new(ab(), vec![vec![Next(0), Fault]]).unwrap()
    }

    #[test]
    fn join_examples() {
        let a = ab().symbol("a").unwrap();
        let b = ab().symbol("b").unwrap();
        let const_a = SSystem::new(ab(), vec![a], vec![0]).unwrap();
        let never = FiniteDetector::never_faulting(ab());
        let j = join(&const_a, &never).unwrap();
        assert!((0..1).all(|i| !j.as_t_system().step(i).unwrap().is_fault()));

        let const_b = SSystem::new(ab(), vec![b], vec![0]).unwrap();
        let j = join(&const_b, &fault_on_b()).unwrap();
        assert_eq!(j.as_t_system().step(0).unwrap(), Fault);

        let (sys, x) = stream_system(&ab(), &lasso("a", "b")).unwrap();
        let j = join(&sys, &fault_on_b()).unwrap();
        let start = j.pair_index(x, 0);
        assert_eq!(
            j.as_t_system().anamorphism(start),
            Ok(TerminationTime::Finite(1))
        );
        assert_eq!(j.as_t_system().iterate(start, 2), Ok(Fault));
    }

    #[test]
    fn join_map_of_identities() {
        let (sys, _) = stream_system(&ab(), &lasso("a", "b")).unwrap();
        let d = fault_on_b();
        let j = join(&sys, &d).unwrap();
        let m = join_map(&[0, 1], &[0], &j, &j);
        assert_eq!(m, vec![0, 1]);
        assert!(check_t_morphism(&m, j.as_t_system(), j.as_t_system()));
    }

    #[test]
    fn monitor_examples() {
        let d = fault_on_b();
        assert_eq!(
            monitor_lasso(&d, 0, &lasso("", "a")).unwrap(),
            MonitorVerdict::CertifiedSafe
        );
        assert_eq!(
            monitor_lasso(&d, 0, &lasso("a a", "b")).unwrap(),
            MonitorVerdict::Violation {
                prefix_len: 3,
                bad_prefix: w("a a b"),
                ana_value: 2
            }
        );
        let v = monitor_lasso(&d, 0, &lasso("b", "a")).unwrap();
        assert_eq!(v.prefix_len(), Some(1));
        assert!(constr_member(&d, 0, &lasso("", "a")).unwrap());
        assert!(!constr_member(&d, 0, &lasso("", "a b")).unwrap());
        let never = FiniteDetector::never_faulting(ab());
        assert!(constr_member(&never, 0, &lasso("a b", "b a a")).unwrap());
    }

    #[test]
    fn transfer_examples() {
        let d = fault_on_b();
        let (u, v) = transfer_to_universal(&d, 0, &lasso("", "a")).unwrap();
        assert_eq!(
            (u.clone(), v),
            (MonitorVerdict::CertifiedSafe, MonitorVerdict::CertifiedSafe)
        );
        let (u, v) = transfer_to_universal(&d, 0, &lasso("a", "b")).unwrap();
        assert_eq!(u, v);
        assert_eq!(u.prefix_len(), Some(2));
        let never = FiniteDetector::never_faulting(ab());
        let (u, v) = transfer_to_universal(&never, 0, &lasso("b", "a b")).unwrap();
        assert_eq!(
            (u, v),
            (MonitorVerdict::CertifiedSafe, MonitorVerdict::CertifiedSafe)
        );
    }

    #[test]
    fn online_examples() {
        let a = ab().symbol("a").unwrap();
        let b = ab().symbol("b").unwrap();
        let mut m = monitor_online(fault_on_b().into_handle(0).unwrap());
        assert_eq!(m.feed(a).unwrap(), Feed::Ok);
        assert_eq!(m.feed(a).unwrap(), Feed::Ok);
        assert_eq!(m.feed(b).unwrap(), Feed::Violation { position: 3 });
        assert_eq!(m.feed(a), Err(Error::MonitorTerminated));
        assert_eq!(
            m.verdict(),
            Some(MonitorVerdict::Violation {
                prefix_len: 3,
                bad_prefix: w("a a b"),
                ana_value: 2
            })
        );

        let mut m = monitor_online(FiniteDetector::never_faulting(ab()).into_handle(0).unwrap());
        for i in 0..100 {
            assert_eq!(m.feed(if i % 3 == 0 { a } else { b }).unwrap(), Feed::Ok);
        }

        let e = Enumerator::new(ab(), std::iter::repeat(w("b b")));
        let mut m = monitor_online(re_detector(e, 1).unwrap());
        assert_eq!(m.feed(a).unwrap(), Feed::Unknown { steps_consumed: 0 });
        assert!(m.feed(a).is_err());
    }
}
