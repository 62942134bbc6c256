//! Systems with termination and systems with output over finite carriers.
//!
//! States are indices `0..len`. Anamorphisms are exact: a finite carrier
//! forces every orbit into a cycle, which is detected directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{Alphabet, LassoStream, Sequence, Symbol, Word};

/// One transition outcome: either the fault marker `↓` or a successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step<S> {
    Fault,
    Next(S),
}

impl<S> Step<S> {
    pub fn is_fault(&self) -> bool {
        matches!(self, Step::Fault)
    }

    pub fn next(self) -> Option<S> {
        match self {
            Step::Fault => None,
            Step::Next(s) => Some(s),
        }
    }

    pub fn map<T>(self, f: impl FnOnce(S) -> T) -> Step<T> {
        match self {
            Step::Fault => Step::Fault,
            Step::Next(s) => Step::Next(f(s)),
        }
    }
}

/// Behaviour of a state of a system with termination: `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminationTime {
    Finite(usize),
    Infinite,
}

impl TerminationTime {
    /// The step of the final system with termination: `0 ↦ ↓`, `k ↦ k−1`, `∞ ↦ ∞`.
    pub fn step(self) -> Step<TerminationTime> {
        match self {
            TerminationTime::Finite(0) => Step::Fault,
            TerminationTime::Finite(k) => Step::Next(TerminationTime::Finite(k - 1)),
            TerminationTime::Infinite => Step::Next(TerminationTime::Infinite),
        }
    }
}

/// A finite system with termination `g : X → 1 + X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TSystem {
    step: Vec<Step<usize>>,
}

impl TSystem {
    pub fn new(step: Vec<Step<usize>>) -> Result<Self> {
        let n = step.len();
        for (state, s) in step.iter().enumerate() {
            if let Step::Next(target) = *s {
                if target >= n {
                    return Err(Error::DanglingTransition { state, target });
                }
            }
        }
        Ok(TSystem { step })
    }

    pub fn len(&self) -> usize {
        self.step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.step.is_empty()
    }

    pub fn step(&self, x: usize) -> Result<Step<usize>> {
        self.step.get(x).copied().ok_or(Error::UnknownState(x))
    }

    /// The Kleisli power `g⁽ᵏ⁾`, defined for `k ≥ 1`.
    pub fn iterate(&self, x: usize, k: usize) -> Result<Step<usize>> {
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let mut cur = self.step(x)?;
        for _ in 1..k {
            match cur {
                Step::Fault => break,
                Step::Next(y) => cur = self.step[y],
            }
        }
        Ok(cur)
    }

    /// `min{k | g⁽ᵏ⁺¹⁾x = ↓}`, or `∞` if the orbit of `x` never faults.
    pub fn anamorphism(&self, x: usize) -> Result<TerminationTime> {
        self.step(x)?;
        let mut seen = vec![false; self.len()];
        let mut cur = x;
        let mut k = 0;
        loop {
            seen[cur] = true;
            match self.step[cur] {
                Step::Fault => return Ok(TerminationTime::Finite(k)),
                Step::Next(y) if seen[y] => return Ok(TerminationTime::Infinite),
                Step::Next(y) => {
                    cur = y;
                    k += 1;
                }
            }
        }
    }
}

/// Whether `f` maps `g`-faults to `h`-faults and commutes with successors.
pub fn check_t_morphism(f: &[usize], g: &TSystem, h: &TSystem) -> bool {
    if f.len() != g.len() || f.iter().any(|&y| y >= h.len()) {
        return false;
    }
    (0..g.len()).all(|x| match (g.step[x], h.step[f[x]]) {
        (Step::Fault, Step::Fault) => true,
        (Step::Next(x1), Step::Next(y1)) => f[x1] == y1,
        _ => false,
    })
}

/// A finite system with output `σ = ⟨out, tr⟩ : X → Ntf × X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSystem {
    alphabet: Alphabet,
    out: Vec<Symbol>,
    tr: Vec<usize>,
}

impl SSystem {
    pub fn new(alphabet: Alphabet, out: Vec<Symbol>, tr: Vec<usize>) -> Result<Self> {
        if out.len() != tr.len() {
            return Err(Error::Format {
                what: "system",
                line: 0,
                message: format!("{} outputs for {} transitions", out.len(), tr.len()),
            });
        }
        for &s in &out {
            alphabet.check_symbol(s)?;
        }
        for (state, &target) in tr.iter().enumerate() {
            if target >= tr.len() {
                return Err(Error::DanglingTransition { state, target });
            }
        }
        Ok(SSystem { alphabet, out, tr })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.tr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tr.is_empty()
    }

    pub fn out(&self, x: usize) -> Symbol {
        self.out[x]
    }

    pub fn tr(&self, x: usize) -> usize {
        self.tr[x]
    }

    /// The observed stream `k ↦ out(trᵏ x)` as a lasso.
    pub fn anamorphism(&self, x: usize) -> Result<LassoStream> {
        if x >= self.len() {
            return Err(Error::UnknownState(x));
        }
        let mut first_visit = vec![usize::MAX; self.len()];
        let mut emitted = Vec::new();
        let mut cur = x;
        while first_visit[cur] == usize::MAX {
            first_visit[cur] = emitted.len();
            emitted.push(self.out[cur]);
            cur = self.tr[cur];
        }
        let loop_start = first_visit[cur];
        let period = Word::new(emitted.split_off(loop_start));
        LassoStream::new(Word::new(emitted), period)
    }
}

/// The system `[s]`: carrier is the set of suffixes of `s`, `out` is the head
/// and `tr` the shift. Returns the system and the state standing for `s`.
pub fn stream_system(alphabet: &Alphabet, s: &LassoStream) -> Result<(SSystem, usize)> {
    alphabet.check_word(s.prefix())?;
    alphabet.check_word(s.period())?;
    let n = s.suffix_count();
    let out = (0..n).map(|k| s.symbol_at(k)).collect();
    let tr = (0..n).map(|k| s.position(k + 1)).collect();
    Ok((SSystem::new(alphabet.clone(), out, tr)?, 0))
}

/// The suffix of `s` that state `k` of [`stream_system`] stands for.
pub fn stream_state_suffix(s: &LassoStream, k: usize) -> LassoStream {
    s.slice_from(k)
}

/// Whether `f` preserves outputs and commutes with transitions.
pub fn check_s_morphism(f: &[usize], sigma: &SSystem, tau: &SSystem) -> bool {
    if sigma.alphabet != tau.alphabet || f.len() != sigma.len() || f.iter().any(|&y| y >= tau.len())
    {
        return false;
    }
    (0..sigma.len()).all(|x| tau.out[f[x]] == sigma.out[x] && tau.tr[f[x]] == f[sigma.tr[x]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use Step::{Fault, Next};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let g = TSystem::new(vec![Fault]).unwrap();
        assert_eq!(g.iterate(0, 1), Ok(Fault));
        let chain = TSystem::new(vec![Next(1), Fault]).unwrap();
        assert_eq!(chain.iterate(0, 2), Ok(Fault));
        assert_eq!(chain.iterate(0, 1), Ok(Next(1)));
        let cycle = TSystem::new(vec![Next(1), Next(0)]).unwrap();
        assert_eq!(cycle.iterate(0, 5), Ok(Next(1)));
        assert_eq!(cycle.iterate(0, 0), Err(Error::ZeroPower));
        assert_eq!(cycle.iterate(7, 1), Err(Error::UnknownState(7)));
    }

    #[test]
    fn anamorphism_examples() {
        let g = TSystem::new(vec![Fault]).unwrap();
        assert_eq!(g.anamorphism(0), Ok(TerminationTime::Finite(0)));
        let chain = TSystem::new(vec![Next(1), Next(2), Fault]).unwrap();
        assert_eq!(chain.anamorphism(0), Ok(TerminationTime::Finite(2)));
        let cycle = TSystem::new(vec![Next(1), Next(0)]).unwrap();
        assert_eq!(cycle.anamorphism(0), Ok(TerminationTime::Infinite));
        assert!(TSystem::new(vec![Next(3)]).is_err());
    }

    #[test]
    fn termination_time_step() {
        assert_eq!(TerminationTime::Finite(0).step(), Fault);
        assert_eq!(
            TerminationTime::Finite(3).step(),
            Next(TerminationTime::Finite(2))
        );
        assert_eq!(
            TerminationTime::Infinite.step(),
            Next(TerminationTime::Infinite)
        );
    }

    #[test]
    fn s_anamorphism_examples() {
        let al = ab();
        let a = al.symbol("a").unwrap();
        let b = al.symbol("b").unwrap();
        let w = |t| al.parse_word(t).unwrap();

        let constant = SSystem::new(al.clone(), vec![a], vec![0]).unwrap();
        assert_eq!(
            constant.anamorphism(0).unwrap(),
            LassoStream::new(Word::empty(), w("a")).unwrap()
        );
        let tail = SSystem::new(al.clone(), vec![a, b], vec![1, 1]).unwrap();
        assert_eq!(
            tail.anamorphism(0).unwrap(),
            LassoStream::new(w("a"), w("b")).unwrap()
        );
        let cycle = SSystem::new(al.clone(), vec![a, b], vec![1, 0]).unwrap();
        assert_eq!(
            cycle.anamorphism(0).unwrap(),
            LassoStream::new(Word::empty(), w("a b")).unwrap()
        );
        assert_eq!(cycle.anamorphism(2), Err(Error::UnknownState(2)));
    }

    #[test]
    fn stream_system_examples() {
        let al = ab();
        let w = |t| al.parse_word(t).unwrap();
        let (sys, x) =
            stream_system(&al, &LassoStream::new(Word::empty(), w("a")).unwrap()).unwrap();
        assert_eq!((sys.len(), sys.tr(x)), (1, 0));
        assert_eq!(sys.out(x), al.symbol("a").unwrap());

        let (sys, _) = stream_system(&al, &LassoStream::new(w("a"), w("b")).unwrap()).unwrap();
        assert_eq!(sys.len(), 2);

        let (sys, x) =
            stream_system(&al, &LassoStream::new(Word::empty(), w("a b")).unwrap()).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.tr(sys.tr(x)), x);
    }

    #[test]
    fn morphism_checks() {
        let al = ab();
        let a = al.symbol("a").unwrap();
        let b = al.symbol("b").unwrap();
        // two a-states looping into a b-sink, collapsed onto one a-state
        let sigma = SSystem::new(al.clone(), vec![a, a, b], vec![1, 2, 2]).unwrap();
        let tau = SSystem::new(al.clone(), vec![a, a, b], vec![1, 2, 2]).unwrap();
        assert!(check_s_morphism(&[0, 1, 2], &sigma, &tau));
        let loop_a = SSystem::new(al.clone(), vec![a, a], vec![1, 0]).unwrap();
        let single = SSystem::new(al.clone(), vec![a], vec![0]).unwrap();
        assert!(check_s_morphism(&[0, 0], &loop_a, &single));
        let mismatch = SSystem::new(al, vec![b], vec![0]).unwrap();
        assert!(!check_s_morphism(&[0, 0], &loop_a, &mismatch));

        let g = TSystem::new(vec![Next(1), Next(2), Fault]).unwrap();
        assert!(check_t_morphism(&[0, 1, 2], &g, &g));
        let h = TSystem::new(vec![Next(1), Next(2), Fault]).unwrap();
        assert!(check_t_morphism(&[0, 1, 2], &g, &h));
        assert!(!check_t_morphism(&[1, 2, 0], &g, &h));
        let never = TSystem::new(vec![Next(0)]).unwrap();
        assert!(!check_t_morphism(&[0, 0, 0], &g, &never));
    }
}
