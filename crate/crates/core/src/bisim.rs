//! Largest bisimulations between finite detectors and between finite
//! systems with output, computed by partition refinement on the disjoint
//! union of the two carriers.

use std::collections::HashMap;

use crate::detector::FiniteDetector;
use crate::error::{Error, Result};
use crate::systems::{SSystem, Step};

/// Pairs `(state of the left system, state of the right system)`, stored as
/// a dense `left × right` matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatePairRelation {
    right: usize,
    cells: Vec<bool>,
}

impl StatePairRelation {
    fn from_blocks(blocks: &[usize], left: usize) -> Self {
        let right = blocks.len() - left;
        let mut cells = Vec::with_capacity(left * right);
        for x in 0..left {
            for y in 0..right {
                cells.push(blocks[x] == blocks[left + y]);
            }
        }
        StatePairRelation { right, cells }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        y < self.right && self.cells.get(x * self.right + y).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| (i / self.right, i % self.right))
    }

    /// Reflexive, symmetric and transitive on `0..n`.
    pub fn is_equivalence_on(&self, n: usize) -> bool {
        let reflexive = (0..n).all(|x| self.contains(x, x));
        let symmetric = self.iter().all(|(x, y)| self.contains(y, x));
        let transitive = self.iter().all(|(x, y)| {
            self.iter()
                .filter(|&(y2, _)| y2 == y)
                .all(|(_, z)| self.contains(x, z))
        });
        reflexive && symmetric && transitive
    }
}

const FAULT: usize = usize::MAX;

/// Moore refinement on `0..n`. `succ` holds `width` successors per state
/// (`FAULT` for a fault); states start in the blocks of `initial` and are
/// split by the blocks of their successors until the partition is stable.
fn refine(initial: Vec<usize>, succ: &[usize], width: usize) -> Vec<usize> {
    let n = initial.len();
    let mut block = initial;
    let mut count = {
        let mut seen: Vec<usize> = block.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    let mut keys = vec![0; n * (width + 1)];
    loop {
        for x in 0..n {
            let key = &mut keys[x * (width + 1)..(x + 1) * (width + 1)];
            key[0] = block[x];
            for (k, &y) in succ[x * width..(x + 1) * width].iter().enumerate() {
                key[k + 1] = if y == FAULT { FAULT } else { block[y] };
            }
        }
        let mut ids: HashMap<&[usize], usize> = HashMap::with_capacity(n);
        let next: Vec<usize> = keys
            .chunks(width + 1)
            .map(|key| {
                let fresh = ids.len();
                *ids.entry(key).or_insert(fresh)
            })
            .collect();
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

/// Flat successor table of the disjoint union of `tables`.
fn detector_successors(tables: &[&[Vec<Step<usize>>]]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut off = 0;
    for table in tables {
        for row in table.iter() {
            out.extend(row.iter().map(|s| match s {
                Step::Fault => FAULT,
                Step::Next(y) => y + off,
            }));
        }
        off += table.len();
    }
    out
}

/// Violation-language classes of the states of one detector.
pub(crate) fn detector_blocks(a: &FiniteDetector) -> Vec<usize> {
    refine(
        vec![0; a.len()],
        &detector_successors(&[a.table()]),
        a.alphabet().len(),
    )
}

pub fn largest_detector_bisimulation(
    a: &FiniteDetector,
    b: &FiniteDetector,
) -> Result<StatePairRelation> {
    a.alphabet().ensure_same(b.alphabet())?;
    let succ = detector_successors(&[a.table(), b.table()]);
    let blocks = refine(vec![0; a.len() + b.len()], &succ, a.alphabet().len());
    Ok(StatePairRelation::from_blocks(&blocks, a.len()))
}

pub fn bisimilar(a: &FiniteDetector, x: usize, b: &FiniteDetector, y: usize) -> Result<bool> {
    a.check_state(x)?;
    b.check_state(y)?;
    Ok(largest_detector_bisimulation(a, b)?.contains(x, y))
}

pub fn largest_s_bisimulation(sigma: &SSystem, tau: &SSystem) -> Result<StatePairRelation> {
    sigma.alphabet().ensure_same(tau.alphabet())?;
    let off = sigma.len();
    let n = off + tau.len();
    let (out, tr): (Vec<usize>, Vec<usize>) = (0..n)
        .map(|x| {
            if x < off {
                (sigma.out(x).index(), sigma.tr(x))
            } else {
                (tau.out(x - off).index(), tau.tr(x - off) + off)
            }
        })
        .unzip();
    let blocks = refine(out, &tr, 1);
    Ok(StatePairRelation::from_blocks(&blocks, off))
}

/// Whether a relation satisfies the detector-bisimulation transfer
/// conditions; useful for checking hand-built relations.
pub fn is_detector_bisimulation(
    rel: &StatePairRelation,
    a: &FiniteDetector,
    b: &FiniteDetector,
) -> Result<bool> {
    a.alphabet().ensure_same(b.alphabet())?;
    for (x, y) in rel.iter() {
        if x >= a.len() || y >= b.len() {
            return Err(Error::UnknownState(x.max(y)));
        }
        for n in a.alphabet().symbols() {
            let ok = match (a.step_unchecked(x, n), b.step_unchecked(y, n)) {
                (Step::Fault, Step::Fault) => true,
                (Step::Next(x1), Step::Next(y1)) => rel.contains(x1, y1),
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
