//! Runtime verification of safety constraints with detectors.
//!
//! A safety constraint is given by its set of minimal bad prefixes, a
//! prefix-free language `P`. A detector is a finite or infinite machine that
//! reads a trace one symbol at a time and faults exactly when the trace read
//! so far is in `P`. The crate covers finite detectors, the final detector
//! whose states are prefix-free sets, detectors built from automata,
//! predicates and enumerations, and monitors joining a system with a
//! detector.

pub mod bisim;
pub mod cli;
pub mod detector;
pub mod error;
pub mod families;
pub mod monitor;
pub mod sequences;
pub mod speclang;
pub mod systems;

pub use detector::{
    check_detector_morphism, detector_from_explicit_set, final_step, minimal_violation_words,
    DetectorHandle, FiniteDetector, PrefixFreeSet, Reaction, RegularPrefixFreeSet,
};
pub use error::{Error, Result};
pub use monitor::{join, monitor_lasso, monitor_online, MonitorVerdict, OnlineMonitor};
pub use sequences::{Alphabet, FiniteWordSet, LassoStream, Symbol, Word};
pub use systems::{SSystem, Step, TSystem, TerminationTime};
