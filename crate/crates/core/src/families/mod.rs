//! Families of safety constraints that admit a universal detector: regular
//! (finite nondeterministic machines), decidable (a membership predicate)
//! and recursively enumerable (a word enumerator), plus the closure check
//! that decides whether an explicit family of finite sets is universal.

mod machine;
mod procedures;
mod universal;

pub use machine::{
    machine_derivative, machine_from_regular, machine_to_detector, prefix_free_kernel_of_machine,
    EilenbergMachine,
};
pub use procedures::{
    decidable_detector, re_detector, DecidableSet, DecisionProcedure, EnumeratedSet, Enumerator,
};
pub use universal::{
    check_universal_family, derivative_family, universal_detector_for, FamilyCheck,
};
