//! Verification and controller synthesis for timed automata under bounded
//! timed window parity objectives.
//!
//! The crate decides whether every time-divergent path of a timed automaton
//! satisfies a (generalized, direct or indirect) bounded window objective,
//! solves timed games with those objectives through a request-response
//! reduction and a fixed-point loop, and extracts finite-memory region
//! strategies that it can realize, simulate and monitor on concrete runs.
//!
//! See the guide under `book/` for a narrative tour; its code snippets are
//! compiled as doc-tests through the [`guide`] module.

pub mod fixtures;
pub mod model;
pub mod objective;
pub mod parity;
pub mod rational;
pub mod region;
pub mod semantics;
pub mod verify;
