//! Automaton groups: Mealy automata, their word problem, and reductions that
//! produce hard instances of it.

pub mod automaton;
pub mod backends;
pub mod commutator;
pub mod compressed;
pub mod decide;
pub mod error;
pub mod io;
pub mod slp;
pub mod tm_reduction;
pub mod turing;
pub mod uniform;

pub use automaton::{
    Alphabet, AutomatonBuilder, MealyAutomaton, RawAutomaton, SignedState, StateSequence, Word,
};
pub use decide::{Budget, Canonical, Decision, Triviality, Verdict};
pub use error::{Error, Result};
