//! Asynchronous cellular automata that simulate Turing machines.
//!
//! [`tm`] holds the reference machine semantics, [`aca`] the automaton
//! engine, [`constructions`] compiles a machine into a local rule and a
//! starting configuration, [`sequences`] generates updating sequences and
//! [`verifier`] co-runs both sides and checks the simulation conditions.

pub mod aca;
pub mod constructions;
pub mod export;
pub mod render;
pub mod sequences;
pub mod tm;
pub mod verifier;
