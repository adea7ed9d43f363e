//! Reactive synthesis with dependent outputs.
//!
//! The pipeline translates an LTL specification into a Büchi automaton, finds a
//! maximal set of outputs whose value is uniquely determined at every step, erases
//! them from the automaton, solves the remaining game through a parity automaton,
//! and finally rebuilds the erased outputs with a subset-construction circuit.
//!
//! This crate is `no_std` + `alloc`. File formats and the command-line driver live
//! in the `dvsynth` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod automata;
pub mod bdd;
pub mod clock;
pub mod controller;
pub mod dependency;
pub mod depsynth;
pub mod ltl;
pub mod nondep;
pub mod pipeline;
pub mod projection;
pub mod session;

pub use bdd::{Bdd, BddError, BddManager, BoolOp, VarId};
pub use clock::{Clock, NoClock};
pub use session::{Session, Vocab};
