//! Interpreter and verification lab for quantifier-free dynamic programs.
//!
//! A dynamic program keeps auxiliary relations (and, in the QF setting,
//! auxiliary functions) up to date while single tuples are inserted into or
//! deleted from an input database. Every update reads the old state only.
//!
//! The crate is organised bottom-up:
//!
//! * [`structure`] finite states, modifications, isomorphisms, atomic types
//! * [`formula`] quantifier-free formulas and update terms
//! * [`program`] update semantics, initialization and transforms
//! * [`dsl`] the `.dynp` program format and modification scripts
//! * [`queries`] brute-force oracles and graph reductions
//! * [`corpus`] the shipped example programs
//! * [`verify`] maintenance checking, substructure suites and attacks

pub mod corpus;
pub mod dsl;
pub mod error;
pub mod formula;
pub mod program;
pub mod queries;
pub mod serial;
pub mod structure;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use formula::{Formula, Term};
pub use program::{DynamicProgram, InitSpec, UpdateRule};
pub use structure::{Elem, ModKind, Modification, Role, Schema, State};
