//! Reasoning core for TEL with next-time operators (written TEL^X below).
//!
//! TEL^X is a temporal extension of the description logic EL. Concept
//! inclusions may shift a concept by a fixed number of time steps
//! (`A ⊑ ○ⁿ B`), conjoin two concepts, or move along a role, and roles
//! are either *rigid* (time-invariant) or *local* (holding only at the
//! instant they are asserted).
//!
//! The crate is `no_std` (it needs `alloc`) and provides:
//!
//! * [`model`] — names, facts, normal-form concept inclusions, TBoxes and
//!   ABoxes, validation and fragment classification;
//! * [`text`] — the line-based text formats for TBoxes, ABoxes, grammars
//!   and words;
//! * [`derive`] — a bounded forward-chaining saturation engine with
//!   replayable derivation traces; it is the reference oracle for
//!   entailment;
//! * [`grammar`] — conjunctive grammars, normal forms and membership;
//! * [`translate`] — translations between TBoxes and grammars, and the
//!   two rigidisation procedures;
//! * [`taqa`] — temporal atomic query answering for the future fragment;
//! * [`semilinear`] — semilinear sets of integers and eventual
//!   periodicity;
//! * [`datalog`] — linear temporal Datalog programs: emission and bounded
//!   evaluation.
#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod datalog;
pub mod derive;
pub mod grammar;
pub mod model;
pub mod semilinear;
pub mod taqa;
pub mod text;
pub mod translate;

mod util;

pub use model::{
    ABox, ConceptInclusion, ConceptName, Fact, Fragment, Individual, KnowledgeBase, Rigidity,
    RoleName, TBox, Term,
};
