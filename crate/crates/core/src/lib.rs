//! Distributed construction of quantum fingerprints.
//!
//! Two (or more) parties each hold an input and send one quantum message to a
//! referee, who projects the joint state onto basis pairs `|A>|B>` whose index
//! sets meet in exactly one element. The surviving register is close to the
//! fingerprint of the *sum* of the inputs, which the referee can then compare
//! with a SWAP test. This crate simulates those constructions exactly at desk
//! scale and provides the combinatorics, codes and group characters they use.
//!
//! Modules:
//!
//! - [`basis`]: colex-ordered subset bases and exact intersection probabilities.
//! - [`quantum`]: dense states, projections, partial traces, SWAP statistics.
//! - [`fingerprint`]: binary and character fingerprints, subset-phase messages.
//! - [`codes`]: binary linear codes with certified minimum distance.
//! - [`groups`]: finite Abelian groups and their characters.
//! - [`protocol`]: the end-to-end protocols and qubit accounting.

pub mod basis;
pub mod budget;
pub mod codes;
mod error;
pub mod fingerprint;
pub mod groups;
pub mod protocol;
pub mod quantum;
pub mod sampling;

pub use error::{Error, Result};
