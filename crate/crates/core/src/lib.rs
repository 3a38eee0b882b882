//! Finite-scale verification of the Kurepa-tree duplicate space.
//!
//! Modules, bottom up:
//!
//! - [`tree`]: injective finite sequences, the extension order, antichains, fragments.
//! - [`tau`]: the descent sequence `τ(s,t)`, its length and `p(s,t)`.
//! - [`topology`]: the duplicate space, basic open sets and their basis axioms.
//! - [`separation`]: `G_δ`-diagonal families and ☆-sequences.
//! - [`game`]: the diagonalization game against candidate separating sequences.
//! - [`talagrand`]: finitely supported functions and the smooth Talagrand operator.
//! - [`generate`]: seeded random instances.
//! - [`suite`]: named verification suites producing JSON reports.

pub mod error;
pub mod game;
pub mod generate;
pub mod mutation;
pub mod separation;
pub mod suite;
pub mod talagrand;
pub mod tau;
pub mod topology;
pub mod tree;

pub use error::{Error, Result};
pub use tau::{PValue, TauSeq};
pub use topology::{BasicOpen, OpenSet, Point, Sign};
pub use tree::{Fragment, Node, NodeOrRoot};
