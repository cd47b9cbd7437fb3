//! Finite workbench for capacity-constrained colorings of edge-colored
//! forests.
//!
//! The objects of study are *copacetic structures*: a finite edge-colored
//! forest on sort `O` together with a parameter set `P`, where each
//! parameter assigns every vertex one of the edge colors, subject to
//! per-color capacity bounds on unit-ball boundaries. On top of the domain
//! types the crate provides:
//!
//! - verifiers for the structure axioms and the closed-substructure
//!   relation ([`axioms`]);
//! - the constructive coloring algorithms: extension over a path-closed
//!   domain, long-path interpolation between distant colored sets, and an
//!   exhaustive-search oracle ([`coloring`]);
//! - closure images and the closure operator ([`closure`]);
//! - structure-building constructions: closure-image addition, free
//!   amalgamation over a closed base, parameter introduction, budgeted
//!   completion, a seeded model forge, and the three-way amalgam
//!   ([`construct`]);
//! - an independence relation over closed sets with dependence witnesses,
//!   a qf-type equality oracle, inconsistency degrees, and certificates
//!   that the unique parameter type forks over the empty set
//!   ([`independence`]);
//! - a plain-text file format and seeded random instance generation
//!   ([`format`], [`generate`]).

pub mod axioms;
pub mod closure;
pub mod coloring;
pub mod construct;
mod error;
pub mod forest;
pub mod format;
pub mod generate;
pub mod independence;
pub mod structure;
pub mod variant;

pub use error::CoreError;
pub use forest::{Distance, Forest, VertexId};
pub use structure::{C4Coloring, Embedding, ParamId, Structure, StructureBuilder, SubsetHandle};
pub use variant::{Color, TheoryVariant};
