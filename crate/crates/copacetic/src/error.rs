//! Error types shared across the crate.

use thiserror::Error;

use crate::axioms::ViolationReport;

/// Errors from domain-type construction and elementary forest geometry.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum CoreError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown param `{0}`")]
    UnknownParam(String),
    #[error("identifier `{0}` is not of the form [A-Za-z0-9_]+")]
    BadIdentifier(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate param `{0}`")]
    DuplicateParam(String),
    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: u8, k: u8 },
    #[error("self-edge at `{0}`")]
    SelfEdge(String),
    #[error("edge `{0}`-`{1}` already present")]
    DuplicateEdge(String, String),
    #[error("edge `{0}`-`{1}` would close a cycle")]
    WouldCycle(String, String),
    #[error("bad variant: {0}")]
    BadVariant(String),
    #[error("missing rho entry for param `{param}` vertex `{vertex}`")]
    MissingRho { param: String, vertex: String },
    #[error("structure is not copacetic:\n{0}")]
    NotCopacetic(ViolationReport),
    #[error("variant mismatch between structures")]
    VariantMismatch,
    #[error("embedding violation: {0}")]
    EmbeddingViolation(String),
}
