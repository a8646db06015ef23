use thiserror::Error;

use crate::diagram::{NodeId, Violation};
use crate::moves::MoveId;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiagramError {
    #[error("node {0} is not a classical crossing")]
    NotAClassicalCrossing(NodeId),
    #[error("operation needs a tangle but the diagram is closed")]
    ClosedDiagram,
    #[error("invalid diagram: {0}")]
    Invalid(Violation),
    #[error("boundary signatures differ: {0} vs {1}")]
    SignatureMismatch(String, String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MoveError {
    #[error("site is not a current match of {0}")]
    StaleSite(MoveId),
    #[error("applying {0} would disconnect the diagram")]
    Disconnects(MoveId),
    #[error("unknown move id {0:?}")]
    UnknownMoveId(String),
    #[error("moves.map does not label the {family} variant {codes}")]
    MappingIncomplete { family: String, codes: String },
    #[error("moves.map line {line}: {id} points at no enumerated variant")]
    MappingInconsistent { line: usize, id: String },
    #[error("moves.map line {line}: {message}")]
    MappingSyntax { line: usize, message: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DeriveError {
    #[error("boundary signatures differ between source and target")]
    SignatureMismatch,
    #[error("source has {crossings} crossings, above max_crossings {max}")]
    BoundsTooTight { crossings: usize, max: usize },
    #[error("unknown move id {0:?}")]
    UnknownMoveId(String),
    #[error("manifest line {line}: {message}")]
    ManifestSyntax { line: usize, message: String },
    #[error("certificate line {line}: {message}")]
    CertificateSyntax { line: usize, message: String },
    #[error("replay fails at step {step}: {reason}")]
    Replay { step: usize, reason: String },
    #[error("cannot expand certificate: {0}")]
    Splice(String),
    #[error(transparent)]
    Move(#[from] MoveError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GaussError {
    #[error("diagram is not closed")]
    NotClosed,
    #[error("diagram has more than one strand component")]
    MultiComponent,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TdfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("validation failed: {0}")]
    Validation(Violation),
}

